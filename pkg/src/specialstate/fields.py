"""Magnetic field of a finite two-wire Stern-Gerlach surrogate, and the
order-of-magnitude estimates for a one-shot spin kick.

Geometry (SI units): the circuit lies in the plane ``z = 0``.  Straight wires
run along ``y`` from ``-L/2`` to ``L/2`` at ``x = +s`` and ``x = -s``;
semicircles of radius ``s`` close the loop beyond each end.  A positive
current circulates clockwise seen from ``+z``: along ``-y`` on the ``x = +s``
wire and along ``+y`` on the ``x = -s`` wire.  Atoms fly along ``+y`` at height ``z > 0``, normally
in the plane ``x = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants, optimize

from .errors import SingularityError, ValidationError

MU0 = 4e-7 * math.pi
HBAR = constants.hbar
BOHR_MAGNETON = constants.physical_constants["Bohr magneton"][0]
ELECTRON_VOLT = constants.electron_volt

PIECES = ("T", "R", "B", "L")


@dataclass(frozen=True)
class WireLoop:
    s: float
    L: float
    I: float
    mu0: float = MU0

    def __post_init__(self):
        if not (self.s > 0 and self.L > 0):
            raise ValidationError("s and L must be positive")
        if self.I == 0 or not math.isfinite(self.I):
            raise ValidationError("current I must be finite and non-zero")

    @property
    def prefactor(self) -> float:
        """``mu0 I / 4 pi``."""
        return self.mu0 * self.I / (4 * math.pi)


@dataclass(frozen=True)
class Trajectory:
    z: float
    y_grid: np.ndarray
    x: float = 0.0

    def __post_init__(self):
        y = np.asarray(self.y_grid, dtype=float)
        if not self.z > 0:
            raise ValidationError("trajectory height z must be positive")
        if y.size > 1 and np.any(np.diff(y) <= 0):
            raise ValidationError("y_grid must be ascending")
        object.__setattr__(self, "y_grid", y)


@dataclass(frozen=True)
class FieldSample:
    position: tuple
    B: np.ndarray
    dBdx: np.ndarray | None = None


def _check_height(z):
    if not z > 0:
        raise ValidationError("observation height z must be positive")


# --- closed forms ---------------------------------------------------------

def straight_wire_field(loop: WireLoop, y: float, z: float) -> np.ndarray:
    """Field of the two straight wires at ``(0, y, z)``; only ``B_z`` survives.

    ``B_z = (mu0/4pi) (-2 I s / b^2) (sin t2 - sin t1)`` with ``b^2 = s^2 + z^2``
    and ``tan t2,1 = (-y +- L/2) / b``.
    """
    _check_height(z)
    b2 = loop.s**2 + z**2
    lp, lm = loop.L / 2 - y, -loop.L / 2 - y
    sin2 = lp / math.sqrt(b2 + lp * lp)
    sin1 = lm / math.sqrt(b2 + lm * lm)
    return np.array([0.0, 0.0, loop.prefactor * (-2 * loop.s / b2) * (sin2 - sin1)])


def _A(lam: float, b2: float) -> float:
    return lam * (2 * lam * lam + 3 * b2) / (b2 * b2 * (lam * lam + b2) ** 1.5)


def straight_wire_gradient_x(loop: WireLoop, y: float, z: float) -> np.ndarray:
    """``dB/dx`` of the straight wires at ``x = 0``; only the ``x`` component survives.

    ``-(mu0 I / 4pi) 2 s z [A(L/2 - y) - A(-L/2 - y)]`` with
    ``A(l) = l (2 l^2 + 3 b^2) / (b^4 (l^2 + b^2)^(3/2))``.
    """
    _check_height(z)
    b2 = loop.s**2 + z**2
    diff = _A(loop.L / 2 - y, b2) - _A(-loop.L / 2 - y, b2)
    return np.array([-loop.prefactor * 2 * loop.s * z * diff, 0.0, 0.0])


def semicircle_bx(loop: WireLoop, y_bar: float, z: float) -> float:
    """Reference closed form for ``B_x`` of the entry semicircle at ``x = 0``.

    ``(mu0 I / pi) [1/sqrt(y_bar^2 + s^2 + z^2) - 1/sqrt((y_bar + s)^2 + z^2)]``
    with ``y_bar = y + L/2``.  Mirror symmetry in ``x`` makes the true
    Biot-Savart ``B_x`` vanish on ``x = 0`` (see :func:`biot_savart_quadrature`),
    so this expression is kept as the reference formula, not as a field the
    contour produces.
    """
    _check_height(z)
    s = loop.s
    return 4 * loop.prefactor * (
        1 / math.sqrt(y_bar**2 + s**2 + z**2) - 1 / math.sqrt((y_bar + s) ** 2 + z**2)
    )


def semicircle_contributions(loop: WireLoop, y: float, z: float) -> tuple[float, float]:
    """Closed-form ``B_x`` of the entry (left) and exit (right) semicircles at ``(0, y, z)``.

    The exit semicircle is the mirror image of the entry one, evaluated at
    ``L/2 - y``.  Reported separately so the far contribution can be checked
    against the one-semicircle-at-a-time assumption.
    """
    return (semicircle_bx(loop, y + loop.L / 2, z), semicircle_bx(loop, loop.L / 2 - y, z))


def bracket(y_over_z, s_over_z):
    """``4/sqrt(Y^2 + S^2 + 1) - 4/sqrt((Y + S)^2 + 1)``: ``B_Lx`` in units of ``mu0 I / (4 pi z)``."""
    Y, S = np.asarray(y_over_z, dtype=float), np.asarray(s_over_z, dtype=float)
    return 4 / np.sqrt(Y * Y + S * S + 1) - 4 / np.sqrt((Y + S) ** 2 + 1)


def _bracket_max_over_y(S: float, y_span: float = 50.0) -> tuple[float, float]:
    Y = np.linspace(-y_span, y_span, 20001)
    vals = bracket(Y, S)
    i = int(np.argmax(vals))
    lo, hi = Y[max(i - 1, 0)], Y[min(i + 1, Y.size - 1)]
    res = optimize.minimize_scalar(lambda y: -float(bracket(y, S)), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def bracket_maximum(s_over_z_grid, *, refine: bool = True) -> tuple[float, float]:
    """Maximise :func:`bracket` jointly over ``y_bar/z`` and ``s/z``.

    ``y_bar/z`` is optimised continuously for each grid value of ``s/z``; with
    ``refine`` the best ``s/z`` is then polished between its grid neighbours.
    Returns ``(s_over_z_star, bracket_max)``.
    """
    S = np.asarray(s_over_z_grid, dtype=float)
    if S.ndim != 1 or S.size == 0 or np.any(S <= 0):
        raise ValidationError("s/z grid must be a non-empty vector of positive values")
    best = np.array([_bracket_max_over_y(si)[1] for si in S])
    i = int(np.argmax(best))
    s_star, v_star = float(S[i]), float(best[i])
    if refine and S.size >= 3 and 0 < i < S.size - 1:
        res = optimize.minimize_scalar(lambda si: -_bracket_max_over_y(si)[1],
                                       bounds=(S[i - 1], S[i + 1]), method="bounded",
                                       options={"xatol": 1e-10})
        if -res.fun >= v_star:
            s_star, v_star = float(res.x), float(-res.fun)
    return s_star, v_star


def external_internal_ratio(s_over_z: float) -> float:
    """Peak entry-semicircle ``B_x`` (closed form) over the mid-magnet ``|B_z|`` for ``L -> inf``."""
    S = float(s_over_z)
    inside = 4 * S / (S * S + 1)
    return _bracket_max_over_y(S)[1] / inside


# --- full contour quadrature ---------------------------------------------

def _piece_nodes(loop: WireLoop, piece: str, n: int):
    """Nodes ``r``, tangent vectors along the current and Simpson weights for one piece."""
    if n % 2:
        n += 1
    s, half = loop.s, loop.L / 2
    w = np.ones(n + 1)
    w[1:-1:2], w[2:-1:2] = 4, 2
    if piece in ("T", "B"):
        u = np.linspace(-half, half, n + 1)
        h = loop.L / n
        sign = 1.0 if piece == "T" else -1.0
        r = np.column_stack([np.full_like(u, sign * s), u, np.zeros_like(u)])
        dr = np.tile([0.0, -sign, 0.0], (u.size, 1))
    elif piece in ("R", "L"):
        u = np.linspace(0.0, math.pi, n + 1)
        h = math.pi / n
        c, sn = np.cos(u), np.sin(u)
        # R runs from (-s, L/2) to (+s, L/2); L from (+s, -L/2) to (-s, -L/2)
        if piece == "R":
            r = np.column_stack([-s * c, half + s * sn, np.zeros_like(u)])
            dr = np.column_stack([s * sn, s * c, np.zeros_like(u)])
        else:
            r = np.column_stack([s * c, -half - s * sn, np.zeros_like(u)])
            dr = np.column_stack([-s * sn, -s * c, np.zeros_like(u)])
    else:
        raise ValidationError(f"unknown contour piece {piece!r}")
    return r, dr, w * h / 3


def distance_to_loop(loop: WireLoop, R) -> float:
    X, Y, Z = (float(v) for v in R)
    s, half = loop.s, loop.L / 2
    yc = min(max(Y, -half), half)
    d = min(math.hypot(X - s, Y - yc, Z), math.hypot(X + s, Y - yc, Z))
    for yc_end, side in ((half, 1.0), (-half, -1.0)):
        if side * (Y - yc_end) >= 0:
            rho = math.hypot(X, Y - yc_end)
            d = min(d, math.hypot(rho - s, Z))
    return d


def _quadrature(loop: WireLoop, R, n_nodes: int, pieces, gradient: bool) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3,):
        raise ValidationError("R must be a 3-vector")
    if n_nodes < 2:
        raise ValidationError("n_nodes must be >= 2")
    if distance_to_loop(loop, R) < 1e-9 * loop.s:
        raise SingularityError(f"observation point {tuple(R)} lies on the current loop")
    total = np.zeros(3)
    for piece in pieces:
        r, dr, wts = _piece_nodes(loop, piece, n_nodes)
        d = R - r
        dist = np.sqrt(np.sum(d * d, axis=1))
        cr = np.cross(dr, d)
        if gradient:
            ex = np.cross(dr, np.array([1.0, 0.0, 0.0]))
            integrand = ex / dist[:, None] ** 3 - 3 * cr * (d[:, :1] / dist[:, None] ** 5)
        else:
            integrand = cr / dist[:, None] ** 3
        total += wts @ integrand
    return loop.prefactor * total


def biot_savart_quadrature(loop: WireLoop, R, n_nodes: int = 10_000, *,
                           pieces=PIECES) -> np.ndarray:
    """``(mu0 I / 4pi) sum_pieces int dl x (R - r) / |R - r|^3`` by composite Simpson.

    ``n_nodes`` intervals per piece (rounded up to even).  ``pieces`` selects
    any of ``T`` (x=+s wire), ``R`` (exit semicircle), ``B`` (x=-s wire) and
    ``L`` (entry semicircle).
    """
    return _quadrature(loop, R, n_nodes, pieces, gradient=False)


def biot_savart_gradient_x(loop: WireLoop, R, n_nodes: int = 10_000, *,
                           pieces=PIECES) -> np.ndarray:
    """``dB/dx`` at ``R``, integrating the x-derivative of the Biot-Savart kernel."""
    return _quadrature(loop, R, n_nodes, pieces, gradient=True)


def field_profile(loop: WireLoop, traj: Trajectory, n_nodes: int = 10_000) -> list[FieldSample]:
    out = []
    for y in traj.y_grid:
        R = (traj.x, float(y), traj.z)
        out.append(FieldSample(R, biot_savart_quadrature(loop, R, n_nodes),
                               biot_savart_gradient_x(loop, R, n_nodes)))
    return out


# --- kick-size estimates --------------------------------------------------

@dataclass(frozen=True)
class KickEstimate:
    delta_t: float          # s
    B_required: float       # T
    E_field: float          # V/m, E ~ L B / delta_t
    photon_energy: float    # eV
    E_field_velocity: float # V/m, E ~ v B delta_t / L
    length: float           # m
    velocity: float         # m/s

    @property
    def B_delta_t(self) -> float:
        return self.B_required * self.delta_t

    def lines(self) -> list[str]:
        return [f"{k}={v!r}" for k, v in (
            ("delta_t_s", self.delta_t), ("B_required_T", self.B_required),
            ("B_delta_t_Ts", self.B_delta_t), ("hbar_over_muB_Ts", HBAR / BOHR_MAGNETON),
            ("E_field_V_per_m", self.E_field), ("E_field_velocity_V_per_m", self.E_field_velocity),
            ("photon_energy_eV", self.photon_energy), ("length_m", self.length),
            ("velocity_m_per_s", self.velocity),
        )]


def kick_estimates(delta_t: float, *, length: float = 0.1, velocity: float = 1e3) -> KickEstimate:
    """Field, electric field and photon energy for a unit kick lasting ``delta_t``.

    A kick of order one needs ``mu_B B delta_t / hbar = 1``, so
    ``B delta_t = hbar / mu_B``.  The photon energy is ``hbar / delta_t``.  The
    induced electric field is ``L B / delta_t`` (spatial scale ``length``), or
    ``v B delta_t / L`` when the time scale is set by the flight speed.
    """
    if not delta_t > 0:
        raise ValidationError("delta_t must be positive")
    if not (length > 0 and velocity > 0):
        raise ValidationError("length and velocity must be positive")
    B = HBAR / (BOHR_MAGNETON * delta_t)
    return KickEstimate(
        delta_t=delta_t,
        B_required=B,
        E_field=length * B / delta_t,
        photon_energy=HBAR / delta_t / ELECTRON_VOLT,
        E_field_velocity=velocity * B * delta_t / length,
        length=length,
        velocity=velocity,
    )

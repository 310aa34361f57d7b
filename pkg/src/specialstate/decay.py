"""Level-plus-band decay model: Hamiltonian, propagation and survival curves.

Natural units with hbar = 1.  The Hamiltonian couples ``n`` initially excited
levels (energies ``omega``) to a quasi-continuum of ``N`` band levels
(energies ``Omega``) through the ``n x N`` matrix ``phi``::

    H = [[diag(omega), phi     ],
         [phi^dagger,  diag(Omega)]]
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ._parallel import map_chunks
from .errors import NumericError, PreconditionError, ValidationError

NORM_TOL = 1e-12


@dataclass(frozen=True)
class DecayModel:
    omega: np.ndarray
    phi: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        Omega = np.atleast_1d(np.asarray(self.Omega, dtype=float))
        phi = np.asarray(self.phi, dtype=complex)
        if phi.ndim == 1:
            phi = phi[np.newaxis, :]
        if omega.ndim != 1 or Omega.ndim != 1 or phi.ndim != 2:
            raise ValidationError("omega and Omega must be vectors, phi a matrix")
        if phi.shape != (omega.size, Omega.size):
            raise ValidationError(
                f"phi has shape {phi.shape}, expected ({omega.size}, {Omega.size})"
            )
        if omega.size < 1 or Omega.size < 1:
            raise ValidationError("need n >= 1 excited levels and N >= 1 band levels")
        for name, arr in (("omega", omega), ("Omega", Omega), ("phi", phi)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} has non-finite entries")
        if omega.size > 1 and Omega.size < 10 * omega.size:
            warnings.warn(
                f"band of N={Omega.size} levels is not much larger than n={omega.size}",
                stacklevel=3,
            )
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "Omega", Omega)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.omega.size

    @property
    def N(self) -> int:
        return self.Omega.size

    @property
    def dim(self) -> int:
        return self.n + self.N


@dataclass(frozen=True)
class SurvivalCurve:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValidationError("times and values must be equal-length vectors")
        if t.size > 1 and np.any(np.diff(t) < 0):
            raise ValidationError("times must be ascending")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def at(self, t: float) -> float:
        idx = np.flatnonzero(self.times == t)
        if idx.size == 0:
            raise KeyError(t)
        return float(self.values[idx[0]])


def assemble_hamiltonian(model: DecayModel) -> np.ndarray:
    """Hermitian ``(n+N) x (n+N)`` matrix; the lower block mirrors the upper."""
    n, dim = model.n, model.dim
    H = np.zeros((dim, dim), dtype=complex)
    H[np.arange(n), np.arange(n)] = model.omega
    H[np.arange(n, dim), np.arange(n, dim)] = model.Omega
    H[:n, n:] = model.phi
    H[n:, :n] = model.phi.conj().T
    return H


def normalized(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0 or not np.isfinite(nrm):
        raise ValidationError("state has zero or non-finite norm")
    return psi / nrm


def _check_state(psi, dim: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dim,):
        raise ValidationError(f"state has shape {psi.shape}, expected ({dim},)")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise PreconditionError("state is not normalized")
    return psi


class SpectralPropagator:
    """``exp(-iHt)`` through a cached eigendecomposition of ``H``."""

    def __init__(self, H):
        H = np.asarray(H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValidationError("H must be square")
        if not np.all(np.isfinite(H)):
            raise NumericError("H has non-finite entries")
        try:
            w, V = linalg.eigh(H)
        except linalg.LinAlgError as exc:
            raise NumericError(f"eigendecomposition failed: {exc}") from exc
        self.H = H
        self.energies = w
        self.vectors = V

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def evolve(self, psi, t: float) -> np.ndarray:
        if not np.isfinite(t):
            raise ValidationError("t must be finite")
        coeffs = self.vectors.conj().T @ psi
        return self.vectors @ (np.exp(-1j * self.energies * t) * coeffs)

    def matrix(self, t: float) -> np.ndarray:
        V = self.vectors
        return (V * np.exp(-1j * self.energies * t)) @ V.conj().T

    def block(self, n: int, t: float) -> np.ndarray:
        """Upper-left ``n x n`` block of ``exp(-iHt)``."""
        Vn = self.vectors[:n]
        return (Vn * np.exp(-1j * self.energies * t)) @ Vn.conj().T

    def projected_amplitudes(self, psi, n: int, times) -> np.ndarray:
        """Rows: first ``n`` components of ``exp(-iHt) psi`` for each ``t``."""
        times = np.asarray(times, dtype=float)
        coeffs = self.vectors.conj().T @ psi
        phases = np.exp(-1j * np.outer(times, self.energies))
        out = (phases * coeffs) @ self.vectors[:n].T
        # the propagator is exactly the identity at t = 0
        out[times == 0] = np.asarray(psi)[:n]
        return out


def propagate(H, psi0, t: float) -> np.ndarray:
    """``exp(-iHt) psi0`` via spectral decomposition of ``H``."""
    prop = SpectralPropagator(H)
    psi0 = _check_state(psi0, prop.dim)
    if t == 0:
        return psi0.copy()
    return prop.evolve(psi0, t)


def survival_curve(model: DecayModel, psi0, time_grid, *, workers: int = 1,
                   propagator: SpectralPropagator | None = None) -> SurvivalCurve:
    """Probability of remaining in the excited subspace, ``|P exp(-iHt) psi0|^2``.

    ``psi0`` must lie in the span of the first ``n`` coordinates.
    """
    psi0 = _check_state(psi0, model.dim)
    if np.linalg.norm(psi0[model.n:]) > NORM_TOL:
        raise PreconditionError("initial state has weight outside the undecayed subspace")
    times = np.asarray(time_grid, dtype=float)
    prop = propagator or SpectralPropagator(assemble_hamiltonian(model))

    def chunk(sl):
        amps = prop.projected_amplitudes(psi0, model.n, times[sl])
        return np.sum(amps.real**2 + amps.imag**2, axis=1)

    parts = map_chunks(chunk, times.size, workers)
    values = np.concatenate(parts) if parts else np.zeros(0)
    return SurvivalCurve(times, values)


def zeno_time(H, psi) -> float:
    """``1 / sqrt(<H^2> - <H>^2)``; ``inf`` when the energy spread vanishes.

    The variance is evaluated as ``||(H - <H>) psi||^2``.  Spreads below
    ``64 * eps * ||H||`` count as zero, so eigenvectors returned by a
    floating-point eigensolver map to the infinite sentinel.
    """
    H = np.asarray(H, dtype=complex)
    psi = _check_state(psi, H.shape[0])
    Hpsi = H @ psi
    mean = np.vdot(psi, Hpsi).real
    spread = np.linalg.norm(Hpsi - mean * psi)
    scale = max(1.0, np.linalg.norm(H, 2))
    if spread <= 64 * np.finfo(float).eps * scale:
        return float("inf")
    return float(1.0 / spread)


def excited_state(model: DecayModel, level: int = 0) -> np.ndarray:
    psi = np.zeros(model.dim, dtype=complex)
    psi[level] = 1.0
    return psi


def band_spacing(model: DecayModel) -> float:
    """Mean level spacing of the band."""
    if model.N < 2:
        raise ValidationError("band spacing needs N >= 2")
    return float((model.Omega.max() - model.Omega.min()) / (model.N - 1))


def recurrence_time(model: DecayModel) -> float:
    """``2 pi / spacing``: revival period of an equally spaced band."""
    return 2 * np.pi / band_spacing(model)


def golden_rule_rate(model: DecayModel, level: int = 0) -> float:
    """Fermi golden-rule decay rate ``2 pi <|phi|^2> rho`` with ``rho = 1/spacing``."""
    mean_sq = float(np.mean(np.abs(model.phi[level]) ** 2))
    return 2 * np.pi * mean_sq / band_spacing(model)


def canonical_model(N: int = 100, *, recurrence: float = 300.0, zeno: float = 7.0,
                    omega: float = 0.0) -> DecayModel:
    """Single level centred in an equally spaced band with constant real coupling.

    The spacing is ``2 pi / recurrence`` and the constant coupling is chosen so
    that ``sum_k phi_k^2 = 1 / zeno^2``, which fixes the Zeno time of the
    excited level.
    """
    if N < 2 or recurrence <= 0 or zeno <= 0:
        raise ValidationError("need N >= 2 and positive recurrence and zeno times")
    spacing = 2 * np.pi / recurrence
    Omega = (np.arange(N) - (N - 1) / 2) * spacing
    g = 1.0 / (zeno * np.sqrt(N))
    if not (np.all(np.isfinite(Omega)) and np.isfinite(g)):
        raise NumericError("band energies or coupling overflowed")
    return DecayModel(omega=np.array([omega]), phi=np.full((1, N), g), Omega=Omega)


@dataclass
class DecayDiagnostics:
    zeno_time: float
    golden_rule_slope: float
    recurrence_time: float
    fitted_zeno_time: float = float("nan")
    fitted_slope: float = float("nan")
    loglinear_rms_residual: float = float("nan")
    recurrence_peak_time: float = float("nan")
    recurrence_peak_value: float = float("nan")
    windows: dict = field(default_factory=dict)


def fit_zeno_time(curve: SurvivalCurve, t_max: float) -> float:
    """Least-squares fit of ``1 - S = (t / tau)^2`` on ``0 <= t <= t_max``."""
    m = (curve.times >= 0) & (curve.times <= t_max)
    t2 = curve.times[m] ** 2
    if np.count_nonzero(t2) < 2:
        raise ValidationError("too few points for the quadratic fit")
    k = np.dot(t2, 1 - curve.values[m]) / np.dot(t2, t2)
    return float(1 / np.sqrt(k)) if k > 0 else float("inf")


def fit_loglinear(curve: SurvivalCurve, t_lo: float, t_hi: float) -> tuple[float, float]:
    """Slope of ``log S`` over ``[t_lo, t_hi]`` and the RMS log residual."""
    m = (curve.times >= t_lo) & (curve.times <= t_hi) & (curve.values > 0)
    if np.count_nonzero(m) < 3:
        raise ValidationError("too few points for the log-linear fit")
    t, logS = curve.times[m], np.log(curve.values[m])
    slope, icept = np.polyfit(t, logS, 1)
    resid = logS - (slope * t + icept)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


def recurrence_peak(curve: SurvivalCurve, t_lo: float, t_hi: float) -> tuple[float, float]:
    m = (curve.times >= t_lo) & (curve.times <= t_hi)
    if not np.any(m):
        raise ValidationError("recurrence window contains no grid points")
    i = np.argmax(curve.values[m])
    return float(curve.times[m][i]), float(curve.values[m][i])


def diagnose(model: DecayModel, curve: SurvivalCurve, level: int = 0) -> DecayDiagnostics:
    """Zeno, golden-rule and recurrence diagnostics for a single-level decay curve.

    Fit windows: quadratic law on ``[0, tau/10]``; log-linear on
    ``[4 tau, T_rec / 2]``; recurrence peak searched on ``[0.9, 1.5] * T_rec``.
    """
    H = assemble_hamiltonian(model)
    tau = zeno_time(H, excited_state(model, level))
    rate = golden_rule_rate(model, level)
    t_rec = recurrence_time(model)
    diag = DecayDiagnostics(zeno_time=tau, golden_rule_slope=-rate, recurrence_time=t_rec)
    windows = {
        "zeno_fit": (0.0, tau / 10),
        "loglinear": (4 * tau, t_rec / 2),
        "recurrence": (0.9 * t_rec, 1.5 * t_rec),
    }
    diag.windows = windows
    try:
        diag.fitted_zeno_time = fit_zeno_time(curve, windows["zeno_fit"][1])
    except ValidationError:
        pass
    try:
        diag.fitted_slope, diag.loglinear_rms_residual = fit_loglinear(curve, *windows["loglinear"])
    except ValidationError:
        pass
    try:
        diag.recurrence_peak_time, diag.recurrence_peak_value = recurrence_peak(
            curve, *windows["recurrence"]
        )
    except ValidationError:
        pass
    return diag

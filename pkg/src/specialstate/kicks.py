"""Cauchy-distributed spin kicks and the outcome statistics they produce.

A spin prepared at angle ``theta`` (state ``(cos theta/2, i sin theta/2)``)
receives a kick ``exp(i phi sigma_x)`` drawn from the Cauchy density
``C_a(phi) = (a/pi) / (phi^2 + a^2)``.  It ends UP when ``theta/2 + phi`` is
a multiple of ``pi`` and DOWN when it is an odd multiple of ``pi/2``.
Summing the density over those branches gives the outcome weights.  Several
of the series involved converge only conditionally; they are always summed
with ``+n`` and ``-n`` terms paired.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import optimize, special, stats

from .errors import ValidationError
from .rng import substream

UP, DOWN = "UP", "DOWN"


def _check_scale(a):
    if not np.all(np.asarray(a) > 0):
        raise ValidationError("Cauchy scale a must be positive")


def cauchy_pdf(a: float, x):
    _check_scale(a)
    x = np.asarray(x, dtype=float)
    return (a / np.pi) / (x * x + a * a)


def cauchy_cdf(a: float, x):
    _check_scale(a)
    return 0.5 + np.arctan(np.asarray(x, dtype=float) / a) / np.pi


def cauchy_from_uniform(a: float, u):
    """Inverse CDF, ``a tan(pi (u - 1/2))``."""
    _check_scale(a)
    return a * np.tan(np.pi * (np.asarray(u, dtype=float) - 0.5))


def sample_cauchy(a: float, rng: np.random.Generator, size=None):
    return cauchy_from_uniform(a, rng.random(size))


# --- wrapped sums --------------------------------------------------------

def _reduce_half_period(psi):
    """Shift ``psi`` by a multiple of pi into ``[-pi/2, pi/2]``."""
    psi = np.asarray(psi, dtype=float)
    return psi - np.pi * np.round(psi / np.pi)


def wrapped_sum_closed(a: float, psi):
    """``F_a(psi) = sum_n (a/pi) / (a^2 + (n pi - psi)^2)`` in closed form.

    From the imaginary part of ``cot(psi + ia)``:
    ``(1/pi) tanh a / (tanh^2 a cos^2 psi + sin^2 psi)``.
    """
    _check_scale(a)
    psi = np.asarray(psi, dtype=float)
    t = math.tanh(a)
    return (t / np.pi) / (t * t * np.cos(psi) ** 2 + np.sin(psi) ** 2)


def _paired_sum(pair_terms: np.ndarray) -> float:
    # smallest terms (largest |n|) first
    return float(np.sum(pair_terms[::-1]))


def wrapped_sum_numeric(a: float, psi: float, n_max: int = 10_000, *, tail: bool = True) -> float:
    """Symmetric partial sum of ``F_a(psi)`` over ``|n| <= n_max``.

    ``tail`` adds the remainder of the ``a = 0`` series,
    ``(a/pi^3) [trigamma(M+1-psi/pi) + trigamma(M+1+psi/pi)]``, which leaves an
    error of order ``a^3 / n_max^3``.  Without it the truncation error is
    about ``2a / (pi^3 n_max)``.
    """
    _check_scale(a)
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    psi = float(_reduce_half_period(psi))
    n = np.arange(1, n_max + 1) * np.pi
    a2 = a * a
    pairs = 1.0 / (a2 + (n - psi) ** 2) + 1.0 / (a2 + (n + psi) ** 2)
    total = 1.0 / (a2 + psi * psi) + _paired_sum(pairs)
    if tail:
        r = psi / np.pi
        total += (special.polygamma(1, n_max + 1 - r) + special.polygamma(1, n_max + 1 + r)) / np.pi**2
    return float(a / np.pi * total)


def wrapped_cauchy(a: float, theta):
    """``sum_k C_a(theta + 2 pi k)``, the Cauchy density wrapped onto the circle.

    Equals ``sinh a / (2 pi (cosh a - cos theta))``; the denominator is
    evaluated as ``2 sinh^2(a/2) + 2 sin^2(theta/2)`` to avoid cancellation.
    """
    _check_scale(a)
    theta = np.asarray(theta, dtype=float)
    sh = math.sinh(a / 2)
    return math.sinh(a) / (4 * np.pi * (sh * sh + np.sin(theta / 2) ** 2))


# --- outcome probabilities ----------------------------------------------

@dataclass(frozen=True)
class KickModel:
    a: float
    theta: float
    n_max: int = 1_000_000

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError("Cauchy scale a must be positive")
        if not 0 <= self.theta <= np.pi:
            raise ValidationError("entry angle theta must lie in [0, pi]")
        if self.n_max < 1:
            raise ValidationError("n_max must be >= 1")


@dataclass(frozen=True)
class OutcomeProbabilities:
    p_up: float
    p_down: float
    z: float

    @property
    def ratio(self) -> float:
        return self.p_down / self.p_up if self.p_up > 0 else math.inf


def outcome_probabilities(model: KickModel, *, born_limit: bool = False) -> OutcomeProbabilities:
    """``Pr(UP) = F(theta/2) / Z`` and ``Pr(DOWN) = F((theta - pi)/2) / Z``.

    By default ``F`` is the exact closed form at finite ``a``.  With
    ``born_limit=True`` the small-``a`` forms are used:
    ``Z = (4a/pi) / sin^2 theta`` and probabilities ``cos^2(theta/2)``,
    ``sin^2(theta/2)``; at ``theta = 0`` or ``pi`` these are taken as limits
    (``Z = inf``) rather than by dividing by ``sin^2 theta``.
    """
    a, theta = model.a, model.theta
    if born_limit:
        if theta == 0:
            return OutcomeProbabilities(1.0, 0.0, math.inf)
        if theta == math.pi:
            return OutcomeProbabilities(0.0, 1.0, math.inf)
        z = 4 * a / (math.pi * math.sin(theta) ** 2)
        return OutcomeProbabilities(math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2, z)
    f_up = float(wrapped_sum_closed(a, theta / 2))
    f_down = float(wrapped_sum_closed(a, (theta - math.pi) / 2))
    z = f_up + f_down
    return OutcomeProbabilities(f_up / z, f_down / z, z)


# --- conditional kick expectations --------------------------------------

def kick_series(a: float, psi: float, n_max: int = 1_000_000, *, tail: bool = True) -> float:
    """``sum_n (n pi - psi) / (a^2 + (n pi - psi)^2)`` with ``+-n`` paired.

    Only conditionally convergent.  ``tail`` adds the ``a = 0`` remainder
    ``(1/pi) [digamma(M+1+psi/pi) - digamma(M+1-psi/pi)]``.
    """
    _check_scale(a)
    psi = float(psi)
    n = np.arange(1, n_max + 1) * np.pi
    a2 = a * a
    up, dn = n - psi, -n - psi
    pairs = up / (a2 + up * up) + dn / (a2 + dn * dn)
    total = -psi / (a2 + psi * psi) + _paired_sum(pairs)
    if tail:
        r = psi / np.pi
        total += (special.digamma(n_max + 1 + r) - special.digamma(n_max + 1 - r)) / np.pi
    return float(total)


def expectation_closed(theta):
    """Small-``a`` reference closed forms:
    ``<phi>_UP = -sin(theta/2) cos^3(theta/2)`` and
    ``<phi>_DOWN = -sin^3(theta/2) cos(theta/2)``.
    """
    s, c = np.sin(np.asarray(theta) / 2), np.cos(np.asarray(theta) / 2)
    return -s * c**3, -(s**3) * c


def conditional_kick_expectation(model: KickModel,
                                 method: Literal["closed", "series"] = "closed") -> tuple[float, float]:
    """Outcome-weighted mean kick, ``(<phi>_UP, <phi>_DOWN)``.

    ``series`` sums ``(a / (Z pi)) sum_n (n pi - psi) / (a^2 + (n pi - psi)^2)``
    with ``psi = theta/2`` (UP) and ``psi = (theta - pi)/2`` (DOWN) at the
    model's ``a`` and ``n_max``, with ``Z`` from :func:`outcome_probabilities`.
    Note the DOWN series converges to ``+sin^3(theta/2) cos(theta/2)``, the
    opposite sign of the reference closed form.
    """
    if method == "closed":
        up, down = expectation_closed(model.theta)
        return float(up), float(down)
    if method != "series":
        raise ValidationError(f"unknown method {method!r}")
    a, theta = model.a, model.theta
    z = outcome_probabilities(model).z
    pref = a / (z * math.pi)
    up = pref * kick_series(a, theta / 2, model.n_max)
    down = pref * kick_series(a, (theta - math.pi) / 2, model.n_max)
    return up, down


# --- branch classification and sampling ---------------------------------

def _branch_offsets(theta, phi):
    """Distances (in units of pi) from ``theta/2 + phi`` to the nearest UP and DOWN branch."""
    u = (np.asarray(phi, dtype=float) + np.asarray(theta, dtype=float) / 2) / np.pi
    frac = u - np.floor(u)
    d_up = np.minimum(frac, 1 - frac)
    d_down = np.abs(frac - 0.5)
    return d_up, d_down


def classify_kicks(theta, phi) -> np.ndarray:
    """Vectorised :func:`classify_kick`; ``True`` means UP."""
    d_up, d_down = _branch_offsets(theta, phi)
    return d_up <= d_down


def classify_kick(theta: float, phi: float) -> str:
    """Outcome whose branch set (UP: ``n pi - theta/2``, DOWN:
    ``(n + 1/2) pi - theta/2``) has the member nearest to ``phi``.
    Exact mid-branch ties go to UP."""
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ValidationError("theta and phi must be finite")
    return UP if bool(classify_kicks(theta, phi)) else DOWN


@dataclass(frozen=True)
class KickSampleSet:
    kicks: np.ndarray
    outcomes: np.ndarray  # array of "UP"/"DOWN"
    seed: int

    @property
    def up_fraction(self) -> float:
        return float(np.mean(self.outcomes == UP)) if self.kicks.size else math.nan


def sample_kicks(model: KickModel, size: int, seed: int, *, window: float | None = None,
                 chunk: int = 0) -> KickSampleSet:
    """Raw Cauchy kicks labelled by nearest branch.

    With ``window`` set, only kicks within ``window`` radians of some branch
    point are kept.  This approximates the requirement that the kick land
    exactly on a branch, and the UP fraction then tends to
    ``outcome_probabilities(model).p_up`` as ``window -> 0``.
    """
    rng = substream(seed, "kicks.samples", chunk)
    phi = sample_cauchy(model.a, rng, size)
    d_up, d_down = _branch_offsets(model.theta, phi)
    is_up = d_up <= d_down
    if window is not None:
        keep = np.minimum(d_up, d_down) * np.pi <= window
        phi, is_up = phi[keep], is_up[keep]
    return KickSampleSet(phi, np.where(is_up, UP, DOWN), seed)


# --- non-self-averaging ---------------------------------------------------

@dataclass(frozen=True)
class SelfAveragingReport:
    distribution: str
    a: float
    batch: int
    repeats: int
    seed: int
    statistic: float
    pvalue: float
    level: float = 0.01

    @property
    def passed(self) -> bool:
        """True when the KS test does not reject 'batch means ~ single draws'."""
        return self.pvalue > self.level

    def lines(self) -> list[str]:
        return [f"{k}={str(v).lower() if isinstance(v, bool) else v}" for k, v in (
            ("distribution", self.distribution), ("a", self.a), ("batch", self.batch),
            ("repeats", self.repeats), ("seed", self.seed), ("ks_statistic", self.statistic),
            ("pvalue", self.pvalue), ("level", self.level), ("passed", self.passed),
        )]


def _draw(distribution: str, a: float, rng: np.random.Generator, size):
    if distribution == "cauchy":
        return sample_cauchy(a, rng, size)
    if distribution == "gaussian":
        return a * rng.standard_normal(size)
    raise ValidationError(f"unknown distribution {distribution!r}")


def self_averaging_test(a: float, batch: int, repeats: int, seed: int, *,
                        distribution: str = "cauchy", level: float = 0.01) -> SelfAveragingReport:
    """Two-sample KS test between means of ``batch`` draws and single draws.

    For Cauchy draws the mean of a batch has the same law as one draw, so
    the test should pass; a Gaussian control (``distribution="gaussian"``)
    has batch means narrower by ``sqrt(batch)`` and should fail.
    """
    _check_scale(a)
    if batch < 1:
        raise ValidationError("batch must be >= 1")
    if repeats < 100:
        raise ValidationError("repeats must be >= 100")
    means = _draw(distribution, a, substream(seed, "kicks.selfavg.means"), (repeats, batch)).mean(axis=1)
    single = _draw(distribution, a, substream(seed, "kicks.selfavg.single"), repeats)
    res = stats.ks_2samp(means, single)
    return SelfAveragingReport(distribution, a, batch, repeats, seed,
                               float(res.statistic), float(res.pvalue), level)


# --- entry-angle optimisation -------------------------------------------

def angle_objective(theta, mode: Literal["sorted", "total"]):
    """Signal proxy as a function of entry angle, from the closed-form expectations.

    ``sorted``: ``cos^2(theta/2) <phi>_UP``.
    ``total``:  ``cos^2(theta/2) <phi>_UP + sin^2(theta/2) <phi>_DOWN``.
    """
    theta = np.asarray(theta, dtype=float)
    up, down = expectation_closed(theta)
    c2, s2 = np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2
    if mode == "sorted":
        return c2 * up
    if mode == "total":
        return c2 * up + s2 * down
    raise ValidationError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class AngleOptimum:
    mode: str
    theta_star: float
    value: float
    thetas: np.ndarray
    objective: np.ndarray

    @property
    def degrees(self) -> float:
        return math.degrees(self.theta_star)


def optimize_entry_angle(mode: Literal["sorted", "total"], *, grid_points: int = 1801) -> AngleOptimum:
    """Maximise ``|objective|`` on ``[0, pi]``: dense grid, then golden-section.

    When several grid maxima agree to 1e-9 (the ``total`` mode is symmetric
    about 90 degrees) the smallest angle wins.
    """
    if grid_points < 5:
        raise ValidationError("grid_points must be >= 5")
    thetas = np.linspace(0.0, np.pi, grid_points)
    obj = angle_objective(thetas, mode)
    mag = np.abs(obj)
    i = int(np.flatnonzero(mag >= mag.max() * (1 - 1e-9))[0])
    if 0 < i < grid_points - 1:
        res = optimize.minimize_scalar(
            lambda t: -abs(float(angle_objective(t, mode))),
            bracket=(thetas[i - 1], thetas[i], thetas[i + 1]),
            method="golden",
            options={"xtol": 1e-12},
        )
        theta_star = float(res.x)
    else:
        theta_star = float(thetas[i])
    value = float(angle_objective(theta_star, mode))
    return AngleOptimum(mode, theta_star, value, thetas, obj)


# --- cotangent partial fractions -----------------------------------------

def _check_not_pole(z: complex):
    if z.imag == 0:
        k = z.real / math.pi
        if abs(k - round(k)) <= 1e-12 * max(1.0, abs(k)):
            raise ValidationError(f"z = {z} is a pole of cot")


def cot_partial_sum(z: complex, n_max: int) -> complex:
    """``1/z + sum_{n=1}^{n_max} [1/(z - n pi) + 1/(z + n pi)]``."""
    z = complex(z)
    _check_not_pole(z)
    n = np.arange(1, n_max + 1) * np.pi
    pairs = 2 * z / (z * z - n * n)
    return complex(1 / z + np.sum(pairs[::-1]))


def cot_tail_bound(z: complex, n_max: int) -> float:
    """Upper bound on ``|cot z - cot_partial_sum(z, n_max)|`` (needs ``n_max > |z|/pi``)."""
    r = abs(z) / math.pi
    if n_max <= r:
        return math.inf
    return 2 * abs(z) / (math.pi**2 * (n_max - r))


def cot_identity_residual(z_real: float, z_imag: float, n_max: int) -> float:
    """``|cot z - paired partial sum|`` at ``z = z_real + i z_imag``."""
    z = complex(z_real, z_imag)
    _check_not_pole(z)
    return abs(1 / np.tan(z) - cot_partial_sum(z, n_max))

"""Cat-map gas, coarse-grained entropy and the two-time boundary problem.

The map ``(x, y) -> (x + y, x + 2y) mod 1`` is area preserving and mixing.
A gas started in a small box spreads over the torus and its coarse-grained
entropy rises to a plateau.  Conditioning the same gas to lie in a given box
again ``T`` steps later (a future boundary condition) selects a sparse subset
of initial points.  That subset looks ordinary at early times but regathers
at ``T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import map_ordered
from .errors import ResourceExhausted, ValidationError
from .rng import substream

CANDIDATE_CHUNK = 1 << 16
DEFAULT_BUDGET = 10_000_000


def _mod1(v):
    # floor subtraction, then clamp rounding artefacts that land on 1.0
    r = v - np.floor(v)
    return np.where(r >= 1.0, 0.0, r)


def cat_step(p):
    """One step of the cat map on a single point.

    Works for floats and for :class:`fractions.Fraction` coordinates (exact).
    """
    x, y = p
    xn, yn = x + y, x + 2 * y
    xn, yn = xn - math.floor(xn), yn - math.floor(yn)
    if isinstance(xn, float):
        xn = 0.0 if xn >= 1.0 else xn
        yn = 0.0 if yn >= 1.0 else yn
    return (xn, yn)


def inverse_cat_step(p):
    x, y = p
    xp, yp = 2 * x - y, y - x
    xp, yp = xp - math.floor(xp), yp - math.floor(yp)
    if isinstance(xp, float):
        xp = 0.0 if xp >= 1.0 else xp
        yp = 0.0 if yp >= 1.0 else yp
    return (xp, yp)


@dataclass(frozen=True)
class Box:
    """Axis-aligned half-open rectangle ``[x0, x1) x [y0, y1)`` inside the unit square."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (0 <= self.x0 < self.x1 <= 1 and 0 <= self.y0 < self.y1 <= 1):
            raise ValidationError(f"box {self} must have positive area inside the unit square")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        return (x >= self.x0) & (x < self.x1) & (y >= self.y0) & (y < self.y1)

    def uniform(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random((size, 2))
        pts = np.column_stack([
            self.x0 + (self.x1 - self.x0) * u[:, 0],
            self.y0 + (self.y1 - self.y0) * u[:, 1],
        ])
        # guard the half-open upper edges against rounding
        return np.minimum(pts, np.nextafter([self.x1, self.y1], 0))

    @classmethod
    def unit(cls) -> "Box":
        return cls(0.0, 0.0, 1.0, 1.0)


@dataclass(frozen=True)
class CatEnsemble:
    points: np.ndarray  # shape (n_points, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if np.any(pts < 0) or np.any(pts >= 1):
            raise ValidationError("ensemble coordinates must lie in [0, 1)")
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def _step_array(pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    return np.column_stack([_mod1(x + y), _mod1(x + 2 * y)])


def evolve_points(pts: np.ndarray, steps: int) -> np.ndarray:
    if steps < 0:
        raise ValidationError("steps must be non-negative")
    for _ in range(steps):
        pts = _step_array(pts)
    return pts


def evolve(e: CatEnsemble, steps: int) -> CatEnsemble:
    return CatEnsemble(evolve_points(e.points, steps))


def trajectory(e: CatEnsemble, steps: int) -> list[np.ndarray]:
    """Point clouds at times ``0..steps``."""
    out = [e.points]
    for _ in range(steps):
        out.append(_step_array(out[-1]))
    return out


@dataclass(frozen=True)
class GrainGrid:
    """Partition of the unit square into ``nx * ny`` equal-area cells."""

    nx: int
    ny: int | None = None

    def __post_init__(self):
        if self.ny is None:
            object.__setattr__(self, "ny", self.nx)
        if self.nx < 1 or self.ny < 1:
            raise ValidationError("grain grid needs at least one cell per side")

    @classmethod
    def with_count(cls, grains: int) -> "GrainGrid":
        """Square grid if ``grains`` is a perfect square, otherwise vertical strips."""
        g = math.isqrt(grains)
        return cls(g, g) if g * g == grains else cls(grains, 1)

    @property
    def count(self) -> int:
        return self.nx * self.ny

    def occupancy(self, e: CatEnsemble | np.ndarray) -> np.ndarray:
        pts = e.points if isinstance(e, CatEnsemble) else np.asarray(e)
        ix = np.minimum((pts[:, 0] * self.nx).astype(int), self.nx - 1)
        iy = np.minimum((pts[:, 1] * self.ny).astype(int), self.ny - 1)
        return np.bincount(ix * self.ny + iy, minlength=self.count)


def entropy(e: CatEnsemble | np.ndarray, grid: GrainGrid) -> float:
    """Coarse-grained entropy ``-sum p log p`` (natural log) of the occupation."""
    counts = grid.occupancy(e)
    total = counts.sum()
    if total == 0:
        raise ValidationError("entropy of an empty ensemble")
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log(p))) + 0.0  # no signed zero


def entropy_trace(e: CatEnsemble, grid: GrainGrid, steps: int) -> np.ndarray:
    return np.array([entropy(p, grid) for p in trajectory(e, steps)])


@dataclass(frozen=True)
class TwoTimeProblem:
    initial_box: Box
    final_box: Box
    T: int
    n_target: int
    seed: int = 0
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.T < 0:
            raise ValidationError("horizon T must be non-negative")
        if self.n_target < 1:
            raise ValidationError("n_target must be positive")
        if self.budget < 1:
            raise ValidationError("candidate budget must be positive")


@dataclass(frozen=True)
class TwoTimeSolution:
    ensemble: CatEnsemble
    n_candidates: int     # candidates examined, counted in whole chunks
    n_accepted: int       # survivors among them (>= n_target)

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_candidates


def _candidates(prob: TwoTimeProblem, chunk: int) -> tuple[np.ndarray, np.ndarray]:
    rng = substream(prob.seed, "catmap.two_time", chunk)
    pts = prob.initial_box.uniform(rng, CANDIDATE_CHUNK)
    ok = prob.final_box.contains(evolve_points(pts, prob.T))
    return pts, ok


def solve_two_time(prob: TwoTimeProblem, *, workers: int = 1) -> TwoTimeSolution:
    """Uniform points of ``initial_box`` that land in ``final_box`` after ``T`` steps.

    Candidates are drawn in fixed-size chunks from substreams of ``seed`` and
    filtered forward; survivors are kept in candidate order, so the output
    does not depend on ``workers``.  The budget is rounded up to a whole
    number of chunks.
    """
    max_chunks = max(1, -(-prob.budget // CANDIDATE_CHUNK))
    kept: list[np.ndarray] = []
    n_kept = n_seen = n_acc = 0
    chunk = 0
    while chunk < max_chunks:
        batch = min(max(1, workers), max_chunks - chunk)
        results = map_ordered(lambda i, c0=chunk: _candidates(prob, c0 + i), batch, workers)
        for pts, ok in results:
            chunk += 1
            n_seen += pts.shape[0]
            n_acc += int(ok.sum())
            kept.append(pts[ok])
            n_kept += kept[-1].shape[0]
            if n_kept >= prob.n_target:
                pts_all = np.concatenate(kept)[: prob.n_target]
                return TwoTimeSolution(CatEnsemble(pts_all), n_seen, n_acc)
    rate = n_acc / n_seen
    raise ResourceExhausted(
        f"found {n_kept} of {prob.n_target} points in {n_seen} candidates "
        f"(acceptance rate {rate:.3g})",
        acceptance_rate=rate,
    )


def unconstrained_ensemble(prob: TwoTimeProblem) -> CatEnsemble:
    """The first ``n_target`` candidates of the same stream, without filtering."""
    pts = []
    need, chunk = prob.n_target, 0
    while need > 0:
        rng = substream(prob.seed, "catmap.two_time", chunk)
        p = prob.initial_box.uniform(rng, CANDIDATE_CHUNK)[:need]
        pts.append(p)
        need -= p.shape[0]
        chunk += 1
    return CatEnsemble(np.concatenate(pts))


@dataclass(frozen=True)
class EntropyExperiment:
    times: np.ndarray
    constrained: np.ndarray
    unconstrained: np.ndarray
    solution: TwoTimeSolution


def entropy_experiment(prob: TwoTimeProblem, grid: GrainGrid, *,
                       horizon: int | None = None, workers: int = 1) -> EntropyExperiment:
    """Entropy traces of the constrained and unconstrained gases over ``t = 0..T``.

    ``horizon`` extends both traces past ``T`` (default: stop at ``T``).
    """
    steps = prob.T if horizon is None else horizon
    sol = solve_two_time(prob, workers=workers)
    free = unconstrained_ensemble(prob)
    return EntropyExperiment(
        times=np.arange(steps + 1),
        constrained=entropy_trace(sol.ensemble, grid, steps),
        unconstrained=entropy_trace(free, grid, steps),
        solution=sol,
    )

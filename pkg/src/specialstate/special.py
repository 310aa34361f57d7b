"""Special-state search: initial states that are fully decayed or fully
undecayed at a chosen time.

With ``P`` the projector onto the ``n`` excited levels and ``U = exp(-iHt0)``,
the survival of an undecayed state is ``<psi|C^dagger C|psi>`` where
``C = PUP``.  Eigenvectors of ``C^dagger C`` with eigenvalues near 0 or 1 are
the special states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._parallel import map_chunks
from .decay import (
    DecayModel,
    SpectralPropagator,
    SurvivalCurve,
    assemble_hamiltonian,
    survival_curve,
)
from .errors import NumericError, ValidationError


@dataclass(frozen=True)
class SpecialStateSet:
    t0: float
    eigenvalues: np.ndarray   # descending
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    model: DecayModel

    @property
    def top(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def bottom(self) -> np.ndarray:
        return self.eigenvectors[:, -1]

    def embedded(self, k: int) -> np.ndarray:
        """Eigenvector ``k`` as a full state with zero band components."""
        if not 0 <= k < self.model.n:
            raise IndexError(f"state index {k} out of range for n={self.model.n}")
        psi = np.zeros(self.model.dim, dtype=complex)
        psi[: self.model.n] = self.eigenvectors[:, k]
        return psi


def _propagator(model: DecayModel) -> SpectralPropagator:
    return SpectralPropagator(assemble_hamiltonian(model))


def reduced_propagator(model: DecayModel, t0: float, *,
                       propagator: SpectralPropagator | None = None) -> np.ndarray:
    """``C = P exp(-iH t0) P`` restricted to the excited subspace."""
    if not t0 >= 0:
        raise ValidationError("t0 must be non-negative")
    if t0 == 0:
        return np.eye(model.n, dtype=complex)
    prop = propagator or _propagator(model)
    return prop.block(model.n, t0)


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so its first component with modulus above ``tol`` is real positive."""
    big = np.flatnonzero(np.abs(v) > tol)
    if big.size == 0:
        return v
    c = v[big[0]]
    out = v * (abs(c) / c)
    out[big[0]] = abs(c)
    return out


def special_states(model: DecayModel, t0: float, *,
                   propagator: SpectralPropagator | None = None) -> SpecialStateSet:
    if not t0 > 0:
        raise ValidationError("t0 must be positive")
    C = reduced_propagator(model, t0, propagator=propagator)
    M = C.conj().T @ C
    M = 0.5 * (M + M.conj().T)
    w, V = linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    V = np.column_stack([fix_phase(V[:, k]) for k in range(V.shape[1])])
    return SpecialStateSet(t0=float(t0), eigenvalues=w, eigenvectors=V, model=model)


def specialness_trace(model: DecayModel, state_index: int, t0: float, time_grid, *,
                      states: SpecialStateSet | None = None, workers: int = 1,
                      propagator: SpectralPropagator | None = None) -> SurvivalCurve:
    """Survival curve of eigenvector ``state_index`` (0 = largest eigenvalue)."""
    if not 0 <= state_index < model.n:
        raise IndexError(f"state index {state_index} out of range for n={model.n}")
    prop = propagator or _propagator(model)
    states = states or special_states(model, t0, propagator=prop)
    return survival_curve(model, states.embedded(state_index), time_grid,
                          workers=workers, propagator=prop)


def average_survival(model: DecayModel, time_grid, *, workers: int = 1,
                     propagator: SpectralPropagator | None = None) -> SurvivalCurve:
    """Survival averaged over uniformly random undecayed states, ``tr(C^dag C) / n``."""
    prop = propagator or _propagator(model)
    times = np.asarray(time_grid, dtype=float)
    Vn = prop.vectors[: model.n]
    # ||C(t)||_F^2 = sum_ij |sum_k Vn[i,k] e^{-i w_k t} conj(Vn[j,k])|^2
    def chunk(sl):
        out = np.empty(sl.stop - sl.start)
        for j, t in enumerate(times[sl]):
            C = (Vn * np.exp(-1j * prop.energies * t)) @ Vn.conj().T
            out[j] = np.sum(C.real**2 + C.imag**2) / model.n
        return out

    parts = map_chunks(chunk, times.size, workers)
    return SurvivalCurve(times, np.concatenate(parts) if parts else np.zeros(0))


def cluster_fraction(states: SpecialStateSet, epsilon: float = 0.1) -> float:
    """Fraction of eigenvalues within ``epsilon`` of 0 or of 1."""
    if not 0 < epsilon < 0.5:
        raise ValidationError("epsilon must lie in (0, 0.5)")
    w = states.eigenvalues
    near = (np.abs(w) <= epsilon) | (np.abs(w - 1) <= epsilon)
    return float(np.mean(near))


def multilevel_model(n: int = 10, N: int = 100, *, spacing: float = 2 * np.pi / 300,
                     coupling: float = 0.0456, channels: int = 5, omega: float = 0.0,
                     phases=None) -> DecayModel:
    """``n`` degenerate levels sharing a band through constant-strength couplings.

    Level ``j`` couples with strength ``coupling`` to every band level ``k``
    with ``k % channels == j % channels`` and not at all to the rest, so
    levels in the same channel have identical coupling rows.  ``channels=1``
    is the fully constant matrix.  ``phases`` (an ``n x N`` array) multiplies
    the couplings by ``exp(i * phases)``.
    """
    if n < 1 or N < 1 or not 1 <= channels <= N:
        raise ValidationError("need n, N >= 1 and 1 <= channels <= N")
    Omega = (np.arange(N) - (N - 1) / 2) * spacing
    if not np.all(np.isfinite(Omega)):
        raise NumericError("band energies overflowed")
    mask = (np.arange(N)[None, :] % channels) == (np.arange(n)[:, None] % channels)
    phi = coupling * mask.astype(complex)
    if phases is not None:
        phases = np.asarray(phases, dtype=float)
        if phases.shape != (n, N):
            raise ValidationError(f"phases must have shape ({n}, {N})")
        phi = phi * np.exp(1j * phases)
    return DecayModel(omega=np.full(n, omega), phi=phi, Omega=Omega)

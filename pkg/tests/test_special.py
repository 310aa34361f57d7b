import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import cplx
from oracles import gram_eigs_2x2
from specialstate import decay, special
from specialstate.errors import ValidationError

T0 = 16.0


@pytest.fixture(scope="module")
def fig2():
    m = special.multilevel_model()
    return m, special.special_states(m, T0)


def random_model(seed, n=3, N=30, scale=0.2):
    rng = np.random.default_rng(seed)
    phi = scale * (rng.normal(size=(n, N)) + 1j * rng.normal(size=(n, N)))
    return decay.DecayModel(rng.normal(size=n) * 0.1, phi, np.linspace(-1, 1, N))


def test_reduced_propagator_identity_at_zero():
    np.testing.assert_array_equal(special.reduced_propagator(special.multilevel_model(), 0.0), np.eye(10))


def test_zero_coupling_identity_block():
    m = special.multilevel_model(coupling=0.0)
    np.testing.assert_allclose(special.reduced_propagator(m, 5.0), np.eye(10), atol=1e-14)
    s = special.special_states(m, 5.0)
    np.testing.assert_allclose(s.eigenvalues, 1.0, atol=1e-14)
    assert special.cluster_fraction(s, 0.01) == 1.0
    trace = special.specialness_trace(m, 0, 5.0, np.linspace(0, 20, 5))
    np.testing.assert_allclose(trace.values, 1.0, atol=1e-13)


def test_block_matches_time_stepper(frozen):
    case = frozen["reduced_block"]
    H = cplx(case["H"])
    n = case["n"]
    m = decay.DecayModel(np.real(np.diag(H))[:n], H[:n, n:], np.real(np.diag(H))[n:])
    np.testing.assert_array_equal(decay.assemble_hamiltonian(m), H)
    np.testing.assert_allclose(special.reduced_propagator(m, case["t0"]), cplx(case["block"]), atol=1e-8)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_two_level_against_characteristic_polynomial(seed):
    m = random_model(seed, n=2, N=25, scale=0.3)
    s = special.special_states(m, 3.0)
    C = special.reduced_propagator(m, 3.0)
    np.testing.assert_allclose(s.eigenvalues, gram_eigs_2x2(C), atol=1e-12)


def test_t0_must_be_positive():
    with pytest.raises(ValidationError):
        special.special_states(special.multilevel_model(), 0.0)


def test_fig2_preset(fig2):
    m, s = fig2
    assert 0.4 <= s.eigenvalues.mean() <= 0.6
    assert s.eigenvalues[0] >= 0.9
    assert s.eigenvalues[-1] <= 0.1
    assert special.cluster_fraction(s, 0.1) >= 0.8


def test_fig2_bottom_state_decays_faster(fig2):
    m, s = fig2
    times = np.linspace(0, T0, 81)
    avg = special.average_survival(m, times)
    bottom = special.specialness_trace(m, m.n - 1, T0, times, states=s)
    top = special.specialness_trace(m, 0, T0, times, states=s)
    assert bottom.values[-1] <= 0.1 and top.values[-1] >= 0.9
    inner = slice(1, -1)
    assert np.all(bottom.values[inner] < avg.values[inner])


def test_random_phases_spread_eigenvalues(fig2):
    _, s = fig2
    rng = np.random.default_rng(11)
    m = special.multilevel_model(phases=rng.uniform(0, 2 * np.pi, (10, 100)))
    assert special.cluster_fraction(special.special_states(m, T0)) < special.cluster_fraction(s)


@pytest.mark.parametrize("eps", [0.0, 0.5, -1.0])
def test_cluster_epsilon_range(fig2, eps):
    with pytest.raises(ValidationError):
        special.cluster_fraction(fig2[1], eps)


def test_index_out_of_range(fig2):
    m, s = fig2
    with pytest.raises(IndexError):
        special.specialness_trace(m, m.n, T0, [0.0, 1.0], states=s)


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 60))
def test_set_invariants(seed, t0):
    m = random_model(seed)
    s = special.special_states(m, t0)
    w, V = s.eigenvalues, s.eigenvectors
    assert np.all(w >= -1e-10) and np.all(w <= 1 + 1e-10)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(m.n), atol=1e-10)
    assert np.linalg.norm(special.reduced_propagator(m, t0), 2) <= 1 + 1e-10
    for k in range(m.n):
        S = decay.survival_curve(m, s.embedded(k), [t0]).values[0]
        assert S == pytest.approx(w[k], abs=1e-8)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 40))
def test_average_identity(seed, t):
    """Mean survival of Haar-random undecayed states equals tr(C^dag C)/n."""
    m = random_model(seed)
    avg = special.average_survival(m, [t]).values[0]
    C = special.reduced_propagator(m, t)
    assert avg == pytest.approx(np.trace(C.conj().T @ C).real / m.n, abs=1e-8)


def test_average_matches_monte_carlo():
    m = random_model(5)
    t = 4.0
    rng = np.random.default_rng(3)
    draws = rng.normal(size=(4000, m.n)) + 1j * rng.normal(size=(4000, m.n))
    draws /= np.linalg.norm(draws, axis=1, keepdims=True)
    C = special.reduced_propagator(m, t)
    mc = np.mean(np.sum(np.abs(draws @ C.T) ** 2, axis=1))
    assert special.average_survival(m, [t]).values[0] == pytest.approx(mc, abs=0.01)


def test_phase_convention(fig2):
    _, s = fig2
    for k in range(s.eigenvectors.shape[1]):
        v = s.eigenvectors[:, k]
        first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        assert first.imag == 0 and first.real > 0

import math

import numpy as np
import pytest
from scipy.linalg import expm

from qshape.dynamics import (
    STATIONARY,
    Hamiltonian,
    cyclic_phases,
    evolve,
    evolve_raw,
    geometric_phase,
    period_of,
    support,
    trajectory,
)
from qshape.eigenshapes import basis, decompose, eigenshape, superpose, triangle_family
from qshape.errors import DimensionMismatch, EmptySupport, NotCyclic
from qshape.shape_core import (
    PointConfig,
    canonical_phase,
    normalize,
    sphere_coords,
    transition_probability,
)


def random_shape(rng, n):
    return normalize(PointConfig(rng.standard_normal(n) + 1j * rng.standard_normal(n)))


def full_hamiltonian(h):
    """N x N matrix acting on amplitudes (zero on the centroid direction)."""
    b = basis(h.n_points).matrix
    return b.T @ np.diag(h.energies) @ b.conj()


def bargmann_phase(states):
    """Geometric phase of a closed discretised loop from the Bargmann invariant.

    Independent of any Hamiltonian: only uses overlaps of successive
    (gauge-fixed) states, -arg prod <psi_i|psi_{i+1}>.
    """
    prod = 1.0 + 0j
    for a, b in zip(states, np.roll(states, -1, axis=0)):
        prod *= np.vdot(a, b)
    return (-np.angle(prod)) % (2 * math.pi)


def test_zero_hamiltonian_is_identity():
    rng = np.random.default_rng(20)
    s = random_shape(rng, 5)
    h = Hamiltonian(5, np.zeros(4))
    np.testing.assert_allclose(evolve(s, h, 3.7).amplitudes, s.amplitudes, atol=1e-14)


def test_eigenshapes_are_stationary():
    rng = np.random.default_rng(21)
    for n in (3, 5, 6):
        h = Hamiltonian(n, rng.normal(size=n - 1))
        for k in range(1, n):
            for t in (0.3, 11.0):
                assert transition_probability(evolve(eigenshape(n, k), h, t), eigenshape(n, k)) == pytest.approx(1, abs=1e-12)


def test_evolve_matches_matrix_exponential():
    rng = np.random.default_rng(22)
    for n in (3, 4, 7):
        h = Hamiltonian(n, rng.normal(size=n - 1))
        s = random_shape(rng, n)
        for t in (0.1, 1.3, 9.0):
            oracle = expm(-1j * full_hamiltonian(h) * t) @ s.amplitudes
            np.testing.assert_allclose(evolve_raw(s, h, t), oracle, atol=1e-12)
            np.testing.assert_allclose(evolve(s, h, t).amplitudes, canonical_phase(oracle), atol=1e-12)


def test_equator_circle_reaches_antipode_at_half_period():
    h = Hamiltonian.of([0, 1])
    s = superpose(triangle_family(math.pi / 2, 0))
    for t in np.linspace(0, 2 * math.pi, 9):
        assert sphere_coords(evolve(s, h, t))[0] == pytest.approx(math.pi / 2, abs=1e-12)
    assert transition_probability(s, evolve(s, h, math.pi)) == pytest.approx(0, abs=1e-12)


def test_evolution_preserves_transition_probabilities_and_energy():
    rng = np.random.default_rng(23)
    h = Hamiltonian(6, rng.normal(size=5))
    a, b = random_shape(rng, 6), random_shape(rng, 6)
    e0 = h.expectation(decompose(a))
    for t in rng.uniform(0, 20, size=10):
        at, bt = evolve(a, h, t), evolve(b, h, t)
        assert transition_probability(at, bt) == pytest.approx(transition_probability(a, b), abs=1e-10)
        assert h.expectation(decompose(at)) == pytest.approx(e0, abs=1e-10)


def test_evolution_composes():
    rng = np.random.default_rng(24)
    h = Hamiltonian(5, rng.normal(size=4))
    s = random_shape(rng, 5)
    t1, t2 = 0.7, 2.9
    np.testing.assert_allclose(
        evolve(evolve(s, h, t1), h, t2).amplitudes, evolve(s, h, t1 + t2).amplitudes, atol=1e-10)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        evolve(eigenshape(4, 1), Hamiltonian.of([0, 1]), 1.0)
    with pytest.raises(DimensionMismatch):
        Hamiltonian(5, [0, 1])


def test_period_examples():
    assert period_of(Hamiltonian.of([0, 1]), {1, 2}) == pytest.approx(2 * math.pi, rel=1e-15)
    assert period_of(Hamiltonian.of([2.5, 2.5, 2.5]), {1, 2, 3}) is STATIONARY
    assert period_of(Hamiltonian.of([0, 1, math.sqrt(2)]), {1, 2, 3}) is None
    assert period_of(Hamiltonian.of([0, 1, math.sqrt(2)]), {1, 2}) == pytest.approx(2 * math.pi)
    with pytest.raises(EmptySupport):
        period_of(Hamiltonian.of([0, 1]), set())


def test_period_is_the_smallest_common_one():
    # differences 2/3 and 1/2 -> fundamental 1/6 -> T = 12 pi
    assert period_of(Hamiltonian.of([0.0, 2 / 3, 0.5]), {1, 2, 3}) == pytest.approx(12 * math.pi)
    # float-rounded rationals still close
    assert period_of(Hamiltonian.of([0.1, 0.3, 0.7]), {1, 2, 3}) == pytest.approx(10 * math.pi)


def test_closed_trajectory_rotates_all_vertices_together():
    rng = np.random.default_rng(25)
    h = Hamiltonian.of([0.0, 1.0, 3.0, 0.5, 2.0])
    s = random_shape(rng, 6)
    T = period_of(h, support(s))
    psi_t = evolve_raw(s, h, T)
    ratio = psi_t / s.amplitudes
    assert np.max(np.abs(ratio - ratio[0])) < 1e-8
    assert abs(abs(ratio[0]) - 1) < 1e-8
    assert transition_probability(evolve(s, h, T), s) == pytest.approx(1, abs=1e-8)


def test_geometric_phase_of_eigenstate_is_zero():
    assert geometric_phase(eigenshape(5, 2), Hamiltonian.of([0, 1, 2, 3])) == 0.0


def test_not_cyclic():
    s = superpose([1, 1, 1])
    with pytest.raises(NotCyclic):
        geometric_phase(s, Hamiltonian.of([0, 1, math.sqrt(2)]))


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3])
def test_geometric_phase_against_bargmann_oracle(theta):
    h = Hamiltonian.of([0, 1])
    s = superpose(triangle_family(theta, 0.7))
    T = period_of(h, support(s))
    loop = trajectory(s, h, np.linspace(0, T, 20_000, endpoint=False)).amplitudes
    oracle = bargmann_phase(loop)
    closed_form = math.pi * (1 - math.cos(theta))
    assert oracle == pytest.approx(closed_form, abs=1e-6)
    assert geometric_phase(s, h) == pytest.approx(oracle, abs=1e-6)
    assert geometric_phase(s, h, method="quadrature") == pytest.approx(oracle, abs=1e-6)


def test_geometric_phase_bargmann_multilevel():
    rng = np.random.default_rng(26)
    h = Hamiltonian.of([0.0, 1.0, 2.0, 0.5])
    s = random_shape(rng, 5)
    T = period_of(h, support(s))
    loop = trajectory(s, h, np.linspace(0, T, 40_000, endpoint=False)).amplitudes
    assert geometric_phase(s, h) == pytest.approx(bargmann_phase(loop), abs=1e-5)


def test_phase_report_bookkeeping():
    h = Hamiltonian.of([0, 1])
    s = superpose(triangle_family(math.pi / 2, 0))
    rep = cyclic_phases(s, h)
    assert rep.period == pytest.approx(2 * math.pi)
    assert rep.mean_energy == pytest.approx(0.5)
    assert rep.total_phase == pytest.approx(0, abs=1e-12)
    assert rep.geometric_phase == pytest.approx(math.pi, abs=1e-12)
    assert (rep.total_phase - rep.dynamical_phase - rep.geometric_phase) % (2 * math.pi) == pytest.approx(0, abs=1e-12)


def test_trajectory_shapes():
    h = Hamiltonian.of([0, 1, 2])
    s = superpose([1, 1j, 0.5])
    tr = trajectory(s, h, np.linspace(0, 1, 5))
    assert len(tr) == 5 and len(tr.states) == 5
    np.testing.assert_allclose(tr.states[0].amplitudes, s.amplitudes, atol=1e-14)
    with pytest.raises(ValueError):
        trajectory(s, h, [0, 1, 1])

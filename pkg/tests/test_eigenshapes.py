import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qshape.eigenshapes import (
    CoeffVector,
    basis,
    decompose,
    degeneracy,
    eigenshape,
    exponents,
    exponent_table,
    four_point_family,
    superpose,
    triangle_family,
)
from qshape.entangle import max_collinear
from qshape.errors import DimensionMismatch, IndexOutOfRange, ZeroVector
from qshape.shape_core import PointConfig, ShapeVector, normalize, transition_probability

PRIMES = [p for p in range(3, 65) if all(p % d for d in range(2, int(p**0.5) + 1))]


def ray_equal(amp, ref, tol=1e-12):
    ref = np.asarray(ref, dtype=complex)
    return transition_probability(ShapeVector(amp), ShapeVector.from_amplitudes(ref)) > 1 - tol


def test_triangle_and_square_eigenshapes():
    z = cmath.exp(2j * math.pi / 3)
    assert ray_equal(eigenshape(3, 1).amplitudes, [1, z, z**2])
    assert ray_equal(eigenshape(3, 2).amplitudes, [z**2, z, 1])
    i = 1j
    assert ray_equal(eigenshape(4, 1).amplitudes, [1, i, -1, -i])
    assert ray_equal(eigenshape(4, 2).amplitudes, [1, -1, 1, -1])
    assert ray_equal(eigenshape(4, 3).amplitudes, [-i, -1, i, 1])


def test_nine_point_cyclic_wrap():
    assert exponents(9, 3) == (0, 3, 6, 0, 3, 6, 0, 3, 6)


def test_pentagon_rows():
    assert exponent_table(5) == ((0, 1, 2, 3, 4), (0, 2, 4, 1, 3), (0, 3, 1, 4, 2), (0, 4, 3, 2, 1))


def test_table_edge_rows_follow_the_printed_pattern():
    # first row counts up, second-last counts down by 2, last counts down by 1
    for n in range(3, 20):
        t = exponent_table(n)
        assert t[0] == tuple(range(n))
        assert t[-1] == (0,) + tuple(range(n - 1, 0, -1))
        if n > 3:
            assert t[-2] == tuple((-2 * j) % n for j in range(n))


def test_basis_three():
    b = basis(3)
    assert len(b) == 2
    assert b[1] is eigenshape(3, 1) and b[2] is eigenshape(3, 2)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 12, 31, 64])
def test_gram_is_identity(n):
    m = basis(n).matrix
    assert np.max(np.abs(m.conj() @ m.T - np.eye(n - 1))) < 1e-12


def test_cyclotomic_identity_sweep():
    for n in range(3, 65):
        assert np.max(np.abs(basis(n).matrix.sum(axis=1))) < 1e-12


def test_index_range():
    with pytest.raises(IndexOutOfRange):
        eigenshape(5, 0)
    with pytest.raises(IndexOutOfRange):
        eigenshape(5, 5)
    with pytest.raises(IndexOutOfRange):
        degeneracy(6, 6)


def test_degeneracy_examples():
    assert [degeneracy(6, k).distinct_vertices for k in range(1, 6)] == [6, 3, 2, 3, 6]
    assert all(degeneracy(7, k).nondegenerate and degeneracy(7, k).distinct_vertices == 7
               for k in range(1, 7))
    assert degeneracy(4, 2).distinct_vertices == 2


def test_degeneracy_law_by_exact_count():
    # brute force: count distinct integer exponents in each row
    for n in range(3, 65):
        for k in range(1, n):
            d = degeneracy(n, k)
            assert len(set(exponents(n, k))) == d.distinct_vertices
            assert d.distinct_vertices * d.multiplicity == n


def test_primes_are_nondegenerate():
    for p in PRIMES:
        assert all(degeneracy(p, k).nondegenerate for k in range(1, p))


def test_conjugation_symmetry():
    for n in (3, 4, 7, 10):
        for k in range(1, n):
            np.testing.assert_allclose(
                eigenshape(n, n - k).amplitudes, np.conj(eigenshape(n, k).amplitudes), atol=1e-14)


def test_decompose_examples():
    c = decompose(eigenshape(3, 1), basis(3))
    np.testing.assert_allclose(c.coefficients, [1, 0], atol=1e-14)
    square = normalize(PointConfig.from_xy([(1, 0), (0, 1), (-1, 0), (0, -1)]))
    mags = np.abs(decompose(square).coefficients)
    assert np.allclose(mags, [1, 0, 0], atol=1e-12) or np.allclose(mags, [0, 0, 1], atol=1e-12)


def test_completeness_of_random_eight_point_shape():
    rng = np.random.default_rng(12)
    s = normalize(PointConfig(rng.standard_normal(8) + 1j * rng.standard_normal(8)))
    assert np.sum(decompose(s).populations) == pytest.approx(1, abs=1e-12)


def test_decompose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        decompose(eigenshape(4, 1), basis(5))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 9, 12])
def test_round_trip(n):
    rng = np.random.default_rng(n)
    b = basis(n)
    for _ in range(100):
        s = normalize(PointConfig(rng.standard_normal(n) + 1j * rng.standard_normal(n)))
        back = superpose(decompose(s, b), b)
        assert transition_probability(back, s) == pytest.approx(1, abs=1e-10)
        np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-12)


def test_superpose_first_unit_vector():
    for n in (3, 6, 11):
        c = np.zeros(n - 1)
        c[0] = 1
        np.testing.assert_allclose(superpose(c).amplitudes, eigenshape(n, 1).amplitudes, atol=1e-15)


def test_superpose_zero():
    with pytest.raises(ZeroVector):
        superpose([0, 0, 0])


@pytest.mark.parametrize("phi", np.arange(8) * math.pi / 4)
def test_triangle_equator_is_collinear(phi):
    s = superpose(triangle_family(math.pi / 2, phi))
    assert max_collinear(s.to_config(), 1e-8) == 3


def test_four_point_equal_square_mix():
    # omega_1 = (1, i, -1, -i)/2 and omega_3 = (1, -i, -1, i)/2: their normalised
    # sum is (2, 0, -2, 0)/(2 sqrt 2)
    s = superpose(four_point_family(math.pi, math.pi / 2, 0, 0))
    expected = np.array([1, 0, -1, 0]) / math.sqrt(2)
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)
    assert max_collinear(s.to_config(), 1e-8) == 4


@settings(max_examples=100, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_four_point_family_is_normalised(theta, eta, phi, psi):
    c = four_point_family(theta, eta, phi, psi)
    assert c.norm == pytest.approx(1, abs=1e-12)


def test_coeff_vector_length_check():
    with pytest.raises(DimensionMismatch):
        CoeffVector([1, 0], 4)

"""Cyclotomic eigenshapes and shape decomposition.

For N points let z = exp(2*pi*i/N). Eigenshape k (1 <= k <= N-1) has
amplitudes z**(k*(j-1) mod N) / sqrt(N) for j = 1..N; the N-1 of them form
an orthonormal basis of the centroid-free subspace. When gcd(N, k) > 1 the
polygon collapses onto N/gcd(N, k) distinct vertices, each visited
gcd(N, k) times.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, TooFewPoints, ZeroVector
from .shape_core import ALGEBRAIC_TOL, ShapeVector, _readonly, canonical_phase


def _check_index(n: int, k: int):
    if n < 3:
        raise TooFewPoints(f"eigenshapes need N >= 3, got {n}")
    if not 1 <= k <= n - 1:
        raise IndexOutOfRange(f"k={k} outside 1..{n - 1}")


def exponents(n: int, k: int) -> tuple[int, ...]:
    """Exact exponent row (a_1, ..., a_N) = (k*(j-1) mod N)."""
    _check_index(n, k)
    return tuple((k * j) % n for j in range(n))


def exponent_table(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(exponents(n, k) for k in range(1, n))


def _amplitudes(n: int, k: int) -> np.ndarray:
    e = np.array(exponents(n, k))
    return np.exp(2j * np.pi * e / n) / math.sqrt(n)


def eigenshape(n: int, k: int) -> ShapeVector:
    """The k-th cyclotomic eigenshape for N = `n` points."""
    _check_index(n, k)
    return basis(n).vectors[k - 1]


@dataclass(frozen=True, eq=False)
class EigenBasis:
    n_points: int
    vectors: tuple

    @functools.cached_property
    def matrix(self) -> np.ndarray:
        """(N-1, N) array whose row k-1 holds eigenshape k."""
        return _readonly(np.array([v.amplitudes for v in self.vectors]))

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, k: int) -> ShapeVector:
        """Eigenshape by its 1-based index."""
        _check_index(self.n_points, k)
        return self.vectors[k - 1]


@functools.lru_cache(maxsize=128)
def basis(n: int) -> EigenBasis:
    """Orthonormal eigenshape basis, ordered k = 1..N-1."""
    if n < 3:
        raise TooFewPoints(f"eigenshapes need N >= 3, got {n}")
    # a_1 = 0 so the first amplitude is already real positive: no rephasing needed
    vecs = tuple(ShapeVector(_amplitudes(n, k)) for k in range(1, n))
    return EigenBasis(n, vecs)


@dataclass(frozen=True)
class DegeneracyInfo:
    k: int
    distinct_vertices: int
    polygon_order: int
    multiplicity: int

    @property
    def nondegenerate(self) -> bool:
        return self.multiplicity == 1


def degeneracy(n: int, k: int) -> DegeneracyInfo:
    _check_index(n, k)
    g = math.gcd(n, k)
    return DegeneracyInfo(k=k, distinct_vertices=n // g, polygon_order=n // g, multiplicity=g)


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """Coefficients of a shape in the eigenshape basis of `basis_n_points` points."""

    coefficients: np.ndarray
    basis_n_points: int

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).ravel()
        if c.size != self.basis_n_points - 1:
            raise DimensionMismatch(
                f"{c.size} coefficients for a {self.basis_n_points}-point basis"
            )
        object.__setattr__(self, "coefficients", _readonly(c))

    @classmethod
    def of(cls, coefficients) -> "CoeffVector":
        c = np.asarray(coefficients, dtype=complex).ravel()
        return cls(c, c.size + 1)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def normalized(self) -> "CoeffVector":
        nrm = self.norm
        if nrm == 0:
            raise ZeroVector("all coefficients vanish")
        return CoeffVector(self.coefficients / nrm, self.basis_n_points)

    def __len__(self):
        return self.coefficients.size


def decompose(s: ShapeVector, b: EigenBasis | None = None) -> CoeffVector:
    """Coefficients <omega_k|s> of the canonical representative of `s`."""
    if b is None:
        b = basis(s.n_points)
    if s.n_points != b.n_points:
        raise DimensionMismatch(f"{s.n_points}-point shape in a {b.n_points}-point basis")
    return CoeffVector(b.matrix.conj() @ s.amplitudes, b.n_points)


def raw_superposition(coeffs, b: EigenBasis) -> np.ndarray:
    """sum_k c_k |omega_k> without normalisation or phase fixing."""
    c = coeffs.coefficients if isinstance(coeffs, CoeffVector) else np.asarray(coeffs, dtype=complex)
    if c.shape[-1] != len(b):
        raise DimensionMismatch(f"{c.shape[-1]} coefficients for a {b.n_points}-point basis")
    return c @ b.matrix


def superpose(coeffs, b: EigenBasis | None = None) -> ShapeVector:
    """Shape of the superposition sum_k c_k |omega_k>, in canonical form."""
    if not isinstance(coeffs, CoeffVector):
        coeffs = CoeffVector.of(coeffs)
    if b is None:
        b = basis(coeffs.basis_n_points)
    v = raw_superposition(coeffs, b)
    nrm = np.linalg.norm(v)
    if nrm <= ALGEBRAIC_TOL * max(1.0, coeffs.norm):
        raise ZeroVector("all coefficients vanish")
    return ShapeVector(canonical_phase(v / nrm))


def triangle_family(theta: float, phi: float) -> CoeffVector:
    """Coefficients cos(theta/2), sin(theta/2) e^{i phi} on the two triangle eigenshapes.

    theta = pi/2 sweeps the collinear triangles as phi varies.
    """
    return CoeffVector.of([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])


def four_point_family(theta: float, eta: float, phi: float, psi: float) -> CoeffVector:
    """Four-point parametrisation around the line eigenshape (k = 2).

    The line gets cos(theta/2); the squares k = 1 and k = 3 share
    sin(theta/2) through cos(eta/2) e^{i phi} and sin(eta/2) e^{i psi}.
    """
    s = math.sin(theta / 2)
    return CoeffVector.of([
        s * math.cos(eta / 2) * np.exp(1j * phi),
        math.cos(theta / 2),
        s * math.sin(eta / 2) * np.exp(1j * psi),
    ])

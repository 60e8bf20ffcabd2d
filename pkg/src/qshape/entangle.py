"""Tensor combination of shapes and Schmidt analysis.

Coefficient vectors of lengths m and n (shapes of m+1 and n+1 points)
combine into a length m*n vector, read as coefficients over the eigenshape
basis of m*n+1 points. Which combined eigenshape index a factor pair
(i, j) lands on is a convention: ``"row"`` uses kappa = (i-1)*n + j,
``"column"`` uses kappa = (j-1)*m + i (both 1-based).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .eigenshapes import CoeffVector, basis, superpose
from .errors import DegenerateConfig, DimensionMismatch
from .shape_core import PointConfig, ShapeVector, _readonly

RANK_TOL = 1e-10
NORM_TOL = 1e-10
CONVENTIONS = ("row", "column")


def _order(convention: str) -> str:
    try:
        return {"row": "C", "column": "F"}[convention]
    except KeyError:
        raise ValueError(f"convention must be 'row' or 'column', not {convention!r}") from None


@dataclass(frozen=True, eq=False)
class BipartiteShape:
    coeffs: CoeffVector
    factors: tuple
    convention: str = "row"

    def __post_init__(self):
        m, n = (int(f) for f in self.factors)
        if m < 2 or n < 2:
            raise DimensionMismatch(f"factor dimensions must be >= 2, got {(m, n)}")
        if len(self.coeffs) != m * n:
            raise DimensionMismatch(f"{len(self.coeffs)} coefficients for factors {(m, n)}")
        if abs(self.coeffs.norm - 1) > NORM_TOL:
            raise DimensionMismatch("bipartite coefficients must be unit norm")
        _order(self.convention)
        object.__setattr__(self, "factors", (m, n))

    @classmethod
    def from_coefficients(cls, coeffs, factors, convention="row") -> "BipartiteShape":
        if not isinstance(coeffs, CoeffVector):
            coeffs = CoeffVector.of(coeffs)
        return cls(coeffs, tuple(factors), convention)

    @property
    def matrix(self) -> np.ndarray:
        """m x n coefficient matrix, entry (i, j) for factor indices i, j."""
        return self.coeffs.coefficients.reshape(self.factors, order=_order(self.convention))

    @property
    def n_points(self) -> int:
        m, n = self.factors
        return m * n + 1

    def shape(self) -> ShapeVector:
        """The (m*n + 1)-point shape carried by these coefficients."""
        return superpose(self.coeffs, basis(self.n_points))


def _as_coeffs(x) -> np.ndarray:
    c = x.coefficients if isinstance(x, CoeffVector) else np.asarray(x, dtype=complex).ravel()
    if c.size < 2:
        raise DimensionMismatch(f"factor needs at least 2 coefficients, got {c.size}")
    if abs(np.linalg.norm(c) - 1) > NORM_TOL:
        raise DimensionMismatch("factor coefficients must be unit norm")
    return np.asarray(c, dtype=complex)


def combine(a, b, convention: str = "row") -> BipartiteShape:
    """Product state of two unit coefficient vectors."""
    ca, cb = _as_coeffs(a), _as_coeffs(b)
    flat = np.outer(ca, cb).ravel(order=_order(convention))
    return BipartiteShape(CoeffVector.of(flat), (ca.size, cb.size), convention)


@dataclass(frozen=True, eq=False)
class SchmidtData:
    values: np.ndarray
    entropy: float

    @property
    def rank(self) -> int:
        return int(np.sum(self.values > RANK_TOL))


def entropy_of(values) -> float:
    """Entanglement entropy -sum p ln p over p = values**2 (natural log)."""
    p = np.asarray(values, dtype=float) ** 2
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log(p))))


def schmidt(s: BipartiteShape) -> SchmidtData:
    values = np.linalg.svd(s.matrix, compute_uv=False)
    return SchmidtData(_readonly(values), entropy_of(values))


def is_product(s: BipartiteShape, tol: float = RANK_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(schmidt(s).values[1] < tol)


def max_collinear(config, tol: float = 1e-6) -> int:
    """Size of the largest subset of points lying on one straight line.

    A point belongs to the line through an anchor pair when its distance to
    that line is at most ``tol`` times the configuration diameter.
    """
    if not isinstance(config, PointConfig):
        config = PointConfig(config)
    z = config.points
    diam = float(np.max(np.abs(z[:, None] - z[None, :])))
    if diam == 0:
        raise DegenerateConfig("all points coincide")
    eps = tol * diam
    best = 2
    for i, j in itertools.combinations(range(z.size), 2):
        d = z[j] - z[i]
        length = abs(d)
        if length <= eps:
            continue
        # perpendicular distance = |Im(conj(d) (z - z_i))| / |d|
        dist = np.abs(np.imag(np.conj(d) * (z - z[i]))) / length
        best = max(best, int(np.sum(dist <= eps)))
    return best


def random_unit(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return v / np.linalg.norm(v)


def collinear_probe(trials: int = 100, seed: int = 0, convention: str = "row",
                    factors=(2, 2), tol: float = 1e-3) -> Counter:
    """Distribution of max_collinear over shapes of random product states.

    Trial t draws its factors from a generator seeded by (seed, t), so the
    outcome does not depend on how trials are scheduled.
    """
    m, n = factors
    counts = Counter()
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        bs = combine(random_unit(rng, m), random_unit(rng, n), convention)
        counts[max_collinear(bs.shape().to_config(), tol)] += 1
    return counts

"""Planar point configurations as rays in complex projective space.

A configuration of N labelled points in the plane is read as a complex
N-vector. Removing the centroid and the overall complex scale (rotation
plus dilation) leaves a ray in CP^(N-2); the Fubini-Study angle between
two rays is the shape distance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateConfig,
    DimensionMismatch,
    NotATriangle,
    TooFewPoints,
    TooManyPoints,
)

#: Tolerance for geometric identities (distances, ray equality).
GEOMETRIC_TOL = 1e-10
#: Tolerance for algebraic normalisation (unit norm, zero centroid).
ALGEBRAIC_TOL = 1e-12
#: Relative tolerance used to decide ties between largest amplitudes.
TIE_TOL = 1e-9

MAX_UNLABELED_POINTS = 10
_PERM_CHUNK = 50_000


def wrap_angle(x: float) -> float:
    """Reduce an angle into [0, 2*pi)."""
    r = math.fmod(x, 2 * math.pi)
    if r < 0:
        r += 2 * math.pi
    if r >= 2 * math.pi:
        r = 0.0
    return r


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate `v` so its largest amplitude (lowest index on ties) is real positive.

    Works on a single vector or row-wise on a 2-D array. Returns a new array.
    """
    v = np.array(v, dtype=complex)
    single = v.ndim == 1
    rows = np.atleast_2d(v)
    mags = np.abs(rows)
    top = mags.max(axis=1, keepdims=True)
    idx = np.argmax(mags >= top * (1 - TIE_TOL), axis=1)
    pick = rows[np.arange(rows.shape[0]), idx]
    scale = np.abs(pick)
    unit = np.where(scale > 0, np.conj(pick) / np.where(scale > 0, scale, 1), 1)
    rows = rows * unit[:, None]
    rows[np.arange(rows.shape[0]), idx] = scale
    return rows[0] if single else rows


@dataclass(frozen=True, eq=False)
class PointConfig:
    """N >= 3 labelled points in the plane, stored as complex numbers."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).ravel()
        if pts.size < 3:
            raise TooFewPoints(f"need at least 3 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        spread = np.max(np.abs(pts - pts.mean()))
        if spread == 0 or spread <= 1e-14 * max(1.0, float(np.max(np.abs(pts)))):
            raise DegenerateConfig("all points coincide")
        object.__setattr__(self, "points", _readonly(pts))

    @classmethod
    def from_xy(cls, xy) -> "PointConfig":
        xy = np.asarray(xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValueError("expected an (N, 2) array of coordinates")
        return cls(xy[:, 0] + 1j * xy[:, 1])

    @property
    def n_points(self) -> int:
        return self.points.size

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.points.real, self.points.imag])

    def transformed(self, a: complex, b: complex = 0) -> "PointConfig":
        """Apply the similarity map z -> a*z + b to every point."""
        return PointConfig(a * self.points + b)

    def __eq__(self, other):
        if not isinstance(other, PointConfig):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


@dataclass(frozen=True, eq=False)
class ShapeVector:
    """Canonical unit-norm, centroid-free representative of a shape ray.

    Build these with :func:`normalize` or :meth:`from_amplitudes`; the
    constructor only validates.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        if amp.size < 3:
            raise TooFewPoints(f"need at least 3 amplitudes, got {amp.size}")
        if abs(np.linalg.norm(amp) - 1) > 1e3 * ALGEBRAIC_TOL:
            raise ValueError("amplitudes are not unit norm")
        if abs(amp.sum()) > 1e3 * ALGEBRAIC_TOL:
            raise ValueError("amplitudes are not centroid-free")
        object.__setattr__(self, "amplitudes", _readonly(amp))

    @classmethod
    def from_amplitudes(cls, amp) -> "ShapeVector":
        """Normalise an arbitrary centroid-free complex vector to canonical form."""
        amp = np.asarray(amp, dtype=complex).ravel()
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise DegenerateConfig("zero vector has no shape")
        return cls(canonical_phase(amp / norm))

    @property
    def n_points(self) -> int:
        return self.amplitudes.size

    def to_config(self) -> PointConfig:
        return PointConfig(self.amplitudes)

    def same_ray(self, other: "ShapeVector", tol: float = GEOMETRIC_TOL) -> bool:
        return fs_distance(self, other) <= tol

    def __repr__(self):
        return f"ShapeVector(n_points={self.n_points}, amplitudes={np.round(self.amplitudes, 6)!r})"


@dataclass(frozen=True)
class Permutation:
    """A relabelling of points: the point at position j moves to position mapping[j].

    Positions are 0-based, matching array indexing.
    """

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(i) for i in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"{m} is not a permutation of 0..{len(m) - 1}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def swap(cls, n: int, i: int, j: int) -> "Permutation":
        m = list(range(n))
        m[i], m[j] = m[j], m[i]
        return cls(tuple(m))

    def __len__(self):
        return len(self.mapping)

    def compose(self, other: "Permutation") -> "Permutation":
        """Return self o other, i.e. apply `other` first."""
        return Permutation(tuple(self.mapping[i] for i in other.mapping))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for j, pj in enumerate(self.mapping):
            inv[pj] = j
        return Permutation(tuple(inv))


def _check_same(a: ShapeVector, b: ShapeVector):
    if a.n_points != b.n_points:
        raise DimensionMismatch(f"{a.n_points} points vs {b.n_points} points")


def normalize(config: PointConfig) -> ShapeVector:
    """Canonical shape vector of a configuration.

    Removes the centroid, scales to unit norm and rotates so that the
    largest amplitude is real and positive. Invariant under z -> a*z + b.
    """
    if not isinstance(config, PointConfig):
        config = PointConfig(config)
    centred = config.points - config.points.mean()
    return ShapeVector.from_amplitudes(centred)


def overlap(a: ShapeVector, b: ShapeVector) -> complex:
    """Hermitian inner product <a|b> (conjugate-linear in `a`)."""
    _check_same(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def transition_probability(a: ShapeVector, b: ShapeVector) -> float:
    p = abs(overlap(a, b)) ** 2
    return min(max(p, 0.0), 1.0)


def _fs_angle(a: np.ndarray, b: np.ndarray) -> float:
    # atan2 of the orthogonal and parallel parts keeps full precision near 0 and pi
    ov = np.vdot(a, b)
    perp = np.linalg.norm(b - ov * a)
    return 2.0 * math.atan2(perp, abs(ov))


def fs_distance(a: ShapeVector, b: ShapeVector) -> float:
    """Fubini-Study angle theta in [0, pi] with cos^2(theta/2) = transition probability."""
    _check_same(a, b)
    return min(_fs_angle(a.amplitudes, b.amplitudes), math.pi)


def permute(s: ShapeVector, p: Permutation) -> ShapeVector:
    if len(p) != s.n_points:
        raise DimensionMismatch(f"permutation of {len(p)} applied to {s.n_points} points")
    out = np.empty_like(s.amplitudes)
    out[list(p.mapping)] = s.amplitudes
    return ShapeVector(canonical_phase(out))


def _permutation_chunks(n: int):
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, _PERM_CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def best_relabelling(a: ShapeVector, b: ShapeVector) -> tuple[float, Permutation]:
    """Minimum Fubini-Study distance over all relabellings of `b`.

    Returns the distance together with a permutation attaining it.
    """
    _check_same(a, b)
    n = a.n_points
    if n > MAX_UNLABELED_POINTS:
        raise TooManyPoints(f"{n} points; exhaustive search is limited to {MAX_UNLABELED_POINTS}")
    ca = np.conj(a.amplitudes)
    best_val, best_perm = -1.0, None
    for perms in _permutation_chunks(n):
        # <a | P b> = sum_j conj(a[p(j)]) b[j]
        vals = np.abs(ca[perms] @ b.amplitudes)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_perm = float(vals[i]), perms[i]
    perm = Permutation(tuple(best_perm))
    return fs_distance(a, permute(b, perm)), perm


def unlabeled_distance(a: ShapeVector, b: ShapeVector) -> float:
    """Shape distance with labels ignored (N <= 10, exhaustive)."""
    return best_relabelling(a, b)[0]


def sphere_coords(s: ShapeVector) -> tuple[float, float]:
    """Riemann-sphere angles (theta, phi) of a triangle shape.

    The two equilateral eigenshapes sit at the poles: eigenshape(3, 1) at
    theta = 0 and eigenshape(3, 2) at theta = pi. phi is reported as 0 at
    either pole.
    """
    if s.n_points != 3:
        raise NotATriangle(f"sphere coordinates need 3 points, got {s.n_points}")
    from .eigenshapes import basis

    alpha, beta = basis(3).matrix.conj() @ s.amplitudes
    theta = 2.0 * math.atan2(abs(beta), abs(alpha))
    if abs(alpha) < ALGEBRAIC_TOL or abs(beta) < ALGEBRAIC_TOL:
        return theta, 0.0
    return theta, wrap_angle(np.angle(beta) - np.angle(alpha))


def from_sphere_coords(theta: float, phi: float) -> ShapeVector:
    """Inverse of :func:`sphere_coords`."""
    from .eigenshapes import basis

    c = np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])
    return ShapeVector.from_amplitudes(c @ basis(3).matrix)


def as_shape(obj) -> ShapeVector:
    """Accept a ShapeVector, PointConfig or raw point sequence."""
    if isinstance(obj, ShapeVector):
        return obj
    if isinstance(obj, PointConfig):
        return normalize(obj)
    return normalize(PointConfig(obj))


__all__: Sequence[str] = [
    "PointConfig",
    "ShapeVector",
    "Permutation",
    "normalize",
    "overlap",
    "transition_probability",
    "fs_distance",
    "permute",
    "unlabeled_distance",
    "best_relabelling",
    "sphere_coords",
    "from_sphere_coords",
    "canonical_phase",
    "wrap_angle",
]

"""Unitary evolution of shapes under a Hamiltonian diagonal in the eigenshape basis.

Evolution multiplies coefficient k by exp(-i E_k t), which turns each
eigenshape's vertices about the origin at its own angular velocity. When
the populated frequency differences are commensurable the projective
trajectory closes after a period T; at that moment every vertex has been
rotated through the same angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.integrate import simpson

from .eigenshapes import CoeffVector, basis, decompose, raw_superposition, superpose
from .errors import DimensionMismatch, EmptySupport, NotCyclic
from .shape_core import ALGEBRAIC_TOL, ShapeVector, _readonly, canonical_phase, wrap_angle

MAX_DENOMINATOR = 10**6
#: Allowed mismatch, in cycles, when checking that a candidate period closes every phase.
CLOSURE_TOL = 1e-9
QUADRATURE_STEPS = 10_000


class _Stationary:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STATIONARY"

    def __reduce__(self):
        return (_Stationary, ())


#: Returned by :func:`period_of` when the populated levels share one energy.
STATIONARY = _Stationary()


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Energies (angular frequencies) attached to eigenshapes 1..N-1."""

    n_points: int
    energies: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=float).ravel()
        if e.size != self.n_points - 1:
            raise DimensionMismatch(f"{e.size} energies for {self.n_points} points")
        if not np.all(np.isfinite(e)):
            raise ValueError("energies must be finite")
        object.__setattr__(self, "energies", _readonly(e))

    @classmethod
    def of(cls, energies) -> "Hamiltonian":
        e = np.asarray(energies, dtype=float).ravel()
        return cls(e.size + 1, e)

    @property
    def spread(self) -> float:
        return float(self.energies.max() - self.energies.min())

    def expectation(self, coeffs) -> float:
        c = coeffs.coefficients if isinstance(coeffs, CoeffVector) else np.asarray(coeffs)
        return float(np.sum(np.abs(c) ** 2 * self.energies) / np.sum(np.abs(c) ** 2))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    coefficients: np.ndarray
    amplitudes: np.ndarray

    def __len__(self):
        return self.times.size

    @property
    def states(self) -> tuple:
        return tuple(ShapeVector(a) for a in self.amplitudes)

    @property
    def coeff_vectors(self) -> tuple:
        n = self.amplitudes.shape[1]
        return tuple(CoeffVector(c, n) for c in self.coefficients)


def _check(s: ShapeVector, h: Hamiltonian):
    if s.n_points != h.n_points:
        raise DimensionMismatch(f"{s.n_points}-point shape, {h.n_points}-point Hamiltonian")


def evolve_coefficients(coeffs, h: Hamiltonian, t) -> np.ndarray:
    """Coefficients after time `t` (scalar or array of times, broadcast over rows)."""
    c = coeffs.coefficients if isinstance(coeffs, CoeffVector) else np.asarray(coeffs, dtype=complex)
    t = np.asarray(t, dtype=float)
    return c * np.exp(-1j * np.multiply.outer(t, h.energies))


def evolve_raw(s: ShapeVector, h: Hamiltonian, t) -> np.ndarray:
    """Evolved amplitude vector(s) with the phase left as the dynamics produce it."""
    _check(s, h)
    b = basis(s.n_points)
    return raw_superposition(evolve_coefficients(decompose(s, b), h, t), b)


def evolve(s: ShapeVector, h: Hamiltonian, t: float) -> ShapeVector:
    _check(s, h)
    b = basis(s.n_points)
    return superpose(CoeffVector(evolve_coefficients(decompose(s, b), h, t), s.n_points), b)


def trajectory(s: ShapeVector, h: Hamiltonian, times: Iterable[float]) -> Trajectory:
    times = np.asarray(list(times), dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    _check(s, h)
    b = basis(s.n_points)
    coeffs = evolve_coefficients(decompose(s, b), h, times)
    amps = canonical_phase(raw_superposition(coeffs, b))
    # coefficients reported relative to each canonical state
    coeffs = amps @ b.matrix.conj().T
    return Trajectory(_readonly(times), _readonly(coeffs), _readonly(amps))


def support(s: ShapeVector, tol: float = ALGEBRAIC_TOL) -> frozenset:
    """1-based eigenshape indices carrying a nonzero coefficient."""
    mags = np.abs(decompose(s).coefficients)
    return frozenset(int(k) + 1 for k in np.flatnonzero(mags > tol))


def period_of(h: Hamiltonian, support_set: Iterable[int]):
    """Smallest T > 0 after which the projective trajectory closes.

    `support_set` holds 1-based eigenshape indices. Returns ``STATIONARY``
    when all populated energies coincide and ``None`` when the frequency
    differences are not commensurable with denominators up to 10**6.
    """
    ks = sorted(set(int(k) for k in support_set))
    if not ks:
        raise EmptySupport("support is empty")
    for k in ks:
        if not 1 <= k <= h.energies.size:
            raise DimensionMismatch(f"index {k} outside 1..{h.energies.size}")
    e = h.energies[[k - 1 for k in ks]]
    diffs = e[1:] - e[0]
    scale = max(1.0, float(np.max(np.abs(e))))
    nonzero = diffs[np.abs(diffs) > 1e-12 * scale]
    if nonzero.size == 0:
        return STATIONARY
    ref = float(nonzero[0])
    fracs = [Fraction(float(d) / ref).limit_denominator(MAX_DENOMINATOR) for d in nonzero]
    lcm = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * lcm) for f in fracs]
    g = math.gcd(*ints)
    period = 2 * math.pi * lcm / (abs(ref) * g)
    # accept only if every populated phase difference really winds a whole number of times
    for d in diffs:
        cycles = float(d) * period / (2 * math.pi)
        if abs(cycles - round(cycles)) > CLOSURE_TOL:
            return None
    return period


@dataclass(frozen=True)
class PhaseReport:
    """Phases accumulated over one period of a closed trajectory.

    `total_phase` is arg <psi(0)|psi(T)>; `dynamical_phase` is
    -integral <H> dt; `geometric_phase` is their difference, in [0, 2 pi).
    """

    period: float
    total_phase: float
    dynamical_phase: float
    geometric_phase: float
    mean_energy: float


def _mean_energy_quadrature(s: ShapeVector, h: Hamiltonian, period: float, steps: int) -> float:
    steps += steps % 2
    t = np.linspace(0.0, period, steps + 1)
    psi = evolve_raw(s, h, t)
    c = psi @ basis(s.n_points).matrix.conj().T
    energy = np.real(np.sum(np.abs(c) ** 2 * h.energies, axis=1) / np.sum(np.abs(c) ** 2, axis=1))
    return float(simpson(energy, x=t))


def cyclic_phases(s: ShapeVector, h: Hamiltonian, method: str = "conserved",
                  steps: int = QUADRATURE_STEPS) -> PhaseReport:
    """Total, dynamical and geometric phase over one period.

    ``method="conserved"`` uses <H> * T; ``method="quadrature"`` integrates
    <H>(t) with composite Simpson on `steps` intervals.
    """
    _check(s, h)
    period = period_of(h, support(s))
    mean_e = h.expectation(decompose(s))
    if period is STATIONARY:
        return PhaseReport(0.0, 0.0, 0.0, 0.0, mean_e)
    if period is None:
        raise NotCyclic("frequency differences are not commensurable")
    if method == "conserved":
        integral = mean_e * period
    elif method == "quadrature":
        integral = _mean_energy_quadrature(s, h, period, steps)
    else:
        raise ValueError(f"unknown method {method!r}")
    psi_t = evolve_raw(s, h, period)
    total = float(np.angle(np.vdot(s.amplitudes, psi_t)))
    return PhaseReport(
        period=period,
        total_phase=wrap_angle(total),
        dynamical_phase=wrap_angle(-integral),
        geometric_phase=wrap_angle(total + integral),
        mean_energy=mean_e,
    )


def geometric_phase(s: ShapeVector, h: Hamiltonian, method: str = "conserved") -> float:
    """Aharonov-Anandan phase of the closed trajectory through `s`."""
    return cyclic_phases(s, h, method=method).geometric_phase

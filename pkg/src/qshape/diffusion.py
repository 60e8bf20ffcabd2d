"""Stochastic shape reduction driven by an energy operator.

The coefficient vector c (eigenshape basis) follows

    dc = [-i H - (sigma^2 / 8) (H - <H>)^2] c dt + (sigma / 2) (H - <H>) c dW

integrated with Euler-Maruyama and renormalised after every step. The
populations |c_k|^2 are martingales, so a trajectory started at c ends in
eigenshape k with probability |c_k|^2.

Each trajectory draws its Wiener increments from its own Philox stream
keyed by (seed, trial), so ensembles give the same answer whether trials
run serially, in blocks, or on several threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .dynamics import Hamiltonian, Trajectory
from .eigenshapes import CoeffVector, basis
from .errors import DimensionMismatch, NormLoss
from .shape_core import _readonly, canonical_phase

DEFAULT_THRESHOLD = 0.999
DT_FACTOR = 1e-3
#: Largest accepted dt, in units of 1/(sigma^2 spread^2).
MAX_DT_FACTOR = 1e-2
T_MAX_FACTOR = 50.0
NORM_LOSS_LIMIT = 0.5
N_SAMPLES = 100
_CHUNK = 1024


@dataclass(frozen=True)
class DiffusionParams:
    """Parameters of the reduction process.

    `dt` defaults to 1e-3 / (sigma^2 spread^2), with spread the range of the
    energies. `t_max` defaults to 50 / (sigma^2 gap^2), with gap the smallest
    nonzero energy difference: that gap sets how slowly an interior level is
    resolved from its neighbours.
    """

    hamiltonian: Hamiltonian
    sigma: float = 1.0
    dt: float | None = None
    t_max: float | None = None
    collapse_threshold: float = DEFAULT_THRESHOLD
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be finite and non-negative")
        if not 0 < self.collapse_threshold < 1:
            raise ValueError("collapse_threshold must lie in (0, 1)")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        unit = self.time_unit
        if self.dt is None:
            object.__setattr__(self, "dt", DT_FACTOR * unit)
        if self.t_max is None:
            object.__setattr__(self, "t_max", T_MAX_FACTOR * self.resolution_time)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > MAX_DT_FACTOR * unit:
            raise ValueError(
                f"dt={self.dt:g} exceeds the stability bound {MAX_DT_FACTOR * unit:g}"
            )
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")

    @property
    def time_unit(self) -> float:
        """1/(sigma^2 spread^2), the collapse time scale (1 if that vanishes)."""
        rate = self.sigma**2 * self.hamiltonian.spread**2
        return 1.0 / rate if rate > 0 else 1.0

    @property
    def resolution_time(self) -> float:
        """1/(sigma^2 gap^2) for the smallest nonzero gap (1 if undefined)."""
        e = np.unique(self.hamiltonian.energies)
        gaps = np.diff(e)
        rate = self.sigma**2 * float(gaps.min()) ** 2 if gaps.size else 0.0
        return 1.0 / rate if rate > 0 else 1.0

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_max / self.dt - 1e-9))


def _gain(pops: np.ndarray, energies: np.ndarray, sigma: float, dt: float, dw) -> np.ndarray:
    """Real per-level multiplier of one Euler-Maruyama step, before renormalisation.

    `pops` holds unit-sum populations, row-wise.
    """
    delta = energies - (pops @ energies)[..., None]
    dw = np.asarray(dw, dtype=float)[..., None]
    return 1.0 + delta * (0.5 * sigma * dw - 0.125 * sigma**2 * dt * delta)


def _renormalize(v: np.ndarray) -> np.ndarray:
    norm = np.sqrt(np.sum(np.abs(v) ** 2, axis=-1, keepdims=True))
    if np.any(np.abs(norm - 1) > NORM_LOSS_LIMIT):
        raise NormLoss("step changed the norm by more than 50%; reduce dt")
    return v / norm


def _check_coeffs(coeffs, p: DiffusionParams) -> np.ndarray:
    c = coeffs.coefficients if isinstance(coeffs, CoeffVector) else np.asarray(coeffs, dtype=complex)
    c = np.asarray(c, dtype=complex).ravel()
    if c.size != p.hamiltonian.energies.size:
        raise DimensionMismatch(f"{c.size} coefficients, {p.hamiltonian.energies.size} energies")
    nrm = np.linalg.norm(c)
    if abs(nrm - 1) > 1e-10:
        raise ValueError("initial coefficients must be unit norm")
    return c


def diffuse_step(coeffs, p: DiffusionParams, dW: float) -> CoeffVector:
    """Advance a coefficient vector by one step given the Wiener increment `dW`.

    The -iH term is applied as the exact phase exp(-i E_k dt), so it never
    changes populations.
    """
    c = _check_coeffs(coeffs, p)
    if not math.isfinite(dW):
        raise ValueError("dW must be finite")
    e = p.hamiltonian.energies
    out = c * _gain(np.abs(c) ** 2, e, p.sigma, p.dt, dW) * np.exp(-1j * e * p.dt)
    return CoeffVector(_renormalize(out), c.size + 1)


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def energy_variance(c: np.ndarray, energies: np.ndarray) -> np.ndarray:
    pops = np.abs(c) ** 2
    mean = pops @ energies
    return pops @ energies**2 - mean**2


@njit(cache=True, nogil=True)
def _advance(r, energies, half_sigma, drift, dw, threshold, path):
    """Advance real amplitudes `r` in place over the increments `dw`.

    Returns (steps taken, status): status 0 = still running, 1 = collapsed,
    2 = norm loss. Rows of `path` (if it has any) receive each new state.
    """
    k_levels = r.size
    record = path.shape[0] > 0
    for s in range(dw.size):
        mean = 0.0
        for k in range(k_levels):
            mean += r[k] * r[k] * energies[k]
        norm2 = 0.0
        for k in range(k_levels):
            d = energies[k] - mean
            r[k] *= 1.0 + d * (half_sigma * dw[s] - drift * d)
            norm2 += r[k] * r[k]
        norm = math.sqrt(norm2)
        if abs(norm - 1.0) > NORM_LOSS_LIMIT:
            return s, 2
        top = 0.0
        for k in range(k_levels):
            r[k] /= norm
            top = max(top, r[k] * r[k])
        if record:
            path[s, :] = r
        if top > threshold:
            return s + 1, 1
    return dw.size, 0


_NO_PATH = np.empty((0, 1))


@dataclass
class _TrialResult:
    terminal: int        # 1-based eigenshape index, 0 = undecided
    collapse_step: int   # -1 = undecided
    energy: np.ndarray   # <H> at the sample steps
    variance: np.ndarray
    path: np.ndarray | None = None


def _sample_steps(n_steps: int) -> np.ndarray:
    every = max(1, n_steps // N_SAMPLES)
    steps = np.arange(0, n_steps + 1, every)
    if steps[-1] != n_steps:
        steps = np.append(steps, n_steps)
    return steps


def _run_trial(c0: np.ndarray, p: DiffusionParams, trial: int, record: bool = False) -> _TrialResult:
    # All multipliers except the common phase exp(-i E t) are real, so a trial
    # carries real signed amplitudes; the phase is restored for recorded paths.
    energies = np.ascontiguousarray(p.hamiltonian.energies)
    samples = _sample_steps(p.n_steps)
    half_sigma = 0.5 * p.sigma
    drift = 0.125 * p.sigma**2 * p.dt
    sqrt_dt = math.sqrt(p.dt)

    r = np.abs(c0).astype(float)
    energy = np.empty(samples.size)
    variance = np.empty(samples.size)
    pieces = [r.copy()] if record else None
    terminal, collapse_step = 0, -1
    if np.max(r * r) > p.collapse_threshold:
        terminal, collapse_step = int(np.argmax(r * r)) + 1, 0

    gen = None
    buf = np.empty(0)
    pos = 0
    step = 0
    for i, target in enumerate(samples):
        while step < target and terminal == 0:
            if pos == buf.size:
                if gen is None:
                    gen = trial_generator(p.seed, trial)
                buf = gen.standard_normal(_CHUNK) * sqrt_dt
                pos = 0
            m = min(int(target) - step, buf.size - pos)
            path = np.empty((m, r.size)) if record else _NO_PATH
            taken, status = _advance(r, energies, half_sigma, drift, buf[pos:pos + m],
                                     p.collapse_threshold, path)
            if status == 2:
                raise NormLoss("step changed the norm by more than 50%; reduce dt")
            if record:
                pieces.append(path[:taken])
            pos += taken
            step += taken
            if status == 1:
                terminal, collapse_step = int(np.argmax(r * r)) + 1, step
        pops = r * r
        energy[i] = pops @ energies
        variance[i] = pops @ energies**2 - energy[i] ** 2
    path = np.vstack([np.atleast_2d(x) for x in pieces]) if record else None
    return _TrialResult(terminal, collapse_step, energy, variance, path)


def simulate_trajectory(initial, p: DiffusionParams, trial: int = 0):
    """Run one trajectory; returns (terminal index or None, Trajectory).

    The trajectory uses the same increment stream as trial `trial` of
    :func:`run_ensemble` with the same parameters, and stops on collapse.
    """
    c0 = _check_coeffs(initial, p)
    res = _run_trial(c0, p, trial, record=True)
    times = p.dt * np.arange(len(res.path))
    mag0 = np.abs(c0)
    phase0 = np.where(mag0 > 0, c0 / np.where(mag0 > 0, mag0, 1), 1)
    coeffs = res.path * phase0 * np.exp(-1j * np.multiply.outer(times, p.hamiltonian.energies))
    amps = canonical_phase(coeffs @ basis(c0.size + 1).matrix)
    traj = Trajectory(_readonly(times), _readonly(coeffs), _readonly(amps))
    return (res.terminal or None), traj


@dataclass(frozen=True, eq=False)
class EnsembleReport:
    trials: int
    terminal_counts: dict
    undecided: int
    sample_times: np.ndarray
    mean_energy: np.ndarray
    energy_std: np.ndarray
    mean_variance: np.ndarray
    terminal_indices: np.ndarray
    collapse_times: np.ndarray

    @property
    def frequencies(self) -> dict:
        return {k: v / self.trials for k, v in self.terminal_counts.items()}

    @property
    def mean_energy_series(self):
        return self.sample_times, self.mean_energy

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "terminal_counts": {str(k): v for k, v in self.terminal_counts.items()},
            "undecided": self.undecided,
            "frequencies": {str(k): v for k, v in self.frequencies.items()},
            "sample_times": self.sample_times.tolist(),
            "mean_energy": self.mean_energy.tolist(),
            "energy_std": self.energy_std.tolist(),
            "mean_variance": self.mean_variance.tolist(),
        }


def run_ensemble(initial, p: DiffusionParams, trials: int, workers: int = 1) -> EnsembleReport:
    """Run `trials` independent trajectories and tally where they end.

    With ``workers > 1`` contiguous blocks of trials run on a thread pool;
    the report is identical to the serial one.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    c0 = _check_coeffs(initial, p)
    ids = np.arange(trials)
    chunks = [a for a in np.array_split(ids, max(1, min(workers, trials))) if a.size]

    def run_chunk(chunk):
        return [_run_trial(c0, p, int(t)) for t in chunk]

    if len(chunks) == 1:
        results = run_chunk(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = [r for part in pool.map(run_chunk, chunks) for r in part]

    terminal = np.array([r.terminal for r in results])
    steps = np.array([r.collapse_step for r in results])
    energy = np.array([r.energy for r in results])
    variance = np.array([r.variance for r in results])
    k_levels = c0.size
    counts = {k: int(np.sum(terminal == k)) for k in range(1, k_levels + 1)}
    return EnsembleReport(
        trials=trials,
        terminal_counts=counts,
        undecided=int(np.sum(terminal == 0)),
        sample_times=_readonly(_sample_steps(p.n_steps) * p.dt),
        mean_energy=_readonly(energy.mean(axis=0)),
        energy_std=_readonly(energy.std(axis=0)),
        mean_variance=_readonly(variance.mean(axis=0)),
        terminal_indices=_readonly(terminal),
        collapse_times=_readonly(np.where(steps >= 0, steps * p.dt, np.nan)),
    )

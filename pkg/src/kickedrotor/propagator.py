"""Time evolution of the resonant kicked rotor in the angular-momentum basis.

One step of the stroboscopic map is

    a_l(n+1) = sum_j (-i)^(l-j) J_{l-j}(kappa(n)) * phase(j) * a_j(n)

with the free-rotor phase ``phase(j) = exp(-4 pi i p j^2 / q)`` at the
resonance ``tau = 2 pi p / q``.  Three interchangeable back-ends are provided:

* ``analytic``: closed form for primary resonances (q = 1), where all phases
  are one and ``n`` kicks compose into a single kick of strength
  ``n* = sum kappa(m)``;
* ``banded``: direct convolution with the truncated Bessel band;
* ``spectral``: split-operator step, applying the kick pointwise on an
  angle grid reached by FFT.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import observables as obs
from .core import (AliasingError, Backend, InitialCondition, NumericalError,
                   ResonanceParams, RunConfig, TruncationError, TruncationPolicy, WaveState,
                   cumulative_kicks, initial_offset_and_amplitudes, initial_state,
                   kick_strengths, support_radius)
from .specfun import bessel_table, kick_kernel, signed_band

__all__ = [
    "PhaseTable",
    "Banded",
    "Spectral",
    "free_phase",
    "free_phases",
    "analytic_amplitudes",
    "analytic_states",
    "start_state",
    "step_banded",
    "step_spectral",
    "evolve",
    "EvolutionResult",
    "max_amplitude_difference",
]

DEFAULT_TAIL_TOL = 1e-30
NORM_ABORT = 1e-8


@dataclass(frozen=True, eq=False)
class PhaseTable:
    """``phases[r] = exp(-2 pi i r / q)`` for ``r = 0 .. q-1``."""

    q: int
    phases: np.ndarray

    @classmethod
    def build(cls, q: int) -> "PhaseTable":
        r = np.arange(q)
        phases = np.exp(-2j * np.pi * r / q)
        phases[0] = 1.0
        # quarter-turn residues are set exactly so that phases with q | 4r carry no rounding
        for k, val in ((1, -1j), (2, -1.0), (3, 1j)):
            if (k * q) % 4 == 0:
                phases[k * q // 4] = val
        phases.setflags(write=False)
        return cls(q, phases)

    @classmethod
    def for_resonance(cls, r: ResonanceParams) -> "PhaseTable":
        return cls.build(r.q)


@dataclass(frozen=True)
class Banded:
    tail_tol: float = DEFAULT_TAIL_TOL


@dataclass(frozen=True)
class Spectral:
    """Split-operator back-end; ``grid_size=None`` picks the smallest adequate power of two."""

    grid_size: int | None = None
    tail_tol: float = DEFAULT_TAIL_TOL


def _phase_residues(j: np.ndarray, r: ResonanceParams) -> np.ndarray:
    jm = np.mod(j, r.q).astype(np.int64)
    return (2 * r.p * ((jm * jm) % r.q)) % r.q


def free_phase(j: int, r: ResonanceParams, table: PhaseTable | None = None) -> complex:
    """Free-rotor phase ``exp(-4 pi i (p/q) j^2)`` from exact integer residues."""
    table = table or PhaseTable.for_resonance(r)
    if table.q != r.q:
        raise ValueError(f"phase table built for q={table.q}, resonance has q={r.q}")
    jm = j % r.q
    return complex(table.phases[(2 * r.p * ((jm * jm) % r.q)) % r.q])


def free_phases(l_min: int, size: int, r: ResonanceParams,
                table: PhaseTable | None = None) -> np.ndarray:
    """Vector of free phases on the lattice ``l_min .. l_min + size - 1``."""
    table = table or PhaseTable.for_resonance(r)
    if table.q != r.q:
        raise ValueError(f"phase table built for q={table.q}, resonance has q={r.q}")
    return table.phases[_phase_residues(np.arange(l_min, l_min + size), r)]


# --------------------------------------------------------------------------
# analytic (primary resonance)


def _required_halfwidth(initial: InitialCondition, cutoff: int) -> int:
    return cutoff + support_radius(initial)


def analytic_amplitudes(initial: InitialCondition, n_star: float, halfwidth: int | None = None,
                        tail_tol: float = DEFAULT_TAIL_TOL, step: int = 0) -> WaveState:
    """Closed-form state after accumulated kick ``n_star`` at a primary resonance.

    ``a_l = sum_j (-i)^(l-j) a_j(0) J_{l-j}(n_star)`` on the lattice
    ``[-halfwidth, halfwidth]``.  With ``halfwidth=None`` the smallest lattice
    holding the Bessel band is used.
    """
    if n_star < 0:
        raise ValueError(f"n_star must be non-negative, got {n_star}")
    cutoff, kernel = signed_band(n_star, tail_tol)
    need = _required_halfwidth(initial, cutoff)
    if halfwidth is None:
        halfwidth = need
    elif halfwidth < need:
        raise TruncationError(
            f"halfwidth {halfwidth} too small for n*={n_star}; need {need}", need)
    return _place_convolution(initial, cutoff, kernel, halfwidth, step)


def _place_convolution(initial, cutoff, kernel, halfwidth, step) -> WaveState:
    offset, amps = initial_offset_and_amplitudes(initial)
    full = np.convolve(amps, kernel)
    lo = offset - cutoff
    a = np.zeros(2 * halfwidth + 1, dtype=complex)
    a[lo + halfwidth:lo + halfwidth + full.size] = full
    return WaveState(a, -halfwidth, step, 0.0)


def analytic_states(initial: InitialCondition, n_stars: np.ndarray, tail_tol: float,
                     first_step: int = 0, chunk: int = 64) -> Iterator[WaveState]:
    """Closed-form states for a sequence of accumulated kicks, batching the Bessel sweep."""
    for start in range(0, n_stars.size, chunk):
        xs = n_stars[start:start + chunk]
        xmax = float(xs.max())
        # one band wide enough for the largest argument of the batch
        cutoff = signed_band(xmax, tail_tol)[0]
        table = bessel_table(xs, cutoff)
        halfwidth = _required_halfwidth(initial, cutoff)
        for i, values in enumerate(table):
            yield _place_convolution(initial, cutoff, kick_kernel(values), halfwidth,
                                     first_step + start + i)


# --------------------------------------------------------------------------
# lattice management


def _grow(state: WaveState, band: int, policy: TruncationPolicy) -> WaveState:
    """Pad the lattice until the outer ``max(growth_chunk, band)`` sites are empty enough."""
    a = state.amplitudes
    l_min = state.l_min
    width = max(policy.growth_chunk, band)
    prob = a.real ** 2 + a.imag ** 2
    pad_lo = pad_hi = 0
    lo_edge = l_min
    hi_edge = state.l_max
    # after padding by k chunks, the outer `width` sites contain old sites
    # only if k * chunk < width
    while True:
        covered = width - pad_lo * policy.growth_chunk
        if covered <= 0 or np.sum(prob[:covered]) <= policy.edge_threshold:
            break
        if lo_edge - policy.growth_chunk < -policy.max_halfwidth:
            break
        pad_lo += 1
        lo_edge -= policy.growth_chunk
    while True:
        covered = width - pad_hi * policy.growth_chunk
        if covered <= 0 or np.sum(prob[prob.size - covered:]) <= policy.edge_threshold:
            break
        if hi_edge + policy.growth_chunk > policy.max_halfwidth:
            break
        pad_hi += 1
        hi_edge += policy.growth_chunk
    if pad_lo == 0 and pad_hi == 0:
        return state
    n_lo = pad_lo * policy.growth_chunk
    n_hi = pad_hi * policy.growth_chunk
    grown = np.concatenate([np.zeros(n_lo, complex), a, np.zeros(n_hi, complex)])
    return WaveState(grown, l_min - n_lo, state.step, state.leaked_norm)


def _finish(full: np.ndarray, band: int, state: WaveState, policy: TruncationPolicy) -> WaveState:
    """Clip a step result computed on ``[l_min - band, l_max + band]`` back to the lattice."""
    size = state.amplitudes.size
    inner = full[band:band + size]
    spill = full[:band], full[band + size:]
    leaked = sum(float(np.sum(s.real ** 2 + s.imag ** 2)) for s in spill)
    total_leak = state.leaked_norm + leaked
    if total_leak > policy.leak_budget:
        raise TruncationError(
            f"lattice [{state.l_min}, {state.l_max}] cannot hold the state: leaked "
            f"{total_leak:.3e} beyond max_halfwidth {policy.max_halfwidth}")
    return WaveState(inner, state.l_min, state.step + 1, total_leak)


def step_banded(state: WaveState, r: ResonanceParams, kappa: float,
                table: PhaseTable | None = None, tail_tol: float = DEFAULT_TAIL_TOL,
                policy: TruncationPolicy | None = None) -> WaveState:
    """Apply one free rotation plus one kick by direct convolution with the Bessel band."""
    policy = policy or TruncationPolicy()
    if kappa < 0:
        raise ValueError(f"kick strength must be non-negative, got {kappa}")
    band, kernel = signed_band(kappa, tail_tol)
    state = _grow(state, band, policy)
    phased = state.amplitudes * free_phases(state.l_min, state.amplitudes.size, r, table)
    full = np.convolve(phased, kernel) if band else phased
    return _finish(full, band, state, policy)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def step_spectral(state: WaveState, r: ResonanceParams, kappa: float,
                  table: PhaseTable | None = None, grid_size: int | None = None,
                  tail_tol: float = DEFAULT_TAIL_TOL,
                  policy: TruncationPolicy | None = None) -> WaveState:
    """Apply one step as free phase, FFT to angle, pointwise kick, FFT back.

    The grid must hold the lattice plus one Bessel band on each side without
    wrap-around; a user-supplied ``grid_size`` that is too small raises
    AliasingError.
    """
    policy = policy or TruncationPolicy()
    if kappa < 0:
        raise ValueError(f"kick strength must be non-negative, got {kappa}")
    band = signed_band(kappa, tail_tol)[0]
    state = _grow(state, band, policy)
    size = state.amplitudes.size
    need = size + 2 * band
    if grid_size is None:
        grid_size = _next_pow2(need)
    elif grid_size < need:
        raise AliasingError(
            f"grid of {grid_size} points aliases a lattice of {size} sites with kick band "
            f"{band}; need at least {need}", need)
    phased = state.amplitudes * free_phases(state.l_min, size, r, table)
    if kappa == 0:
        return _finish(phased, 0, state, policy)
    grid = np.zeros(grid_size, dtype=complex)
    lo = state.l_min
    grid[np.arange(lo, lo + size) % grid_size] = phased
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    # ifft gives psi(theta_k) / G, fft undoes it exactly
    kicked = np.fft.fft(np.fft.ifft(grid) * np.exp(-1j * kappa * np.cos(theta)))
    full = kicked[np.arange(lo - band, lo + size + band) % grid_size]
    return _finish(full, band, state, policy)


# --------------------------------------------------------------------------
# evolution driver


@dataclass
class EvolutionResult:
    series: obs.TimeSeries
    final: WaveState
    snapshots: dict[int, WaveState] = field(default_factory=dict)
    step_seconds: np.ndarray | None = None

    def __iter__(self):
        # allows `series, final, snapshots = evolve(cfg)`
        return iter((self.series, self.final, self.snapshots))


def _stepper(config: RunConfig, backend) -> Callable[[WaveState, float], WaveState]:
    r = config.resonance
    table = PhaseTable.for_resonance(r)
    policy = config.truncation
    if config.backend is Backend.SPECTRAL:
        grid = backend.grid_size if isinstance(backend, Spectral) else None
        return lambda s, k: step_spectral(s, r, k, table, grid, config.tail_tol, policy)
    return lambda s, k: step_banded(s, r, k, table, config.tail_tol, policy)


def _check_norm(state: WaveState, n: int) -> float:
    err = state.norm + state.leaked_norm - 1.0
    if not abs(err) <= NORM_ABORT:
        raise NumericalError(
            f"norm error {err:.3e} at step {n} (lattice [{state.l_min}, {state.l_max}], "
            f"leaked {state.leaked_norm:.3e})")
    return err


def start_state(config: RunConfig) -> WaveState:
    """Initial state on the smallest chunk-sized lattice holding the initial support."""
    halfwidth = max(config.truncation.growth_chunk, support_radius(config.initial))
    return initial_state(config.initial, halfwidth)


def evolve(config: RunConfig, backend: Banded | Spectral | None = None,
           timing: bool = False) -> EvolutionResult:
    """Run ``config.steps`` kicks and record moments after every kick.

    Records are stroboscopic and post-kick: row ``n`` describes the state right
    after the ``n``-th kick, row 0 the initial state.  The analytic back-end
    evaluates the closed form at every recorded step instead of iterating.
    Raises NumericalError if the norm drifts by more than 1e-8.
    """
    n_steps = config.steps
    kicks = kick_strengths(config.schedule, n_steps)
    n_stars = cumulative_kicks(config.schedule, n_steps)
    wanted = config.snapshot_steps
    snapshots: dict[int, WaveState] = {}
    rows = []
    seconds = np.zeros(n_steps) if timing else None

    state = start_state(config)

    def record(s: WaveState, n: int):
        err = _check_norm(s, n)
        m1, m2 = obs.moments(s)
        rows.append((n, n_stars[n], m1, m2, math.sqrt(max(0.0, m2 - m1 * m1)), err))
        if n in wanted:
            snapshots[n] = s

    record(state, 0)
    if config.backend is Backend.ANALYTIC:
        t0 = time.perf_counter()
        for s in analytic_states(config.initial, n_stars[1:], config.tail_tol, first_step=1):
            state = s
            record(s, s.step)
            if timing:
                t1 = time.perf_counter()
                seconds[s.step - 1] = t1 - t0
                t0 = t1
    else:
        step = _stepper(config, backend)
        for n in range(1, n_steps + 1):
            t0 = time.perf_counter()
            state = step(state, float(kicks[n - 1]))
            if timing:
                seconds[n - 1] = time.perf_counter() - t0
            record(state, n)

    series = obs.TimeSeries.from_rows(rows)
    return EvolutionResult(series, state, snapshots, seconds)


def max_amplitude_difference(a: WaveState, b: WaveState) -> float:
    """Max-norm distance between two states, zero-padding the shorter lattice."""
    lo = min(a.l_min, b.l_min)
    hi = max(a.l_max, b.l_max)
    return float(np.max(np.abs(a.on_lattice(lo, hi) - b.on_lattice(lo, hi))))

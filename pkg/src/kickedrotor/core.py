"""Domain types shared by the simulator: resonances, kick schedules,
initial conditions, wave states and run configuration.

Angular momentum is measured in units of hbar, so the lattice index ``l`` is an
integer.  The kick strength ``kappa(n)`` is dimensionless (``K(n) / hbar``)
and is indexed from ``n = 1``; step ``n = 0`` is the state before any kick.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "KickedRotorError",
    "ValidationError",
    "DomainError",
    "TruncationError",
    "AliasingError",
    "NumericalError",
    "ResonanceParams",
    "PowerLaw",
    "Constant",
    "Explicit",
    "KickSchedule",
    "DeltaAt",
    "Custom",
    "InitialCondition",
    "WaveState",
    "TruncationPolicy",
    "Backend",
    "RunConfig",
    "make_resonance",
    "kick_strength",
    "kick_strengths",
    "cumulative_kick",
    "cumulative_kicks",
    "initial_state",
    "load_explicit_schedule",
]


class KickedRotorError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(KickedRotorError, ValueError):
    """Invalid parameters or configuration."""


class DomainError(KickedRotorError, ValueError):
    """Argument outside the domain of a function or schedule."""


class TruncationError(KickedRotorError, RuntimeError):
    """The momentum lattice is too small for the requested operation."""

    def __init__(self, message: str, required_halfwidth: int | None = None):
        super().__init__(message)
        self.required_halfwidth = required_halfwidth


class AliasingError(TruncationError):
    """FFT grid too small for the occupied lattice plus the kick band."""


class NumericalError(KickedRotorError, RuntimeError):
    """Norm conservation violated beyond tolerance."""


# --------------------------------------------------------------------------
# resonance


@dataclass(frozen=True)
class ResonanceParams:
    """Resonant scale parameter ``tau = 2 pi p / q`` stored as a reduced fraction."""

    p: int
    q: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not isinstance(self.q, (int, np.integer)):
            raise ValidationError(f"p and q must be integers, got {self.p!r}, {self.q!r}")
        if self.p < 1 or self.q < 1:
            raise ValidationError(f"p and q must be positive, got p={self.p}, q={self.q}")
        g = math.gcd(int(self.p), int(self.q))
        object.__setattr__(self, "p", int(self.p) // g)
        object.__setattr__(self, "q", int(self.q) // g)

    @property
    def tau(self) -> float:
        return 2.0 * math.pi * self.p / self.q

    def is_primary(self) -> bool:
        return self.q == 1

    def __str__(self):
        return f"{self.p}/{self.q}"


def make_resonance(p: int, q: int) -> ResonanceParams:
    """Build the reduced resonance ``p/q``; raises ValidationError if ``p, q < 1``."""
    return ResonanceParams(p, q)


# --------------------------------------------------------------------------
# kick schedules


@dataclass(frozen=True)
class PowerLaw:
    """``kappa(n) = kappa0 * n**(-alpha)``; any real ``alpha``."""

    kappa0: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.kappa0 > 0 and math.isfinite(self.kappa0)):
            raise ValidationError(f"kappa0 must be positive and finite, got {self.kappa0}")
        if not math.isfinite(self.alpha):
            raise ValidationError(f"alpha must be finite, got {self.alpha}")

    @property
    def length(self) -> int | None:
        return None


@dataclass(frozen=True)
class Constant:
    kappa0: float = 1.0

    def __post_init__(self):
        if not (self.kappa0 > 0 and math.isfinite(self.kappa0)):
            raise ValidationError(f"kappa0 must be positive and finite, got {self.kappa0}")

    @property
    def length(self) -> int | None:
        return None


@dataclass(frozen=True)
class Explicit:
    """Arbitrary finite kick sequence; ``values[0]`` is the kick at ``n = 1``."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ValidationError("explicit kick values must be finite and non-negative")
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int | None:
        return len(self.values)


KickSchedule = Union[PowerLaw, Constant, Explicit]


def _check_domain(schedule: KickSchedule, n: int, lowest: int) -> None:
    if n < lowest:
        raise DomainError(f"step index must be >= {lowest}, got {n}")
    if schedule.length is not None and n > schedule.length:
        raise DomainError(f"step {n} beyond explicit schedule of length {schedule.length}")


def kick_strength(schedule: KickSchedule, n: int) -> float:
    """Dimensionless kick strength applied at step ``n >= 1``."""
    _check_domain(schedule, n, 1)
    if isinstance(schedule, PowerLaw):
        if schedule.alpha == 0:
            return float(schedule.kappa0)
        return schedule.kappa0 * float(n) ** (-schedule.alpha)
    if isinstance(schedule, Constant):
        return float(schedule.kappa0)
    return schedule.values[n - 1]


def kick_strengths(schedule: KickSchedule, n: int) -> np.ndarray:
    """Array ``[kappa(1), ..., kappa(n)]``."""
    _check_domain(schedule, n, 0)
    if isinstance(schedule, Explicit):
        return np.asarray(schedule.values[:n], dtype=float)
    if isinstance(schedule, Constant) or schedule.alpha == 0:
        return np.full(n, float(schedule.kappa0))
    steps = np.arange(1, n + 1, dtype=float)
    return schedule.kappa0 * steps ** (-schedule.alpha)


def cumulative_kicks(schedule: KickSchedule, n: int) -> np.ndarray:
    """Accumulated kick ``n*(m)`` for ``m = 0..n``; entry 0 is zero."""
    _check_domain(schedule, n, 0)
    if isinstance(schedule, Constant) or (isinstance(schedule, PowerLaw) and schedule.alpha == 0):
        return schedule.kappa0 * np.arange(n + 1, dtype=float)
    out = np.zeros(n + 1)
    np.cumsum(kick_strengths(schedule, n), out=out[1:])
    return out


def cumulative_kick(schedule: KickSchedule, n: int) -> float:
    """``n* = sum_{m=1}^{n} kappa(m)``, the argument of the primary-resonance propagator."""
    return float(cumulative_kicks(schedule, n)[-1])


def load_explicit_schedule(path: str | Path) -> Explicit:
    """Read one non-negative decimal per line; blank and ``#`` lines are skipped."""
    values = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: not a number: {line!r}") from None
    return Explicit(tuple(values))


# --------------------------------------------------------------------------
# initial conditions and states


@dataclass(frozen=True)
class DeltaAt:
    """All probability on angular momentum ``m``."""

    m: int = 0

    @property
    def support(self) -> tuple[int, int]:
        return self.m, self.m


@dataclass(frozen=True, eq=False)
class Custom:
    """Finitely supported amplitudes; ``amplitudes[i]`` sits at ``l = offset + i``."""

    amplitudes: np.ndarray
    offset: int = 0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size == 0:
            raise ValidationError("custom initial condition needs at least one amplitude")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"custom amplitudes must have unit norm, got {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def normalized(cls, amplitudes, offset: int = 0) -> "Custom":
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(amps / np.linalg.norm(amps), offset)

    @property
    def support(self) -> tuple[int, int]:
        return self.offset, self.offset + self.amplitudes.size - 1

    def __eq__(self, other):
        return (isinstance(other, Custom) and self.offset == other.offset
                and np.array_equal(self.amplitudes, other.amplitudes))

    def __hash__(self):
        return hash((self.offset, self.amplitudes.tobytes()))


InitialCondition = Union[DeltaAt, Custom]


def initial_offset_and_amplitudes(ic: InitialCondition) -> tuple[int, np.ndarray]:
    if isinstance(ic, DeltaAt):
        return ic.m, np.ones(1, dtype=complex)
    return ic.offset, ic.amplitudes


def support_radius(ic: InitialCondition) -> int:
    lo, hi = ic.support
    return max(abs(lo), abs(hi))


@dataclass(frozen=True, eq=False)
class WaveState:
    """Amplitudes ``a_l`` on the contiguous lattice ``l_min .. l_min + len - 1``.

    ``leaked_norm`` accumulates the probability discarded at the lattice edge,
    so ``sum |a_l|^2 + leaked_norm`` stays at one for a unitary evolution.
    """

    amplitudes: np.ndarray
    l_min: int
    step: int = 0
    leaked_norm: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "l_min", int(self.l_min))

    @property
    def l_max(self) -> int:
        return self.l_min + self.amplitudes.size - 1

    @property
    def momenta(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_min + self.amplitudes.size)

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real ** 2 + self.amplitudes.imag ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))

    def amplitude(self, l: int) -> complex:
        i = l - self.l_min
        if 0 <= i < self.amplitudes.size:
            return complex(self.amplitudes[i])
        return 0j

    def on_lattice(self, l_min: int, l_max: int) -> np.ndarray:
        """Amplitudes on ``[l_min, l_max]``, zero outside the stored lattice."""
        out = np.zeros(l_max - l_min + 1, dtype=complex)
        lo = max(l_min, self.l_min)
        hi = min(l_max, self.l_max)
        if lo <= hi:
            out[lo - l_min:hi - l_min + 1] = self.amplitudes[lo - self.l_min:hi - self.l_min + 1]
        return out

    def to_csv(self, path: str | Path) -> None:
        """Write ``l,re,im,prob`` rows at full double precision."""
        lines = ["l,re,im,prob"]
        for l, a, p in zip(self.momenta, self.amplitudes, self.probabilities):
            lines.append(f"{l},{float(a.real)!r},{float(a.imag)!r},{float(p)!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_csv(cls, path: str | Path, step: int = 0) -> "WaveState":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        l = data[:, 0].astype(int)
        if l.size and np.any(np.diff(l) != 1):
            raise ValidationError(f"{path}: lattice is not contiguous")
        return cls(data[:, 1] + 1j * data[:, 2], int(l[0]) if l.size else 0, step)


def initial_state(ic: InitialCondition, halfwidth: int) -> WaveState:
    """Normalized state on the lattice ``[-halfwidth, halfwidth]`` at step 0."""
    if halfwidth < 1:
        raise ValidationError(f"halfwidth must be positive, got {halfwidth}")
    lo, hi = ic.support
    if lo < -halfwidth or hi > halfwidth:
        raise ValidationError(
            f"initial support [{lo}, {hi}] does not fit in lattice of halfwidth {halfwidth}")
    offset, amps = initial_offset_and_amplitudes(ic)
    a = np.zeros(2 * halfwidth + 1, dtype=complex)
    a[offset + halfwidth:offset + halfwidth + amps.size] = amps
    return WaveState(a, -halfwidth, 0, 0.0)


# --------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class TruncationPolicy:
    """Adaptive lattice growth.

    The lattice grows by ``growth_chunk`` sites on a side whenever the outer
    ``max(growth_chunk, band)`` sites on that side hold more than
    ``edge_threshold`` probability.  Growth stops at ``|l| = max_halfwidth``;
    probability pushed past it is moved into ``leaked_norm`` and a
    TruncationError is raised once that exceeds ``leak_budget``.
    """

    edge_threshold: float = 1e-14
    growth_chunk: int = 64
    max_halfwidth: int = 2 ** 20
    leak_budget: float = 1e-9

    def __post_init__(self):
        if not self.edge_threshold > 0:
            raise ValidationError("edge_threshold must be positive")
        if self.growth_chunk < 1:
            raise ValidationError("growth_chunk must be >= 1")
        if self.max_halfwidth < 1:
            raise ValidationError("max_halfwidth must be >= 1")


class Backend(str, enum.Enum):
    ANALYTIC = "analytic"
    BANDED = "banded"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class RunConfig:
    resonance: ResonanceParams = field(default_factory=lambda: ResonanceParams(1, 1))
    schedule: KickSchedule = field(default_factory=PowerLaw)
    initial: InitialCondition = field(default_factory=DeltaAt)
    steps: int = 100
    backend: Backend = Backend.BANDED
    truncation: TruncationPolicy = field(default_factory=TruncationPolicy)
    snapshot_steps: frozenset[int] = frozenset()
    tail_tol: float = 1e-30

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        object.__setattr__(self, "snapshot_steps", frozenset(int(s) for s in self.snapshot_steps))
        if self.steps < 0:
            raise ValidationError(f"steps must be non-negative, got {self.steps}")
        if self.backend is Backend.ANALYTIC and not self.resonance.is_primary():
            raise ValidationError(
                f"analytic backend needs a primary resonance (q = 1), got {self.resonance}")
        length = self.schedule.length
        if length is not None and self.steps > length:
            raise ValidationError(
                f"{self.steps} steps requested but explicit schedule has {length} values")
        if any(s < 0 or s > self.steps for s in self.snapshot_steps):
            raise ValidationError("snapshot steps must lie in [0, steps]")
        if not self.tail_tol > 0:
            raise ValidationError("tail_tol must be positive")

    def replace(self, **changes) -> "RunConfig":
        from dataclasses import replace
        return replace(self, **changes)

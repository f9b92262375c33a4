"""Built-in self-checks: Bessel identities, unitarity, back-end agreement,
moment formulas and reflection symmetry.  Used by ``kickedrotor validate``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Custom, DeltaAt, PowerLaw, ResonanceParams, initial_state, kick_strengths
from .observables import analytic_moments, moments
from .propagator import (PhaseTable, analytic_amplitudes, max_amplitude_difference, step_banded,
                         step_spectral)
from .specfun import bessel_band


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


def _bessel_normalization() -> float:
    return max(bessel_band(x, int(x) + 200).normalization_error()
               for x in (0.5, 1.0, 5.0, 20.0, 100.0, 1000.0))


def _bessel_recurrence() -> float:
    worst = 0.0
    for x in (0.5, 1.0, 5.0, 20.0, 100.0, 1000.0):
        j = bessel_band(x, int(x) + 60).values
        m = np.arange(1, j.size - 1)
        resid = np.abs(j[m - 1] + j[m + 1] - (2 * m / x) * j[m])
        worst = max(worst, float(np.max(resid)))
    return worst


def _run(r, schedule, steps, table, spectral=False):
    state = initial_state(DeltaAt(0), 64)
    states = [state]
    for k in kick_strengths(schedule, steps):
        if spectral:
            state = step_spectral(state, r, float(k), table)
        else:
            state = step_banded(state, r, float(k), table)
        states.append(state)
    return states


def run_checks(phase_table: Callable[[int], PhaseTable] = PhaseTable.build) -> list[CheckResult]:
    """Run every identity check; ``phase_table`` lets tests inject a faulty table."""
    results = [
        CheckResult("bessel normalization J0^2 + 2 sum Jm^2 = 1", _bessel_normalization(), 1e-10),
        CheckResult("bessel three-term recurrence residual", _bessel_recurrence(), 1e-10),
    ]
    secondary = ResonanceParams(2, 5)
    primary = ResonanceParams(1, 1)
    sched = PowerLaw(1.0, 0.1)
    banded = _run(secondary, sched, 50, phase_table(5))
    spectral = _run(secondary, sched, 50, phase_table(5), spectral=True)
    norm_dev = max(abs(s.norm + s.leaked_norm - 1.0) for s in banded + spectral)
    results.append(CheckResult("unitarity, 50 steps at 2/5 (both back-ends)", norm_dev, 1e-10))
    diff = max(max_amplitude_difference(a, b) for a, b in zip(banded, spectral))
    results.append(CheckResult("banded vs spectral agreement at 2/5", diff, 1e-10))
    sym = 0.0
    odd = 0.0
    for s in banded + spectral:
        half = max(-s.l_min, s.l_max)
        pa = np.abs(s.on_lattice(-half, half)) ** 2
        sym = max(sym, float(np.max(np.abs(pa - pa[::-1]))))
        odd = max(odd, abs(moments(s)[0]))
    results.append(CheckResult("reflection symmetry P_l = P_-l", sym, 1e-12))
    results.append(CheckResult("first moment vanishes for symmetric start", odd, 1e-10))

    prim_sched = PowerLaw(1.0, 0.5)
    prim = _run(primary, prim_sched, 100, phase_table(1))
    n_star = float(np.sum(kick_strengths(prim_sched, 100)))
    exact = analytic_amplitudes(DeltaAt(0), n_star)
    results.append(CheckResult("numeric evolution equals closed form at q = 1",
                               max_amplitude_difference(prim[-1], exact), 1e-8))

    worst = 0.0
    ics = (DeltaAt(0), DeltaAt(3), Custom.normalized([1, 0, 1], -1))
    for ic in ics:
        for x in (0.5, 5.0, 50.0, 500.0):
            m1, m2, _ = analytic_moments(ic, x)
            b1, b2 = moments(analytic_amplitudes(ic, x))
            worst = max(worst, abs(m1 - b1) / max(1.0, abs(b1)), abs(m2 - b2) / max(1.0, abs(b2)))
    results.append(CheckResult("closed-form moments vs brute force", worst, 1e-8))
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'value':>10}  {'tol':>8}  result"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {r.value:>10.3e}  {r.tolerance:>8.0e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)

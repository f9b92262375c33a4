"""Acceptance criteria, one printed PASS/FAIL line per check.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
when output capture is on) or directly with ``python tests/test_acceptance.py``.
Evolutions are cached so that the unitarity and symmetry criterion can be
checked over every run made by the other criteria.
"""

import math
import sys
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kickedrotor.core import Backend, Custom, DeltaAt, PowerLaw, RunConfig, make_resonance
from kickedrotor.observables import (FitModel, analytic_moments, fit_gamma, gaussian_gof_pvalue,
                                     profile_widths)
from kickedrotor.propagator import analytic_amplitudes, evolve, max_amplitude_difference
from kickedrotor.specfun import bessel_band

from oracles import bessel_series, brute_moments

pytestmark = pytest.mark.acceptance

_RUNS = {}
_CAPSYS = []


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    _CAPSYS.append(capsys)
    yield
    _CAPSYS.pop()


def report(ok, label, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    if _CAPSYS:
        with _CAPSYS[-1].disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def run(p, q, alpha, steps, backend, every=1):
    """Cached evolution with snapshots every ``every`` steps."""
    key = (p, q, alpha, steps, backend, every)
    if key not in _RUNS:
        cfg = RunConfig(make_resonance(p, q), PowerLaw(1.0, alpha), DeltaAt(0), steps,
                        backend=backend, snapshot_steps=frozenset(range(0, steps + 1, every)))
        t0 = time.perf_counter()
        result = evolve(cfg)
        _RUNS[key] = (result, time.perf_counter() - t0)
    return _RUNS[key]


# 1 ------------------------------------------------------------------------

def test_c1_analytic_numeric_equivalence():
    worst_amp = worst_sigma = 0.0
    elapsed = 0.0
    for alpha in (0.0, 0.5, 1.0, 2.0):
        (ref, _, ref_snaps), t = run(1, 1, alpha, 200, Backend.ANALYTIC)
        elapsed += t
        for backend in (Backend.BANDED, Backend.SPECTRAL):
            (series, _, snaps), t = run(1, 1, alpha, 200, backend)
            elapsed += t
            for n, s in snaps.items():
                worst_amp = max(worst_amp, max_amplitude_difference(s, ref_snaps[n]))
            rel = np.abs(series.sigma[1:] - ref.sigma[1:]) / ref.sigma[1:]
            worst_sigma = max(worst_sigma, float(rel.max()))
    ok = worst_amp <= 1e-8 and worst_sigma <= 1e-8 and elapsed < 10
    assert report(ok, "criterion 1 analytic vs numeric, q=1, N=200",
                  f"max amplitude diff {worst_amp:.2e} (<=1e-8), sigma rel diff "
                  f"{worst_sigma:.2e} (<=1e-8), runtime {elapsed:.2f} s (<10 s)")


# 2 ------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [-0.2, 0.0, 0.25, 0.5, 0.75])
def test_c2_primary_exponent(alpha):
    (series, _, _), _ = run(1, 1, alpha, 1000, Backend.ANALYTIC, every=10)
    fit = fit_gamma(series, 100)
    ok = abs(fit.gamma - (1 - alpha)) <= 0.02
    assert report(ok, f"criterion 2 primary exponent alpha={alpha}",
                  f"gamma {fit.gamma:.4f}, expected {1 - alpha:.4f} +- 0.02")


def test_c2_primary_logarithmic():
    (series, _, _), _ = run(1, 1, 1.0, 1000, Backend.ANALYTIC, every=10)
    fit = fit_gamma(series, 100)
    ok = fit.model is FitModel.LOGARITHMIC and fit.rms_residual > fit.log_rms_residual
    assert report(ok, "criterion 2 primary alpha=1 logarithmic",
                  f"model {fit.model.value}, power-law rms {fit.rms_residual:.2e} > "
                  f"log rms {fit.log_rms_residual:.2e}")


def test_c2_primary_bounded():
    (series, _, _), _ = run(1, 1, 2.0, 1000, Backend.ANALYTIC, every=10)
    # partial zeta sum summed in 40-digit arithmetic
    with mp.workdps(40):
        limit = float(mp.fsum(mp.mpf(m) ** -2 for m in range(1, 1001)) / mp.sqrt(2))
    bounded = bool(np.all(np.diff(series.sigma) >= 0)) and series.sigma.max() <= limit + 1e-6
    err = abs(series.sigma[-1] - limit)
    ok = bounded and err <= 1e-6
    assert report(ok, "criterion 2 primary alpha=2 bounded",
                  f"sigma(1000) {series.sigma[-1]:.12f}, limit {limit:.12f}, diff {err:.1e} (<=1e-6)")


# 3 ------------------------------------------------------------------------

def test_c3_delta_closed_forms():
    worst_sigma = worst_prob = 0.0
    checked = 0
    for alpha in (0.0, 0.5, 1.0, 2.0):
        run(1, 1, alpha, 200, Backend.BANDED)
    keys = [k for k in _RUNS if k[1] == 1]
    for key in keys:
        (series, _, snaps), _ = _RUNS[key]
        s = series.sigma[1:]
        rel = np.abs(s - series.n_star[1:] / math.sqrt(2)) / s
        worst_sigma = max(worst_sigma, float(rel.max()))
        for n, state in snaps.items():
            half = max(-state.l_min, state.l_max)
            j = bessel_band(float(series.n_star[n]), half).values
            ref = np.concatenate([j[:0:-1], j]) ** 2
            prob = np.abs(state.on_lattice(-half, half)) ** 2
            worst_prob = max(worst_prob, float(np.max(np.abs(prob - ref))))
            checked += 1
    ok = worst_sigma <= 1e-8 and worst_prob <= 1e-10
    assert report(ok, "criterion 3 delta closed forms",
                  f"{len(keys)} primary runs, {checked} profiles: sigma rel {worst_sigma:.2e} "
                  f"(<=1e-8), P_l abs {worst_prob:.2e} (<=1e-10)")


# 4 ------------------------------------------------------------------------

LADDER = [(-0.1, 1.4, 0.15), (0.0, 1.0, 0.05), (0.1, 0.5, 0.15), (0.2, 0.0, 0.15)]


@pytest.mark.parametrize("alpha, target, tol", LADDER)
def test_c4_secondary_ladder(alpha, target, tol):
    (series, _, _), t = run(2, 5, alpha, 1000, Backend.BANDED, every=50)
    fit = fit_gamma(series, 100)
    ok = abs(fit.gamma - target) <= tol
    assert report(ok, f"criterion 4 secondary 2/5 alpha={alpha}",
                  f"gamma {fit.gamma:.4f}, expected {target} +- {tol} (N=1000, kappa0=1, "
                  f"{t:.1f} s)")


def test_c4_secondary_ordering():
    gammas = [fit_gamma(run(2, 5, a, 1000, Backend.BANDED, every=50)[0].series, 100).gamma
              for a, _, _ in LADDER]
    ok = all(a > b for a, b in zip(gammas, gammas[1:]))
    assert report(ok, "criterion 4 secondary ladder ordering",
                  "gammas " + ", ".join(f"{g:.3f}" for g in gammas) + " strictly decreasing")


# 5 ------------------------------------------------------------------------

def test_c5_unitarity_and_symmetry():
    if not _RUNS:
        # run on its own: use a representative set
        for alpha in (0.0, 0.5):
            run(1, 1, alpha, 200, Backend.BANDED)
        run(2, 5, 0.1, 200, Backend.BANDED, every=10)
    norm = leak = sym = odd = 0.0
    for (series, final, snaps), _ in _RUNS.values():
        norm = max(norm, float(np.max(np.abs(series.norm_error))))
        leak = max(leak, final.leaked_norm)
        odd = max(odd, float(np.max(np.abs(series.m1))))
        for s in list(snaps.values()) + [final]:
            half = max(-s.l_min, s.l_max)
            p = np.abs(s.on_lattice(-half, half)) ** 2
            sym = max(sym, float(np.max(np.abs(p - p[::-1]))))
    ok = norm <= 1e-10 and leak <= 1e-9 and sym <= 1e-12 and odd <= 1e-10
    assert report(ok, f"criterion 5 unitarity and symmetry over {len(_RUNS)} runs",
                  f"norm dev {norm:.2e} (<=1e-10), leaked {leak:.2e} (<=1e-9), "
                  f"|P_l - P_-l| {sym:.2e} (<=1e-12), |M1| {odd:.2e} (<=1e-10)")


# 6 ------------------------------------------------------------------------

def test_c6_cross_backend():
    worst = 0.0
    for p, q, alpha in ((1, 1, 0.0), (2, 5, 0.0), (2, 5, 0.1)):
        _, _, b = run(p, q, alpha, 50, Backend.BANDED)[0]
        _, _, s = run(p, q, alpha, 50, Backend.SPECTRAL)[0]
        worst = max(worst, max(max_amplitude_difference(b[n], s[n]) for n in b))
    ok = worst <= 1e-10
    assert report(ok, "criterion 6 banded vs spectral, 50 steps",
                  f"max amplitude diff {worst:.2e} (<=1e-10)")


# 7 ------------------------------------------------------------------------

def test_c7_moment_oracle():
    ics = [DeltaAt(0), Custom.normalized([1, 1j, -0.5], -1),
           Custom.normalized([0.3, 0.2 - 0.4j, 0.8, 0.1j], 2)]
    worst = 0.0
    for ic in ics:
        for x in (0.5, 3.0, 40.0, 400.0):
            m1, m2, _ = analytic_moments(ic, x)
            s = analytic_amplitudes(ic, x)
            b1, b2 = brute_moments(s.momenta, s.probabilities)
            worst = max(worst, abs(m2 - b2) / abs(b2), abs(m1 - b1) / max(abs(b1), 1.0))
    ok = worst <= 1e-8
    assert report(ok, "criterion 7 moment formulas, 12 cases",
                  f"max relative diff {worst:.2e} (<=1e-8)")


# 8 ------------------------------------------------------------------------

def test_c8_bessel_layer():
    norm = max(bessel_band(x, int(x) + 100).normalization_error()
               for x in (0.5, 1.0, 5.0, 20.0, 100.0, 1000.0))
    series_err = 0.0
    for x in (0.1, 0.5, 1.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0):
        v = bessel_band(x, 30).values
        for m in range(31):
            ref = bessel_series(m, x)
            if abs(ref) > 1e-280:
                series_err = max(series_err, abs(v[m] - ref) / abs(ref))
    rec = 0.0
    for x in (0.5, 1.0, 5.0, 20.0, 100.0, 1000.0):
        j = bessel_band(x, int(x) + 100).values
        m = np.arange(1, j.size - 1)
        rec = max(rec, float(np.max(np.abs(j[m - 1] + j[m + 1] - 2 * m / x * j[m]))))
    ok = norm <= 1e-10 and series_err <= 1e-12 and rec <= 1e-10
    assert report(ok, "criterion 8 Bessel layer",
                  f"normalization {norm:.2e} (<=1e-10), series rel {series_err:.2e} "
                  f"(<=1e-12), recurrence {rec:.2e} (<=1e-10)")


# 9 ------------------------------------------------------------------------

def test_c9_profiles():
    widths = []
    for alpha in (-0.1, 0.0, 0.5, 1.0, 2.0):
        (_, final, _), _ = run(1, 1, alpha, 300, Backend.ANALYTIC, every=300)
        peak, support = profile_widths(final)
        widths.append(peak if alpha <= 0.5 else support)
    decreasing = all(a > b for a, b in zip(widths, widths[1:]))
    (series, final, _), _ = run(1, 1, 0.5, 300, Backend.ANALYTIC, every=300)
    pval = gaussian_gof_pvalue(final)
    ok = decreasing and pval < 0.01
    assert report(ok, "criterion 9 profile widths and non-Gaussian shape",
                  "widths " + ", ".join(f"{w:g}" for w in widths) +
                  f" strictly decreasing; alpha=0.5 Gaussian p-value {pval:.1e} (<0.01)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

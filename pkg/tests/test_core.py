import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kickedrotor.core import (Backend, Constant, Custom, DeltaAt, DomainError, Explicit, PowerLaw,
                              RunConfig, ValidationError, WaveState, cumulative_kick,
                              cumulative_kicks, initial_state, kick_strength, kick_strengths,
                              load_explicit_schedule, make_resonance)


@pytest.mark.parametrize("p, q, rp, rq, primary", [
    (1, 1, 1, 1, True),
    (2, 5, 2, 5, False),
    (4, 10, 2, 5, False),
    (3, 3, 1, 1, True),
])
def test_make_resonance(p, q, rp, rq, primary):
    r = make_resonance(p, q)
    assert (r.p, r.q) == (rp, rq)
    assert r.is_primary() is primary
    assert r.tau == pytest.approx(2 * math.pi * rp / rq, rel=1e-15)


@pytest.mark.parametrize("p, q", [(0, 1), (1, 0), (-1, 3), (2, -5)])
def test_make_resonance_rejects_non_positive(p, q):
    with pytest.raises(ValidationError):
        make_resonance(p, q)


@given(st.integers(1, 500), st.integers(1, 500), st.integers(1, 50))
def test_resonance_scale_invariance(p, q, k):
    r = make_resonance(k * p, k * q)
    assert r == make_resonance(p, q)
    assert math.gcd(r.p, r.q) == 1


@pytest.mark.parametrize("schedule, n, expected", [
    (PowerLaw(1.0, 0.0), 7, 1.0),
    (PowerLaw(2.0, 1.0), 4, 0.5),
    (PowerLaw(1.0, 0.5), 4, 0.5),
    (Constant(3.0), 11, 3.0),
    (Explicit((0.1, 0.2, 0.3)), 2, 0.2),
])
def test_kick_strength(schedule, n, expected):
    assert kick_strength(schedule, n) == pytest.approx(expected, rel=1e-15)


def test_kick_strength_domain():
    with pytest.raises(DomainError):
        kick_strength(Explicit((1.0, 2.0)), 3)
    with pytest.raises(DomainError):
        kick_strength(PowerLaw(1.0, 0.5), 0)


def test_schedule_validation():
    with pytest.raises(ValidationError):
        PowerLaw(0.0, 1.0)
    with pytest.raises(ValidationError):
        Constant(-1.0)
    with pytest.raises(ValidationError):
        Explicit((1.0, -0.5))


def test_cumulative_kick_examples():
    assert cumulative_kick(Constant(2.0), 5) == 10.0
    assert cumulative_kick(PowerLaw(1.0, 1.0), 3) == pytest.approx(11 / 6, rel=1e-15)
    # 1 + 2^-1/2 + 3^-1/2 + 4^-1/2, summed in 50-digit arithmetic
    assert cumulative_kick(PowerLaw(1.0, 0.5), 4) == pytest.approx(2.7844570503761732889, rel=1e-15)
    assert cumulative_kick(PowerLaw(1.0, 0.5), 0) == 0.0


@given(st.floats(0.1, 5.0), st.floats(-1.0, 3.0), st.integers(1, 300))
def test_cumulative_kick_telescopes(kappa0, alpha, n):
    s = PowerLaw(kappa0, alpha)
    ns = cumulative_kicks(s, n)
    assert ns[n] - ns[n - 1] == pytest.approx(kick_strength(s, n), rel=1e-10, abs=1e-13)
    assert np.all(np.diff(ns) >= 0)


@given(st.floats(0.01, 10.0), st.integers(0, 1000))
def test_alpha_zero_is_linear(kappa0, n):
    assert cumulative_kick(PowerLaw(kappa0, 0.0), n) == kappa0 * n


def test_kick_strengths_matches_scalar():
    s = PowerLaw(1.5, 0.3)
    arr = kick_strengths(s, 20)
    scal = [kick_strength(s, n) for n in range(1, 21)]
    np.testing.assert_allclose(arr, scal, rtol=1e-15)


def test_initial_state_delta():
    st0 = initial_state(DeltaAt(0), 8)
    assert st0.amplitudes.size == 17
    assert st0.l_min == -8
    assert st0.amplitude(0) == 1
    assert st0.norm == 1.0
    assert st0.leaked_norm == 0.0 and st0.step == 0
    assert initial_state(DeltaAt(3), 8).amplitude(3) == 1


def test_initial_state_custom():
    ic = Custom(np.array([1, 1j]) / math.sqrt(2), 0)
    s = initial_state(ic, 4)
    assert s.norm == pytest.approx(1.0, abs=1e-12)
    assert s.amplitude(1) == pytest.approx(1j / math.sqrt(2))


def test_custom_requires_unit_norm():
    with pytest.raises(ValidationError):
        Custom(np.array([1.0, 1.0]))


def test_initial_state_support_too_large():
    with pytest.raises(ValidationError):
        initial_state(DeltaAt(9), 8)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=12).filter(lambda v: sum(abs(z) ** 2 for z in v) > 1e-6),
       st.integers(-5, 5))
def test_initial_state_is_normalized(values, offset):
    ic = Custom.normalized(values, offset)
    s = initial_state(ic, 20)
    assert abs(s.norm - 1.0) <= 1e-12


def test_load_explicit_schedule(tmp_path):
    f = tmp_path / "kicks.txt"
    f.write_text("# two-valued sequence\n1.0\n\n0.5\n# done\n2\n", encoding="utf-8")
    s = load_explicit_schedule(f)
    assert s.values == (1.0, 0.5, 2.0)
    assert cumulative_kick(s, 3) == 3.5
    f.write_text("1.0\nabc\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_explicit_schedule(f)


def test_run_config_rules():
    with pytest.raises(ValidationError):
        RunConfig(make_resonance(2, 5), backend=Backend.ANALYTIC)
    with pytest.raises(ValidationError):
        RunConfig(schedule=Explicit((1.0, 1.0)), steps=3)
    with pytest.raises(ValidationError):
        RunConfig(steps=10, snapshot_steps={11})
    cfg = RunConfig(backend="spectral")
    assert cfg.backend is Backend.SPECTRAL


def test_wave_state_csv_roundtrip(tmp_path):
    a = np.array([0.1 + 0.2j, -0.3j, 0.5, 1e-300 + 1j / 3])
    s = WaveState(a, -2, 4)
    s.to_csv(tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "l,re,im,prob"
    back = WaveState.from_csv(tmp_path / "s.csv", step=4)
    assert back.l_min == -2
    np.testing.assert_array_equal(back.amplitudes, s.amplitudes)


def test_wave_state_is_read_only():
    s = initial_state(DeltaAt(0), 2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2.0

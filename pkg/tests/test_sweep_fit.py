import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cosmowave.kato_ode import Coefficient, integrate_kato
from cosmowave.sweep_fit import (
    DEFAULT_EPS_GRID, InsufficientDataError, OdeSource, PdeSource, SweepRecord, digest,
    fit_log_corrected, fit_powerlaw, monotone_in_eps, sweep, upper_shape_check,
)
from cosmowave.wave_sim import ConfigError


def records(eps, T, source="ode"):
    return [SweepRecord(e, t, source, "synthetic") for e, t in zip(eps, T)]


def log_corrected_records(n, p, lnT):
    # invert the transform: pick T, solve T^2 (ln T)^(-n(p-1)) = eps^(-(p-1)) for eps
    T = np.exp(lnT)
    eps = (T**2 * lnT ** (-n * (p - 1))) ** (-1 / (p - 1))
    return records(eps, T)


# -- fits on constructed input ----------------------------------------------


def test_exact_half_power():
    eps = np.geomspace(1e-5, 1e-1, 9)
    fit = fit_powerlaw(records(eps, eps**-0.5), p=2.0)
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.passed and fit.relative_deviation < 1e-11 and fit.transform == "loglog"


def test_exact_power_with_prefactor():
    eps = np.geomspace(1e-6, 1e-2, 7)
    fit = fit_powerlaw(records(eps, 3 * eps**-1.2), p=3.4)
    assert fit.slope == pytest.approx(-1.2, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-11)
    assert fit.theory_slope == pytest.approx(-1.2)


@given(st.floats(-3, -0.05), st.floats(0.1, 10), st.integers(4, 15))
def test_fit_exact_on_any_power_law(slope, C, m):
    eps = np.geomspace(1e-6, 1e-2, m)
    fit = fit_powerlaw(records(eps, C * eps**slope), p=2.0)
    assert fit.slope == pytest.approx(slope, abs=1e-10)
    assert 0.0 <= fit.r_squared <= 1.0


def test_pass_needs_both_slope_and_r2():
    eps = np.geomspace(1e-5, 1e-1, 8)
    wiggle = np.exp(0.6 * np.sin(np.arange(8) * 2.1))
    noisy = fit_powerlaw(records(eps, eps**-0.5 * wiggle), p=2.0)
    assert noisy.r_squared < 0.98 and not noisy.passed
    off = fit_powerlaw(records(eps, eps**-0.7), p=2.0)
    assert off.r_squared > 0.999 and not off.passed
    assert off.relative_deviation == pytest.approx(0.4)


def test_log_corrected_exact():
    recs = log_corrected_records(2, 2.0, np.linspace(2.0, 12.0, 9))
    fit = fit_log_corrected(recs, n=2, p=2.0)
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.passed and fit.transform == "log_corrected"


def test_log_corrected_beats_loglog_on_log_data():
    recs = log_corrected_records(2, 2.0, np.linspace(2.0, 12.0, 9))
    plain = fit_powerlaw(recs, p=2.0)
    corrected = fit_log_corrected(recs, n=2, p=2.0)
    assert abs(plain.slope + 0.5) > 0.02  # visible logarithmic bias
    assert corrected.r_squared > plain.r_squared


def test_log_corrected_drops_short_lifespans(caplog):
    recs = log_corrected_records(2, 2.0, np.linspace(2.0, 8.0, 5))
    recs.append(SweepRecord(0.9, 2.0, "ode", "synthetic"))
    fit = fit_log_corrected(recs, n=2, p=2.0)
    assert fit.excluded == [0.9] and fit.n_points == 5
    assert "lifespan <= e" in caplog.text
    with pytest.raises(InsufficientDataError):
        fit_log_corrected(recs[2:], n=2, p=2.0)


def test_insufficient_data():
    eps = [1e-2, 1e-3, 1e-4, 1e-5]
    T = [10.0, 30.0, None, 300.0]
    with pytest.raises(InsufficientDataError):
        fit_powerlaw(records(eps, T), p=2.0)


def test_trim_smallest_eps():
    eps = np.geomspace(1e-5, 1e-1, 6)
    T = list(eps**-0.5)
    T[0] = 1.0e9  # a censored outlier at the smallest eps
    assert fit_powerlaw(records(eps, T), p=2.0, trim_smallest=True).slope == pytest.approx(-0.5)


def test_pde_fits_are_descriptive():
    eps = np.geomspace(1e-3, 1e-1, 5)
    fit = fit_powerlaw(records(eps, 2 * eps**-0.5, "pde"), p=2.0)
    assert fit.descriptive and fit.source == "pde"


def test_fit_digest_tracks_inputs():
    eps = np.geomspace(1e-5, 1e-1, 6)
    a = fit_powerlaw(records(eps, eps**-0.5), p=2.0)
    b = fit_powerlaw(records(eps, eps**-0.5), p=2.0)
    c = fit_powerlaw(records(eps, 1.0001 * eps**-0.5), p=2.0)
    assert a.inputs_digest == b.inputs_digest != c.inputs_digest
    assert digest({"b": 1, "a": 2}) == digest({"a": 2, "b": 1})


# -- shape and monotonicity helpers -------------------------------------------


def test_upper_shape_check():
    eps = np.array([1e-3, 1e-2, 1e-1])
    under = upper_shape_check(records(eps, [20.0, 8.0, 3.0]), p=2.0)
    # C = 3 sqrt(0.1); the shape at 1e-3 is 30
    assert under["C"] == pytest.approx(3 * math.sqrt(0.1))
    assert under["ok"] and under["max_ratio"] == pytest.approx(1.0)
    over = upper_shape_check(records(eps, [40.0, 8.0, 3.0]), p=2.0)
    assert not over["ok"] and over["max_ratio"] == pytest.approx(4 / 3)


def test_monotone_in_eps():
    assert monotone_in_eps(records([1e-3, 1e-2, 1e-1], [30.0, 10.0, 3.0]))
    assert monotone_in_eps(records([1e-3, 1e-2], [10.0, 10.05]))
    assert not monotone_in_eps(records([1e-3, 1e-2], [10.0, 10.5]))


# -- sweeps -----------------------------------------------------------------


def test_singleton_sweep_delegates():
    src = OdeSource(mu=3.0, p=2.0)
    [rec] = sweep(src, [2.0**-8])
    direct = integrate_kato(3.0, 2.0, Coefficient(), 2.0**-8, 2.0**-8)
    assert rec.lifespan == direct.blowup_time
    assert rec.reason == direct.terminated_reason == "threshold"
    assert rec.source == "ode" and rec.config_digest == digest(src.to_dict())


def test_ode_sweep_default_grid():
    recs = sweep(OdeSource(mu=3.0, p=2.0), DEFAULT_EPS_GRID)
    assert len(recs) == 11
    assert [r.epsilon for r in recs] == list(DEFAULT_EPS_GRID)
    T = [r.lifespan for r in recs]
    assert all(t is not None and t > 1 for t in T)
    assert all(a < b for a, b in zip(T, T[1:]))  # smaller data lives longer
    assert monotone_in_eps(recs)
    fit = fit_powerlaw(recs, p=2.0)
    assert fit.passed and abs(fit.slope + 0.5) <= 0.05


def test_sweep_order_and_threads_independent():
    src = OdeSource(mu=2.0, p=2.0, K=Coefficient.cone(1.0, 1.0, 2, 2.0))
    eps = [2.0**-k for k in (10, 6, 14, 8, 12)]
    serial = sweep(src, eps, threads=1)
    parallel = sweep(src, eps, threads=4)
    assert serial == parallel
    assert [r.epsilon for r in parallel] == eps


def test_sweep_thread_env(monkeypatch):
    monkeypatch.setenv("COSMOWAVE_THREADS", "2")
    src = OdeSource(mu=3.0, p=2.0)
    assert sweep(src, [1e-2, 1e-3]) == sweep(src, [1e-2, 1e-3], threads=1)


def test_failed_runs_are_recorded():
    src = OdeSource(mu=3.0, p=2.0, horizon=50.0)
    recs = sweep(src, [1e-1, 1e-6])
    assert recs[0].lifespan is not None
    assert recs[1].lifespan is None and recs[1].reason == "horizon"


def test_sweep_rejects_bad_eps():
    with pytest.raises(ConfigError):
        sweep(OdeSource(mu=3.0, p=2.0), [])
    with pytest.raises(ConfigError):
        sweep(OdeSource(mu=3.0, p=2.0), [1e-2, 0.0])


def test_pde_cone_touching_is_sweep_level_error():
    src = PdeSource(n=3, alpha=1.0, mu=2.0, p=2.0, r_max=2.0, N=200, horizon=100.0)
    with pytest.raises(ConfigError):
        sweep(src, [0.1, 0.2])


def test_pde_sweep_small():
    src = PdeSource(n=3, alpha=2.0, mu=3.0, p=2.0, r_max=2.5, N=250, horizon=200.0)
    recs = sweep(src, [0.5, 1.0, 2.0])
    T = [r.lifespan for r in recs]
    assert all(t is not None for t in T) and T[0] > T[1] > T[2] > 1
    assert sweep(src, [0.5, 1.0, 2.0], threads=1) == recs

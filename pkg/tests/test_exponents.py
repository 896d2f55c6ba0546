import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cosmowave import exponents as ex
from cosmowave.exponents import DomainError, NoBoundError, Regime

SQ2, SQ17, SQ19, SQ33 = math.sqrt(2), math.sqrt(17), math.sqrt(19), math.sqrt(33)


def np_largest_root(a, b, c):
    # independent oracle: companion-matrix eigenvalues
    r = np.roots([a, b, c])
    r = r[np.abs(r.imag) < 1e-12].real
    return float(r.max())


# -- polynomials ------------------------------------------------------------


def test_gamma_S_values():
    assert abs(ex.gamma_S(3, 1 + SQ2)) < 1e-13
    assert ex.gamma_S(3, 2) == 2
    assert ex.gamma_S(2, 1) == 4


def test_gamma_values():
    assert ex.gamma(3, 2, 0, 0) == pytest.approx(2, abs=1e-14)
    assert ex.gamma(3, 1, 2 / 3, 2) == pytest.approx(12, rel=1e-13)
    assert ex.gamma(3, 2, 0.5, 1.5) == pytest.approx(6, rel=1e-13)


def test_gamma_needs_alpha_below_one():
    with pytest.raises(DomainError):
        ex.gamma(3, 2, 1.0, 0)
    with pytest.raises(DomainError):
        ex.p_crit(3, 1.5, 0)


def test_p_fujita():
    assert ex.p_fujita(2) == 2
    assert ex.p_fujita(1) == 3
    assert ex.p_fujita(3) == pytest.approx(5 / 3, rel=1e-15)
    with pytest.raises(DomainError):
        ex.p_fujita(0)
    with pytest.raises(DomainError):
        ex.p_fujita(-1)


def test_p_strauss_closed_forms():
    assert ex.p_strauss(3) == pytest.approx(1 + SQ2, abs=1e-12)
    assert ex.p_strauss(2) == pytest.approx((3 + SQ17) / 2, abs=1e-12)
    assert ex.p_strauss(5) == pytest.approx((3 + SQ17) / 4, abs=1e-12)


def test_p_crit_closed_forms():
    assert ex.p_crit(3, 0, 0) == pytest.approx(1 + SQ2, abs=1e-12)
    assert ex.p_crit(3, 2 / 3, 2) == pytest.approx((4 + SQ19) / 3, abs=1e-12)
    assert ex.p_crit(2, 0, 0) == pytest.approx((3 + SQ17) / 2, abs=1e-12)


def test_p_crit_degenerate_leading_coefficient():
    # n - 1 + (mu - alpha)/(1 - alpha) = 1 + (0 - 0.9)/0.1 < 0 for n = 2
    with pytest.raises(DomainError):
        ex.p_crit(2, 0.9, 0.0)


def test_gamma0_values():
    assert ex.gamma0(3, 2, 1 / 3) == pytest.approx(3, rel=1e-13)
    assert ex.gamma0(3, 2, 0) == pytest.approx(10 / 3, rel=1e-13)
    assert ex.gamma0(3, 1 + SQ2, 1 / 3) > 0
    with pytest.raises(DomainError):
        ex.gamma0(3, 2, -1)


def test_p_crit_flrw_closed_forms():
    assert ex.p_crit_flrw(3, 0) == pytest.approx((4 + SQ19) / 3, abs=1e-12)
    assert ex.p_crit_flrw(3, 1 / 3) == pytest.approx((5 + SQ33) / 4, abs=1e-12)
    with pytest.raises(DomainError):
        ex.p_crit_flrw(3, -1.0)


def test_w_range_override():
    with pytest.raises(DomainError):
        ex.gamma0(3, 2, 1.5)
    assert math.isfinite(ex.gamma0(3, 2, 1.5, allow_w_above_one=True))


def test_w_star_closed_forms():
    assert ex.w_star(3).value == pytest.approx((-12 + math.sqrt(228)) / 42, abs=1e-12)
    assert ex.w_star(2).value == pytest.approx((-1 + SQ17) / 8, abs=1e-12)
    # 160 w^2 + 160 w + 32 = 0  ->  w = (-5 + sqrt 5)/10
    assert ex.w_star(5).value == pytest.approx((-5 + math.sqrt(5)) / 10, abs=1e-12)
    assert ex.w_star(5).discriminant == pytest.approx(160.0**2 - 4 * 160 * 32)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_w_star_is_the_crossing(n):
    ws = ex.w_star(n).value
    d = ex.fujita_dimension(n, ws)
    assert abs(ex.p_fujita(d) - ex.p_crit_flrw(n, ws)) <= 1e-8


def test_w_star_reports_missing_root_instead_of_raising(monkeypatch):
    monkeypatch.setattr(ex, "quadratic_roots", lambda a, b, c: ())
    res = ex.w_star(3)
    assert res.value is None and not res.has_root


def test_quadratic_roots_stable():
    # x^2 - 1e8 x + 1: naive formula loses the small root entirely
    small, big = ex.quadratic_roots(1.0, -1e8, 1.0)
    assert small == pytest.approx(1e-8, rel=1e-12)
    assert big == pytest.approx(1e8, rel=1e-12)
    assert ex.quadratic_roots(1.0, 0.0, 1.0) == ()


def test_flrw_dictionary():
    f = ex.FLRWParams(3, -0.5)
    assert f.alpha == pytest.approx(4 / 3) and f.mu == pytest.approx(4) and f.accelerated
    f = ex.FLRWParams(3, 1 / 3)
    assert f.alpha == pytest.approx(0.5) and f.mu == pytest.approx(1.5) and not f.accelerated
    assert ex.FLRWParams(3, -1 / 3).accelerated
    assert ex.acceleration_threshold(2) == 0
    with pytest.raises(DomainError):
        ex.FLRWParams(3, -1.0)


def test_model_params_validation():
    ex.ModelParams(3, 2.0, 3.0, 2.0, 0.5, 1.0)
    for bad in [dict(n=1), dict(p=1.0), dict(alpha=-1), dict(mu=-1), dict(R=0), dict(epsilon=-1)]:
        kw = dict(n=3, alpha=2.0, mu=3.0, p=2.0, epsilon=0.5, R=1.0) | bad
        with pytest.raises(DomainError):
            ex.ModelParams(**kw)


# -- properties -------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 11))
def test_strauss_coincidence(n):
    assert abs(ex.p_crit(n, 0, 0) - ex.p_strauss(n)) <= 1e-12
    assert abs(ex.gamma_S(n, ex.p_strauss(n))) <= 1e-9


@given(n=st.integers(2, 10), alpha=st.floats(0, 0.95), mu=st.floats(0, 10))
def test_p_crit_is_the_root(n, alpha, mu):
    lead = n - 1 + (mu - alpha) / (1 - alpha)
    assume(lead > 1e-3)
    pc = ex.p_crit(n, alpha, mu)
    assert abs(ex.gamma(n, pc, alpha, mu)) <= 1e-9 * max(1.0, pc * pc * lead)
    lin = n + 1 + (mu + 3 * alpha) / (1 - alpha)
    assert pc == pytest.approx(np_largest_root(-lead, lin, 2.0), rel=1e-10)


@given(n=st.integers(2, 10), w=st.floats(-0.999, 1.0), p=st.floats(1.0, 8.0))
def test_gamma0_factorization(n, w, p):
    alpha = 2 / (n * (1 + w))
    assume(alpha < 1 - 1e-6)
    lhs = ex.gamma0(n, p, w)
    rhs = (1 - alpha) * ex.gamma(n, p, alpha, 2 / (1 + w))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs), p * p * n)


@given(n=st.integers(2, 10), w=st.floats(-0.999, 1.0))
def test_p_crit_flrw_exceeds_strauss(n, w):
    pc = ex.p_crit_flrw(n, w)
    assert pc > ex.p_strauss(n)
    k = 4 / (n * (1 + w))
    assert pc == pytest.approx(np_largest_root(-(n - 1), n + 1 + k, 2 - k), rel=1e-10)


@given(n=st.integers(2, 6), w=st.floats(-0.99, 1.0), p=st.floats(1.001, 6.0))
def test_regime_partition(n, w, p):
    rep = ex.classify_regime(n, w, p)
    assert isinstance(rep.regime, Regime)
    accelerated = w <= ex.acceleration_threshold(n)
    assert (rep.regime is Regime.A_ACCELERATED) == accelerated or math.isclose(
        w, ex.acceleration_threshold(n), rel_tol=1e-12)
    if rep.regime is Regime.B_WAVELIKE and not rep.critical:
        assert p < ex.p_crit_flrw(n, w)
    if rep.regime is Regime.C_HEATLIKE and not rep.critical:
        d = ex.fujita_dimension(n, w)
        assert d <= 0 or p < ex.p_fujita(d)
    if rep.bound_exponent is not None:
        assert rep.bound_exponent < 0


# -- regime examples --------------------------------------------------------


def test_classify_examples():
    assert ex.classify_regime(3, -0.5, 5).regime is Regime.A_ACCELERATED
    rep = ex.classify_regime(3, 0.0, 2.0)
    assert rep.regime is Regime.C_HEATLIKE
    assert rep.bound_exponent == pytest.approx(-1.0)
    assert rep.exponents["wave_exponent"] == pytest.approx(-1.2)
    assert ex.classify_regime(3, 0.0, 3.5).regime is Regime.NO_BLOWUP_PROVED


def test_classify_threshold_is_accelerated_with_log_form():
    rep = ex.classify_regime(3, -1 / 3, 2.0)
    assert rep.regime is Regime.A_ACCELERATED
    assert "ln T" in rep.applicable_bound


def test_classify_critical_fujita():
    w = 0.5
    pF = ex.p_fujita(ex.fujita_dimension(3, w))
    rep = ex.classify_regime(3, w, pF)
    # at p = p_F only the exponential bound can apply when p_F >= p_c
    if pF >= ex.p_crit_flrw(3, w):
        assert rep.critical and rep.regime is Regime.C_HEATLIKE


def test_classify_critical_wave():
    # n = 3, w = 0: p_c ~ 2.786 < p_F = 3, so at p_c the heat bound is the polynomial one
    pc = ex.p_crit_flrw(3, 0.0)
    rep = ex.classify_regime(3, 0.0, pc)
    assert rep.regime is Regime.C_HEATLIKE and not rep.critical
    # n = 2, w = 0.9: p_c > p_F, so at p_c nothing polynomial applies
    pc2 = ex.p_crit_flrw(2, 0.9)
    assert pc2 > ex.p_fujita(ex.fujita_dimension(2, 0.9))
    rep2 = ex.classify_regime(2, 0.9, pc2)
    assert rep2.regime is Regime.B_WAVELIKE and rep2.critical and rep2.bound_exponent is None


def test_classify_rejects_bad_input():
    with pytest.raises(DomainError):
        ex.classify_regime(3, -1.0, 2)
    with pytest.raises(DomainError):
        ex.classify_regime(3, 0.0, 1.0)


# -- lifespan bounds --------------------------------------------------------


def test_lifespan_bound_alpha_above_one():
    assert ex.lifespan_bound(ex.ModelParams(3, 2.0, 3.0, 3.0, 0.01)) == pytest.approx(100, rel=1e-13)


def test_lifespan_bound_alpha_one_back_substitution():
    n, p = 2, 2.0
    eps = math.exp(-4.0)
    T = ex.lifespan_bound(ex.ModelParams(n, 1.0, 2.0, p, eps))
    target = eps ** (-(p - 1))
    assert T > math.exp(n * (p - 1) / 2)
    resid = T**2 * math.log(T) ** (-n * (p - 1)) - target
    assert abs(resid) <= 1e-10 * target


@given(n=st.integers(2, 6), p=st.floats(1.1, 5.0), log_eps=st.floats(-30, -0.5))
def test_lifespan_bound_alpha_one_residual(n, p, log_eps):
    eps = math.exp(log_eps)
    try:
        T = ex.lifespan_bound(ex.ModelParams(n, 1.0, 1.0, p, eps))
    except NoBoundError:
        # target below the minimum of T^2 (ln T)^(-n(p-1)) on its increasing branch
        s0 = n * (p - 1) / 2
        assert 2 * s0 - n * (p - 1) * math.log(s0) > -(p - 1) * log_eps
        return
    s = math.log(T)
    lhs = 2 * s - n * (p - 1) * math.log(s)
    assert abs(math.expm1(lhs + (p - 1) * log_eps)) <= 1e-10


def test_lifespan_bound_wavelike_subcritical():
    T = ex.lifespan_bound(ex.ModelParams(3, 0.0, 0.0, 2.0, 0.1))
    assert T == pytest.approx(0.1**-2, rel=1e-12)


def test_lifespan_bound_takes_minimum_of_applicable():
    # alpha = 0.5, mu = 1, n = 2: heat dimension 1, p = 1.5 < p_F(1) = 3 and < p_c
    params = ex.ModelParams(2, 0.5, 1.0, 1.5, 0.01)
    assert 1.5 < ex.p_crit(2, 0.5, 1.0)
    T = ex.lifespan_bound(params)
    heat = 0.01 ** (-(0.5) / (2 - 1 * 0.5))
    wave = 0.01 ** (-2 * 1.5 * 0.5 / (0.5 * ex.gamma(2, 1.5, 0.5, 1.0)))
    assert T == pytest.approx(min(heat, wave), rel=1e-12)


def test_lifespan_bound_flat_gamma():
    # alpha = 0.5, mu = 0, n = 2: leading coefficient 1 - 0.5/0.5 = 0, gamma = 6p + 2 > 0
    params = ex.ModelParams(2, 0.5, 0.0, 4.0, 0.01)
    T = ex.lifespan_bound(params)
    assert T == pytest.approx(0.01 ** (-2 * 4 * 3 / (0.5 * 26)), rel=1e-12)


def test_lifespan_bound_none_applies():
    with pytest.raises(NoBoundError):
        ex.lifespan_bound(ex.ModelParams(3, 0.0, 0.0, 5.0, 0.1))


def test_lifespan_bound_requires_eps_in_unit_interval():
    with pytest.raises(DomainError):
        ex.lifespan_bound(ex.ModelParams(3, 2.0, 3.0, 2.0, 2.0))

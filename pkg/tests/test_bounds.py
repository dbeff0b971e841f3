import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infoconc import Density1D, GaussianIso
from infoconc import catalog
from infoconc.analytic import mgf_exponential_star
from infoconc.bounds import (
    bound_sweep, dimensional_tail_bounds, gaussian_sqnorm_tail, legendre_numeric, max_entropy_check,
    mgf_bound, mode_mean_check, rate_conjugate, rate_r, small_ball_bound, sweep_to_csv, sweep_to_json,
    tail_bounds, weak_tail_comparison,
)
from infoconc.tilt import mgf_quad


def test_rate_examples():
    assert rate_r(0.0) == 0.0
    assert rate_r(1.0) == pytest.approx(1 - math.log(2), rel=1e-15)
    assert rate_r(-1.0) == math.inf
    assert rate_r(-3.0) == math.inf


@settings(max_examples=200)
@given(st.floats(-0.999, 50.0).filter(lambda u: abs(u) >= 1e-4))
def test_rate_series_branch_matches_formula(u):
    # the direct formula loses about 2 eps / |u| relative accuracy, fine for |u| >= 1e-4
    ref = u - math.log1p(u)
    assert rate_r(u) == pytest.approx(ref, rel=1e-10)
    assert rate_r(u) >= 0


@settings(max_examples=100)
@given(st.floats(-1e-4, 1e-4))
def test_rate_tiny_argument(u):
    assert rate_r(u) == pytest.approx(u * u / 2 - u**3 / 3 + u**4 / 4, rel=1e-12, abs=1e-300)


def test_rate_vectorized():
    np.testing.assert_array_equal(rate_r(np.array([-2.0, 0.0])), [math.inf, 0.0])


def test_rate_small_argument_accuracy():
    # u - log1p(u) cancels; the series keeps full relative accuracy
    assert rate_r(1e-8) == pytest.approx(5e-17, rel=1e-7)


def test_legendre_examples():
    assert legendre_numeric(rate_r, 0.5).value == pytest.approx(-0.5 - math.log(0.5), abs=1e-9)
    assert legendre_numeric(rate_r, 0.0).value == pytest.approx(0.0, abs=1e-12)
    res = legendre_numeric(rate_r, 1.0)
    assert res.value == math.inf and res.unbounded
    assert legendre_numeric(rate_r, 2.5).value == math.inf


def test_legendre_quadratic():
    # (x^2/2)* = t^2/2 with maximiser t
    res = legendre_numeric(lambda x: 0.5 * x * x, 3.0, bracket=(-1.0, 1.0))
    assert res.value == pytest.approx(4.5, rel=1e-10) and res.argmax == pytest.approx(3.0, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2.5, 0.9))
def test_double_conjugation(t):
    # r** = r: conjugate the numeric conjugate once more
    def rstar(s):
        return legendre_numeric(rate_r, s).value

    back = legendre_numeric(rstar, t, bracket=(-3.0, 0.95)).value
    assert back == pytest.approx(rate_r(t), abs=1e-5)


def test_rate_conjugate_record():
    r = rate_conjugate(0.3)
    assert r.u == -0.3 and r.conjugate == pytest.approx(r.r, abs=1e-9)


def test_mgf_bound_examples():
    assert mgf_bound(3.0, 0.0) == 1.0
    assert mgf_bound(1.0, 0.5) == pytest.approx(mgf_exponential_star(0.5, 1), rel=1e-14)
    assert mgf_bound(1.0, 0.5) == pytest.approx(1.2131, abs=1e-4)
    assert mgf_bound(2.0, -1.0) == pytest.approx(math.exp(2 * (1 - math.log(2))), rel=1e-14)
    assert mgf_bound(2.0, 1.0) == math.inf


def test_mgf_bound_convex_in_beta():
    b = np.linspace(-3, 0.95, 200)
    logv = np.log([mgf_bound(2.0, x) for x in b])
    assert np.all(np.diff(logv, 2) >= -1e-12)


@pytest.mark.parametrize("beta", [-2.0, -0.5, 0.5, 0.9])
def test_mgf_bound_dominates_gaussian_and_gamma(beta):
    for m, n in ((GaussianIso(3), 3), (Density1D.gamma(2.0), 1)):
        assert mgf_quad(m, beta) < mgf_bound(n, beta)


def test_tail_examples():
    up, lo = tail_bounds(1.0, 1.0)
    assert up == pytest.approx(2 / math.e, rel=1e-14) and lo == 0.0
    assert dimensional_tail_bounds(5, 0.3) == pytest.approx(tail_bounds(5.0, 1.5), rel=1e-14)
    up, lo = tail_bounds(4.0, 1e-9)
    assert up == pytest.approx(1.0) and lo == pytest.approx(1.0)


def test_tail_bounds_domain():
    for K, t in ((0.0, 1.0), (1.0, 0.0), (1.0, -2.0)):
        with pytest.raises(ValueError):
            tail_bounds(K, t)


@settings(max_examples=50)
@given(st.floats(0.5, 20), st.floats(0.01, 10), st.floats(0.01, 10))
def test_tail_bounds_monotone(K, t1, t2):
    a, b = sorted((t1, t2))
    ua, la = tail_bounds(K, a)
    ub, lb = tail_bounds(K, b)
    assert ub <= ua and lb <= la
    assert 0 <= ub <= 1 and 0 <= lb <= 1


def test_sqnorm_examples():
    assert gaussian_sqnorm_tail(2, 1.0) == pytest.approx(math.exp(-(1 - math.log(2))), rel=1e-14)
    assert gaussian_sqnorm_tail(10, 2.0) == pytest.approx(math.exp(-5 * (2 - math.log(3))), rel=1e-14)
    assert gaussian_sqnorm_tail(10, 2.0) == pytest.approx(0.0110, abs=1e-4)
    assert gaussian_sqnorm_tail(7, 1e-10) == pytest.approx(1.0)


def test_sqnorm_above_chi2_tail():
    from scipy import stats

    for n in (2, 10, 50):
        for t in (0.2, 0.5, 1.0, 3.0):
            assert stats.chi2(n).sf(n * (1 + t)) <= gaussian_sqnorm_tail(n, t)


def test_weak_comparison_is_weaker():
    for n in (1, 10, 100):
        for tau in (0.1, 0.5, 1.0):
            assert weak_tail_comparison(n, tau) >= dimensional_tail_bounds(n, tau)[0]


def test_max_entropy_examples():
    c = max_entropy_check(catalog.make("exp-product", 4))
    assert c.h == pytest.approx(4.0, abs=1e-12) and c.bound == 4.0 and abs(c.slack) <= 1e-12
    g = max_entropy_check(GaussianIso(1))
    assert g.bound == pytest.approx(1 + 0.5 * math.log(2 * math.pi)) and g.slack == pytest.approx(0.5, abs=1e-12)
    u = max_entropy_check(Density1D.uniform(0, 1))
    assert u.h == pytest.approx(0.0, abs=1e-15) and u.slack == pytest.approx(1.0)


def test_mode_mean_examples():
    g = mode_mean_check(GaussianIso(2))
    assert g.lhs / math.exp(g.log_rhs - 2) == pytest.approx(1.0) and g.passed
    e = mode_mean_check(Density1D.exponential(1.0))
    assert e.lhs == pytest.approx(1.0) and e.rhs == pytest.approx(1.0) and abs(e.slack) <= 1e-14
    p = mode_mean_check(catalog.make("exp-product", 6))
    assert abs(p.slack) <= 1e-12 and p.passed


def test_mode_mean_large_dimension_no_overflow():
    c = mode_mean_check(catalog.make("exp-product", 900))
    assert c.passed and math.isfinite(c.slack)


def test_small_ball_examples():
    assert small_ball_bound(1, 1e-12) == pytest.approx(1.0, abs=1e-10)
    assert small_ball_bound(1, math.exp(-2)) == pytest.approx(1 - 2 / math.e, rel=1e-14)
    for c in (0.0, 1 / math.e, 0.5):
        with pytest.raises(ValueError):
            small_ball_bound(2, c)


def test_sweep_exports():
    reps = bound_sweep(2.0, ts=[0.5, 1.0], betas=[0.5], compare_n=2)
    assert [r.corollary for r in reps] == ["upper_tail", "lower_tail", "weak_two_sided"] * 2 + ["mgf"]
    rows = list(csv.DictReader(io.StringIO(sweep_to_csv(reps))))
    assert rows[0].keys() == {"K", "t_or_beta", "bound", "corollary"}
    assert float(rows[-1]["bound"]) == mgf_bound(2.0, 0.5)
    assert json.loads(sweep_to_json(reps))[0]["corollary"] == "upper_tail"

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from infoconc import Density1D, GaugeSpec, GaussianIso, HomogeneousModel, ProductModel, UnsupportedError
from infoconc import catalog
from infoconc.analytic import (
    F_closed, F_homogeneous, closed_form, entropy_closed, homogeneous_info_law, mgf_exponential_star,
    varentropy_closed,
)
from infoconc.tilt import compute_F, entropy_quad, varentropy_quad


def _quad_h_V(logpdf, lo, hi):
    # entropy and varentropy of a 1D density straight from scipy quad
    f = lambda x: math.exp(logpdf(x))  # noqa: E731
    h = integrate.quad(lambda x: -f(x) * logpdf(x), lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
    s2 = integrate.quad(lambda x: f(x) * logpdf(x) ** 2, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
    return h, s2 - h * h


def test_entropy_gaussian_1():
    h, _ = _quad_h_V(stats.norm.logpdf, -40, 40)
    assert entropy_closed(GaussianIso(1)) == pytest.approx(h, rel=1e-12)
    assert h == pytest.approx(0.5 * math.log(2 * math.pi * math.e), rel=1e-12)


def test_entropy_homogeneous_l1_n3():
    # the rescaled l1 density has h = n; quadrature agrees
    m = catalog.make("l1", 3)
    assert entropy_closed(m) == pytest.approx(3.0, abs=1e-14)
    assert entropy_quad(m) == pytest.approx(3.0, abs=1e-10)


def test_entropy_uniform_square():
    assert entropy_closed(catalog.make("uniform-box", 2)) == 0.0


@pytest.mark.parametrize("n", [1, 4, 9])
def test_varentropy_closed_forms(n):
    assert varentropy_closed(GaussianIso(n)) == pytest.approx(n / 2)
    assert varentropy_closed(catalog.make("exp-product", n)) == pytest.approx(n)
    assert varentropy_closed(catalog.make("uniform-box", n)) == 0.0


@pytest.mark.parametrize("shape", [1.0, 2.0, 3.5, 10.0])
def test_gamma_closed_forms_vs_quad(shape):
    d = Density1D.gamma(shape, 1.3)
    ref = stats.gamma(shape, scale=1.3)
    h, V = _quad_h_V(ref.logpdf, 0, ref.ppf(1 - 1e-16))
    m = ProductModel((d,))
    assert entropy_closed(m) == pytest.approx(float(ref.entropy()), rel=1e-12)
    assert entropy_closed(m) == pytest.approx(h, rel=1e-9)
    assert varentropy_closed(m) == pytest.approx(V, rel=1e-8, abs=1e-12)


def test_no_closed_form_for_tabulated():
    cf = closed_form(catalog.make("tabulated-abs", 1))
    assert cf.entropy is None and cf.varentropy is None and cf.F is None and cf.info_law is None


def test_info_law_examples():
    assert homogeneous_info_law(1).mean == 1.0
    law = homogeneous_info_law(5)
    assert law.mean == 5 and law.second_moment == 30
    assert homogeneous_info_law(2).var == 2


def test_info_law_from_models():
    assert homogeneous_info_law(catalog.make("l2", 4)).mean == 4
    assert homogeneous_info_law(catalog.make("exp-product", 3)).var == 3
    rated = homogeneous_info_law(HomogeneousModel(GaugeSpec("l1", 2), rate=2.0))
    assert rated.mean == pytest.approx(1.0)
    with pytest.raises(UnsupportedError):
        homogeneous_info_law(GaussianIso(2))


def test_info_law_matches_scipy():
    law = homogeneous_info_law(6)
    t = np.array([0.5, 3.0, 6.0, 12.0])
    np.testing.assert_allclose(law.cdf(t), stats.gamma(6).cdf(t), rtol=1e-14)


@pytest.mark.parametrize("n, alpha, expected", [
    (4, 1.0, 0.0),
    (2, 2.0, -2 * math.log(2)),
    (3, 0.5, 3 * math.log(2)),
])
def test_F_homogeneous_examples(n, alpha, expected):
    assert F_homogeneous(alpha, n) == pytest.approx(expected, abs=1e-15)
    # oracle: log of prod int_0^inf e^{-alpha x} dx
    one = integrate.quad(lambda x: math.exp(-alpha * x), 0, math.inf)[0]
    assert n * math.log(one) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 10), st.floats(0.1, 10.0))
def test_F_homogeneous_matches_quadrature(n, alpha):
    for name in ("exp-product", "l2", "linf"):
        assert compute_F(catalog.make(name, n), alpha) == pytest.approx(F_homogeneous(alpha, n), abs=1e-10)


def test_F_homogeneous_domain():
    with pytest.raises(ValueError):
        F_homogeneous(0.0, 2)


def test_F_closed_gaussian():
    # int phi^2 = 1 / (2 sqrt(pi))
    assert F_closed(GaussianIso(1), 2.0) == pytest.approx(-math.log(2 * math.sqrt(math.pi)), rel=1e-14)


def test_mgf_star_examples():
    assert mgf_exponential_star(0.0, 3) == 1.0
    direct = integrate.quad(lambda x: math.exp(0.5 * (x - 1) - x), 0, math.inf)[0]
    assert mgf_exponential_star(0.5, 1) == pytest.approx(direct, rel=1e-12)
    assert direct == pytest.approx(2 * math.exp(-0.5), rel=1e-12)
    assert mgf_exponential_star(1.0, 1) == math.inf


def test_gamma_F_closed_vs_special():
    d = ProductModel((Density1D.gamma(3.0, 2.0),))
    a = 1.7
    # int (x^2 e^{-x/2} / 16)^a dx = Gamma(2a+1) (2/a)^(2a+1) / 16^a
    ref = special.gammaln(2 * a + 1) + (2 * a + 1) * math.log(2 / a) - a * math.log(16)
    assert F_closed(d, a) == pytest.approx(ref, rel=1e-12)
    assert compute_F(d, a) == pytest.approx(ref, rel=1e-11)

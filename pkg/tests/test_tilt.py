import json
import math

import numpy as np
import pytest
from scipy import integrate, stats

from infoconc import (
    Density1D, GaussianIso, F_derivatives, compute_F, compute_tilt_curve, entropy_quad,
    log_G_concavity, tilted_density, varentropy_quad,
)
from infoconc import catalog
from infoconc.tilt import mgf_quad, tilted_varentropy


@pytest.mark.parametrize("name, n", [("gaussian-iso", 3), ("exp-product", 2), ("l2", 4), ("tabulated2d", 2),
                                     ("tabulated-asym", 1), ("gamma3.5", 1)])
def test_F_at_one_is_zero(name, n):
    assert compute_F(catalog.make(name, n), 1.0) == pytest.approx(0.0, abs=1e-11)


def test_F_gaussian_alpha_two():
    ref = math.log(integrate.quad(lambda x: stats.norm.pdf(x) ** 2, -30, 30, epsrel=1e-13)[0])
    assert compute_F(GaussianIso(1), 2.0) == pytest.approx(ref, abs=1e-12)
    assert ref == pytest.approx(-1.2655, abs=1e-4)


def test_F_exp_product_half():
    assert compute_F(catalog.make("exp-product", 3), 0.5) == pytest.approx(3 * math.log(2), rel=1e-13)


def test_F_rejects_nonpositive_alpha():
    with pytest.raises(ValueError):
        compute_F(GaussianIso(1), 0.0)


def test_tilted_density_examples():
    e = Density1D.exponential(1.0)
    assert tilted_density(e, 1.0) == e
    assert tilted_density(e, 3.0) == Density1D.exponential(3.0)
    assert tilted_density(Density1D.gaussian(), 4.0) == Density1D.gaussian(0.0, 0.5)


def test_tilted_tabulated_matches_quadrature():
    d = catalog.asymmetric_tabulated()
    t = d.tilt(2.5)
    mass = integrate.quad(lambda x: math.exp(-t.potential(x)), -40, 40, points=[0.0], epsrel=1e-13)[0]
    assert mass == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("model, h", [
    (Density1D.uniform(0, 2), math.log(2)),
    (Density1D.exponential(1.0), 1.0),
    (GaussianIso(2), math.log(2 * math.pi * math.e)),
])
def test_entropy_examples(model, h):
    assert entropy_quad(model) == pytest.approx(h, rel=1e-12)


def test_entropy_exponential_oracle():
    ref = integrate.quad(lambda x: x * math.exp(-x), 0, math.inf)[0]
    assert entropy_quad(Density1D.exponential()) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("model, V", [
    (catalog.make("uniform-box", 3), 0.0),
    (Density1D.exponential(1.0), 1.0),
    (GaussianIso(3), 1.5),
])
def test_varentropy_examples(model, V):
    assert varentropy_quad(model) == pytest.approx(V, abs=1e-12)


def test_tabulated2d_entropy_vs_dblquad():
    m = catalog.tabulated_2d(9, 4.0)
    g = np.linspace(-4, 4, 9)
    U = lambda y, x: float(m.potential(np.array([[x, y]]))[0])  # noqa: E731
    h = sum(integrate.dblquad(lambda y, x: U(y, x) * math.exp(-U(y, x)), a, b, c, d, epsabs=1e-12)[0]
            for a, b in zip(g[:-1], g[1:]) for c, d in zip(g[:-1], g[1:]))
    assert entropy_quad(m) == pytest.approx(h, rel=1e-8)


def test_F_prime_at_one_is_minus_entropy():
    d = F_derivatives(GaussianIso(1), 1.0)
    assert d.consistent
    assert d.Fp == pytest.approx(-0.5 * math.log(2 * math.pi * math.e), rel=1e-12)
    assert d.Fp_fd == pytest.approx(d.Fp, rel=1e-7)


@pytest.mark.parametrize("alpha", [0.2, 1.0, 3.0])
def test_F_second_derivative_exp_product(alpha):
    d = F_derivatives(catalog.make("exp-product", 4), alpha)
    assert d.Fpp == pytest.approx(4 / alpha**2, rel=1e-12)
    assert d.Fpp_fd == pytest.approx(4 / alpha**2, rel=1e-5)


@pytest.mark.parametrize("alpha", [0.15, 1.0, 6.0])
def test_gaussian_tilted_varentropy_alpha_free(alpha):
    assert alpha**2 * F_derivatives(GaussianIso(3), alpha).Fpp == pytest.approx(1.5, rel=1e-10)
    assert tilted_varentropy(GaussianIso(3), alpha) == pytest.approx(1.5, rel=1e-12)


def test_tilt_curve_exp_product():
    c = compute_tilt_curve(catalog.make("exp-product", 3))
    np.testing.assert_allclose(c.V, 3.0, rtol=1e-12)
    assert c.K_hat == pytest.approx(3.0) and c.K_within_dimension()
    np.testing.assert_allclose(c.logG, 0.0, atol=1e-12)


def test_tilt_curve_gaussian_K_hat():
    assert compute_tilt_curve(GaussianIso(5)).K_hat == pytest.approx(2.5, rel=1e-12)


def test_tilt_curve_grid_validation():
    with pytest.raises(ValueError):
        compute_tilt_curve(GaussianIso(1), [1.0, 0.5, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        compute_tilt_curve(GaussianIso(1), [1.0, 2.0])


def test_tilt_curve_exports():
    c = compute_tilt_curve(GaussianIso(1), np.linspace(0.5, 2, 6))
    lines = c.to_csv().splitlines()
    header = [ln for ln in lines if not ln.startswith("#")][0]
    assert header == "alpha,F,Fp,Fpp,V,logG"
    assert len([ln for ln in lines if not ln.startswith("#")]) == 7
    d = json.loads(c.to_json())
    assert d["K_hat"] == pytest.approx(0.5) and len(d["curve"]["alpha"]) == 6


def test_log_G_concavity_gaussian():
    # closed form: log G = 0.5 log a + (1 - a)/2 log(2 pi), concave
    r = log_G_concavity(GaussianIso(1), np.logspace(-1, 1, 12))
    assert r.min_residual >= -1e-8
    assert r.min_residual > 0


def test_log_G_constant_homogeneous():
    r = log_G_concavity(catalog.make("linf", 3), np.logspace(-1, 1, 8))
    assert abs(r.midpoint_min) <= 1e-8 and abs(r.three_point_min) <= 1e-8


def test_mgf_quad_matches_direct_integral():
    # gamma(2): E exp(beta (h~ - h)) by scipy quad
    d = Density1D.gamma(2.0)
    h = entropy_quad(d)
    beta = -0.7
    direct = integrate.quad(lambda x: math.exp(beta * (-stats.gamma(2).logpdf(x) - h)) * stats.gamma(2).pdf(x),
                            0, 200, epsrel=1e-12)[0]
    assert mgf_quad(d, beta) == pytest.approx(direct, rel=1e-10)
    with pytest.raises(ValueError):
        mgf_quad(d, 1.0)

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from infoconc import (
    Density1D, DimensionError, GaugeSpec, GaussianIso, HomogeneousModel, ProductModel, Tabulated2D,
    check_log_concavity, decreasing_rearrangement_1d, entropy_quad, load_model, log_density,
    model_from_config, normalizing_constant, varentropy_quad,
)
from infoconc import catalog


# -- log_density ------------------------------------------------------------

def test_log_density_gaussian_mode():
    assert log_density(GaussianIso(1), 0.0) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)


def test_log_density_exp_product():
    m = ProductModel((Density1D.exponential(),) * 2)
    assert log_density(m, [1.0, 1.0]) == pytest.approx(-2.0, abs=1e-15)


def test_log_density_uniform():
    u = Density1D.uniform(0, 1)
    assert log_density(u, 0.5) == 0.0
    assert log_density(u, 2.0) == -math.inf


def test_log_density_dimension_mismatch():
    with pytest.raises(DimensionError):
        log_density(GaussianIso(3), [0.0, 1.0])


def test_log_density_batch_matches_scipy():
    x = np.linspace(-3, 3, 7).reshape(-1, 1)
    got = log_density(ProductModel((Density1D.gaussian(0.5, 2.0),)), x)
    np.testing.assert_allclose(got, stats.norm(0.5, 2.0).logpdf(x[:, 0]), rtol=1e-14)


@pytest.mark.parametrize("d, ref", [
    (Density1D.gamma(3.5, 2.0, 1.0), stats.gamma(3.5, loc=1.0, scale=2.0)),
    (Density1D.exponential(4.0, -1.0), stats.expon(loc=-1.0, scale=0.25)),
    (Density1D.uniform(-2, 5), stats.uniform(-2, 7)),
])
def test_1d_families_match_scipy(d, ref):
    x = np.linspace(-0.5, 6, 14)
    np.testing.assert_allclose(-d.potential(x), ref.logpdf(x), rtol=1e-13)


# -- log-concavity ------------------------------------------------------------

def test_concavity_gaussian_iso():
    rep = check_log_concavity(GaussianIso(2), probes=1000)
    assert rep.passed and rep.min_residual >= 0 and rep.pairs_used == 1000


def test_concavity_tabulated_abs():
    assert check_log_concavity(Density1D.tabulated([-5, 0, 5], [5, 0, 5])).passed


def test_concave_tabulated_rejected():
    x = np.linspace(-2, 2, 9)
    with pytest.raises(ValueError):
        Density1D.tabulated(x, -x * x)


@pytest.mark.parametrize("bad", [
    lambda: Density1D.gamma(0.5),
    lambda: Density1D.gaussian(0, -1),
    lambda: Density1D.uniform(1, 1),
    lambda: Density1D.tabulated([0, 0, 1], [0, 1, 2]),
    lambda: GaugeSpec("l3", 2),
    lambda: GaugeSpec("weighted-l1", 2, (1.0,)),
    lambda: GaussianIso(0),
    lambda: HomogeneousModel(GaugeSpec("l2", 2), rate=0.0),
    lambda: Tabulated2D.from_arrays([0, 1, 2], [0, 1], np.ones((3, 2)) * [[0], [1], [0]]),
])
def test_constructor_errors(bad):
    with pytest.raises(ValueError):
        bad()


def test_catalog_is_log_concave():
    for name, n, m in catalog.catalog(range(1, 4)):
        assert check_log_concavity(m, probes=300).passed, name


# -- normalizing constants --------------------------------------------------

def test_normalizer_exponential_integral():
    assert normalizing_constant(lambda x: x, 0.0, math.inf) == pytest.approx(1.0, rel=1e-10)


def test_normalizer_gaussian_integral():
    assert normalizing_constant(lambda x: 0.5 * x * x) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)


def test_normalizer_l1_plane():
    ref, _ = integrate.dblquad(lambda y, x: math.exp(-abs(x) - abs(y)), -40, 40, -40, 40)
    assert normalizing_constant(GaugeSpec("l1", 2)) == pytest.approx(ref, rel=1e-8)
    assert ref == pytest.approx(4.0, rel=1e-8)


@pytest.mark.parametrize("kind", ["l1", "l2", "linf", "weighted-l1"])
def test_gauge_unit_volume_2d(kind):
    g = GaugeSpec(kind, 2, (0.5, 2.0) if kind == "weighted-l1" else ())
    # Monte Carlo hit rate on [-2, 2]^2; 4e6 points give a relative SE below 4e-4
    pts = np.random.default_rng(3).uniform(-2, 2, size=(4_000_000, 2))
    ref = 16 * np.count_nonzero(g(pts) <= 1.0) / len(pts)
    assert math.exp(g.log_unit_volume) == pytest.approx(ref, rel=2e-3)


def test_tabulated_normalization_is_shift_free():
    a = Density1D.tabulated([-40, 0, 40], [40, 0, 40])
    b = Density1D.tabulated([-40, 0, 40], [45, 5, 45])
    mass, _ = integrate.quad(lambda x: math.exp(-b.potential(x)), -40, 40, points=[0.0])
    assert mass == pytest.approx(1.0, rel=1e-12)
    assert b.potential(1.3) == pytest.approx(a.potential(1.3), rel=1e-14)


def test_homogeneous_normalized():
    m = HomogeneousModel(GaugeSpec("l2", 2), rate=1.5)
    ref, _ = integrate.dblquad(lambda y, x: math.exp(-m.potential(np.array([[x, y]]))[0]),
                               -30, 30, -30, 30, epsabs=1e-11)
    assert ref == pytest.approx(1.0, abs=1e-8)


def test_tabulated2d_normalized():
    m = catalog.tabulated_2d(9, 4.0)
    f = lambda y, x: math.exp(-float(m.potential(np.array([[x, y]]))[0]))  # noqa: E731
    # bilinear cells, so integrate cell by cell
    g = np.linspace(-4, 4, 9)
    total = sum(integrate.dblquad(f, a, b, c, d, epsabs=1e-13)[0]
                for a, b in zip(g[:-1], g[1:]) for c, d in zip(g[:-1], g[1:]))
    assert total == pytest.approx(1.0, rel=1e-9)


# -- rearrangement ------------------------------------------------------------

def _level_distribution(d, levels):
    # P{f(X) >= e^{-u}}: mass of the sublevel interval {U <= u}, ends found by brentq
    from scipy.optimize import brentq

    lo, hi = d.probe_interval()
    mode = d.mode
    f = lambda x: math.exp(-d.potential(x))  # noqa: E731
    out = []
    for u in levels:
        g = lambda x: d.potential(x) - u  # noqa: E731
        a = lo if g(lo) <= 0 else brentq(g, lo, mode, xtol=1e-14)
        b = hi if g(hi) <= 0 else brentq(g, mode, hi, xtol=1e-14)
        out.append(integrate.quad(f, a, b, points=[mode] if a < mode < b else None,
                                  epsabs=0, epsrel=1e-12, limit=500)[0])
    return np.array(out)


def test_rearrangement_exponential_is_equimeasurable():
    d = Density1D.exponential(1.0)
    r = decreasing_rearrangement_1d(d)
    assert r.potential(0.5) == pytest.approx(1.0, abs=1e-9)   # e^{-2|x|}
    assert r.potential(-0.5) == pytest.approx(1.0, abs=1e-9)
    levels = [0.5, 1.0, 2.0, 4.0]
    np.testing.assert_allclose(_level_distribution(d, levels), 1 - np.exp(-np.array(levels)), atol=1e-6)
    np.testing.assert_allclose(_level_distribution(r, levels), 1 - np.exp(-np.array(levels)), atol=1e-6)


def test_rearrangement_centers_gaussian():
    r = decreasing_rearrangement_1d(Density1D.gaussian(3.0, 1.0))
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(r.potential(x), Density1D.gaussian().potential(x), atol=1e-5)


def test_rearrangement_uniform():
    r = decreasing_rearrangement_1d(Density1D.uniform(0, 1))
    assert r.support == pytest.approx((-0.5, 0.5))
    assert r.potential(0.2) == pytest.approx(0.0, abs=1e-14)


def test_rearrangement_preserves_h_and_V():
    d = catalog.asymmetric_tabulated()
    r = decreasing_rearrangement_1d(d)
    assert abs(entropy_quad(r) - entropy_quad(d)) <= 1e-3
    assert abs(varentropy_quad(r) - varentropy_quad(d)) <= 1e-3


# -- transformations ------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-3, 3))
def test_affine_gamma_matches_scipy(scale, shift):
    d = Density1D.gamma(2.5).affine(scale, shift)
    x = shift + scale * np.array([0.5, 1.0, 4.0])
    np.testing.assert_allclose(-d.potential(x), stats.gamma(2.5, loc=shift, scale=scale).logpdf(x), rtol=1e-12)


def test_reflected_tabulated():
    d = catalog.asymmetric_tabulated().affine(-2.0, 1.0)
    assert d.potential(1.0 - 2.0 * 0.7) == pytest.approx(catalog.asymmetric_tabulated().potential(0.7) + math.log(2))


def test_product_mean_and_sup():
    m = catalog.make("mixed-product", 2)
    np.testing.assert_allclose(m.mean, [2.0, 0.0])
    assert m.log_sup == pytest.approx(stats.gamma(2).logpdf(1.0) + stats.norm(0, 2).logpdf(0.0))


# -- config ------------------------------------------------------------

def test_config_roundtrip(tmp_path):
    for _, _, m in catalog.catalog(range(1, 3)):
        cfg = json.loads(json.dumps(m.to_config()))
        assert model_from_config(cfg).to_config() == m.to_config()


def test_load_model_with_csv(tmp_path):
    (tmp_path / "U.csv").write_text("x,U\n-3,3\n0,0\n1,2\n")
    (tmp_path / "m.json").write_text(json.dumps(
        {"structure": "product", "factors": [{"kind": "tabulated", "csv": "U.csv"}, {"kind": "gaussian", "repeat": 2}]}))
    m = load_model(tmp_path / "m.json")
    assert m.dim == 3 and m.factors[0].x == (-3.0, 0.0, 1.0)


def test_unknown_structure():
    with pytest.raises(ValueError):
        model_from_config({"structure": "mixture"})

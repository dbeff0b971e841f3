import json
import math

import pytest

from infoconc import Density1D
from infoconc import catalog
from infoconc.verify import (
    COVERAGE, SCHEMA, CheckRecord, ConfigError, SuiteConfig, check_affine_invariance,
    check_legendre_identity, check_rearrangement_invariance, run_suite, suite_config,
)


@pytest.fixture(scope="module")
def small_report():
    return run_suite({"suite": "quick", "models": ["gaussian-iso(3)", "exp-product(4)", "l1(2)", "gamma2"]})


def test_gaussian_varentropy_record(small_report):
    r = small_report.record("varentropy_at_most_dimension[gaussian-iso(3)]")
    assert r.measured == pytest.approx(1.5, abs=1e-12)
    assert r.target == 3.0 and r.slack == pytest.approx(1.5, abs=1e-12) and r.passed


@pytest.mark.parametrize("check", [
    "varentropy_equals_dimension", "mgf_attains_rate_bound", "entropy_attains_log_sup_plus_dimension",
    "sup_attains_e_to_n_times_density_at_mean", "logG_identically_zero",
])
def test_exp_product_equalities(small_report, check):
    r = small_report.record(f"{check}[exp-product(4)]")
    assert r.measured <= 1e-8 and r.passed


def test_all_pass_and_unique_ids(small_report):
    ids = [r.check for r in small_report.records]
    assert small_report.passed and not small_report.failures
    assert len(ids) == len(set(ids)) and ids == sorted(ids)


def test_report_json(small_report):
    d = json.loads(small_report.to_json())
    assert d["schema"] == SCHEMA
    assert d["metadata"]["seed"] == 0xC0FFEE
    assert all("runtime" not in c for c in d["checks"])
    assert all("runtime" in c for c in json.loads(small_report.to_json(include_runtime=True))["checks"])
    # model-level statistical checks carry what is needed to replay them
    mean = [c for c in d["checks"] if c["check"] == "gauge_law_mean[l1(2)]"][0]
    assert {"seed", "m", "model_seed"} <= set(mean["params"])


def test_rearrangement_only_in_one_dimension(small_report):
    ids = {r.check for r in small_report.records}
    assert "rearrangement_invariance[gamma2(1)]" in ids
    assert not any(i.startswith("rearrangement_invariance[exp-product(4)") for i in ids)


def test_deterministic():
    cfg = {"suite": "quick", "models": ["l2(2)", "tabulated2d"], "seed": 7}
    assert run_suite(cfg).to_json() == run_suite(cfg).to_json()


def test_seed_changes_statistical_records():
    a = run_suite({"suite": "quick", "models": ["l2(2)"], "seed": 1}).record("gauge_law_mean[l2(2)]")
    b = run_suite({"suite": "quick", "models": ["l2(2)"], "seed": 2}).record("gauge_law_mean[l2(2)]")
    assert a.measured != b.measured


def test_negative_tolerance_demands_margin():
    # a tolerance below zero turns the check into "slack must exceed |tol|"
    rep = run_suite({"suite": "quick", "models": ["gaussian-iso(1)"], "tolerances": {"varentropy_bound": -10.0}})
    assert not rep.passed
    assert [r.check for r in rep.failures] == ["varentropy_at_most_dimension[gaussian-iso(1)]"]


def test_record_verdict_rule():
    assert CheckRecord("x", "m", {}, 0.0, 0.0, -1e-9, 1e-8).passed
    assert not CheckRecord("x", "m", {}, 0.0, 0.0, -1e-7, 1e-8).passed
    assert math.copysign(1.0, CheckRecord("x", "m", {}, 0.0, 0.0, -0.0, 0.0).slack) == 1.0


@pytest.mark.parametrize("bad", [
    {"m": 10}, {"betas": [0.5, 1.0]}, {"taus": [0.0]}, {"small_ball_cs": [0.4]},
    {"alphas": [1, 2, 3]}, {"colour": "red"}, {"tolerances": {"nope": 1}}, {"suite": "huge"},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict(bad)


def test_unknown_model_name():
    with pytest.raises(ValueError):
        run_suite({"suite": "quick", "models": ["cauchy(2)"]})


def test_suite_config_roundtrip():
    cfg = suite_config("quick")
    assert SuiteConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_affine_invariance_examples():
    g = check_affine_invariance(Density1D.gaussian(3.0, 0.5), trials=20)
    e = check_affine_invariance(Density1D.exponential(7.0), trials=20)
    u = check_affine_invariance(Density1D.uniform(-2, 5), trials=20)
    assert all(r.passed and r.measured <= 1e-8 for r in (g, e, u))


def test_rearrangement_invariance_examples():
    for d in (Density1D.exponential(1.0), Density1D.gaussian(5.0, 2.0), catalog.asymmetric_tabulated()):
        rec = check_rearrangement_invariance(d)
        assert rec.passed and rec.measured <= 1e-3


def test_legendre_records():
    recs = check_legendre_identity()
    assert [r.check for r in recs] == ["legendre_conjugate_of_rate", "legendre_unbounded_beyond_one"]
    assert all(r.passed for r in recs) and recs[0].measured <= 1e-6


def test_default_suite_covers_every_result():
    # the default config must schedule at least one check for each covered result
    cfg = suite_config("default", dims=(1, 2), m=2000, affine_trials=2, rearrangement_grid=301,
                       alphas=tuple(float(a) for a in (0.2, 0.5, 1.0, 2.0, 5.0)),
                       concavity_alphas=tuple(float(a) for a in (0.2, 0.5, 1.0, 2.0, 5.0)))
    ids = [r.check for r in run_suite(cfg).records]
    for result, prefix in COVERAGE.items():
        assert any(i == prefix or i.startswith(prefix + "[") for i in ids), result

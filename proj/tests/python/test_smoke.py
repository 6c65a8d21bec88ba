import math
import pathlib

import pytest

import subpress

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "fixtures"


def fixture(name):
    return subpress.load_config(str(FIXTURES / name))


def test_pressure_on_the_full_shift():
    cfg = fixture("full2_zero.json")
    est = subpress.pressure(cfg)
    assert est.schedule == cfg.pressure_schedule
    for rate in est.rates:
        assert rate == pytest.approx(math.log(2.0), abs=1e-12)
    assert est.reported == pytest.approx(math.log(2.0), abs=1e-12)


def test_config_hash_round_trip():
    cfg = fixture("s2_goldmean.json")
    assert len(cfg.hash) == 16
    again = subpress.parse_config(cfg.canonical)
    assert again.hash == cfg.hash
    assert again.canonical == cfg.canonical


def test_schema_errors_raise_config_error():
    with pytest.raises(subpress.ConfigError):
        subpress.parse_config("{")
    with pytest.raises(subpress.ConfigError, match=r"\$\.system"):
        subpress.parse_config('{"system": 3}')
    with pytest.raises(subpress.ConfigError):
        subpress.load_config(str(FIXTURES / "does_not_exist.json"))


def test_entropy_and_phistar_of_the_configured_measure():
    cfg = fixture("s2_goldmean.json")
    assert subpress.fiber_entropy(cfg) == pytest.approx(0.5198603854199589, abs=1e-12)
    est = subpress.phistar(cfg)
    assert est.exact
    assert est.value == 0.0


def test_variational_search_recovers_the_equilibrium_kernel():
    cfg = fixture("bernoulli_log2.json")
    rep = subpress.varprinciple(cfg)
    assert rep.best_objective == pytest.approx(math.log(3.0), abs=1e-4)
    assert abs(rep.gap) <= 1e-4
    for row in rep.best.kernels[0]:
        assert row[0] == pytest.approx(1.0 / 3.0, abs=1e-3)
        assert row[1] == pytest.approx(2.0 / 3.0, abs=1e-3)


def test_sampled_objectives_respect_the_pressure_bound():
    cfg = fixture("full2_zero.json")
    est = subpress.pressure(cfg)
    for seed in range(1, 33):
        mu = subpress.sample_measure(cfg, seed)
        assert subpress.objective(cfg, mu) <= est.upper_envelope + 1e-6


def test_power_pressure_scales_by_k():
    cfg = fixture("full2_zero.json")
    base = subpress.pressure(cfg)
    power = subpress.power_pressure(cfg)
    assert power.reported == pytest.approx(cfg.power_k * base.reported, abs=1e-12)


def test_bottom_regime_is_consistent():
    cfg = fixture("zero_cocycle.json")
    est = subpress.pressure(cfg)
    assert est.reported == -math.inf
    mu = subpress.sample_measure(cfg, 1)
    assert subpress.objective(cfg, mu) == -math.inf


def test_verify_battery_passes_and_is_thread_independent():
    cfg = fixture("s2_goldmean.json")
    one = subpress.verify(cfg)
    eight = subpress.verify(cfg, threads=8)
    assert one.all_pass and eight.all_pass
    names = [c.name for c in one.checks]
    assert names == [
        "subadditivity",
        "oracle_equivalence",
        "fekete",
        "gibbs_identity",
        "block_chain",
        "chunking",
        "power_consistency",
        "measure_bound",
    ]
    for a, b in zip(one.checks, eight.checks):
        assert (a.name, a.passed, a.skipped, a.detail) == (b.name, b.passed, b.skipped, b.detail)
        assert a.slack == b.slack or (math.isinf(a.slack) and math.isinf(b.slack))


def test_measure_accessors_match_the_config():
    cfg = fixture("s2_goldmean.json")
    mu = cfg.measure
    assert mu is not None
    assert mu.initials[0][0] == pytest.approx(0.75, abs=1e-12)
    assert mu.initials[1][0] == pytest.approx(0.5, abs=1e-12)
    assert mu.kernels[1][1] == [1.0, 0.0]

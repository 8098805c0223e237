import math
import pathlib

import pytest

import dp_resample as dr

ROOT = pathlib.Path(__file__).resolve().parents[2]
NORMAL = '{"kind": "truncated_normal", "mu": 0, "sigma": 1, "lo": -3, "hi": 3}'


def test_sample_is_seeded_and_bounded():
    a = dr.sample(NORMAL, 500, 11)
    assert a == dr.sample(NORMAL, 500, 11)
    assert a != dr.sample(NORMAL, 500, 12)
    assert all(-3 <= x <= 3 for x in a)
    assert dr.true_quantile(NORMAL, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_amplify_closed_form():
    eps, delta = dr.amplify(1.0, 1e-6, 10, 100)
    assert eps == pytest.approx(math.log1p(0.1 * math.expm1(1.0)), rel=1e-14)
    assert delta == pytest.approx(1e-7, rel=1e-14)


def test_calibrate_round_trip():
    b = dr.calibrate(5.0, 0.0, m=292, n=5000, T=50)
    assert b["total_epsilon"] == pytest.approx(5.0, rel=1e-9)
    assert b["epsilon"] == pytest.approx(2.5)


def test_privsub_interval():
    data = dr.sample(NORMAL, 2000, 3)
    r = dr.run_privsub(data, -3, 3, eps_total=5.0, seed=4)
    assert r["lower"] <= r["upper"]
    assert len(r["estimates"]) == 50
    assert r["estimates"] == sorted(r["estimates"])
    again = dr.run_privsub(data, -3, 3, eps_total=5.0, seed=4)
    assert (again["lower"], again["upper"]) == (r["lower"], r["upper"])
    assert r["upper"] - r["lower"] < 1.0


def test_baselines_return_ordered_intervals():
    data = dr.sample(NORMAL, 900, 5)
    for lo, hi in (
        dr.bootstrap_ci(data, seed=1),
        dr.sample_splitting_ci(data, -3, 3, num_splits=30, seed=1),
        dr.expmech_median_ci(data, -3, 3, seed=1),
    ):
        assert lo <= hi
    r = dr.run_nonprivate_subsampling(data, seed=1)
    assert r["lower"] <= r["upper"]


def test_errors_are_typed():
    with pytest.raises(dr.PlanError):
        dr.run_privsub([0.1, 0.2, 0.3], 0, 1, m=2, T=3)
    with pytest.raises(dr.ParameterError):
        dr.amplify(-1.0, 0.0, 1, 2)
    with pytest.raises(dr.ConfigError):
        dr.run_coverage('{"unknown": 1}')
    assert issubclass(dr.Error, ValueError)


def test_run_coverage_from_config():
    text = (ROOT / "configs" / "smoke.json").read_text()
    csv = dr.run_coverage(text, 2)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("distribution_id,n,method_id")
    assert len(lines) == 5
    assert all(line.endswith(",ok") for line in lines[1:])
    assert csv == dr.run_coverage(text, 1)

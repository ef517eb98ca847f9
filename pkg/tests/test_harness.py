import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from e2tc import bounds
from e2tc.cli import main
from e2tc.errors import ConfigError
from e2tc.harness import (
    RUN_COLUMNS,
    TRACE_COLUMNS,
    PolicySpec,
    expand_instances,
    load_config,
    run_experiment,
    runtime_probe,
    summarize,
)

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "ellipsoid_small.json"


def _cfg(**kw):
    raw = {
        "experiment_id": "t", "T": 2000, "runs": 4, "sigma": 1.0,
        "instances": [{"action_set": {"shape": "ball", "d": 3}, "norm": 1.0, "seed": 1}],
        "policies": ["e2tc"],
    }
    raw.update(kw)
    return raw


def test_logbar_and_bound_examples():
    assert bounds.logbar(0.5) == 1.0
    assert bounds.logbar(math.e) == pytest.approx(2.0)
    assert bounds.theorem3_rhs(2, 1, 1e4, 1) == pytest.approx(36511.445115677685, rel=1e-12)
    assert bounds.theorem3_rhs(3, 0.0, 100, 2.0) == 24.0
    assert bounds.lower_bound_floor(4, 1.0, 1e4, 1.0) == 25.0
    with pytest.raises(ValueError):
        bounds.theorem3_rhs(2, 1, 100, 0.0)


def test_theorem3_rhs_grows_with_d_and_T():
    vals = [bounds.theorem3_rhs(d, 1.0, T, 1.0) for d in (2, 4, 8) for T in (1e3, 1e4)]
    assert vals[0] < vals[1] and vals[0] < vals[2] < vals[4]


def test_policy_spec_parsing():
    p = PolicySpec.parse("e2tc:alpha=1")
    assert p.params == {"alpha": 1.0} and p.label == "e2tc(1)"
    assert PolicySpec.parse({"name": "oful_ball", "S_bound": 5}).params == {"S_bound": 5}
    assert PolicySpec.parse("e2tc:engine=generic").params["engine"] == "generic"
    with pytest.raises(ConfigError):
        PolicySpec.parse("thompson")


def test_config_errors():
    with pytest.raises(ConfigError, match="positive definite"):
        load_config(_cfg(instances=[{"action_set": {"A": [[1, 2], [2, 1]]}, "norm": 1.0}]))
    with pytest.raises(ConfigError):
        load_config(_cfg(runs=0))
    with pytest.raises(ConfigError):
        load_config(_cfg(noise="cauchy"))
    with pytest.raises(ConfigError):
        load_config({"instances": []})
    cfg = load_config(_cfg(instances=[{"action_set": {"shape": "random", "d": 2}, "norm": 1.0}],
                           policies=["oful_ball"]))
    with pytest.raises(ConfigError):
        run_experiment(cfg)


def test_expand_instances():
    insts = expand_instances([
        {"theta": [1.0, 2.0]},
        {"action_set": {"shape": "random", "d": 4, "seed": 2}, "norm": 3.0, "direction": "ones"},
        {"action_set": {"shape": "ball", "d": 5}, "assouad": {"B": 1.0, "T": 1000}},
    ])
    assert len(insts) == 2 + 8
    assert insts[1].norm == pytest.approx(3.0)
    assert all(i.norm == pytest.approx(1.0) for i in insts[2:])


def test_summary_is_order_invariant(rng):
    vals = rng.normal(size=50) * 1e6
    a, b = summarize(vals), summarize(rng.permutation(vals))
    assert a["mean"] == b["mean"] and a["std"] == b["std"]
    assert a["ci95"][1] - a["mean"] == pytest.approx(1.96 * a["std"] / math.sqrt(50))


def test_oracle_zero_noise_single_run():
    res = run_experiment(load_config(_cfg(runs=1, sigma=0.0, policies=["oracle"])))
    assert res.summary[0]["mean"] == 0.0 and res.summary[0]["std"] == 0.0


def test_outputs_schema(tmp_path):
    res = run_experiment(load_config(_cfg(out=str(tmp_path), policies=["e2tc", "uniform"])))
    with open(tmp_path / "traces.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert {r[1] for r in rows[1:]} == {"e2tc(3)", "uniform"}
    steps = [int(r[6]) for r in rows[1:] if r[1] == "uniform" and r[5] == rows[1][5]]
    assert steps[0] == 1 and steps[-1] == 2000
    with open(tmp_path / "runs.csv") as fh:
        runs = list(csv.DictReader(fh))
    assert tuple(runs[0]) == RUN_COLUMNS and len(runs) == 8
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["all_pass"] == res.all_pass and len(summary["rows"]) == 2
    assert summary["bound_reports"][0]["pass"] is True


def test_parallel_matches_serial():
    a = run_experiment(load_config(_cfg(workers=1, policies=["e2tc", "uniform"])))
    b = run_experiment(load_config(_cfg(workers=2, policies=["e2tc", "uniform"])))
    for ea, eb in zip(a.episodes, b.episodes):
        assert ea.seed == eb.seed
        np.testing.assert_array_equal(ea.cumulative, eb.cumulative)
    assert a.summary == b.summary


def test_generic_engine_matches_fast():
    fast = run_experiment(load_config(_cfg(policies=["e2tc"])))
    slow = run_experiment(load_config(_cfg(policies=["e2tc:engine=generic"])))
    np.testing.assert_allclose(fast.finals(0, 0), slow.finals(0, 0), rtol=1e-9)


def test_translated_instance_uses_reduction():
    res = run_experiment(load_config(_cfg(
        instances=[{"action_set": {"shape": "ball", "d": 2, "c": [3.0, 0.0]}, "norm": 1.0}], runs=3)))
    assert res.bound_reports[0]["theorem"] == "translated"
    assert res.bound_reports[0]["regret_pass"]


def test_cli_run_and_exit_codes(tmp_path, capsys):
    assert main(["run", str(CONFIG), "--runs", "3", "--T", "3000", "--out", str(tmp_path), "--check-bounds"]) == 0
    assert (tmp_path / "summary.json").exists()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(_cfg(instances=[{"action_set": {"A": [[-1.0]]}, "norm": 1.0}])))
    assert main(["run", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_cli_sweeps_and_bounds(capsys):
    assert main(["sweep-norm", "--runs", "2", "--T", "1000", "--norms", "0.1", "1"]) == 0
    assert main(["sweep-dim", "--runs", "2", "--T", "1000", "--dims", "2", "4"]) == 0
    capsys.readouterr()
    assert main(["bounds", "--d", "2", "--T", "10000", "--norm", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["theorem3_rhs"] == pytest.approx(36511.445115677685)


def test_cli_bench(capsys):
    assert main(["bench", "--d", "10", "--T", "5000", "--compare-backends"]) == 0
    assert "per_step_ns" in capsys.readouterr().out


def test_runtime_probe():
    out = runtime_probe("e2tc", d=20, T=20_000)
    assert out["total_s"] < 5 and set(out["phases_s"]) >= {"warmup", "explore", "commit"}
    assert runtime_probe("uniform", d=3, T=500)["final_regret"] > 0

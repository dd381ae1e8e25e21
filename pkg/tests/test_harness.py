import json

import numpy as np
import pytest

from oproots.errors import BadMatrix
from oproots.harness import DEFAULT_SUITE, ExperimentConfig, ExperimentReport, SuiteConfig, execute, plan, run_suite


def test_empty_suite():
    rep = run_suite({"master_seed": 1, "experiments": []})
    assert rep.runs == [] and rep.summary["runs"] == 0 and not rep.has_errors


def test_empty_method_list():
    rep = run_suite({"experiments": [{"generator": {"kind": "RandomAccretive"}, "methods": []}]})
    assert rep.runs == []


def test_scalar_newton_run_matches_hand_iteration(tmp_path):
    cfg = {"experiments": [{"generator": {"kind": "FixedInstance", "name": "scalar-4", "n": 1},
                            "methods": ["NewtonSqrt"]}]}
    rep = run_suite(cfg, tmp_path)
    (run,) = rep.runs
    assert run["state"] == "certified"
    csv = (tmp_path / "traces" / f"{run['id']}.csv").read_text().splitlines()
    assert csv[0] == "k,norm_Xk,norm_Xk_inv,err_ref,residual"
    xs = [float(line.split(",")[1]) for line in csv[1:]]
    assert xs[:3] == pytest.approx([1, 2.5, 2.05])
    assert (tmp_path / "timings.json").exists()


def test_plan_cross_product_and_ids():
    cfg = SuiteConfig.from_json({"master_seed": 3, "experiments": [
        {"generator": {"kind": "RandomAccretive"}, "methods": ["NewtonSqrt", "SchurPower"],
         "tolerances": [1e-8, 1e-10], "seeds": 3, "n": [2, 5]}]})
    runs = plan(cfg)
    assert len(runs) == 3 * 2 * 2
    assert len({r["id"] for r in runs}) == len(runs)
    assert [r["generator"]["n"] for r in runs[::4]] == [2, 5, 2]


def test_bad_config_rejected(tmp_path):
    with pytest.raises(BadMatrix):
        SuiteConfig.from_json([1, 2])
    with pytest.raises(BadMatrix):
        SuiteConfig.from_json({"experiments": [{"generator": {"kind": "RandomAccretive"}, "methods": ["Nope"]}]})
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(BadMatrix):
        SuiteConfig.load(p)


def test_method_errors_are_captured():
    run = {"id": "x", "experiment": 0, "generator": {"kind": "JordanBlock", "n": 2, "seed": 0},
           "seed": 0, "method": "SignDirect", "tol": 1e-10, "p": 2, "max_iter": 50}
    rec, _, _ = execute(run)
    assert rec["state"] == "errored" and rec["error"]["type"] == "ImaginarySpectrum"


def test_warned_state():
    run = {"id": "x", "experiment": 0, "generator": {"kind": "FixedInstance", "name": "scalar-4", "seed": 0},
           "seed": 0, "method": "NewtonPth", "tol": 1e-10, "p": 3, "max_iter": 100}
    rec, _, _ = execute(run)
    assert rec["state"] == "hypothesis-warned" and rec["warnings"]


def test_report_roundtrip():
    rep = run_suite({"master_seed": 5, "experiments": [
        {"generator": {"kind": "RandomAccretive", "n": 3}, "methods": ["SignNewton", "GeometricMean"], "seeds": 2}]})
    again = ExperimentReport.loads(rep.dumps())
    assert again.dumps() == rep.dumps()
    assert rep.summary["states"]["certified"] == 4


def test_parallel_equals_serial():
    doc = {"master_seed": 9, "experiments": [
        {"generator": {"kind": "RandomAccretive"}, "methods": ["NewtonSqrt", "HalleyPth"], "seeds": 4, "p": 3}]}
    serial = run_suite(doc).dumps()
    parallel = run_suite(dict(doc, workers=2)).dumps()
    assert serial.replace('"workers": 1', '"workers": 2') == parallel


def test_default_suite_config_is_valid():
    cfg = SuiteConfig.from_json(DEFAULT_SUITE)
    assert len(plan(cfg)) == 650
    assert all(n <= 12 for e in cfg.experiments for n in e.n)
    assert json.loads(json.dumps(cfg.to_json()))["master_seed"] == DEFAULT_SUITE["master_seed"]

from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from minprod.gallery import (
    ConfigError, Experiment, GALLERY, blob_hash, gallery, list_gallery, load_config, merge_reports, run_experiment,
)
from minprod.gallery.cli import main
from minprod.gallery.runner import canonical

SMALL = {"name": "small", "builder": ["circle_rotation", "1/5"],
         "plan": [{"op": "minimality_scan", "params": {"eps": 0.05, "horizon": 1000}, "expect": "fail"}]}


def test_catalog_contents():
    names = [row["name"] for row in list_gallery()]
    assert len(names) >= 12 and len(set(names)) == len(names)
    for want in ("td-ab-nonminimal", "two-circles-skew", "rational-rotation-period", "torus-cert-battery",
                 "klein-minimal", "flow-centralizer-time-t"):
        assert want in names
    for e in GALLERY:
        e.validate()
        assert e.claim


@pytest.mark.skipif(shutil.which("git") is None, reason="git not installed")
def test_params_hash_is_git_blob_hash():
    doc = {"b": [1, "1/2"], "a": {"x": 0.5}}
    out = subprocess.run(["git", "hash-object", "--stdin"], input=canonical(doc).encode(), capture_output=True,
                         check=True)
    assert blob_hash(doc) == out.stdout.decode().strip()


@pytest.mark.parametrize("doc, match", [
    ({"experiments": [{**SMALL, "builder": ["no_such_builder"]}]}, "unknown builder"),
    ({"experiments": [{**SMALL, "builder": ["circle_rotation"]}]}, "bad arguments"),
    ({"experiments": [{**SMALL, "builder": ["circle_rotation", "sqrt7"]}]}, "unknown constant"),
    ({"experiments": [{**SMALL, "plan": [{"op": "nope"}]}]}, "unknown analysis"),
    ({"experiments": [{**SMALL, "plan": [{"op": "minimality_scan", "expect": "maybe"}]}]}, "expected verdict"),
    ({"experiments": [SMALL, SMALL]}, "unique"),
    ({"registry": ["sqrt11"], "experiments": [SMALL]}, "registry"),
    ({"experiments": [{"builder": SMALL["builder"]}]}, "missing"),
    ([], "object"),
])
def test_config_validation_errors(doc, match):
    with pytest.raises(ConfigError, match=match):
        load_config(doc)


def test_run_small_experiment_matches():
    (e,) = load_config({"registry": ["sqrt2"], "experiments": [SMALL]})
    r = run_experiment(e)
    assert r.status == "pass"
    (row,) = r.analyses
    assert row["verdict"] == "fail" and row["matched"]
    assert r.payload_hash == run_experiment(e).payload_hash


def test_analysis_errors_are_recorded():
    e = Experiment.from_json({"name": "broken", "builder": ["circle_rotation", "sqrt2"],
                              "plan": [{"op": "s3_subgroup_deviation"}]})
    r = run_experiment(e)
    assert r.status == "fail" and r.analyses[0]["verdict"] == "error"


@pytest.mark.parametrize("name", ["rational-rotation-period", "td-ab-nonminimal", "s3-translation-nonminimal",
                                  "scurve-geometry"])
def test_gallery_entries_reproduce(name):
    e = gallery()[name]
    a, b = run_experiment(e), run_experiment(e)
    assert a.status == "pass"
    assert a.payload() == b.payload()
    assert json.dumps(a.payload(), sort_keys=True) == json.dumps(b.payload(), sort_keys=True)


def test_seed_changes_only_seeded_runs():
    e = gallery()["irrational-rotation-density"]
    assert run_experiment(e, seed=1).params_hash != run_experiment(e, seed=2).params_hash


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["gallery", "list"]) == 0
    assert "klein-minimal" in capsys.readouterr().out

    out = tmp_path / "r.json"
    assert main(["gallery", "run", "rational-rotation-period", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert set(report) >= {"experiment", "params_hash", "analyses", "status"}
    for row in report["analyses"]:
        assert set(row) >= {"op", "params", "verdict", "evidence"}

    cfg = tmp_path / "c.json"
    wrong = {**SMALL, "plan": [{**SMALL["plan"][0], "expect": "pass"}]}
    cfg.write_text(json.dumps({"registry": [], "experiments": [wrong]}))
    assert main(["run", "--config", str(cfg)]) == 1

    cfg.write_text(json.dumps({"experiments": [{**SMALL, "builder": ["bogus"]}]}))
    assert main(["run", "--config", str(cfg)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["gallery", "run", "no-such-experiment"]) == 2


def test_report_merge(tmp_path):
    paths = []
    for name in ("td-ab-nonminimal", "rational-rotation-period"):
        p = tmp_path / f"{name}.json"
        assert main(["gallery", "run", name, "--out", str(p)]) == 0
        paths.append(str(p))
    merged_path = tmp_path / "m.json"
    assert main(["report", "merge", *paths, "--out", str(merged_path)]) == 0
    merged = json.loads(merged_path.read_text())
    assert [r["experiment"] for r in merged["runs"]] == ["rational-rotation-period", "td-ab-nonminimal"]
    assert merged == merge_reports([json.loads(open(p).read()) for p in reversed(paths)])
    bad = dict(json.loads(open(paths[0]).read()), payload_hash="0" * 40)
    with pytest.raises(ConfigError):
        merge_reports([merged, bad])

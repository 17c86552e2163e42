import json
import warnings

import pytest
from click.testing import CliRunner

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from quadlab.cli import main
from quadlab.planar_map import from_qnd, is_quadrangulation
from quadlab.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app, raise_server_exceptions=False)


def test_health(client):
    assert client.get("/health").json()["status"] == "ok"


def test_enumerate_endpoint(client):
    body = client.post("/enumerate", json={"n": 5}).json()
    assert body["count"] == body["closed_form"] == 54
    body = client.post("/enumerate", json={"n": 6, "r": 4, "emit": "maps"}).json()
    assert body["count"] == len(body["maps"]) == 80
    assert all(is_quadrangulation(from_qnd(m)) for m in body["maps"])


def test_allocate_endpoint(client):
    body = client.post("/allocate", json={"balls": 4, "boxes": 2}).json()
    assert body["prob_sum"] == "11/128"
    assert {tuple(e["y"]): e["p"] for e in body["law"]} == {(1, 3): "9/22", (2, 2): "2/11", (3, 1): "9/22"}
    mc = client.post("/allocate", json={"balls": 30, "boxes": 5, "mode": "mc", "reps": 50}).json()
    assert all(sum(s) == 30 for s in mc["samples"])


def test_errors_map_to_422(client):
    resp = client.post("/sample", json={"n": 3, "r": 9})
    assert resp.status_code == 422 and resp.json()["error"] == "ValueError"
    resp = client.post("/allocate", json={"balls": 2, "boxes": 3})
    assert resp.status_code == 422
    resp = client.post("/enumerate", json={"n": 40})
    assert resp.status_code == 422 and resp.json()["error"] == "CapExceeded"


def test_ghp_endpoint(client):
    a = {"points": [0, 1], "dist": [[0, 1], [1, 0]], "root": 0, "mass": [0, 0]}
    b = {"points": [0, 1], "dist": [[0, "11/10"], ["11/10", 0]], "root": 0, "mass": [0, 0]}
    assert client.post("/ghp", json={"a": a, "b": b}).json()["value"] == "1/20"
    iv = client.post("/ghp", json={"a": a, "b": b, "mode": "bounds"}).json()
    assert iv["lo"] <= 0.05 <= iv["hi"]


def test_cli_end_to_end(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["enumerate", "--n", "5"])
    assert res.exit_code == 0 and json.loads(res.output)["count"] == 54

    corpus = tmp_path / "c.qnd"
    res = runner.invoke(main, ["sample", "--n", "40", "--r", "6", "--reps", "3", "--seed", "2", "--out", str(corpus)])
    assert res.exit_code == 0
    assert len(corpus.read_text().splitlines()) == 3

    res = runner.invoke(main, ["decompose", "--in", str(corpus)])
    recs = [json.loads(line) for line in res.output.splitlines()]
    assert [r["r"] for r in recs] == [6, 6, 6] and all(sum(r["Y"]) == 34 for r in recs)

    res = runner.invoke(main, ["allocate", "--balls", "4", "--boxes", "2"])
    assert json.loads(res.output)["prob_sum"] == "11/128"

    space = tmp_path / "m.json"
    res = runner.invoke(main, ["continuum", "--object", "minbus", "--grid", "16", "--emit", str(space)])
    assert res.exit_code == 0
    s = json.loads(space.read_text())
    assert abs(sum(float(m) for m in s["mass"]) - 3.0) < 1e-9

    prof = tmp_path / "p.csv"
    assert runner.invoke(main, ["continuum", "--object", "plane", "--grid", "16", "--emit", str(prof)]).exit_code == 0
    assert prof.read_text().startswith("radius,mass")

    res = runner.invoke(main, ["ghp", "--a", str(space), "--b", str(space), "--mode", "bounds"])
    assert res.exit_code == 0 and json.loads(res.output)["lo"] == 0

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ns": [32, 64], "reps": 4, "thresholds": {"pendants": False}}))
    out = tmp_path / "rep.json"
    res = runner.invoke(main, ["experiment", "diameter", "--config", str(cfg), "--out", str(out), "--csv", str(tmp_path)])
    assert res.exit_code == 0
    assert json.loads(out.read_text())["experiment"] == "diameter"
    assert (tmp_path / "diameter.csv").exists()


def test_cli_reports_errors():
    res = CliRunner().invoke(main, ["sample", "--n", "3", "--r", "9"])
    assert res.exit_code == 1 and "need r < n" in res.output

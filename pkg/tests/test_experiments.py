import csv
import json
import math
from fractions import Fraction

import pytest

from quadlab.allocation import conditioned_allocation_exact, n_weights
from quadlab.experiments import (
    ExperimentConfig,
    condensation_exact,
    dumps,
    fact_chain_check,
    k_n,
    limit_replica,
    run,
    write_csv,
    write_report,
)


def _rational_condensation(n, r):
    m = n - r
    t1, t2 = m / math.log(n) ** 2, r ** (5 / 6)
    w = n_weights(n, r, closed=False)
    f1 = f2 = Fraction(0)
    for N in range(1, m + 1):
        pN = w.exact_probability(N)
        for y, p in conditioned_allocation_exact(m, N).items():
            ys = sorted(y, reverse=True)
            if ys[0] > t1:
                f1 += pN * p
            if len(ys) < 2 or ys[1] <= t2:
                f2 += pN * p
    return float(f1), float(f2)


@pytest.mark.parametrize("n,r", [(14, 5), (16, 4), (17, 6)])
def test_condensation_exact_against_rational_law(n, r):
    got = condensation_exact(n, r)
    f1, f2 = _rational_condensation(n, r)
    assert got["largest_exceeds"] == pytest.approx(f1, abs=1e-9)
    assert got["second_within"] == pytest.approx(f2, abs=1e-9)


def test_k_n():
    assert k_n(21) == pytest.approx(40**0.25)


def test_report_is_deterministic_and_schema_tagged(tmp_path):
    cfg = ExperimentConfig(name="condensation", ns=[64, 128], reps=12, seed=3)
    a, b = run(cfg), run(cfg)
    assert dumps(a) == dumps(b)
    assert a["schema"] == 1 and a["experiment"] == "condensation"
    assert "workers" not in a["config"]
    rows = a["report"]["rows"]
    assert [row["n"] for row in rows] == [64, 128]
    write_report(a, tmp_path / "c.json", tmp_path)
    assert json.loads((tmp_path / "c.json").read_text())["report"]["rows"][0]["n"] == 64
    with open(tmp_path / "condensation.csv", newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 2


def test_worker_count_does_not_change_the_report():
    cfg = ExperimentConfig(name="diameter", ns=[32, 64], reps=6, seed=1, thresholds={"pendants": False})
    one = run(cfg)
    cfg.workers = 2
    assert dumps(run(cfg)) == dumps(one)


def test_structure_report():
    rep = run(ExperimentConfig(name="structure", ns=[400], rs=[8, 12, 16], reps=20, seed=0))["report"]
    assert len(rep["rows"]) == 3
    assert rep["reference_slope"] == pytest.approx(math.log(4 / 9))
    for row in rep["rows"]:
        assert 0 <= row["p_N_ge_3r_exact"] <= 1
    assert rep["tail_decreasing"]


def test_limit_replica_and_fact_chain():
    rep = limit_replica(300, 17, 4)
    assert rep["hausdorff"] <= rep["bound"] + 1e-12
    chk = fact_chain_check(300, 17, 4)
    assert chk["dominated"]


def test_limit_report_small():
    cfg = ExperimentConfig(name="limit", ns=[100, 200], reps=8, seed=0, thresholds={"plane_grid": 20, "plane_reps": 8})
    rep = run(cfg)["report"]
    assert set(rep["bound_trend"]) >= {"strictly_decreasing"}
    assert set(rep["profile_tests"]) == {"0.5", "1.0"}


def test_unknown_experiment():
    with pytest.raises(ValueError):
        run(ExperimentConfig(name="nope"))

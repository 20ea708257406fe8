import math
import statistics

import pytest

from permsim.cli import main
from permsim.experiment import COLUMNS, ExperimentPlan, read_csv, run_plan, summarize, to_csv, trial_seed
from permsim.pipeline import PipelineConfig, baseline_decompose, random_permutations


def test_single_row_plan():
    rows = run_plan(ExperimentPlan(n_values=[256], trials_per_n=1, seed=3))
    text = to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(COLUMNS)
    data = [ln for ln in lines[1:] if not ln.startswith("#")]
    summary = [ln for ln in lines if ln.startswith("#")]
    assert len(data) == 1 and len(summary) == 2
    row = read_csv(text)[0]
    assert list(row) == COLUMNS
    assert row["n"] == 256 and row["ell"] >= 1 and row["ell_baseline"] >= 1


def test_column_order_fixed():
    assert COLUMNS == ["n", "k", "seed", "M", "bottleneck", "label_count", "max_label_degree",
                       "ell", "ell_baseline", "normalized_ratio", "wall_ms"]


def test_plan_validation():
    assert ExperimentPlan(n_values=[512, 64]).n_values == (64, 512)
    for kwargs in [dict(n_values=[]), dict(n_values=[1]), dict(n_values=[64], trials_per_n=0)]:
        with pytest.raises(ValueError):
            ExperimentPlan(**kwargs)


def test_trial_seeds_distinct():
    seeds = {trial_seed(0, n, t) for n in (64, 128) for t in range(50)}
    assert len(seeds) == 100
    assert trial_seed(5, 64, 0) == trial_seed(5, 64, 0)


def test_deterministic_without_timing(tmp_path, capsys):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"out{jobs}.csv"
        code = main(["experiment", "--n", "128", "64", "--trials", "2", "--seed", "9", "--no-timing",
                     "--jobs", jobs, "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = read_csv(outs[0].decode())
    assert [(r["n"]) for r in rows] == [64, 64, 128, 128]
    assert all(r["wall_ms"] == 0 for r in rows)


def test_summary_medians():
    rows = run_plan(ExperimentPlan(n_values=[100, 200], trials_per_n=3, timing=False))
    s = summarize(rows)
    assert [x["n"] for x in s] == [100, 200]
    assert s[0]["median_ell"] == statistics.median(r["ell"] for r in rows if r["n"] == 100)
    for r in rows:
        assert r["normalized_ratio"] == pytest.approx(
            r["ell"] / (r["n"] ** (1 / 3) * math.log(r["n"]) ** (11 / 6)))


def test_baseline_scales_like_sqrt_n():
    n = 4096
    ells = []
    for seed in range(20):
        perms = random_permutations(n, 2, PipelineConfig(seed=seed))
        ells.append(len(baseline_decompose(perms)[0]))
    assert 2 <= statistics.median(ells) / math.sqrt(n) <= 6

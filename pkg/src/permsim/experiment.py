"""Monte Carlo scaling runs: one pipeline + baseline run per (n, trial).

Each trial draws its own 64-bit seed from (plan seed, n, trial index), so
rows do not depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import SamplerConfig
from .pipeline import PipelineConfig, baseline_decompose, decompose, pipeline_stats

COLUMNS = ["n", "k", "seed", "M", "bottleneck", "label_count", "max_label_degree",
           "ell", "ell_baseline", "normalized_ratio", "wall_ms"]


@dataclass(frozen=True)
class ExperimentPlan:
    n_values: tuple[int, ...]
    k: int = 2
    trials_per_n: int = 1
    seed: int = 0
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    metric: str = "euclidean"
    matching_mode: str = "auto"
    timing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(sorted(int(n) for n in self.n_values)))
        if not self.n_values:
            raise ValueError("plan needs at least one n")
        if self.n_values[0] < 2:
            raise ValueError("experiment sizes must be >= 2")
        if self.trials_per_n < 1:
            raise ValueError("trials_per_n must be >= 1")


def trial_seed(seed: int, n: int, trial: int) -> int:
    state = np.random.SeedSequence([seed & (2**64 - 1), n, trial]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def run_trial(plan: ExperimentPlan, n: int, trial: int) -> dict:
    seed = trial_seed(plan.seed, n, trial)
    cfg = PipelineConfig(k=plan.k, sampler=plan.sampler, metric=plan.metric,
                         matching_mode=plan.matching_mode, seed=seed)
    perms, _, rec = decompose(cfg=cfg, fresh=n)
    _, base = baseline_decompose(perms, seed=seed)
    return {
        "n": n, "k": plan.k, "seed": seed, "M": rec.M,
        "bottleneck": max(rec.bottleneck), "label_count": rec.label_count,
        "max_label_degree": rec.max_label_degree, "ell": rec.part_count,
        "ell_baseline": base.part_count, "normalized_ratio": pipeline_stats(rec).ratio,
        "wall_ms": round(rec.wall_time_ms, 3) if plan.timing else 0,
    }


def _run_one(args):
    return run_trial(*args)


def run_plan(plan: ExperimentPlan, jobs: int = 1) -> list[dict]:
    tasks = [(plan, n, t) for n in plan.n_values for t in range(plan.trials_per_n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, tasks))
    else:
        rows = [_run_one(t) for t in tasks]
    # rows already follow (n, trial) order; pool.map preserves submission order
    return rows


def summarize(rows: list[dict]) -> list[dict]:
    out = []
    for n in sorted({r["n"] for r in rows}):
        sel = [r for r in rows if r["n"] == n]
        out.append({
            "n": n,
            "trials": len(sel),
            "median_ell": statistics.median(r["ell"] for r in sel),
            "median_ell_baseline": statistics.median(r["ell_baseline"] for r in sel),
            "median_normalized_ratio": statistics.median(r["normalized_ratio"] for r in sel),
        })
    return out


def to_csv(rows: list[dict], summary: list[dict] | None = None) -> str:
    """Data rows in COLUMNS order, then the per-n medians as '#'-prefixed lines."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    if summary is None:
        summary = summarize(rows)
    buf.write("# summary: n,trials,median_ell,median_ell_baseline,median_normalized_ratio\n")
    for s in summary:
        buf.write("# " + ",".join(str(s[k]) for k in
                                  ("n", "trials", "median_ell", "median_ell_baseline",
                                   "median_normalized_ratio")) + "\n")
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = []
    for r in csv.DictReader(lines):
        rows.append({k: (float(v) if k in ("bottleneck", "normalized_ratio", "wall_ms") else int(v))
                     for k, v in r.items()})
    return rows

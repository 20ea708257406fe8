import math
from dataclasses import replace
from itertools import permutations

import numpy as np
import pytest

from permsim.coloring import edge_color, max_degree
from permsim.core import Permutation, verify_decomposition
from permsim.geometry import SamplerConfig, sample_cloud
from permsim.gridgraph import GridConfig, build_multigraph, group_by_label
from permsim.matching import bottleneck_matching
from permsim.oracle import brute_lis
from permsim.pipeline import (InternalError, PipelineConfig, RunRecord, baseline_decompose,
                              decompose, patience_piles, pipeline_stats, random_permutations,
                              scaling_exponents)
from tests.conftest import random_perm


def block_perm(n, b):
    # blocks of size b, blocks in decreasing order, increasing inside
    blocks = [list(range(s + 1, min(s + b, n) + 1)) for s in range(0, n, b)]
    return Permutation(tuple(v for blk in reversed(blocks) for v in blk))


def test_length_one():
    perms, d, rec = decompose([Permutation((1,)), Permutation((1,))])
    assert len(d) == 1 and d.parts[0].index_lists == ((1,), (1,))
    assert rec.part_count == 1 and rec.label_count == 1


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_identity_against_reverse(seed):
    n = 40
    _, d, rec = decompose([Permutation.identity(n), Permutation.reverse(n)], PipelineConfig(seed=seed))
    assert len(d) == n == rec.part_count


def test_exhaustive_small_pairs():
    for n in range(1, 6):
        all_p = [Permutation(p) for p in permutations(range(1, n + 1))]
        for a in all_p:
            for b in all_p:
                _, d, _ = decompose([a, b])
                assert verify_decomposition([a, b], d)


def test_random_pairs_up_to_eight():
    rng = np.random.default_rng(4)
    for n in (6, 7, 8):
        for t in range(150):
            a, b = random_perm(rng, n), random_perm(rng, n)
            _, d, _ = decompose([a, b], PipelineConfig(seed=t))
            assert verify_decomposition([a, b], d)
            d2, _ = baseline_decompose([a, b])
            assert verify_decomposition([a, b], d2)


def test_adversarial_inputs_stay_valid():
    n = 300
    cases = [
        [Permutation.identity(n), Permutation.reverse(n)],
        [block_perm(n, 17), Permutation.identity(n)],
        [block_perm(n, 5), block_perm(n, 60)],
        [Permutation.reverse(n), Permutation.reverse(n)],
    ]
    for perms in cases:
        _, d, _ = decompose(perms)
        assert verify_decomposition(perms, d)
        d2, _ = baseline_decompose(perms)
        assert verify_decomposition(perms, d2)


@pytest.mark.parametrize("n", [500, 3000])
def test_part_count_is_sum_of_label_colors(n):
    cfg = PipelineConfig(seed=n)
    perms, d, rec = decompose(cfg=cfg, fresh=n)
    # recompute independently from the sampled clouds
    sampler = replace(cfg.sampler, seed=cfg.seed)
    clouds = [sample_cloud(n, sampler, j) for j in range(2)]
    g = build_multigraph(clouds, [bottleneck_matching(clouds[0], clouds[1])], GridConfig.default(n))
    groups = group_by_label(g)
    total = sum(edge_color(s.edge_list()).num_colors for s in groups.values())
    assert rec.part_count == len(d) == total
    assert rec.label_count == len(groups)
    assert rec.max_label_degree == max(max_degree(s.edge_list()) for s in groups.values())
    assert rec.part_count <= rec.label_count * rec.max_label_degree


@pytest.mark.parametrize("k", [3, 4])
def test_more_than_two_permutations(k):
    perms, d, rec = decompose(cfg=PipelineConfig(k=k, seed=2), fresh=400)
    assert len(perms) == k and verify_decomposition(perms, d)
    assert len(rec.bottleneck) == k - 1 and rec.k == k
    given = random_permutations(50, k, PipelineConfig(k=k, seed=9))
    _, d, _ = decompose(given, PipelineConfig(k=k))
    assert verify_decomposition(given, d)


def test_deterministic_given_seed():
    cfg = PipelineConfig(seed=123)
    a = decompose(cfg=cfg, fresh=800)
    b = decompose(cfg=cfg, fresh=800)
    assert a[0] == b[0] and a[1] == b[1]
    c = decompose(cfg=PipelineConfig(seed=124), fresh=800)
    assert c[0] != a[0]


def test_options_keep_validity():
    perms = random_permutations(600, 2, PipelineConfig(seed=3))
    for cfg in [PipelineConfig(metric="chebyshev"), PipelineConfig(matching_mode="threshold-doubling"),
                PipelineConfig(M_override=1), PipelineConfig(M_override=600),
                PipelineConfig(sampler=SamplerConfig(mode="poisson"))]:
        _, d, rec = decompose(perms, cfg)
        assert verify_decomposition(perms, d)
    _, d, rec = decompose(perms, PipelineConfig(M_override=1))
    assert rec.M == 1 and rec.label_count == 1
    fresh_perms, d, _ = decompose(cfg=PipelineConfig(sampler=SamplerConfig(mode="poisson", rate_multiplier=3.0)),
                                  fresh=600)
    assert verify_decomposition(fresh_perms, d)


def test_config_and_input_errors():
    with pytest.raises(ValueError):
        PipelineConfig(k=1)
    with pytest.raises(ValueError):
        PipelineConfig(M_override=0)
    with pytest.raises(ValueError):
        decompose(cfg=PipelineConfig(), fresh=1)
    with pytest.raises(ValueError):
        decompose([Permutation.identity(3), Permutation.identity(4)])
    with pytest.raises(ValueError):
        decompose([Permutation.identity(3)] * 3)


def test_run_record_json():
    _, d, rec = decompose(cfg=PipelineConfig(seed=5), fresh=100)
    js = rec.to_json()
    assert set(js) >= {"n", "k", "M", "bottleneck", "label_count", "max_label_degree",
                       "part_count", "wall_time_ms", "seed"}
    assert js["part_count"] == len(d) and js["seed"] == 5 and rec.label_count >= 1


def test_patience_piles_example():
    piles = patience_piles(Permutation((1, 4, 3, 5, 2)))
    values = [[(1, 4, 3, 5, 2)[i - 1] for i in pile] for pile in piles]
    assert values == [[1], [4, 3, 2], [5]]
    assert brute_lis(Permutation((1, 4, 3, 5, 2))) == 3


def test_pile_count_equals_lis():
    for n in range(1, 7):
        for p in permutations(range(1, n + 1)):
            p = Permutation(p)
            assert len(patience_piles(p)) == brute_lis(p)
    rng = np.random.default_rng(8)
    for n in (7, 8):
        for _ in range(300):
            p = random_perm(rng, n)
            assert len(patience_piles(p)) == brute_lis(p)
            rev = Permutation(tuple(n + 1 - v for v in p.values))
            assert len(patience_piles(p, decreasing=False)) == brute_lis(rev)


def test_baseline_identity_and_equal_inputs():
    n = 30
    d, rec = baseline_decompose([Permutation.identity(n)] * 2)
    assert len(d) == n and rec.method == "baseline"
    d, _ = baseline_decompose([Permutation.identity(n)] * 2, increasing=True)
    assert len(d) == 1
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = random_perm(rng, 12)
        for k in (2, 3):
            d, _ = baseline_decompose([p] * k)
            assert len(d) == brute_lis(p)


def test_baseline_part_bound():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n = int(rng.integers(1, 200))
        k = int(rng.integers(2, 4))
        perms = [random_perm(rng, n) for _ in range(k)]
        d, rec = baseline_decompose(perms)
        piles = [len(patience_piles(p)) for p in perms]
        assert len(d) <= k * max(piles)
        assert len(d) <= sum(piles)
        assert rec.max_label_degree == max(piles)


def test_scaling_exponents():
    a, b = scaling_exponents(2)
    assert a == pytest.approx(1 / 3) and b == pytest.approx(11 / 6)
    a, b = scaling_exponents(3)
    assert a == pytest.approx(2 / 5) and b == pytest.approx(3 + 1 / 5)


def test_pipeline_stats():
    rec = RunRecord(n=4096, k=2, M=1, bottleneck=[0.1], label_count=1, max_label_degree=1,
                    part_count=300, wall_time_ms=0.0, seed=0)
    s = pipeline_stats(rec)
    assert s.ratio == pytest.approx(300 / (4096 ** (1 / 3) * math.log(4096) ** (11 / 6)))
    assert pipeline_stats(rec) == s
    with pytest.raises(ValueError):
        pipeline_stats(RunRecord(1, 2, 1, [], 1, 1, 1, 0.0, 0))


def test_internal_error_type():
    assert issubclass(InternalError, RuntimeError)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sboxlab.boolfn import InvalidInput, SBoxTable, random_bijection
from sboxlab.fixtures import fixture
from sboxlab.metrics import full_report
from sboxlab.oracle import brute_bijectivity
from sboxlab.search import (
    MaskCandidate,
    PipelineTally,
    PreconditionError,
    SearchConfig,
    UnsupportedSize,
    assemble,
    baseline_of,
    build_component_set,
    enumerate_all,
    filter_pipeline,
    full_rank_batch,
    genetic_search,
    group_count,
    is_bijective,
    order_candidates,
    ordering_refinement,
    random_sample,
    random_subsets,
)


@pytest.fixture(scope="module")
def table7():
    return fixture("paper-4x4-initial")


@pytest.fixture(scope="module")
def g7(table7):
    return build_component_set(table7)


def test_group_count_formula():
    assert [group_count(n) for n in (1, 2, 3, 4, 5)] == [1, 3, 28, 840, 83328]


def test_rank_test_matches_permutation_check(g7):
    # every 4x4 candidate: mask rank <=> assembled box is a permutation
    for masks in itertools.combinations(range(16), 4):
        cand = MaskCandidate(masks)
        assert is_bijective(cand) == brute_bijectivity(assemble(cand, g7))


def test_full_rank_batch_agrees_with_scalar():
    C = np.array(list(itertools.combinations(range(32), 5))[::97], dtype=np.int64)
    fast = full_rank_batch(C)
    assert fast.tolist() == [is_bijective(MaskCandidate(tuple(r))) for r in C.tolist()]


def test_assemble_coordinates(g7, table7):
    cand = MaskCandidate((1, 2, 4, 8))
    assert assemble(cand, g7) == table7
    swapped = assemble(MaskCandidate((2, 1, 4, 8)), g7)
    assert all(((swapped[x] >> 1) & 1) == (table7[x] & 1) for x in range(16))


def test_candidate_validation(g7):
    with pytest.raises(InvalidInput):
        MaskCandidate((1, 1, 2, 4))
    with pytest.raises(InvalidInput):
        assemble(MaskCandidate((1, 2, 4)), g7)
    with pytest.raises(InvalidInput):
        assemble(MaskCandidate((1, 2, 4, 16)), g7)


def test_precondition_non_bijective():
    with pytest.raises(PreconditionError):
        build_component_set(SBoxTable.from_list([0, 0, 1, 2]))


def test_exhaustive_size_limit():
    with pytest.raises(UnsupportedSize):
        enumerate_all(random_bijection(6, np.random.default_rng(0)))


def test_config_validation():
    with pytest.raises(InvalidInput):
        SearchConfig(mode="annealing")
    with pytest.raises(InvalidInput):
        SearchConfig(thresholds=("snr",))
    with pytest.raises(InvalidInput):
        SearchConfig(to_direction="lt")
    assert "TO <= initial TO" in SearchConfig().describe_acceptance()


def test_filter_pipeline_stops_at_rank(g7, table7):
    v = filter_pipeline(MaskCandidate((1, 2, 3, 4)), g7, full_report(table7), SearchConfig())
    assert not v.accepted and v.stages == {"bijective": False}
    v = filter_pipeline(MaskCandidate((1, 2, 4, 8)), g7, full_report(table7), SearchConfig())
    # the initial box itself is not worse than itself
    assert v.accepted and v.stages["to_ok"] and not v.stages["to"]


def test_ordering_policies(g7):
    C = np.array([[8, 3, 5, 1]])
    assert order_candidates(C, g7, "canonical").tolist() == [[1, 3, 5, 8]]
    assert order_candidates(C, g7, "descending").tolist() == [[8, 5, 3, 1]]
    best = ordering_refinement(MaskCandidate((8, 3, 5, 1)), g7, "best-of-orderings")
    assert sorted(best.masks) == [1, 3, 5, 8]
    with pytest.raises(InvalidInput):
        order_candidates(C, g7, "random")


def test_tally_addition_and_rows():
    a = PipelineTally(total=3, bijective=2, all_better=1)
    a += PipelineTally(total=1, bijective=1)
    assert (a.total, a.bijective, a.all_better) == (4, 3, 1)
    assert list(a.as_table_rows())[:2] == ["#T_total", "#T_bij"]


@pytest.mark.parametrize("n", [3, 4])
def test_exhaustive_bijective_count(n):
    t = enumerate_all(random_bijection(n, np.random.default_rng(n)), SearchConfig(report_accepted=False)).tally
    assert t.total == math.comb(1 << n, n)
    assert t.bijective == group_count(n)


def test_exhaustive_tally_invariants(table7):
    r = enumerate_all(table7, SearchConfig(ordering_policy="descending"))
    t = r.tally
    assert t.total >= t.bijective >= max(t.fp_zero, t.ofp_zero, t.to_better, t.snr_better, t.cc_better)
    assert t.all_better <= min(t.bijective, t.fp_zero, t.ofp_zero, t.to_not_worse)
    assert t.to_better <= t.to_not_worse
    assert len(r.accepted) == t.all_better
    base = baseline_of(table7, r.config)
    for cand, box, rep in r.accepted:
        assert box.is_permutation()
        assert rep.fp == rep.ofp == 0
        assert rep.to <= base.to + 1e-9


def test_exhaustive_worker_invariance(table7):
    one = enumerate_all(table7, SearchConfig(report_accepted=False, chunk_size=300))
    two = enumerate_all(table7, SearchConfig(report_accepted=False, chunk_size=300, workers=2))
    assert one.summary() == two.summary()


def test_to_direction_flip(table7):
    le = enumerate_all(table7, SearchConfig(report_accepted=False)).tally
    ge = enumerate_all(table7, SearchConfig(report_accepted=False, to_direction="ge")).tally
    # strictly better in one direction is strictly worse in the other
    assert le.to_better + ge.to_better <= le.bijective
    assert le.to_not_worse + ge.to_not_worse >= le.bijective


@given(st.integers(0, 2**32 - 1), st.integers(3, 7))
def test_random_subsets_are_sorted_distinct(seed, n):
    C = random_subsets(n, 50, np.random.default_rng(seed))
    assert C.shape == (50, n)
    assert np.all(np.diff(C, axis=1) > 0)
    assert C.min() >= 0 and C.max() < 1 << n


def test_random_sample_deterministic_and_proportional():
    S = fixture("paper-6x6-initial")
    cfg = SearchConfig(mode="random-sample", seed=5, max_candidates=4000, report_accepted=False)
    a, b = random_sample(S, cfg), random_sample(S, cfg)
    assert a.summary() == b.summary()
    big = random_sample(S, SearchConfig(mode="random-sample", seed=6, max_candidates=16000, report_accepted=False))
    ratio_small = a.tally.bijective / a.tally.total
    ratio_big = big.tally.bijective / big.tally.total
    # both near the probability that n random masks are independent
    assert abs(ratio_small - ratio_big) < 0.05


def test_genetic_deterministic(table7):
    cfg = SearchConfig(mode="genetic", seed=11, generations=10, population_size=16, report_accepted=False)
    assert genetic_search(table7, cfg).summary() == genetic_search(table7, cfg).summary()


def test_genetic_accepts_only_valid(table7):
    r = genetic_search(table7, SearchConfig(mode="genetic", seed=3, generations=15, ordering_policy="descending"))
    assert r.generations_run == 15
    for _, box, rep in r.accepted:
        assert box.is_permutation() and rep.fp == 0 and rep.ofp == 0

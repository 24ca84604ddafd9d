from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sboxlab.boolfn import BinaryMatrix, InvalidInput, SBoxTable, apply_mix, invert, random_bijection, random_invertible_matrix
from sboxlab.fixtures import PAPER_COLUMNS, fixture
from sboxlab.metrics import (
    CC_MODELS,
    ROW_ORDER,
    absolute_indicator,
    algebraic_degree,
    algebraic_immunity,
    boolean_algebraic_immunity,
    cc_statistics,
    confusion_coefficients,
    correlation_immunity,
    differential_uniformity,
    fixed_points,
    full_report,
    is_balanced,
    nonlinearity,
    opposite_fixed_points,
    preimage_algebraic_immunity,
    robustness,
    snr_dpa,
    sum_of_squares,
    transparency_order,
)

seeds = st.integers(0, 2**32 - 1)


def identity(n):
    return SBoxTable.from_list(list(range(1 << n)))


def test_table7_box_golden_column():
    r = full_report(fixture("paper-4x4-initial"))
    assert (r.nl, r.degree, r.ci, r.du, r.abs_indicator, r.sum_sq, r.ai, r.fp, r.ofp) == (4, 3, 0, 4, 8, 640, 2, 0, 0)
    assert r.robustness == Fraction(3, 4)
    assert r.balanced
    assert r.snr == pytest.approx(1.612, abs=1e-3)
    assert r.to == pytest.approx(3.533, abs=1e-3)
    assert r.cc == pytest.approx(1.357, abs=1e-3)


def test_identity_box_values():
    S = identity(4)
    assert nonlinearity(S) == 0
    assert differential_uniformity(S) == 16
    assert algebraic_degree(S) == 1
    assert fixed_points(S) == 16
    assert opposite_fixed_points(S) == 0
    assert algebraic_immunity(S) == 1


@pytest.mark.parametrize("n,expected", [(3, 12 / 7), (4, 8 / 3), (5, 100 / 31)])
def test_identity_transparency_order(n, expected):
    # values derived with the naive oracle
    assert transparency_order(identity(n)) == pytest.approx(expected, rel=1e-12)


def test_known_ciphers():
    aes = fixture("aes")
    assert nonlinearity(aes) == 112
    assert differential_uniformity(aes) == 4
    assert algebraic_degree(aes) == 7
    assert absolute_indicator(aes) == 32
    assert sum_of_squares(aes) == 133120
    present = fixture("present")
    assert (nonlinearity(present), differential_uniformity(present)) == (4, 4)


def test_complement_map_has_all_opposite_points():
    S = SBoxTable.from_list([15 - x for x in range(16)])
    assert opposite_fixed_points(S) == 16
    assert fixed_points(S) == 0


def test_square_only_metrics_reject_rectangular():
    S = SBoxTable.from_list([0, 1, 2, 3, 4, 5, 6, 7], m=4)
    for fn in (fixed_points, opposite_fixed_points, cc_statistics):
        with pytest.raises(InvalidInput):
            fn(S)


def test_unknown_options_raise():
    S = identity(3)
    with pytest.raises(InvalidInput):
        snr_dpa(S, "bogus")
    with pytest.raises(InvalidInput):
        cc_statistics(S, "bogus")
    with pytest.raises(InvalidInput):
        full_report(S, cc_statistic="median")


def test_robustness_is_exact_rational(rng):
    S = random_bijection(5, rng)
    r = robustness(S)
    assert isinstance(r, Fraction)
    assert 0 <= r < 1
    # bijections never hit the zero column, so only the DDT maximum matters
    assert r == 1 - Fraction(differential_uniformity(S), 32)


def test_correlation_immunity_of_linear_box():
    # every component of a linear box is a nonzero linear function, so CI is 0
    assert correlation_immunity(identity(4)) == 0
    assert is_balanced(identity(4))


def test_boolean_ai_bounds(rng):
    for n in range(1, 8):
        bits = rng.integers(0, 2, 1 << n)
        ai = boolean_algebraic_immunity(bits)
        assert 0 <= ai <= (n + 1) // 2
    assert boolean_algebraic_immunity(np.zeros(8, dtype=int)) == 0


def test_preimage_ai_of_bijection_is_one(rng):
    assert preimage_algebraic_immunity(random_bijection(4, rng)) == 1


@given(seeds, st.sampled_from(CC_MODELS))
def test_confusion_grid_properties(seed, model):
    S = random_bijection(4, np.random.default_rng(seed))
    K = confusion_coefficients(S, model)
    assert np.all(np.diag(K) == 0)
    assert np.array_equal(K, K.T)
    assert np.all(K >= 0)
    bound = {"sqhw": 16, "sqhw-norm": 4, "bit": 1}[model]
    assert np.all(K <= bound)


@given(seeds)
def test_cc_statistics_ordered(seed):
    S = random_bijection(5, np.random.default_rng(seed))
    c = cc_statistics(S)
    assert c["min"] <= c["mean"] <= c["max"]
    assert c["var"] >= 0


@given(seeds)
def test_inverse_preserves_linear_properties(seed):
    S = random_bijection(5, np.random.default_rng(seed))
    Si = invert(S)
    assert nonlinearity(S) == nonlinearity(Si)
    assert differential_uniformity(S) == differential_uniformity(Si)


@given(seeds, st.integers(3, 6))
def test_mix_invariance(seed, n):
    rng = np.random.default_rng(seed)
    S = random_bijection(n, rng)
    T = apply_mix(S, random_invertible_matrix(n, rng))
    a, b = full_report(S), full_report(T)
    for f in ("nl", "degree", "ci", "du", "robustness", "abs_indicator", "sum_sq", "ai"):
        assert getattr(a, f) == getattr(b, f), f


@given(seeds, st.integers(3, 6))
def test_permutation_mix_keeps_side_channel_metrics(seed, n):
    rng = np.random.default_rng(seed)
    S = random_bijection(n, rng)
    perm = rng.permutation(n)
    T = apply_mix(S, BinaryMatrix(tuple(1 << int(p) for p in perm), n))
    for fn in (snr_dpa, transparency_order):
        assert fn(T) == pytest.approx(fn(S), rel=1e-9)
    assert cc_statistics(T)["var"] == pytest.approx(cc_statistics(S)["var"], rel=1e-9)


def test_report_dict_round_trip():
    r = full_report(fixture("paper-5x5-initial"))
    d = r.to_dict()
    assert d["robustness"] == str(r.robustness)
    assert d["cc"] == r.cc_var
    assert {f for _, f in ROW_ORDER} <= set(d)


@pytest.mark.parametrize("name", ["paper-6x6-proposed", "paper-7x7-initial"])
def test_real_rows_of_larger_fixtures(name):
    r = full_report(fixture(name))
    want = PAPER_COLUMNS[name]
    assert r.snr == pytest.approx(want["snr"], abs=1e-3)
    assert r.to == pytest.approx(want["to"], abs=1e-3)

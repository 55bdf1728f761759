import csv
import io
import math
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from mcrel import codes, estimate, gf
from mcrel.estimate import ParamSet

from oracles import enumerate_alternating_ranks, enumerate_symmetric_ranks, is_irreducible_trial

CATEGORY_COSTS = {  # category: (d_reg, key attack, dense, sparse)
    1: (84, 3238, 3141, 2231),
    2: (212, 9334, 7931, 5643),
    3: (229, 7286, 9030, 6425),
    4: (169, 6537, 6779, 4822),
    5: (154, 1657, 6329, 4501),
}


@pytest.mark.parametrize("t,q", [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3)])
def test_sym_counts_match_enumeration(t, q):
    assert [estimate.count_sym_rank(t, k, q) for k in range(t + 1)] == enumerate_symmetric_ranks(t, q)


@pytest.mark.parametrize("t,q", [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)])
def test_skew_counts_match_enumeration(t, q):
    assert [estimate.count_skew_rank(t, k, q) for k in range(t + 1)] == enumerate_alternating_ranks(t, q)


def test_skew_count_examples():
    assert estimate.count_skew_rank(3, 2, 2) == 7
    assert all(estimate.count_skew_rank(6, k, 5) == 0 for k in (1, 3, 5))
    assert estimate.count_sym_rank(3, 4, 2) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.sampled_from([2, 3, 4, 5, 7, 8, 9]))
def test_count_sums(t, q):
    assert sum(estimate.count_sym_rank(t, k, q) for k in range(t + 1)) == q ** comb(t + 1, 2)
    assert sum(estimate.count_skew_rank(t, k, q) for k in range(t + 1)) == q ** comb(t, 2)


def test_e_values():
    assert estimate.e_alternant(4, 4) == 0
    assert estimate.e_alternant(4, 5) == 1
    assert estimate.e_alternant(2, 3) == 1
    assert all(estimate.e_alternant(q, 3) == 0 for q in (4, 5, 7, 8))
    with pytest.raises(ValueError):
        estimate.e_alternant(4, 1)


@pytest.mark.parametrize("q,m,r,kind,threshold", [
    (4, 4, 4, "alternant", 124),
    (4, 4, 4, "goppa", 96),
    (7, 2, 4, "alternant", 30),
    (8, 2, 4, "alternant", 30),
    (8, 2, 4, "goppa", 30),
])
def test_square_thresholds(q, m, r, kind, threshold):
    test = estimate.square_dist_alternant if kind == "alternant" else estimate.square_dist_goppa
    assert test(ParamSet(threshold + 1, q, m, r))[0]
    assert not test(ParamSet(threshold, q, m, r))[0]
    assert estimate.mt22_sq_dual_bound(ParamSet(threshold, q, m, r), kind) == threshold


def test_goppa_small_r_branch():
    assert estimate.square_dist_goppa(ParamSet(40, 8, 2, 4))[1] == 0
    assert estimate.square_dist_goppa(ParamSet(100, 2, 7, 2)) == (True, estimate.e_goppa(2, 2))
    with pytest.raises(ValueError):
        estimate.square_dist_goppa(ParamSet(20, 8, 2, 1))


def test_mt22_clamps_to_n():
    p = ParamSet(60, 2, 6, 3)
    assert estimate.alternant_sq_dual_dim(p) > 60
    assert estimate.mt22_sq_dual_bound(p) == 60
    with pytest.raises(ValueError):
        estimate.mt22_sq_dual_bound(p, "other")


@pytest.mark.parametrize("kind,p,a,m,r,n", [
    ("alternant", 2, 2, 4, 4, 100), ("goppa", 2, 2, 4, 4, 100), ("goppa", 2, 1, 6, 3, 60),
    ("alternant", 7, 1, 2, 4, 45), ("goppa", 2, 3, 2, 4, 60), ("alternant", 3, 1, 3, 3, 25),
])
def test_mt22_bound_dominates_measured(kind, p, a, m, r, n):
    ctx = gf.make_field(p, a, m)
    for seed in range(2):
        key = codes.random_instance(ctx, kind, n, r, seed=seed)
        measured = codes.schur_square_dim(key.extended_dual())
        assert measured <= estimate.mt22_sq_dual_bound(ParamSet(n, p ** a, m, r), kind)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7, 8]), st.integers(2, 5), st.integers(2, 12), st.integers(0, 10 ** 6))
def test_square_dist_monotone_in_n(q, m, r, salt):
    lo = r * m + 1
    hi = q ** m
    if lo >= hi:
        return
    n = lo + salt % (hi - lo)
    for test in (estimate.square_dist_alternant, estimate.square_dist_goppa):
        if test(ParamSet(n, q, m, r))[0]:
            assert test(ParamSet(n + 1, q, m, r))[0]


def test_gv_thresholds():
    p = ParamSet(40, 2, 6, 3)  # rm = 18
    assert estimate.gv_rank_threshold(ParamSet(51, 2, 6, 3), 3) and not estimate.gv_rank_threshold(
        ParamSet(52, 2, 6, 3), 3)
    assert estimate.gv_rank_threshold(ParamSet(51, 2, 6, 3), 2, skew=True)
    assert not estimate.gv_rank_threshold(ParamSet(52, 2, 6, 3), 2, skew=True)
    assert estimate.gv_rank_threshold(p, 2) is (40 <= 2 * 18 - 1)
    for cat, (n, q, m, r) in estimate.CLASSIC_MCELIECE.items():
        assert not estimate.gv_rank_threshold(ParamSet(n, q, m, r), 2, skew=True)
        assert not estimate.gv_rank_threshold(ParamSet(n, q, m, r), 3)
    with pytest.raises(ValueError):
        estimate.gv_rank_threshold(ParamSet(5, 2, 2, 1), 2)


@pytest.mark.parametrize("p,e,r", [(2, 1, 4), (2, 2, 3), (3, 1, 3), (2, 1, 6), (5, 1, 2)])
def test_irreducible_count_by_trial_division(p, e, r):
    if e == 1:
        got = 0
        for c in range(p ** r):
            f = [(c // p ** i) % p for i in range(r)] + [1]
            got += is_irreducible_trial(f, p)
    else:
        ctx = gf.make_field(p, e, 1)
        got = 0
        for c in range(ctx.order ** r):
            f = [(c // ctx.order ** i) % ctx.order for i in range(r)] + [1]
            got += gf.is_irreducible(gf.Poly(ctx, f))
    assert estimate.irreducible_count(p ** e, r) == got


def test_log2_int():
    for x in (1, 2, 3, 1000, 2 ** 70 + 5, 3 ** 500):
        assert estimate.log2_int(x) == pytest.approx(math.log2(x), abs=1e-9)
    with pytest.raises(ValueError):
        estimate.log2_int(0)


def test_keyattack_r1_collapses():
    p = ParamSet(30, 2, 6, 1)
    assert estimate.keyattack_log2(p) == pytest.approx(math.log2(comb(64, 30) * 64))


@pytest.mark.parametrize("cat", sorted(CATEGORY_COSTS))
def test_category_row_values(cat):
    d, key, dense, sparse = CATEGORY_COSTS[cat]
    row = estimate.category_row(cat)
    assert row["d_reg"] == d
    assert abs(row["keyattack_log2"] - key) <= 1
    assert abs(row["sparse_log2"] - sparse) <= 2
    assert abs(row["dense_log2"] - dense) <= 8


def test_category_key_parts():
    support, polys = estimate.keyattack_parts_log2(ParamSet(*estimate.CLASSIC_MCELIECE[1]))
    assert round(support) == 2476 and round(polys) == 762
    assert estimate.keyattack_parts_log2(ParamSet(*estimate.CLASSIC_MCELIECE[5]))[0] == 0


def test_omega_calibration():
    w = estimate.calibrate_omega()
    assert w == pytest.approx(math.log2(7), abs=0.01)
    with pytest.raises(ValueError):
        estimate.dist_cost_log2(ParamSet(*estimate.CLASSIC_MCELIECE[1]), mode="other")


def test_sublinear_trend():
    rows = [estimate.sublinear_exponents(n, 0.75) for n in (2 ** 10, 2 ** 14, 2 ** 18, 2 ** 22)]
    ratios = [r["distinguisher"] / r["key"] for r in rows]
    assert ratios == sorted(ratios, reverse=True)
    assert all(r["key"] == r["rm"] == math.ceil(r["n"] ** 0.75) for r in rows)
    near_one = estimate.sublinear_exponents(2 ** 16, 0.999)
    assert near_one["message"] == pytest.approx(0.001 * near_one["rm"])
    with pytest.raises(ValueError):
        estimate.sublinear_exponents(100, 1.0)


def test_sublinear_csv_header():
    text = estimate.sublinear_csv([1024], [0.5, 0.75])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["n", "alpha", "rm", "key", "message", "distinguisher"]
    assert len(rows) == 2


def test_r_sweep_domain():
    rows = estimate.r_sweep_rows(8, range(1, 40))
    assert rows and all(comb(r["r"] * 8, 2) >= r["n"] - 8 * r["r"] for r in rows)
    assert all(r["n"] - 8 * r["r"] >= 2 * 8 * r["r"] - 3 for r in rows)
    d = [r["d_reg"] for r in rows]
    assert d == sorted(d)
    fixed = estimate.r_sweep_rows(10, range(2, 30), rate=0.8)
    assert all(r["n"] == round(r["r"] * 10 / 0.2) for r in fixed)


def test_paramset_validation():
    with pytest.raises(ValueError):
        ParamSet(65, 2, 6, 3)
    with pytest.raises(ValueError):
        ParamSet(18, 2, 6, 3)
    p = ParamSet(64, 2, 6, 3)
    assert p.full_support and p.k == 46 and p.s == 18

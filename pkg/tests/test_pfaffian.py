from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcrel import codes, gf, kernels, pfaffian, qrel
from mcrel.errors import BudgetExceeded

F2 = gf.make_field(2, 1, 1)


def _wedge(ctx, u, v):
    M = ctx.add(ctx.mul(u[:, None], v[None, :]), ctx.mul(v[:, None], u[None, :]))
    np.fill_diagonal(M, 0)
    return M


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 9), st.integers(0, 2**32 - 1))
def test_quadrics_vanish_exactly_on_rank_two(s, seed):
    ctx = gf.make_field(2, 4, 1)
    rng = np.random.default_rng(seed)
    u, v = ctx.random(rng, (2, s))
    quads = pfaffian.pfaffian_quadrics(s)
    assert len(quads) == comb(s, 4)
    assert np.all(pfaffian.evaluate_quadrics(ctx, quads, _wedge(ctx, u, v)) == 0)
    M = ctx.add(_wedge(ctx, u, v), _wedge(ctx, *ctx.random(rng, (2, s))))
    from mcrel import linalg
    if linalg.rank(ctx, M) == 4:
        assert np.any(pfaffian.evaluate_quadrics(ctx, quads, M) != 0)


def test_hypersurface_oracle():
    # s = 4: a single quadric in 6 variables
    sysm = pfaffian.pure_system(F2, 4)
    for d in range(5):
        want = comb(d + 5, 5) - (comb(d + 3, 5) if d >= 2 else 0)
        assert pfaffian.macaulay_hf(sysm, d, method="full") == want


@pytest.mark.parametrize("s", [4, 5, 6])
def test_routes_agree_with_formula(s):
    sysm = pfaffian.pure_system(F2, s)
    for d in (1, 2, 3):
        full = pfaffian.macaulay_hf(sysm, d, method="full")
        red = pfaffian.macaulay_hf(sysm, d, method="reduced")
        assert full == red == pfaffian.narayana_hf(s, d)


def test_routes_agree_on_code_systems():
    ctx = gf.make_field(2, 2, 2)
    for kind, n in (("alternant", 14), ("random", 14), ("goppa", 15)):
        key = codes.random_instance(ctx, kind, n, 3, seed=2)
        sysm = pfaffian.build_system(key, seed=0)
        for d in (1, 2, 3):
            assert (pfaffian.macaulay_hf(sysm, d, method="full")
                    == pfaffian.macaulay_hf(sysm, d, method="reduced"))


def test_backends_agree_on_macaulay():
    sysm = pfaffian.pure_system(F2, 6)
    vals = {b: pfaffian.macaulay_hf(sysm, 3, backend=b) for b in ("python", kernels.BACKEND)}
    assert len(set(vals.values())) == 1


def test_narayana_small_values():
    assert [pfaffian.narayana_hf(s, 1) for s in range(4, 9)] == [comb(s, 2) for s in range(4, 9)]
    assert pfaffian.narayana_hf(5, 0) == 1
    assert pfaffian.narayana_hf(3, 2) == 6


def test_random_prediction_values():
    # q = 4, m = 4, r = 4: k = n - 16
    assert pfaffian.hf_random_prediction(16, 77 - 16, 2) == 0
    assert pfaffian.hf_random_prediction(16, 76 - 16, 2) == 10
    assert pfaffian.hf_random_prediction(16, 73 - 16, 2) == 196
    assert pfaffian.hf_random_prediction(18, 64 - 18, 2) == 2718


def test_dreg_domain_guard():
    with pytest.raises(ValueError):
        pfaffian.dreg_random(6, 8)
    assert pfaffian.dreg_random(6, 9) == 4
    assert pfaffian.hf_random_prediction(6, 9, 4) == 0 < pfaffian.hf_random_prediction(6, 9, 3)


def test_goppa_lower_bound_arithmetic():
    assert pfaffian.goppa_hf_lower_bound(3, 6, 2) == 36 == 6 * pfaffian.narayana_hf(3, 2)
    with pytest.raises(ValueError):
        pfaffian.goppa_hf_lower_bound(3, 6, 0)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        pfaffian.macaulay_hf(pfaffian.pure_system(F2, 8), 3, budget_mb=0.01)


def test_odd_characteristic_rejected():
    ctx = gf.make_field(3, 1, 2)
    key = codes.random_instance(ctx, "alternant", 9, 2, seed=0)
    with pytest.raises(ValueError):
        pfaffian.build_system(key)


def test_distinguish_record():
    ctx = gf.make_field(2, 2, 4)
    key = codes.random_instance(ctx, "goppa", 76, 4, seed=3)
    rec = pfaffian.distinguish(key, d=2, seed=0)
    assert rec["HF_observed"] == 80 and rec["HF_predicted"] == 10
    assert rec["verdict"] == "distinguished"


def test_system_from_matrices_linear_part():
    ctx = gf.make_field(2, 3, 2)
    key = codes.random_instance(ctx, "alternant", 40, 4, seed=4)
    mats = qrel.quad_rel_code(ctx, codes.canonical_dual_basis(key)).mat_basis
    sysm = pfaffian.system_from_matrices(ctx, mats)
    from mcrel import linalg
    assert sysm.parametrization.shape[0] == linalg.rank(ctx, qrel.skew_coordinates(mats))

import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcrel import codes, gf, linalg, qrel
from mcrel.errors import BudgetExceeded

from oracles import NaiveField


def _census_by_enumeration(p, a, m, r):
    """Rank histogram over all symmetric r x r matrices whose quadratic form
    vanishes on (1, x, ..., x^(r-1)) as a polynomial identity."""
    ctx = gf.make_field(p, a, m)
    F = NaiveField(p, ctx.modulus)
    cells = [(i, j) for i in range(r) for j in range(i, r)]
    if ctx.char2:
        cells = [(i, j) for i, j in cells if i < j]
    hist = [0] * (r + 1)
    for vals in itertools.product(range(ctx.order), repeat=len(cells)):
        M = [[0] * r for _ in range(r)]
        for (i, j), v in zip(cells, vals):
            M[i][j] = M[j][i] = v
        ok = True
        for s in range(2 * r - 1):
            if ctx.char2 and s % 2 == 0:
                continue  # the diagonal coefficient absorbs even anti-diagonals
            acc = 0
            for i in range(r):
                j = s - i
                if 0 <= j < r and (not ctx.char2 or i < j):
                    acc = F.add(acc, M[i][j])
            ok &= acc == 0
        if ok:
            hist[F.rank(M)] += 1
    return hist


@pytest.mark.parametrize("p,a,m,r", [(3, 1, 1, 4), (5, 1, 1, 3), (2, 1, 1, 4), (2, 2, 1, 3), (3, 1, 1, 3)])
def test_census_matches_enumeration(p, a, m, r):
    ctx = gf.make_field(p, a, m)
    assert qrel.rank_census_blocks(ctx, r) == _census_by_enumeration(p, a, m, r)


def test_census_frozen_extra_rows():
    assert qrel.rank_census_blocks(gf.make_field(2, 1, 1), 6) == [1, 0, 27, 0, 612, 0, 384]
    assert qrel.rank_census_blocks(gf.make_field(2, 2, 1), 3) == [1, 0, 3, 0]


def test_census_budget():
    with pytest.raises(BudgetExceeded):
        qrel.rank_census_blocks(gf.make_field(2, 3, 2), 6, limit=1000)


def test_relations_vanish():
    ctx = gf.make_field(7, 1, 2)
    rng = np.random.default_rng(0)
    V = ctx.random(rng, (6, 10))
    rel = qrel.quad_rel_code(ctx, V)
    prods = codes.schur_square_rows(ctx, V)
    assert np.all(ctx.matmul(rel.rel_basis, prods) == 0)
    assert np.all(rel.mat_basis == rel.mat_basis.transpose(0, 2, 1))


def test_char2_relation_matrices_alternate():
    ctx = gf.make_field(2, 3, 2)
    key = codes.random_instance(ctx, "alternant", 40, 4, seed=1)
    rel = qrel.quad_rel_code(ctx, codes.canonical_dual_basis(key))
    assert rel.char2
    assert np.all(np.diagonal(rel.mat_basis, axis1=1, axis2=2) == 0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 3, 1), (3, 1, 2), (2, 2, 2), (5, 1, 1)]), st.integers(2, 7),
       st.integers(0, 2**32 - 1))
def test_dimension_identity(params, k, seed):
    ctx = gf.make_field(*params)
    rng = np.random.default_rng(seed)
    n = int(rng.integers(k + 1, 3 * k + 4))
    C = codes.LinearCode(ctx, ctx.random(rng, (k, n)))
    k = C.k
    if k == 0:
        return
    V = ctx.matmul(ctx.random(rng, (k, k)), C.gen)
    if linalg.rank(ctx, V) < k:
        return
    rel = qrel.quad_rel_code(ctx, V)
    assert rel.rel_basis.shape[0] == comb(k + 1, 2) - codes.schur_square_dim(C)


@pytest.mark.parametrize("p,a,m", [(3, 1, 2), (2, 3, 1)])
def test_congruence_invariance(p, a, m):
    ctx = gf.make_field(p, a, m)
    rng = np.random.default_rng(2)
    B = ctx.random(rng, (5, 9))
    P = ctx.random(rng, (5, 5))
    while linalg.rank(ctx, P) < 5:
        P = ctx.random(rng, (5, 5))
    Cb = qrel.quad_rel_code(ctx, B).mat_basis
    Cpb = qrel.quad_rel_code(ctx, ctx.matmul(P, B)).mat_basis
    assert qrel.same_span(ctx, qrel.congruence_transport(ctx, Cpb, P), Cb)
    with pytest.raises(ValueError):
        qrel.congruence_transport(ctx, Cb, np.zeros((5, 5), dtype=np.int64))


def test_annihilator_forms():
    ctx = gf.make_field(2, 3, 2)
    key = codes.random_instance(ctx, "goppa", 40, 4, seed=3)
    B = codes.frobenius_closed_basis(key.extended_dual(), 4, seed=0)
    mats = qrel.quad_rel_code(ctx, B).mat_basis
    L = qrel.annihilator_forms(ctx, mats)
    X = qrel.skew_coordinates(mats)
    assert np.all(ctx.matmul(L, X.T) == 0)
    assert L.shape[0] + linalg.rank(ctx, X) == comb(8, 2)
    assert np.array_equal(qrel.annihilator_forms(ctx, np.zeros((0, 4, 4), dtype=np.int64)), np.eye(6, dtype=np.int64))


def test_canonical_matrix_code_is_block_diagonal():
    ctx = gf.make_field(2, 3, 2)
    key = codes.random_instance(ctx, "alternant", 40, 4, seed=4)
    mats = qrel.quad_rel_code(ctx, codes.canonical_dual_basis(key)).mat_basis
    mask = np.kron(np.eye(2, dtype=np.int64), np.ones((4, 4), dtype=np.int64)) == 0
    assert np.all(mats[:, mask] == 0)


@pytest.mark.parametrize("kind,p,a,m,r,n,sq,want", [
    ("goppa", 2, 1, 6, 3, 50, True, 2),
    ("goppa", 2, 1, 5, 4, 30, True, 3),
    ("alternant", 2, 3, 2, 3, 40, False, 1),
    ("alternant", 2, 3, 2, 5, 50, False, 2),
])
def test_low_rank_space_dim(kind, p, a, m, r, n, sq, want):
    ctx = gf.make_field(p, a, m)
    key = codes.random_instance(ctx, kind, n, r, seed=5, squarefree_only=sq)
    assert qrel.low_rank_space_dim(key) == want
    for M in qrel.low_rank_generators(key):
        assert linalg.rank(ctx, M) <= 2


def test_block_diagonal_skew():
    ctx = gf.make_field(2, 2, 1)
    M = qrel.block_diagonal_skew(np.random.default_rng(6), ctx, 3, 2)
    assert np.all(np.diagonal(M) == 0) and np.array_equal(M, M.T)
    assert np.all(M[:3, 3:] == 0)

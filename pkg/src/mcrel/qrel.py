"""The code of quadratic relations of an ordered basis, its matrix code,
congruence transport, annihilator forms and low-rank structure."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .codes import KeyInstance, canonical_dual_basis, schur_square_rows
from .errors import BudgetExceeded
from .gf import FieldCtx

CENSUS_LIMIT = 1 << 24


def pair_index(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i, j), i <= j, in lexicographic order."""
    return np.triu_indices(k)


@dataclass(frozen=True, eq=False)
class MatRelCode:
    ctx: FieldCtx
    basis_V: np.ndarray
    rel_basis: np.ndarray
    mat_basis: np.ndarray

    @property
    def k(self) -> int:
        return self.basis_V.shape[0]

    @property
    def char2(self) -> bool:
        return self.ctx.char2

    @property
    def dim(self) -> int:
        return self.mat_basis.shape[0]


def relation_matrices(ctx: FieldCtx, rels: np.ndarray, k: int) -> np.ndarray:
    """M_c with m_ij = m_ji = c_ij off the diagonal and m_ii = 2 c_ii."""
    rels = np.atleast_2d(np.asarray(rels, dtype=np.int64))
    i, j = pair_index(k)
    M = np.zeros((rels.shape[0], k, k), dtype=np.int64)
    off = i != j
    M[:, i[off], j[off]] = rels[:, off]
    M[:, j[off], i[off]] = rels[:, off]
    d = i[~off]
    M[:, d, d] = ctx.add(rels[:, ~off], rels[:, ~off])
    return M


def quad_rel_code(ctx: FieldCtx, V) -> MatRelCode:
    """Kernel of c -> sum_{i<=j} c_ij v_i * v_j, with its matrix code."""
    V = np.asarray(V, dtype=np.int64)
    rels = linalg.left_nullspace(ctx, schur_square_rows(ctx, V))
    return MatRelCode(ctx, V, rels, relation_matrices(ctx, rels, V.shape[0]))


def mat_code(rel: MatRelCode) -> np.ndarray:
    return rel.mat_basis


def flatten(mats) -> np.ndarray:
    mats = np.asarray(mats, dtype=np.int64)
    return mats.reshape(mats.shape[0], -1)


def congruence_transport(ctx: FieldCtx, mats, P) -> np.ndarray:
    """{P^T M P} for every M."""
    P = np.asarray(P, dtype=np.int64)
    if linalg.rank(ctx, P) != P.shape[0]:
        raise ValueError("transport matrix is singular")
    Pt = P.T
    return np.stack([ctx.matmul(ctx.matmul(Pt, M), P) for M in np.asarray(mats)])


def same_span(ctx: FieldCtx, mats_a, mats_b) -> bool:
    return linalg.same_rowspace(ctx, flatten(mats_a), flatten(mats_b))


def in_span(ctx: FieldCtx, mats, M) -> bool:
    return linalg.in_rowspace(ctx, flatten(mats), np.asarray(M).reshape(1, -1))


def skew_coordinates(mats) -> np.ndarray:
    """Entries m_ij, i < j, in lexicographic order."""
    mats = np.asarray(mats, dtype=np.int64)
    i, j = np.triu_indices(mats.shape[-1], 1)
    return mats[..., i, j]


def annihilator_forms(ctx: FieldCtx, mats, s: int | None = None) -> np.ndarray:
    """Reduced linear forms in the variables m_ij (i < j) cutting out span(mats).

    The pairing is the coordinate one, sum_{i<j} d_ij m_ij.
    """
    mats = np.asarray(mats, dtype=np.int64)
    if s is None:
        s = mats.shape[-1]
    N = s * (s - 1) // 2
    if mats.shape[0] == 0:
        return np.eye(N, dtype=np.int64)
    forms = linalg.nullspace(ctx, skew_coordinates(mats))
    return linalg.row_basis(ctx, forms) if forms.shape[0] else forms.reshape(0, N)


def block_relation_basis(ctx: FieldCtx, r: int) -> np.ndarray:
    """Relation matrices of one r x r diagonal block of the canonical basis.

    They come from (x^a y)(x^b y) = (x^c y)(x^d y) whenever a + b = c + d.
    """
    lookup = {pair: t for t, pair in enumerate(zip(*(ix.tolist() for ix in pair_index(r))))}
    mats = []
    for s in range(2 * r - 1):
        pairs = [(a, s - a) for a in range(max(0, s - r + 1), s // 2 + 1)]
        for (a, b) in pairs[1:]:
            c = np.zeros(r * (r + 1) // 2, dtype=np.int64)
            c[lookup[pairs[0]]] = 1
            c[lookup[(a, b)]] = int(ctx.neg(1))
            mats.append(relation_matrices(ctx, c, r)[0])
    if not mats:
        return np.zeros((0, r, r), dtype=np.int64)
    flat = linalg.row_basis(ctx, flatten(mats))
    return flat.reshape(-1, r, r)


def rank_census_blocks(ctx_or_key: FieldCtx | KeyInstance, r: int | None = None,
                       limit: int = CENSUS_LIMIT, chunk: int = 1 << 14) -> list[int]:
    """Histogram of ranks 0..r over the single-block relation subspace."""
    if isinstance(ctx_or_key, KeyInstance):
        ctx, r = ctx_or_key.ctx, ctx_or_key.r
    else:
        ctx = ctx_or_key
    basis = block_relation_basis(ctx, r)
    f = basis.shape[0]
    total = ctx.order**f
    if total > limit:
        raise BudgetExceeded(f"{total} block matrices exceed the census limit {limit}")
    hist = np.zeros(r + 1, dtype=np.int64)
    flat = flatten(basis)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coeffs = (idx[:, None] // ctx.order ** np.arange(f, dtype=np.int64)) % ctx.order
        mats = ctx.matmul(coeffs, flat).reshape(-1, r, r) if f else np.zeros((1, r, r), dtype=np.int64)
        hist += np.bincount(linalg.batch_rank(ctx, mats), minlength=r + 1)
    return hist.tolist()


def low_rank_generators(key: KeyInstance, block: int = 0, j: int = 0) -> np.ndarray:
    """Candidate rank-(<=2) matrices of C_mat(A), A the canonical basis.

    Generic alternant codes give E_jb + E_bj with b = j mod 2; binary Goppa
    codes with square-free Γ allow every b != j.
    """
    r, m = key.r, key.ctx.m
    s = r * m
    binary_goppa = key.kind == "goppa" and key.ctx.q == 2
    mats = []
    for b in range(r):
        if b == j or (not binary_goppa and (b - j) % 2):
            continue
        M = np.zeros((s, s), dtype=np.int64)
        M[block * r + j, block * r + b] = M[block * r + b, block * r + j] = 1
        mats.append(M)
    return np.array(mats, dtype=np.int64).reshape(-1, s, s)


def low_rank_space_dim(key: KeyInstance) -> int:
    """Dimension of the verified rank-(<=2) subspace built by low_rank_generators."""
    ctx = key.ctx
    if not ctx.char2:
        raise ValueError("low-rank subspaces are constructed in characteristic 2")
    rel = quad_rel_code(ctx, canonical_dual_basis(key))
    gens = [M for M in low_rank_generators(key)
            if in_span(ctx, rel.mat_basis, M) and linalg.rank(ctx, M) <= 2]
    if not gens:
        return 0
    return linalg.rank(ctx, flatten(gens))


def block_diagonal_skew(rng: np.random.Generator, ctx: FieldCtx, r: int, m: int) -> np.ndarray:
    """A random skew matrix (zero diagonal in char 2) with r x r diagonal blocks."""
    s = r * m
    M = np.zeros((s, s), dtype=np.int64)
    for l in range(m):
        for a, b in itertools.combinations(range(r), 2):
            v = int(ctx.random(rng))
            M[l * r + a, l * r + b] = v
            M[l * r + b, l * r + a] = int(ctx.neg(v))
    return M

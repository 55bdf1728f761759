"""Dense linear algebra over a FieldCtx (row echelon forms, kernels, spans)."""
from __future__ import annotations

import numpy as np

from .gf import FieldCtx

BITSLICE_MIN = 1 << 16


def rref(ctx: FieldCtx, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with zero rows dropped, and pivot columns."""
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if not nz.size:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv], c:] = A[[piv, r], c:]
        A[r, c:] = ctx.mul(A[r, c:], ctx.inv(A[r, c]))
        col = A[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            A[idx, c:] = ctx.sub(A[idx, c:], ctx.mul(col[idx, None], A[r, None, c:]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(ctx: FieldCtx, M) -> int:
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    if ctx.char2 and ctx._exp is not None and M.size >= BITSLICE_MIN:
        from .kernels import gf2e_rank
        return gf2e_rank(ctx, M)
    return len(rref(ctx, M)[1])


def nullspace(ctx: FieldCtx, M) -> np.ndarray:
    """Basis (as rows) of the right kernel {v : M v = 0}."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    R, piv = rref(ctx, M) if M.shape[0] else (np.zeros((0, cols), dtype=np.int64), [])
    free = [c for c in range(cols) if c not in set(piv)]
    N = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        N[i, f] = 1
        if piv:
            N[i, piv] = ctx.neg(R[:, f])
    return N


def left_nullspace(ctx: FieldCtx, M) -> np.ndarray:
    """Basis (as rows) of {v : v M = 0}."""
    return nullspace(ctx, np.asarray(M, dtype=np.int64).T)


def row_basis(ctx: FieldCtx, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    if M.shape[0] == 0:
        return M.reshape(0, M.shape[1])
    return rref(ctx, M)[0]


def same_rowspace(ctx: FieldCtx, A, B) -> bool:
    return np.array_equal(row_basis(ctx, A), row_basis(ctx, B))


def in_rowspace(ctx: FieldCtx, A, v) -> bool:
    A = np.asarray(A, dtype=np.int64)
    v = np.atleast_2d(np.asarray(v, dtype=np.int64))
    return rank(ctx, np.vstack([A, v])) == rank(ctx, A)


def intersect_rowspaces(ctx: FieldCtx, A, B) -> np.ndarray:
    """Basis of rowspace(A) ∩ rowspace(B) via the kernel of the stacked duals."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    dual = np.vstack([nullspace(ctx, A), nullspace(ctx, B)])
    if dual.shape[0] == 0:
        return row_basis(ctx, A)
    return nullspace(ctx, dual)


def det(ctx: FieldCtx, M) -> int:
    A = np.array(M, dtype=np.int64, copy=True)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    d = 1
    for c in range(n):
        nz = np.flatnonzero(A[c:, c])
        if not nz.size:
            return 0
        piv = c + nz[0]
        if piv != c:
            A[[c, piv], c:] = A[[piv, c], c:]
            d = int(ctx.neg(d))
        d = int(ctx.mul(d, A[c, c]))
        inv = ctx.inv(A[c, c])
        below = np.flatnonzero(A[c + 1:, c]) + c + 1
        if below.size:
            f = ctx.mul(A[below, c], inv)
            A[below, c:] = ctx.sub(A[below, c:], ctx.mul(f[:, None], A[c, None, c:]))
    return d


def inverse(ctx: FieldCtx, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    R, piv = rref(ctx, np.hstack([M, np.eye(n, dtype=np.int64)]))
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def solve_left(ctx: FieldCtx, A, v) -> np.ndarray | None:
    """Some x with x A = v, or None when v is outside the row space."""
    A = np.asarray(A, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    k = A.shape[0]
    aug = np.hstack([A.T, v[:, None]])
    R, piv = rref(ctx, aug)
    if piv and piv[-1] == k:
        return None
    x = np.zeros(k, dtype=np.int64)
    x[piv] = R[:, k]
    return x


def interpolate(ctx: FieldCtx, xs, ys) -> np.ndarray:
    """Coefficients (low first) of the polynomial of degree < len(xs) through the points."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    n = len(xs)
    V = np.ones((n, n), dtype=np.int64)
    for j in range(1, n):
        V[:, j] = ctx.mul(V[:, j - 1], xs)
    aug = np.hstack([V, ys[:, None]])
    R, piv = rref(ctx, aug)
    if len(piv) < n or piv[-1] >= n:
        raise ValueError("interpolation nodes must be distinct")
    return R[:, n]


def batch_rank(ctx: FieldCtx, mats) -> np.ndarray:
    """Ranks of a stack of matrices (N, R, C), eliminated in lockstep."""
    A = np.array(mats, dtype=np.int64, copy=True)
    N, R, C = A.shape
    rk = np.zeros(N, dtype=np.int64)
    rows = np.arange(R)
    for c in range(C):
        cand = (A[:, :, c] != 0) & (rows[None, :] >= rk[:, None])
        idx = np.flatnonzero(cand.any(axis=1))
        if not idx.size:
            continue
        piv = cand[idx].argmax(axis=1)
        r0 = rk[idx]
        top = A[idx, r0].copy()
        A[idx, r0] = A[idx, piv]
        A[idx, piv] = top
        prow = A[idx, r0]
        f = ctx.mul(A[idx, :, c], ctx.inv(prow[:, c])[:, None])
        f[rows[None, :] <= r0[:, None]] = 0
        A[idx] = ctx.sub(A[idx], ctx.mul(f[:, :, None], prow[:, None, :]))
        rk[idx] += 1
    return rk

"""Hot linear-algebra kernels with a compiled core and a numpy fallback.

The compiled extension ``mcrel._core`` is used when it was built; set the
environment variable ``MCREL_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback
from .gf import FieldCtx

try:
    if os.environ.get("MCREL_PURE"):
        raise ImportError("fallback forced")
    from . import _core
except ImportError:
    _core = None

BACKEND = "compiled" if _core is not None else "python"


def pack_planes(M: np.ndarray, e: int) -> np.ndarray:
    """Bit-slice a matrix of GF(2^e) elements into (rows, e, words) uint64."""
    M = np.asarray(M, dtype=np.int64)
    R, C = M.shape
    W = max(1, -(-C // 64))
    padded = np.zeros((R, W * 64), dtype=np.int64)
    padded[:, :C] = M
    out = np.empty((R, e, W), dtype=np.uint64)
    weights = np.uint64(1) << np.arange(64, dtype=np.uint64)
    for k in range(e):
        bits = ((padded >> k) & 1).astype(np.uint64).reshape(R, W, 64)
        out[:, k, :] = (bits * weights).sum(axis=2, dtype=np.uint64)
    return out


def gf2e_rank(ctx: FieldCtx, M: np.ndarray, backend: str | None = None) -> int:
    """Rank of M over GF(2^e) by bit-sliced elimination."""
    if not ctx.char2 or ctx._exp is None:
        raise ValueError("bit-sliced rank needs a tabulated field of characteristic 2")
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return _rank_planes(ctx, pack_planes(M, ctx.e), M.shape[1], backend)


def _rank_planes(ctx: FieldCtx, planes: np.ndarray, ncols: int, backend: str | None) -> int:
    planes = np.ascontiguousarray(planes)
    red = ctx._mod_int ^ (1 << ctx.e)
    exp = np.ascontiguousarray(ctx._exp, dtype=np.int64)
    log = np.ascontiguousarray(ctx._log, dtype=np.int64)
    impl = backend or BACKEND
    if impl == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernel not available")
        return int(_core.rank_planes(planes, ctx.e, red, ncols, exp, log))
    if impl != "python":
        raise ValueError(f"unknown backend {impl!r}")
    return _fallback.rank_planes(planes, ctx.e, red, ncols, exp, log)


def planes_from_triplets(shape: tuple[int, int], rows, cols, vals, e: int) -> np.ndarray:
    """Bit-sliced matrix from (row, col, value) triplets; repeats are summed."""
    R, C = shape
    W = max(1, -(-C // 64))
    planes = np.zeros((R, e, W), dtype=np.uint64)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.int64)
    word = cols >> 6
    bit = np.uint64(1) << (cols & 63).astype(np.uint64)
    for k in range(e):
        sel = ((vals >> k) & 1).astype(bool)
        np.bitwise_xor.at(planes, (rows[sel], np.full(sel.sum(), k), word[sel]), bit[sel])
    return planes


def gf2e_rank_triplets(ctx: FieldCtx, shape: tuple[int, int], rows, cols, vals,
                       backend: str | None = None) -> int:
    """Rank over GF(2^e) of a sparse matrix given by triplets."""
    if not ctx.char2 or ctx._exp is None:
        raise ValueError("bit-sliced rank needs a tabulated field of characteristic 2")
    if shape[0] == 0 or shape[1] == 0:
        return 0
    planes = planes_from_triplets(shape, rows, cols, vals, ctx.e)
    return _rank_planes(ctx, planes, shape[1], backend)

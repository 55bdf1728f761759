"""Pure numpy twin of the compiled kernels in ``_core``."""
from __future__ import annotations

import numpy as np


def rank_planes(planes: np.ndarray, e: int, red: int, ncols: int,
                exp: np.ndarray, log: np.ndarray) -> int:
    R, _, W = planes.shape
    order1 = (1 << e) - 1
    shifts = np.arange(e, dtype=np.uint64)
    red_bits = np.array([(red >> k) & 1 for k in range(e)], dtype=bool)
    rank = 0
    for col in range(ncols):
        if rank == R:
            break
        w, b = divmod(col, 64)
        bits = (planes[rank:, :, w] >> np.uint64(b)) & np.uint64(1)
        vals = (bits << shifts).sum(axis=1).astype(np.int64)
        nz = np.flatnonzero(vals)
        if not nz.size:
            continue
        piv = rank + nz[0]
        if piv != rank:
            planes[[rank, piv], :, w:] = planes[[piv, rank], :, w:]
            vals[[0, nz[0]]] = vals[[nz[0], 0]]
        row = planes[rank, :, w:]
        table = np.zeros((1 << e, e, W - w), dtype=np.uint64)
        base = row.copy()
        for k in range(e):
            half = 1 << k
            table[half:2 * half] = table[:half] ^ base
            top = base[e - 1].copy()
            base[1:] = base[:-1]
            base[0] = 0
            base[red_bits] ^= top
        below = np.flatnonzero(vals[1:]) + 1
        if below.size:
            f = exp[(log[vals[below]] - log[vals[0]]) % order1]
            planes[rank + below, :, w:] ^= table[f]
        rank += 1
    return rank

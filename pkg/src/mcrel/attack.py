"""Key recovery for alternant codes from rank-defective elements of the
matrix code of quadratic relations.

Works in a Frobenius-closed basis B of the extended dual, where the matrix
code is stable under the blockwise Dickson shift M -> S^T M^(q) S.  Kernels
of rank-defective matrices are supported on a single GRS block (after the
secret change of basis), which lets us isolate one block, intersect its
Frobenius shifts and finish with Sidelnikov-Shestakov.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import codes, linalg, qrel
from .codes import KeyInstance, LinearCode, SupportMultiplier
from .errors import DegenerateInstance, RetryCapExceeded
from .gf import FieldCtx, Poly, poly_roots

PENCIL_CAP = 200
SAUX_ROUNDS_PER_R = 20
RESTARTS = 10


@dataclass(frozen=True)
class ShiftMatrix:
    """The right r-cyclic block shift S, kept implicit as a column roll."""

    r: int
    m: int

    @property
    def size(self) -> int:
        return self.r * self.m

    def dense(self) -> np.ndarray:
        return codes.shift_matrix(self.r, self.m)

    def apply_right(self, X, i: int = 1) -> np.ndarray:
        """X S^i."""
        return np.roll(np.asarray(X, dtype=np.int64), i * self.r, axis=-1)

    def apply_left_transpose(self, X, i: int = 1) -> np.ndarray:
        """(S^T)^i X."""
        return np.roll(np.asarray(X, dtype=np.int64), i * self.r, axis=-2)


@dataclass
class AttackState:
    ctx: FieldCtx
    r: int
    H_B: np.ndarray
    matcode: np.ndarray
    S_aux: np.ndarray
    V: np.ndarray
    recovered: list = field(default_factory=list)
    counters: dict = field(default_factory=lambda: {"pencil_draws": 0, "samples": 0,
                                                     "align_resamples": 0, "block_resamples": 0})

    @property
    def m(self) -> int:
        return self.ctx.m

    @property
    def shift(self) -> ShiftMatrix:
        return ShiftMatrix(self.r, self.ctx.m)

    @property
    def kernel_dim(self) -> int:
        """Kernel dimension of the sampled matrices (1, or 2 in char 2)."""
        return 2 if self.ctx.char2 else 1

    @property
    def target_rank(self) -> int:
        return self.r * self.m - self.kernel_dim


def dickson_shift(ctx: FieldCtx, X, i: int, r: int) -> np.ndarray:
    """(S^T)^i X^(q^i) S^i for matrices (last two axes), X^(q^i) S^i for vectors."""
    X = np.asarray(X, dtype=np.int64)
    S = ShiftMatrix(r, ctx.m)
    Y = S.apply_right(ctx.frobenius(X, i), i)
    if X.ndim >= 2 and X.shape[-2] == X.shape[-1] == S.size:
        Y = S.apply_left_transpose(Y, i)
    return Y


def _shift_rows(ctx: FieldCtx, rows, i: int, r: int) -> np.ndarray:
    """Apply the vector shift to each row of a (k, rm) array."""
    return ShiftMatrix(r, ctx.m).apply_right(ctx.frobenius(np.asarray(rows, dtype=np.int64), i), i)


def pencil_points(ctx: FieldCtx, count: int) -> np.ndarray:
    if count > ctx.order:
        raise ValueError("field too small for the pencil interpolation")
    return np.arange(count, dtype=np.int64)


def sample_rank_defective(ctx: FieldCtx, matcode, target_rank: int, rng: np.random.Generator,
                          max_draws: int = PENCIL_CAP, counters: dict | None = None):
    """A matrix w0 D1 + D2 of the given rank from a random pencil in span(matcode).

    The determinant of the pencil is interpolated from its values at the
    first s+1 field elements and its roots are scanned for the target rank.
    Returns (M, left kernel basis).
    """
    mats = np.asarray(matcode, dtype=np.int64)
    f, s, _ = mats.shape
    if f == 0:
        raise DegenerateInstance("empty matrix code")
    pts = pencil_points(ctx, s + 1)
    flat = mats.reshape(f, -1)
    for _ in range(max_draws):
        if counters is not None:
            counters["pencil_draws"] = counters.get("pencil_draws", 0) + 1
        c = ctx.random(rng, (2, f))
        D1, D2 = ctx.matmul(c, flat).reshape(2, s, s)
        vals = [linalg.det(ctx, ctx.add(ctx.mul(w, D1), D2)) for w in pts]
        poly = Poly(ctx, linalg.interpolate(ctx, pts, vals))
        if poly.is_zero():
            continue
        for w0 in sorted(poly_roots(poly)):
            M = ctx.add(ctx.mul(w0, D1), D2)
            if linalg.rank(ctx, M) == target_rank:
                return M, linalg.left_nullspace(ctx, M)
    raise RetryCapExceeded(f"no matrix of rank {target_rank} after {max_draws} pencils")


def _sample(state: AttackState, rng: np.random.Generator, target: int | None = None):
    state.counters["samples"] += 1
    return sample_rank_defective(state.ctx, state.matcode, target or state.target_rank, rng,
                                 counters=state.counters)


def grow_s_aux(state: AttackState, rng: np.random.Generator,
               max_rounds: int | None = None) -> AttackState:
    """Add kernel vectors with all their shifts until dim S_aux = (r-1)m."""
    ctx, r, m = state.ctx, state.r, state.m
    goal = (r - 1) * m
    max_rounds = SAUX_ROUNDS_PER_R * r if max_rounds is None else max_rounds
    cur = linalg.rank(ctx, state.S_aux) if state.S_aux.size else 0
    for _ in range(max_rounds):
        if cur == goal:
            return state
        _, K = _sample(state, rng)
        for u in K:
            orbit = np.vstack([_shift_rows(ctx, u[None], i, r) for i in range(m)])
            cand = linalg.row_basis(ctx, np.vstack([state.S_aux, orbit]))
            if cand.shape[0] <= goal:
                state.S_aux, cur = cand, cand.shape[0]
            if cur == goal:
                break
    if cur != goal:
        raise RetryCapExceeded(f"S_aux stuck at dimension {cur} < {goal}")
    return state


def _outside(ctx: FieldCtx, S_aux, K) -> np.ndarray | None:
    """A kernel vector u with dim(S_aux + <u>) = dim S_aux + 1."""
    base = S_aux.shape[0]
    for u in K:
        if linalg.rank(ctx, np.vstack([S_aux, u])) == base + 1:
            return u
    return None


def align_shift(ctx: FieldCtx, u1, u2, S_aux, r: int) -> int:
    """The unique l with u1 and the l-th shift of u2 in the same GRS block."""
    S_aux = np.asarray(S_aux, dtype=np.int64)
    base = S_aux.shape[0]
    for u in (u1, u2):
        if linalg.rank(ctx, np.vstack([S_aux, u])) != base + 1:
            raise DegenerateInstance("kernel vector lies in S_aux")
    hits = [l for l in range(ctx.m)
            if linalg.rank(ctx, np.vstack([S_aux, u1, _shift_rows(ctx, u2[None], l, r)])) == base + 1]
    if len(hits) != 1:
        raise DegenerateInstance(f"alignment found {len(hits)} candidate shifts")
    return hits[0]


def build_V_and_recover_block(state: AttackState, rng: np.random.Generator,
                              max_samples: int | None = None) -> np.ndarray:
    """Collect r aligned kernel vectors into V and extract one GRS block."""
    ctx, r, m = state.ctx, state.r, state.m
    max_samples = SAUX_ROUNDS_PER_R * r if max_samples is None else max_samples
    u1 = None
    V = np.zeros((0, r * m), dtype=np.int64)
    for _ in range(max_samples):
        if V.shape[0] == r:
            break
        _, K = _sample(state, rng)
        u = _outside(ctx, state.S_aux, K)
        if u is None:
            state.counters["align_resamples"] += 1
            continue
        if u1 is None:
            u1, l = u, 0
        else:
            try:
                l = align_shift(ctx, u1, u, state.S_aux, r)
            except DegenerateInstance:
                state.counters["align_resamples"] += 1
                continue
        cand = linalg.row_basis(ctx, np.vstack([V, _shift_rows(ctx, K, l, r)]))
        if cand.shape[0] <= r:
            V = cand
    if V.shape[0] != r:
        raise RetryCapExceeded(f"V reached dimension {V.shape[0]} < {r}")
    state.V = V
    D = linalg.nullspace(ctx, V)
    G = D
    for _ in range(m - 2):
        D = _shift_rows(ctx, D, 1, r)
        G = linalg.intersect_rowspaces(ctx, G, D)
    if G.shape[0] != r:
        raise DegenerateInstance(f"block intersection has dimension {G.shape[0]}, expected {r}")
    block = linalg.row_basis(ctx, ctx.matmul(G, state.H_B))
    state.recovered.append(block)
    return block


def recover_block_r3(state: AttackState, rng: np.random.Generator,
                     max_samples: int | None = None) -> np.ndarray:
    """Odd characteristic, r = 3: a vanished block gives V as a 3-dim kernel."""
    ctx, r, m = state.ctx, state.r, state.m
    max_samples = SAUX_ROUNDS_PER_R * r if max_samples is None else max_samples
    for _ in range(max_samples):
        _, K = _sample(state, rng, target=r * (m - 1))
        if K.shape[0] != r:
            continue
        state.V = K
        D = linalg.nullspace(ctx, K)
        G = D
        for _ in range(m - 2):
            D = _shift_rows(ctx, D, 1, r)
            G = linalg.intersect_rowspaces(ctx, G, D)
        if G.shape[0] != r:
            state.counters["block_resamples"] += 1
            continue
        block = linalg.row_basis(ctx, ctx.matmul(G, state.H_B))
        state.recovered.append(block)
        return block
    raise RetryCapExceeded("no vanished block found")


def sidelnikov_shestakov(ctx: FieldCtx, G) -> SupportMultiplier:
    """A support/multiplier pair (x, y) with GRS_k(x, y) = rowspace(G).

    Normalized so that x_0 = 0, x_1 = 1 and y_0 = 1.
    """
    R, piv = linalg.rref(ctx, G)
    k, n = R.shape
    if k < 2 or n - k < 2 or piv != list(range(k)):
        raise ValueError("input is not a GRS code (systematic form fails)")
    T = R[:, k:]
    if np.any(T == 0):
        raise ValueError("input is not a GRS code (zero in redundancy part)")
    target = LinearCode(ctx, R)
    rho = ctx.div(T[0], T[1])
    forbidden = set(rho.tolist()) | {0}
    for K in range(1, ctx.order):
        if K in forbidden:
            continue
        try:
            sm = _ss_candidate(ctx, T, k, n, rho, K, target)
        except ZeroDivisionError:
            sm = None
        if sm is not None:
            return sm
    raise ValueError("input is not a GRS code (no consistent normalization)")


def _ss_candidate(ctx: FieldCtx, T, k: int, n: int, rho, K: int, target: LinearCode):
    """The normalized pair for one choice of the free cross-ratio K, if consistent."""
    xl = ctx.div(K, ctx.sub(K, rho))
    x = np.zeros(n, dtype=np.int64)
    x[1] = 1
    x[k:] = xl
    for i in range(2, k):
        sig = ctx.mul(ctx.div(T[0], T[i]), xl)
        Ki = ctx.div(ctx.sub(sig[0], sig[1]), ctx.sub(xl[0], xl[1]))
        if Ki == 0:
            return None
        x[i] = ctx.div(ctx.sub(ctx.mul(Ki, xl[0]), sig[0]), Ki)
    if len(np.unique(x)) != n:
        return None
    y = np.zeros(n, dtype=np.int64)
    y[0] = 1
    # G_{0,l} = y_l * L_0(x_l) / y_0 with L_0 the Lagrange basis at x_0
    L0 = np.ones(n - k, dtype=np.int64)
    for t in range(1, k):
        L0 = ctx.mul(L0, ctx.div(ctx.sub(xl, x[t]), ctx.sub(x[0], x[t])))
    y[k:] = ctx.div(T[0], L0)
    xa, ya = xl[0], y[k]
    for i in range(1, k):
        Li = 1
        for t in range(k):
            if t != i:
                Li = ctx.mul(Li, ctx.div(ctx.sub(xa, x[t]), ctx.sub(x[i], x[t])))
        y[i] = ctx.div(ctx.mul(ya, Li), T[i, 0])
    if np.any(y == 0):
        return None
    sm = SupportMultiplier(ctx, x, y)
    return sm if codes.grs(sm, k) == target else None


def verify_key(public: LinearCode, x, y, r: int) -> bool:
    try:
        sm = SupportMultiplier(public.ctx, x, y)
    except ValueError:
        return False
    return codes.alternant(sm, r) == public


def _setup(public: LinearCode, r: int, rng: np.random.Generator) -> AttackState:
    ctx = public.ctx
    ext = codes.extend_field(public.dual())
    H_B = codes.frobenius_closed_basis(ext, r, seed=rng)
    rel = qrel.quad_rel_code(ctx, H_B)
    mats = rel.mat_basis
    mats = mats[np.any(mats.reshape(len(mats), -1) != 0, axis=1)]
    return AttackState(ctx, r, H_B, mats, np.zeros((0, r * ctx.m), dtype=np.int64),
                       np.zeros((0, r * ctx.m), dtype=np.int64))


def full_attack(public: LinearCode, r: int, seed=None, restarts: int = RESTARTS):
    """Recover a support/multiplier pair for the public alternant code.

    Returns (KeyInstance, log) where log carries stage timings and retry
    counters.  Raises RetryCapExceeded once every restart has failed.
    """
    ctx = public.ctx
    if ctx.char2 and r % 2:
        raise ValueError("characteristic 2 needs r even")
    if public.k != public.n - r * ctx.m:
        raise DegenerateInstance("public code does not have dimension n - rm")
    rng = np.random.default_rng(seed)
    log = {"restarts": 0, "timings": {}, "counters": {}, "failures": []}
    for attempt in range(restarts):
        log["restarts"] = attempt
        t0 = time.perf_counter()
        try:
            state = _setup(public, r, rng)
            t1 = time.perf_counter()
            if not ctx.char2 and r == 3:
                block = recover_block_r3(state, rng)
                t2 = t1
            else:
                grow_s_aux(state, rng)
                t2 = time.perf_counter()
                block = build_V_and_recover_block(state, rng)
            t3 = time.perf_counter()
            sm = sidelnikov_shestakov(ctx, block)
            found = None
            for j in range(ctx.m):
                cand = sm.frobenius(j)
                if verify_key(public, cand.x, cand.y, r):
                    found = cand
                    break
            t4 = time.perf_counter()
            log["timings"] = {"setup": t1 - t0, "s_aux": t2 - t1, "block": t3 - t2,
                              "finish": t4 - t3}
            log["counters"] = dict(state.counters)
            if found is None:
                raise DegenerateInstance("recovered pair does not verify")
            key = KeyInstance("alternant", ctx, r, public, sm=found,
                              seed=seed if isinstance(seed, int) else None)
            log["verdict"] = "recovered"
            return key, log
        except (DegenerateInstance, RetryCapExceeded, ValueError) as exc:
            log["failures"].append(f"{type(exc).__name__}: {exc}")
    raise RetryCapExceeded(f"attack failed after {restarts} restarts: {log['failures'][-1]}")

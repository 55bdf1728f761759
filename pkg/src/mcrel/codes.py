"""Linear codes: GRS, alternant and Goppa constructions, duals, subfield
subcodes, Schur products, and the structured bases of the extended dual."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import DegenerateInstance, RetryCapExceeded
from .gf import FieldCtx, Poly, make_field, random_irreducible, is_squarefree


@dataclass(frozen=True, eq=False)
class SupportMultiplier:
    ctx: FieldCtx
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64).ravel()
        y = np.asarray(self.y, dtype=np.int64).ravel()
        if x.shape != y.shape:
            raise ValueError("support and multiplier lengths differ")
        if len(np.unique(x)) != len(x):
            raise ValueError("support entries must be pairwise distinct")
        if np.any(y == 0):
            raise ValueError("multiplier entries must be nonzero")
        if np.any((x < 0) | (x >= self.ctx.order)) or np.any(y >= self.ctx.order):
            raise ValueError("entries outside the field")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.x)

    def frobenius(self, j: int) -> SupportMultiplier:
        return SupportMultiplier(self.ctx, self.ctx.frobenius(self.x, j), self.ctx.frobenius(self.y, j))


class LinearCode:
    """A code held as its reduced row echelon generator matrix."""

    def __init__(self, ctx: FieldCtx, rows, subfield: bool = False):
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2:
            raise ValueError("generator must be a matrix")
        self.ctx = ctx
        self.subfield = subfield
        self.gen = linalg.row_basis(ctx, rows)
        self.gen.flags.writeable = False
        if subfield and not np.all(ctx.in_subfield(self.gen)):
            raise ValueError("generator entries are not in GF(q)")

    @property
    def n(self) -> int:
        return self.gen.shape[1]

    @property
    def k(self) -> int:
        return self.gen.shape[0]

    def __repr__(self) -> str:
        where = f"GF({self.ctx.q})" if self.subfield else f"GF({self.ctx.order})"
        return f"LinearCode([{self.n}, {self.k}] over {where})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearCode) and np.array_equal(self.gen, other.gen)

    def __hash__(self) -> int:
        return hash(self.gen.tobytes())

    def __contains__(self, v) -> bool:
        return linalg.in_rowspace(self.ctx, self.gen, v)

    @cached_property
    def _dual(self) -> LinearCode:
        return LinearCode(self.ctx, linalg.nullspace(self.ctx, self.gen), self.subfield)

    def dual(self) -> LinearCode:
        return self._dual


def dual(C: LinearCode) -> LinearCode:
    return C.dual()


def extend_field(C: LinearCode) -> LinearCode:
    """The GF(q^m)-span of a GF(q)-code."""
    return LinearCode(C.ctx, C.gen, subfield=False)


def grs_matrix(sm: SupportMultiplier, k: int) -> np.ndarray:
    """Rows y * x^j for j < k."""
    ctx = sm.ctx
    rows = np.empty((k, sm.n), dtype=np.int64)
    rows[0] = sm.y
    for j in range(1, k):
        rows[j] = ctx.mul(rows[j - 1], sm.x)
    return rows


def grs(sm: SupportMultiplier, k: int) -> LinearCode:
    if not 1 <= k <= sm.n:
        raise ValueError("GRS dimension must lie in [1, n]")
    return LinearCode(sm.ctx, grs_matrix(sm, k))


def grs_dual_multiplier(sm: SupportMultiplier) -> SupportMultiplier:
    """Multiplier y' with GRS_k(x, y)^perp = GRS_{n-k}(x, y')."""
    ctx = sm.ctx
    diff = ctx.sub(sm.x[:, None], sm.x[None, :])
    np.fill_diagonal(diff, 1)
    dpi = np.ones(sm.n, dtype=np.int64)
    for j in range(sm.n):
        dpi = ctx.mul(dpi, diff[:, j])
    return SupportMultiplier(ctx, sm.x, ctx.inv(ctx.mul(dpi, sm.y)))


def subfield_subcode(ctx: FieldCtx, H) -> LinearCode:
    """{c in GF(q)^n : H c^T = 0} for a parity-check matrix H over GF(q^m).

    Each unknown c_i is written over a GF(p)-basis of GF(q) and each
    equation is expanded into its e prime-field coordinates.
    """
    H = np.asarray(H, dtype=np.int64)
    r, n = H.shape
    omega = ctx.subfield_basis()
    a = len(omega)
    prods = ctx.mul(H[:, :, None], omega[None, None, :])  # r x n x a
    digits = ctx._digits_of(prods)  # r x n x a x e
    E = digits.transpose(0, 3, 1, 2).reshape(r * ctx.e, n * a)
    Fp = make_field(ctx.p, 1, 1)
    gam = linalg.nullspace(Fp, E).reshape(-1, n, a)
    words = ctx.sum(ctx.mul(gam, omega[None, None, :]), axis=2)
    if words.shape[0] == 0:
        return LinearCode(ctx, np.zeros((0, n), dtype=np.int64), subfield=True)
    return LinearCode(ctx, words, subfield=True)


def alternant(sm: SupportMultiplier, r: int) -> LinearCode:
    """Alt_r(x, y) = GRS_r(x, y)^perp ∩ GF(q)^n."""
    return subfield_subcode(sm.ctx, grs_matrix(sm, r))


@dataclass(eq=False)
class KeyInstance:
    """A secret alternant/Goppa key (or a random code) and its public code."""

    kind: str
    ctx: FieldCtx
    r: int
    public: LinearCode
    sm: SupportMultiplier | None = None
    gamma: Poly | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.public.n

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def m(self) -> int:
        return self.ctx.m

    def extended_dual(self) -> LinearCode:
        return extend_field(self.public.dual())


def goppa(x, gamma: Poly, r: int | None = None) -> KeyInstance:
    ctx = gamma.ctx
    r = gamma.deg if r is None else r
    if gamma.deg != r:
        raise ValueError("deg Γ must equal r")
    vals = gamma(np.asarray(x, dtype=np.int64))
    if np.any(vals == 0):
        raise ValueError("Γ vanishes on the support")
    sm = SupportMultiplier(ctx, x, ctx.inv(vals))
    return KeyInstance("goppa", ctx, r, alternant(sm, r), sm=sm, gamma=gamma)


def _random_support(ctx: FieldCtx, n: int, rng: np.random.Generator) -> np.ndarray:
    if n > ctx.order:
        raise ValueError(f"n = {n} exceeds the field size {ctx.order}")
    return rng.choice(ctx.order, size=n, replace=False).astype(np.int64)


def random_instance(ctx: FieldCtx, kind: str, n: int, r: int, seed=None,
                    squarefree_only: bool = False, max_tries: int = 20) -> KeyInstance:
    """Sample a generic instance of the given kind with dim = n - rm.

    ``kind`` is ``"alternant"``, ``"goppa"`` (irreducible Γ, or merely
    square-free Γ with ``squarefree_only``) or ``"random"`` (a uniformly
    random [n, n - rm] code over GF(q)).
    """
    if r * ctx.m >= n:
        raise ValueError("need rm < n")
    rng = np.random.default_rng(seed)
    k = n - r * ctx.m
    for _ in range(max_tries):
        if kind == "random":
            G = ctx.random_subfield(rng, (k, n))
            inst = KeyInstance("random", ctx, r, LinearCode(ctx, G, subfield=True))
        elif kind == "alternant":
            sm = SupportMultiplier(ctx, _random_support(ctx, n, rng), ctx.random(rng, n, nonzero=True))
            inst = KeyInstance("alternant", ctx, r, alternant(sm, r), sm=sm)
        elif kind == "goppa":
            x = _random_support(ctx, n, rng)
            if squarefree_only:
                gamma = Poly(ctx, np.concatenate([ctx.random(rng, r), [1]]))
                if not is_squarefree(gamma) or np.any(gamma(x) == 0):
                    continue
            else:
                gamma = random_irreducible(ctx, r, rng)
                if np.any(gamma(x) == 0):
                    continue
            inst = goppa(x, gamma, r)
        else:
            raise ValueError(f"unknown instance kind {kind!r}")
        if inst.public.k == k:
            inst.seed = seed if isinstance(seed, int) else None
            return inst
    raise DegenerateInstance(f"no {kind} instance with dimension {k} after {max_tries} draws")


def schur_product(C: LinearCode, D: LinearCode) -> LinearCode:
    ctx = C.ctx
    prods = ctx.mul(C.gen[:, None, :], D.gen[None, :, :]).reshape(-1, C.n)
    return LinearCode(ctx, prods)


def schur_square_rows(ctx: FieldCtx, V) -> np.ndarray:
    """Products v_i * v_j for i <= j in lexicographic order."""
    V = np.asarray(V, dtype=np.int64)
    i, j = np.triu_indices(V.shape[0])
    return ctx.mul(V[i], V[j])


def schur_square_dim(C: LinearCode) -> int:
    return linalg.rank(C.ctx, schur_square_rows(C.ctx, C.gen))


def intersect(C: LinearCode, D: LinearCode) -> LinearCode:
    return LinearCode(C.ctx, linalg.intersect_rowspaces(C.ctx, C.gen, D.gen),
                      C.subfield and D.subfield)


def frobenius_rows(ctx: FieldCtx, rows, m: int) -> np.ndarray:
    """Stack rows, rows^q, ..., rows^(q^(m-1)) block by block."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    return np.vstack([ctx.frobenius(rows, l) for l in range(m)])


def canonical_dual_basis(key: KeyInstance) -> np.ndarray:
    """The basis (y x^a)^(q^l), a < r, ordered by block l then a."""
    return frobenius_rows(key.ctx, grs_matrix(key.sm, key.r), key.ctx.m)


def frobenius_closed_basis(C_ext: LinearCode, r: int, seed=None, max_tries: int = 100) -> np.ndarray:
    """A basis (b_1..b_r, b_1^q..b_r^q, ...) of a Frobenius-stable code of dim rm."""
    ctx = C_ext.ctx
    if C_ext.k != r * ctx.m:
        raise DegenerateInstance(f"extended dual has dimension {C_ext.k}, expected {r * ctx.m}")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        b = ctx.matmul(ctx.random(rng, (r, C_ext.k)), C_ext.gen)
        B = frobenius_rows(ctx, b, ctx.m)
        if linalg.rank(ctx, B) == B.shape[0]:
            return B
    raise RetryCapExceeded("no Frobenius-closed basis of full rank")


def change_of_basis(ctx: FieldCtx, A, B) -> np.ndarray:
    """The matrix P with B = P A for two bases of one code."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    P = np.empty((B.shape[0], A.shape[0]), dtype=np.int64)
    for i, row in enumerate(B):
        x = linalg.solve_left(ctx, A, row)
        if x is None:
            raise ValueError("the two bases span different codes")
        P[i] = x
    return P


def shift_matrix(r: int, m: int) -> np.ndarray:
    """Right r-cyclic block shift: block (l, l+1) is the identity."""
    S = np.zeros((r * m, r * m), dtype=np.int64)
    for l in range(m):
        nxt = (l + 1) % m
        S[l * r:(l + 1) * r, nxt * r:(nxt + 1) * r] = np.eye(r, dtype=np.int64)
    return S

"""Closed-form predicates and cost estimates: square-distinguishability,
dimension bounds for squares of dual codes, rank counts, GV-style
thresholds and the complexity exponents of the distinguisher."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .pfaffian import dreg_random

# Strassen's exponent; a least-squares fit of the dense column gives 2.807
DEFAULT_OMEGA = math.log2(7)

CLASSIC_MCELIECE = {
    1: (3488, 2, 12, 64),
    2: (4608, 2, 13, 96),
    3: (6688, 2, 13, 128),
    4: (6960, 2, 13, 119),
    5: (8192, 2, 13, 128),
}


@dataclass(frozen=True)
class ParamSet:
    n: int
    q: int
    m: int
    r: int

    def __post_init__(self):
        if min(self.n, self.q, self.m, self.r) < 1:
            raise ValueError("parameters must be positive")
        if self.n > self.q ** self.m:
            raise ValueError(f"n = {self.n} exceeds q^m = {self.q ** self.m}")
        if self.r * self.m >= self.n:
            raise ValueError("need rm < n")

    @property
    def s(self) -> int:
        return self.r * self.m

    @property
    def k(self) -> int:
        return self.n - self.s

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def full_support(self) -> bool:
        return self.n == self.q ** self.m


def e_alternant(q: int, r: int) -> int:
    """max{i : r >= q^i + 1}."""
    if r < 2:
        raise ValueError("r must be at least 2")
    i = 0
    while r >= q ** (i + 1) + 1:
        i += 1
    return i


def e_goppa(q: int, r: int) -> int:
    """min{i : r <= (q-1)^2 q^i} + 1."""
    if r < 1:
        raise ValueError("r must be positive")
    i = 0
    while r > (q - 1) ** 2 * q ** i:
        i += 1
    return i + 1


def alternant_sq_dual_dim(p: ParamSet) -> int:
    """The bound on dim of the square of the dual, before clamping by n."""
    q, m, r = p.q, p.m, p.r
    e = e_alternant(q, r)
    # inner has the parity of r, so the halving is exact
    inner = (2 * e + 1) * r - 2 * (q ** (e + 1) - 1) // (q - 1)
    return comb(r * m + 1, 2) - (m * (r - 1) * inner) // 2


def goppa_sq_dual_dim(p: ParamSet) -> int:
    q, m, r = p.q, p.m, p.r
    if r < q - 1:
        return comb(r * m + 1, 2) - (m * (r - 1) * (r - 2)) // 2
    e = e_goppa(q, r)
    inner = (2 * e + 1) * r - 2 * (q - 1) * q ** (e - 1) - 1
    return comb(r * m + 1, 2) - (m * r * inner) // 2


def square_dist_alternant(p: ParamSet) -> tuple[bool, int]:
    e = e_alternant(p.q, p.r)
    return p.n > alternant_sq_dual_dim(p), e


def square_dist_goppa(p: ParamSet) -> tuple[bool, int]:
    """Verdict and e_G (reported as 0 on the r < q - 1 branch, where it is unused)."""
    if p.r < 2:
        raise ValueError("r must be at least 2")
    e = 0 if p.r < p.q - 1 else e_goppa(p.q, p.r)
    return p.n > goppa_sq_dual_dim(p), e


def mt22_sq_dual_bound(p: ParamSet, kind: str = "alternant") -> int:
    if kind == "alternant":
        bound = alternant_sq_dual_dim(p)
    elif kind == "goppa":
        bound = goppa_sq_dual_dim(p)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return min(p.n, bound)


def _frac_product(q: int, t: int, rank: int, num_shift: int) -> int:
    s = rank // 2
    value = Fraction(1)
    for i in range(1, s + 1):
        value *= Fraction(q ** (2 * i - num_shift), q ** (2 * i) - 1)
    for i in range(rank):
        value *= q ** (t - i) - 1
    if value.denominator != 1:
        raise ArithmeticError("non-integral count")
    return value.numerator


def count_sym_rank(t: int, rank: int, q: int) -> int:
    """Number of symmetric t x t matrices of the given rank over GF(q)."""
    if not 0 <= rank <= t:
        return 0
    return _frac_product(q, t, rank, 0)


def count_skew_rank(t: int, rank: int, q: int) -> int:
    """Number of alternating (zero-diagonal skew) t x t matrices of the given rank."""
    if not 0 <= rank <= t or rank % 2:
        return 0
    return _frac_product(q, t, rank, 2)


def gv_rank_threshold(p: ParamSet, d: int, skew: bool = False) -> bool:
    """Whether a random matrix code is expected to contain nonzero matrices of rank <= d."""
    if comb(p.s + 1, 2) <= p.n:
        raise ValueError("needs C(rm+1, 2) > n")
    if skew:
        return p.n <= (d + 1) * p.s - comb(d + 1, 2)
    return p.n <= d * p.s - comb(d, 2)


def _mobius(a: int) -> int:
    res, x, f = 1, a, 2
    while f * f <= x:
        if x % f == 0:
            x //= f
            if x % f == 0:
                return 0
            res = -res
        f += 1
    return -res if x > 1 else res


def irreducible_count(Q: int, r: int) -> int:
    """Monic irreducible polynomials of degree r over GF(Q)."""
    total = sum(_mobius(a) * Q ** (r // a) for a in range(1, r + 1) if r % a == 0)
    return total // r


def log2_int(x: int) -> float:
    if x <= 0:
        raise ValueError("log of a non-positive integer")
    shift = max(x.bit_length() - 60, 0)
    return math.log2(x >> shift) + shift


def keyattack_log2(p: ParamSet) -> float:
    """log2 of (support choices) x (irreducible Goppa polynomials)."""
    return log2_int(comb(p.q ** p.m, p.n) * irreducible_count(p.q ** p.m, p.r))


def keyattack_parts_log2(p: ParamSet) -> tuple[float, float]:
    return log2_int(comb(p.q ** p.m, p.n)), log2_int(irreducible_count(p.q ** p.m, p.r))


def dist_cost_log2(p: ParamSet, d_reg: int | None = None, mode: str = "sparse",
                   omega: float = DEFAULT_OMEGA) -> float:
    """Cost of checking the Macaulay matrix at degree d_reg.

    The variables are the C(rm, 2) entries of a skew matrix and the linear
    constraints number k = n - rm.
    """
    if d_reg is None:
        d_reg = dreg_random(p.s, p.k)
    N = comb(p.s, 2)
    if mode == "sparse":
        return log2_int(3 * (N - p.k + 1) * comb(N + d_reg - 1, d_reg) ** 2)
    if mode == "dense":
        return (log2_int(comb(p.s, 4) * d_reg)
                + omega * log2_int(comb(N - p.k + d_reg - 1, d_reg)))
    raise ValueError(f"unknown mode {mode!r}")


def category_row(category: int, omega: float = DEFAULT_OMEGA) -> dict:
    n, q, m, r = CLASSIC_MCELIECE[category]
    p = ParamSet(n, q, m, r)
    d = dreg_random(p.s, p.k)
    return {"category": category, "n": n, "q": q, "m": m, "r": r, "d_reg": d,
            "R": round(p.rate, 4), "keyattack_log2": keyattack_log2(p),
            "dense_log2": dist_cost_log2(p, d, "dense", omega),
            "sparse_log2": dist_cost_log2(p, d, "sparse")}


def calibrate_omega(targets: dict[int, float] | None = None) -> float:
    """Least-squares omega fitting the dense column to the given log2 costs."""
    targets = targets or {1: 3141, 2: 7931, 3: 9030, 4: 6779, 5: 6329}
    num = den = 0.0
    for cat, target in targets.items():
        n, q, m, r = CLASSIC_MCELIECE[cat]
        p = ParamSet(n, q, m, r)
        d = dreg_random(p.s, p.k)
        base = log2_int(comb(p.s, 4) * d)
        slope = log2_int(comb(comb(p.s, 2) - p.k + d - 1, d))
        num += slope * (target - base)
        den += slope * slope
    return num / den


def sublinear_exponents(n: int, alpha: float, c: float = 0.25) -> dict:
    """log2 costs of key attack, message attack and distinguisher with rm = ceil(n^alpha)."""
    if not 0.5 <= alpha < 1:
        raise ValueError("alpha must lie in [1/2, 1)")
    rm = math.ceil(n ** alpha)
    return {"n": n, "alpha": alpha, "rm": rm, "key": float(rm), "message": (1 - alpha) * rm,
            "distinguisher": 4 * alpha * c * rm * rm / n * math.log2(n)}


def sublinear_csv(ns, alphas, c: float = 0.25) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["n", "alpha", "rm", "key", "message", "distinguisher"])
    w.writeheader()
    for n in ns:
        for a in alphas:
            w.writerow(sublinear_exponents(n, a, c))
    return buf.getvalue()


def r_sweep_rows(m: int, rs, rate: float | None = None, q: int = 2) -> list[dict]:
    """d_reg and sparse cost over r, at full support n = q^m or at a fixed rate."""
    rows = []
    for r in rs:
        n = q ** m if rate is None else round(r * m / (1 - rate))
        try:
            p = ParamSet(n, q, m, r)
        except ValueError:
            continue
        if comb(p.s, 2) < p.k or p.k < 2 * p.s - 3:
            continue
        d = dreg_random(p.s, p.k)
        rows.append({"m": m, "r": r, "n": n, "d_reg": d, "sparse_log2": round(dist_cost_log2(p, d, "sparse"), 2)})
    return rows

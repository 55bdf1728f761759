"""Arithmetic in GF(p^e) with a designated subfield GF(q), q = p^a, e = a*m.

Elements are plain integers: the base-p digits of an element, least
significant first, are the coefficients of its representative polynomial
in GF(p)[z]/(modulus).  All operations are vectorized over numpy arrays.
"""
from __future__ import annotations

import functools
import math
from typing import Iterable

import numpy as np

from .errors import RetryCapExceeded

MAX_BITS = 24
TABLE_LIMIT = 1 << 16
ADD_TABLE_LIMIT = 1 << 10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over the prime field, as lists of ints (low degree first) ---

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], b: list[int], p: int) -> list[int]:
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(_ptrim(a)) > db:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
    return a


def _pmulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    out = [0] * max(len(a) + len(b) - 1, 0)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, f, p)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _ptrim(_pmod(a, b, p))
    return a


def _prime_poly_irreducible(f: list[int], p: int) -> bool:
    """Ben-Or test for a monic polynomial over GF(p)."""
    d = len(f) - 1
    zp = [0, 1]
    for _ in range(d // 2):
        # zp <- zp^p mod f
        acc, base, k = [1], zp, p
        while k:
            if k & 1:
                acc = _pmulmod(acc, base, f, p)
            base = _pmulmod(base, base, f, p)
            k >>= 1
        zp = acc
        diff = list(zp) + [0] * max(0, 2 - len(zp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, diff, p)) != 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def lowest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree e over GF(p), ordered by the
    integer whose base-p digits are its low coefficients."""
    if e == 1:
        return (0, 1)
    for low in range(1, p**e):
        coeffs = [(low // p**i) % p for i in range(e)] + [1]
        if coeffs[0] and _prime_poly_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")


class FieldCtx:
    """The field GF(p^e) with subfield GF(q), q = p^a, and m = e / a.

    Instances are immutable and cached per (p, a, m); build them with
    :func:`make_field`.
    """

    def __init__(self, p: int, a: int, m: int):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if a < 1 or m < 1:
            raise ValueError("a and m must be positive")
        e = a * m
        if e * math.log2(p) > MAX_BITS:
            raise ValueError(f"GF({p}^{e}) exceeds the supported size of 2^{MAX_BITS} elements")
        self.p, self.a, self.m, self.e = p, a, m, e
        self.q = p**a
        self.order = p**e
        self.modulus = lowest_irreducible(p, e)
        self.char2 = p == 2
        self._mod_int = sum(c * p**i for i, c in enumerate(self.modulus))
        self._pw = p ** np.arange(e, dtype=np.int64)
        # z^e = -sum_{k<e} f_k z^k
        self._red = np.array([(-c) % p for c in self.modulus[:e]], dtype=np.int64)
        self._digits = None
        self._addtab = None
        self._exp = None
        self._log = None
        if self.order <= TABLE_LIMIT:
            if not self.char2:
                self._digits = self._to_digits_arith(np.arange(self.order, dtype=np.int64)).astype(np.int8)
                if self.order <= ADD_TABLE_LIMIT:
                    el = np.arange(self.order, dtype=np.int64)
                    self._addtab = self._add_digits(el[:, None], el[None, :]).astype(np.int32)
            self._build_tables()
        self.gen = self._find_generator() if self._exp is None else int(self._exp[1])
        for arr in (self._digits, self._addtab, self._exp, self._log, self._pw, self._red):
            if arr is not None:
                arr.flags.writeable = False

    def __repr__(self) -> str:
        return f"FieldCtx(GF({self.p}^{self.e}), q={self.q}, m={self.m})"

    def __reduce__(self):
        return make_field, (self.p, self.a, self.m)

    # -- construction helpers --

    def _to_digits_arith(self, a: np.ndarray) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64)[..., None] // self._pw) % self.p

    def _digits_of(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self._digits is not None:
            return self._digits[a].astype(np.int64)
        return self._to_digits_arith(a)

    def _from_digits(self, d: np.ndarray) -> np.ndarray:
        return d @ self._pw

    def _add_digits(self, a, b) -> np.ndarray:
        return self._from_digits((self._digits_of(a) + self._digits_of(b)) % self.p)

    def _cf_mul(self, a, b) -> np.ndarray:
        """Carry-free shift-and-add product, no tables."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        e, p = self.e, self.p
        if self.char2:
            top, res, aa = 1 << e, np.zeros(a.shape, dtype=np.int64), a.copy()
            for bit in range(e):
                res ^= np.where((b >> bit) & 1, aa, 0)
                aa <<= 1
                aa = np.where(aa & top, aa ^ self._mod_int, aa)
            return res
        ad, bd = self._to_digits_arith(a), self._to_digits_arith(b)
        res = np.zeros_like(ad)
        for bit in range(e):
            res = (res + bd[..., bit, None] * ad) % p
            t = ad[..., e - 1, None]
            ad = np.concatenate([np.zeros_like(t), ad[..., :-1]], axis=-1)
            ad = (ad + t * self._red) % p
        return self._from_digits(res)

    def _cf_pow(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        res = np.ones(a.shape, dtype=np.int64)
        base = a.copy()
        while k:
            if k & 1:
                res = self._cf_mul(res, base)
            base = self._cf_mul(base, base)
            k >>= 1
        return res

    def _find_generator(self) -> int:
        n = self.order - 1
        factors = _prime_factors(n)
        for g in range(2 if self.order > 2 else 1, self.order):
            if all(int(self._cf_pow(g, n // f)) != 1 for f in factors):
                return g
        return 1

    def _build_tables(self) -> None:
        n = self.order - 1
        g = self._find_generator()
        block = min(256, n)
        head = np.empty(block, dtype=np.int64)
        head[0] = 1
        for i in range(1, block):
            head[i] = int(self._cf_mul(head[i - 1], g))
        exp = np.empty(2 * n, dtype=np.int64)
        step = int(self._cf_mul(head[-1], g))
        cur, pos = head, 0
        while pos < n:
            take = min(block, n - pos)
            exp[pos:pos + take] = cur[:take]
            pos += take
            cur = self._cf_mul(cur, step)
        exp[n:] = exp[:n]
        log = np.zeros(self.order, dtype=np.int64)
        log[exp[:n]] = np.arange(n, dtype=np.int64)
        if len(np.unique(exp[:n])) != n:
            raise AssertionError("generator search failed")
        self._exp, self._log = exp, log

    # -- arithmetic --

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def add(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.char2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        if self._addtab is not None:
            return self._addtab[a, b].astype(np.int64)
        return self._add_digits(a, b)

    def neg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.char2:
            return a.copy()
        return self._from_digits((-self._digits_of(a)) % self.p)

    def sub(self, a, b) -> np.ndarray:
        if self.char2:
            return np.asarray(a, dtype=np.int64) ^ np.asarray(b, dtype=np.int64)
        return self.add(a, self.neg(b))

    def mul(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self._exp is None:
            return self._cf_mul(a, b)
        prod = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        if self._exp is None:
            return self._cf_pow(a, self.order - 2)
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a, b) -> np.ndarray:
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if k < 0:
            return self.pow(self.inv(a), -k)
        if k == 0:
            return np.ones(a.shape, dtype=np.int64)
        if self._exp is None:
            return self._cf_pow(a, k)
        kk = k % (self.order - 1)
        res = self._exp[(self._log[a] * kk) % (self.order - 1)]
        return np.where(a == 0, 0, res)

    def frobenius(self, a, j: int = 1) -> np.ndarray:
        """x -> x^(q^j), with j taken mod m."""
        return self.pow(a, self.q ** (j % self.m))

    def in_subfield(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return self.frobenius(a, 1) == a

    def subfield_elements(self) -> np.ndarray:
        if self._exp is not None:
            step = (self.order - 1) // (self.q - 1)
            nz = self._exp[np.arange(self.q - 1) * step]
            return np.sort(np.concatenate([[0], nz]))
        el = self.elements()
        return el[self.in_subfield(el)]

    def sum(self, a, axis=None) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.char2:
            if axis is None:
                return np.bitwise_xor.reduce(a, axis=None)
            return np.bitwise_xor.reduce(a, axis=axis)
        d = self._digits_of(a)
        if axis is None:
            return self._from_digits(d.reshape(-1, self.e).sum(axis=0) % self.p)
        ax = axis % a.ndim
        return self._from_digits(d.sum(axis=ax) % self.p)

    def matmul(self, A, B) -> np.ndarray:
        A, B = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
        vec = B.ndim == 1
        if vec:
            B = B[:, None]
        n, k = A.shape
        l = B.shape[1]
        if n * k * l <= 1 << 22:
            out = self.sum(self.mul(A[:, :, None], B[None, :, :]), axis=1)
        else:
            out = np.zeros((n, l), dtype=np.int64)
            for i in range(k):
                out = self.add(out, self.mul(A[:, i, None], B[None, i, :]))
        return out[:, 0] if vec else out

    def random(self, rng: np.random.Generator, shape=(), nonzero: bool = False) -> np.ndarray:
        lo = 1 if nonzero else 0
        return rng.integers(lo, self.order, size=shape, dtype=np.int64)

    def random_subfield(self, rng: np.random.Generator, shape=(), nonzero: bool = False) -> np.ndarray:
        sub = self.subfield_elements()
        if nonzero:
            sub = sub[1:]
        return sub[rng.integers(0, len(sub), size=shape)]

    def subfield_basis(self) -> np.ndarray:
        """A GF(p)-basis of GF(q) as elements of the big field."""
        if self.a == 1:
            return np.array([1], dtype=np.int64)
        beta = self.pow(self.gen, (self.order - 1) // (self.q - 1))
        return np.array([int(self.pow(beta, t)) for t in range(self.a)], dtype=np.int64)


@functools.lru_cache(maxsize=None)
def make_field(p: int, a: int, m: int) -> FieldCtx:
    """GF(p^(a*m)) with designated subfield GF(p^a)."""
    return FieldCtx(p, a, m)


def frobenius(ctx: FieldCtx, x, j: int = 1):
    return ctx.frobenius(x, j)


def in_subfield(ctx: FieldCtx, x):
    return ctx.in_subfield(x)


# --- univariate polynomials over a FieldCtx ---

class Poly:
    """Polynomial over ``ctx`` with coefficients stored low degree first."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[int]):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=np.int64).ravel()
        nz = np.nonzero(c)[0]
        self.ctx = ctx
        self.coeffs = c[: nz[-1] + 1] if nz.size else c[:0]
        self.coeffs.flags.writeable = False

    @classmethod
    def from_roots(cls, ctx: FieldCtx, roots) -> Poly:
        f = cls(ctx, [1])
        for r in np.asarray(roots, dtype=np.int64).ravel():
            f = f * cls(ctx, [int(ctx.neg(r)), 1])
        return f

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def lead(self) -> int:
        return int(self.coeffs[-1]) if len(self.coeffs) else 0

    def __repr__(self) -> str:
        return f"Poly({list(map(int, self.coeffs))})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs.tolist()))

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=np.int64)
        b = np.zeros(n, dtype=np.int64)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        return Poly(self.ctx, self.ctx.add(a, b))

    def __neg__(self) -> Poly:
        return Poly(self.ctx, self.ctx.neg(self.coeffs))

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other) -> Poly:
        ctx = self.ctx
        if not isinstance(other, Poly):
            return Poly(ctx, ctx.mul(self.coeffs, int(other)))
        if self.is_zero() or other.is_zero():
            return Poly(ctx, [])
        prod = ctx.mul(self.coeffs[:, None], other.coeffs[None, :])
        out = np.zeros(len(self.coeffs) + len(other.coeffs) - 1, dtype=np.int64)
        for i in range(len(self.coeffs)):
            sl = slice(i, i + len(other.coeffs))
            out[sl] = ctx.add(out[sl], prod[i])
        return Poly(ctx, out)

    def __call__(self, x) -> np.ndarray:
        ctx = self.ctx
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros(x.shape, dtype=np.int64)
        for c in self.coeffs[::-1]:
            acc = ctx.add(ctx.mul(acc, x), c)
        return acc

    def __divmod__(self, other: Poly) -> tuple[Poly, Poly]:
        ctx = self.ctx
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = self.coeffs.copy()
        db = other.deg
        if self.deg < db:
            return Poly(ctx, []), self
        inv = int(ctx.inv(other.lead()))
        quo = np.zeros(self.deg - db + 1, dtype=np.int64)
        for i in range(self.deg - db, -1, -1):
            c = int(ctx.mul(r[i + db], inv))
            quo[i] = c
            if c:
                r[i:i + db + 1] = ctx.sub(r[i:i + db + 1], ctx.mul(other.coeffs, c))
        return Poly(ctx, quo), Poly(ctx, r[:db])

    def __mod__(self, other: Poly) -> Poly:
        return divmod(self, other)[1]

    def __floordiv__(self, other: Poly) -> Poly:
        return divmod(self, other)[0]

    def monic(self) -> Poly:
        return self * int(self.ctx.inv(self.lead()))

    def derivative(self) -> Poly:
        ctx = self.ctx
        k = np.arange(1, len(self.coeffs), dtype=np.int64) % ctx.p
        # k is an element of the prime field, hence its own integer encoding
        return Poly(ctx, ctx.mul(self.coeffs[1:], k))

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def powmod(self, k: int, mod: Poly) -> Poly:
        res, base = Poly(self.ctx, [1]) % mod, self % mod
        while k:
            if k & 1:
                res = (res * base) % mod
            base = (base * base) % mod
            k >>= 1
        return res


def _split_linear(f: Poly, rng: np.random.Generator) -> list[int]:
    """Roots of a monic f that is a product of distinct linear factors."""
    ctx = f.ctx
    if f.deg == 0:
        return []
    if f.deg == 1:
        return [int(ctx.neg(f.coeffs[0]))]
    while True:
        delta = int(ctx.random(rng, nonzero=True))
        if ctx.char2:
            # additive shifts never separate roots of equal trace
            h = Poly(ctx, [0, delta])
            acc, t = Poly(ctx, []), h % f
            for _ in range(ctx.e):
                acc = acc + t
                t = (t * t) % f
            g = f.gcd(acc)
        else:
            h = Poly(ctx, [delta, 1])
            g = f.gcd(h.powmod((ctx.order - 1) // 2, f) - Poly(ctx, [1]))
        if 0 < g.deg < f.deg:
            return _split_linear(g, rng) + _split_linear(f // g, rng)


def poly_roots(f: Poly) -> set[int]:
    """All roots of f in its field, without multiplicity."""
    if f.is_zero():
        raise ValueError("the zero polynomial has every element as a root")
    ctx = f.ctx
    if ctx.order <= TABLE_LIMIT:
        el = ctx.elements()
        return set(el[f(el) == 0].tolist())
    z = Poly(ctx, [0, 1])
    g = f.monic().gcd(z.powmod(ctx.order, f.monic()) - z)
    return set(_split_linear(g, np.random.default_rng(0)))


def is_irreducible(f: Poly) -> bool:
    """Ben-Or irreducibility test over the full field of ``f``."""
    if f.deg < 1:
        return False
    if f.deg == 1:
        return True
    ctx = f.ctx
    f = f.monic()
    z = Poly(ctx, [0, 1])
    t = z
    for _ in range(f.deg // 2):
        t = t.powmod(ctx.order, f)
        if f.gcd(t - z).deg > 0:
            return False
    return True


def is_squarefree(f: Poly) -> bool:
    return f.gcd(f.derivative()).deg == 0


def random_irreducible(ctx: FieldCtx, r: int, seed=None) -> Poly:
    """Uniform monic irreducible polynomial of degree r over the full field."""
    if r < 1:
        raise ValueError("degree must be positive")
    rng = np.random.default_rng(seed)
    for _ in range(64 * r * ctx.e):
        f = Poly(ctx, np.concatenate([ctx.random(rng, r), [1]]))
        if is_irreducible(f):
            return f
    raise RetryCapExceeded(f"no irreducible polynomial of degree {r} found")

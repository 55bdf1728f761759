"""Slow reference implementations used as independent oracles.

Everything here works on plain Python integers and lists and shares no
code with the package.
"""
import itertools


def digits(x, p, e):
    return [(x // p**i) % p for i in range(e)]


def undigits(d, p):
    return sum(c * p**i for i, c in enumerate(d))


def poly_mulmod(a, b, f, p):
    """Product of coefficient lists a, b modulo the monic f over GF(p)."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    e = len(f) - 1
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            for t in range(e + 1):
                prod[k - e + t] = (prod[k - e + t] - c * f[t]) % p
    return (prod + [0] * e)[:e]


class NaiveField:
    def __init__(self, p, modulus):
        self.p = p
        self.f = list(modulus)
        self.e = len(modulus) - 1
        self.order = p**self.e

    def add(self, a, b):
        return undigits([(x + y) % self.p for x, y in zip(digits(a, self.p, self.e), digits(b, self.p, self.e))], self.p)

    def neg(self, a):
        return undigits([(-x) % self.p for x in digits(a, self.p, self.e)], self.p)

    def mul(self, a, b):
        return undigits(poly_mulmod(digits(a, self.p, self.e), digits(b, self.p, self.e), self.f, self.p), self.p)

    def inv(self, a):
        for b in range(1, self.order):
            if self.mul(a, b) == 1:
                return b
        raise ZeroDivisionError

    def rank(self, rows):
        A = [list(r) for r in rows]
        rk = 0
        ncols = len(A[0]) if A else 0
        for c in range(ncols):
            piv = next((i for i in range(rk, len(A)) if A[i][c]), None)
            if piv is None:
                continue
            A[rk], A[piv] = A[piv], A[rk]
            iv = self.inv(A[rk][c])
            A[rk] = [self.mul(iv, x) for x in A[rk]]
            for i in range(len(A)):
                if i != rk and A[i][c]:
                    f = A[i][c]
                    A[i] = [self.add(x, self.neg(self.mul(f, y))) for x, y in zip(A[i], A[rk])]
            rk += 1
        return rk

    def det(self, M):
        n = len(M)
        total = 0
        for perm in itertools.permutations(range(n)):
            inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
            term = 1
            for i in range(n):
                term = self.mul(term, M[i][perm[i]])
            total = self.add(total, self.neg(term) if inversions % 2 else term)
        return total


def is_irreducible_trial(f, p):
    """Trial division by every monic polynomial of degree <= deg f / 2."""
    e = len(f) - 1
    for d in range(1, e // 2 + 1):
        for low in range(p**d):
            g = digits(low, p, d) + [1]
            rem = list(f)
            for k in range(len(rem) - 1, d - 1, -1):
                c = rem[k]
                if c:
                    for t in range(d + 1):
                        rem[k - d + t] = (rem[k - d + t] - c * g[t]) % p
            if not any(rem[:d]):
                return False
    return True


def prime_rank(rows, p):
    A = [[x % p for x in r] for r in rows]
    rk = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rk], A[piv] = A[piv], A[rk]
        iv = pow(A[rk][c], p - 2, p)
        A[rk] = [(iv * x) % p for x in A[rk]]
        for i in range(len(A)):
            if i != rk and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rk])]
        rk += 1
    return rk


def enumerate_symmetric_ranks(t, p):
    counts = [0] * (t + 1)
    cells = [(i, j) for i in range(t) for j in range(i, t)]
    for vals in itertools.product(range(p), repeat=len(cells)):
        M = [[0] * t for _ in range(t)]
        for (i, j), v in zip(cells, vals):
            M[i][j] = M[j][i] = v
        counts[prime_rank(M, p)] += 1
    return counts


def enumerate_alternating_ranks(t, p):
    counts = [0] * (t + 1)
    cells = [(i, j) for i in range(t) for j in range(i + 1, t)]
    for vals in itertools.product(range(p), repeat=len(cells)):
        M = [[0] * t for _ in range(t)]
        for (i, j), v in zip(cells, vals):
            M[i][j] = v
            M[j][i] = (-v) % p
        counts[prime_rank(M, p)] += 1
    return counts


def grs_rows(F, x, y, k):
    rows = []
    for a in range(k):
        row = []
        for xi, yi in zip(x, y):
            v = yi
            for _ in range(a):
                v = F.mul(v, xi)
            row.append(v)
        rows.append(row)
    return rows

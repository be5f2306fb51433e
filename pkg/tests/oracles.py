"""Independent reference implementations used to check the package.

Nothing here imports gcmce: arithmetic is schoolbook polynomial arithmetic on
digit lists, linear algebra is textbook elimination on Python lists, and
codes are enumerated with itertools.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


class PolyField:
    """GF(p^m) as polynomials over GF(p) modulo a monic ``modulus`` (low degree first).

    Elements are integers sum c_i p^i, matching the package's encoding.
    """

    def __init__(self, p: int, modulus: tuple[int, ...]):
        self.p = p
        self.mod = list(modulus)
        self.m = len(modulus) - 1
        self.order = p**self.m

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            out.append(a % self.p)
            a //= self.p
        return out

    def value(self, d) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(d))

    def add(self, a: int, b: int) -> int:
        return self.value([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def mul(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.m)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        for deg in range(len(prod) - 1, self.m - 1, -1):
            c = prod[deg]
            if c:
                for i, mc in enumerate(self.mod):
                    prod[deg - self.m + i] = (prod[deg - self.m + i] - c * mc) % self.p
        return self.value(prod[: self.m])


def is_irreducible_naive(p: int, poly: tuple[int, ...]) -> bool:
    """No monic factor of degree 1..deg/2, by trial polynomial division."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            f = list(tail) + [1]
            rem = list(poly)
            for shift in range(deg - d, -1, -1):
                c = rem[shift + d]
                if c:
                    for i, fc in enumerate(f):
                        rem[shift + i] = (rem[shift + i] - c * fc) % p
            if not any(rem):
                return False
    return True


def rank_mod_p(rows, p: int) -> int:
    M = [[int(x) % p for x in r] for r in rows]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], p - 2, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def codewords_mod_p(G, p: int, n: int | None = None) -> set[tuple[int, ...]]:
    G = [list(map(int, r)) for r in G]
    n = len(G[0]) if G else n
    out = set()
    for m in itertools.product(range(p), repeat=len(G)):
        out.add(tuple(sum(mi * g[j] for mi, g in zip(m, G)) % p for j in range(n)))
    return out or {(0,) * n}


def min_distance(words: set[tuple[int, ...]]) -> int:
    ws = [sum(1 for x in w if x) for w in words if any(w)]
    return min(ws) if ws else len(next(iter(words))) + 1


def dual_words_mod_p(G, n: int, p: int) -> set[tuple[int, ...]]:
    G = [list(map(int, r)) for r in G]
    return {v for v in itertools.product(range(p), repeat=n)
            if all(sum(a * b for a, b in zip(v, g)) % p == 0 for g in G)}


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= n - i
        den *= i + 1
    return num // den


def avoid_probability(n: int, t: int, delta: int) -> Fraction:
    """Chance that delta distinct random positions miss t fixed ones, as a running product."""
    p = Fraction(1)
    for i in range(delta):
        p *= Fraction(n - t - i, n - i)
    return p


def gf2_subspaces(n: int) -> list[frozenset[int]]:
    """All subspaces of GF(2)^n as sets of bitmasks, by closing every subset of a spanning search."""
    seen = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for S in frontier:
            for v in range(1, 2**n):
                if v not in S:
                    T = frozenset(S | {x ^ v for x in S})
                    if T not in seen:
                        seen.add(T)
                        nxt.append(T)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))

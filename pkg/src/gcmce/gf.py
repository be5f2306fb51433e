"""Finite fields GF(q^m) built as towers over smaller fields.

Elements are plain integers.  An element of GF(q^m) with coefficients
``a_0, ..., a_{m-1}`` in the polynomial basis ``1, x, ..., x^(m-1)`` is stored
as ``sum(a_i * q**i)``, where each ``a_i`` is itself the integer encoding of an
element of GF(q).  Prime fields use the usual residues ``0 .. p-1``.

Because the encoding nests, the base-p digits of an element are the
concatenated base-p digits of its coefficients, so addition is digit-wise
addition mod p at every level of the tower (plain XOR in characteristic 2).
Multiplication goes through log/exp tables built on first use.

All vectorised operations accept ints or numpy integer arrays.
"""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BasisRankDeficient, DegreeTooLarge, NotPrimePower

MAX_ORDER = 1 << 24  # several operations enumerate the field


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, e


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldTower:
    """GF(q^m) as an extension of degree ``m`` over the field ``base`` = GF(q).

    A prime field has ``base=None``, ``q=p`` and ``m=1``.  Build instances with
    :func:`make_tower` or :func:`prime_field` so that equal fields are shared.
    """

    def __init__(self, base: FieldTower | None, m: int, modulus: Sequence[int], p: int | None = None):
        if base is None:
            if p is None:
                raise ValueError("prime field needs p")
            self.p, self.q, self.m = p, p, 1
        else:
            self.p, self.q, self.m = base.p, base.order, m
        self.base = base
        self.order = self.q**self.m
        self.modulus = tuple(int(c) for c in modulus)
        self.basis = tuple(self.q**i for i in range(self.m))
        self.n_digits = round(np.log(self.order) / np.log(self.p))
        self._exp: np.ndarray | None = None
        self._log: np.ndarray | None = None
        self._lock = threading.Lock()

    # identity -------------------------------------------------------------
    def _key(self):
        return (self.p, self.q, self.m, self.modulus, None if self.base is None else self.base._key())

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.base is None:
            return f"GF({self.p})"
        return f"GF({self.q}^{self.m})"

    @property
    def is_prime(self) -> bool:
        return self.base is None

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(self, int(value))

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    # scalar arithmetic on Python ints (used while building tables) ---------
    def _s_add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.base is None:
            return (a + b) % self.p
        out, mult, q = 0, 1, self.q
        for _ in range(self.m):
            out += self.base._s_add(a % q, b % q) * mult
            a //= q
            b //= q
            mult *= q
        return out

    def _s_neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.base is None:
            return (-a) % self.p
        out, mult, q = 0, 1, self.q
        for _ in range(self.m):
            out += self.base._s_neg(a % q) * mult
            a //= q
            mult *= q
        return out

    def _s_mul(self, a: int, b: int) -> int:
        if self.base is None:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return int(self._exp[self._log[a] + self._log[b]])
        return self._poly_mulmod(a, b)

    def _s_pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self._s_mul(out, a)
            a = self._s_mul(a, a)
            e >>= 1
        return out

    def digits(self, a: int) -> list[int]:
        """Coefficients of ``a`` in the polynomial basis, lowest degree first."""
        out = []
        for _ in range(self.m):
            out.append(a % self.q)
            a //= self.q
        return out

    def from_digits(self, coeffs: Sequence[int]) -> int:
        return sum(int(c) * self.q**i for i, c in enumerate(coeffs))

    def _poly_mulmod(self, a: int, b: int) -> int:
        base, m = self.base, self.m
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    prod[i + j] = base._s_add(prod[i + j], base._s_mul(x, y))
        mod = self.modulus
        for deg in range(2 * m - 2, m - 1, -1):
            c = prod[deg]
            if c == 0:
                continue
            for j in range(m + 1):
                prod[deg - m + j] = base._s_add(prod[deg - m + j], base._s_neg(base._s_mul(c, mod[j])))
        return self.from_digits(prod[:m])

    # tables ------------------------------------------------------------------
    def _ensure_tables(self) -> None:
        if self._log is not None:
            return
        with self._lock:
            if self._log is not None:
                return
            n = self.order - 1
            factors = _prime_factors(n) if n > 1 else []
            gen = 1
            for g in range(1, self.order):
                if all(self._s_pow(g, n // r) != 1 for r in factors):
                    gen = g
                    break
            exp = np.empty(2 * n if n else 2, dtype=np.int64)
            log = np.zeros(self.order, dtype=np.int64)
            x = 1
            for i in range(n):
                exp[i] = x
                log[x] = i
                x = self._s_mul(x, gen)
            exp[n : 2 * n] = exp[:n]
            self.generator = gen
            self._exp = exp
            self._log = log

    @property
    def primitive_element(self) -> int:
        self._ensure_tables()
        return self.generator

    # vectorised arithmetic -----------------------------------------------------
    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.base is None:
            return (a + b) % self.p
        return self._digitwise(a, b, 1)

    def sub(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.base is None:
            return (a - b) % self.p
        return self._digitwise(a, b, -1)

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        return self.sub(np.zeros_like(a), a)

    def _digitwise(self, a, b, sign):
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        mult = 1
        for _ in range(self.n_digits):
            out += ((a // mult + sign * (b // mult)) % p) * mult
            mult *= p
        return out

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.base is None:
            return (a * b) % self.p
        self._ensure_tables()
        prod = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        if self.order == 2:
            return a
        self._ensure_tables()
        n = self.order - 1
        return self._exp[(n - self._log[a]) % n]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        self._ensure_tables()
        n = self.order - 1
        res = self._exp[(self._log[a] * e) % n]
        return np.where(a == 0, 0, res)

    def matmul(self, A, B):
        """Matrix product of integer arrays over this field."""
        A, B = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
        if self.base is None:
            return (A @ B) % self.p
        if B.ndim == 1:
            return self.matmul(A, B[:, None])[..., 0]
        out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
        for j in range(A.shape[-1]):
            out = self.add(out, self.mul(A[..., j, None], B[j]))
        return out

    def to_digits(self, a) -> np.ndarray:
        """Vectorised :meth:`digits`: appends an axis of length ``m``."""
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // (self.q ** np.arange(self.m, dtype=np.int64))) % self.q

    def from_digit_array(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64)
        return d @ (self.q ** np.arange(self.m, dtype=np.int64))


@dataclass(frozen=True)
class FieldElement:
    """An element of a :class:`FieldTower` with operator support."""

    tower: FieldTower
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.tower.order:
            raise ValueError(f"{self.value} outside {self.tower}")

    @property
    def coeffs(self) -> list[int]:
        return self.tower.digits(self.value)

    def _wrap(self, v) -> FieldElement:
        return FieldElement(self.tower, int(v))

    def _other(self, o) -> int:
        return o.value if isinstance(o, FieldElement) else int(o)

    def __add__(self, o):
        return self._wrap(self.tower.add(self.value, self._other(o)))

    def __sub__(self, o):
        return self._wrap(self.tower.sub(self.value, self._other(o)))

    def __neg__(self):
        return self._wrap(self.tower.neg(self.value))

    def __mul__(self, o):
        return self._wrap(self.tower.mul(self.value, self._other(o)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __truediv__(self, o):
        return self._wrap(self.tower.div(self.value, self._other(o)))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._wrap(self.tower.power(self.value, e))

    def inverse(self) -> FieldElement:
        return self._wrap(self.tower.inv(self.value))

    def __int__(self):
        return self.value

    def __eq__(self, o):
        if isinstance(o, FieldElement):
            return self.tower == o.tower and self.value == o.value
        return isinstance(o, int) and self.value == o

    def __hash__(self):
        return hash((self.tower, self.value))

    def __repr__(self):
        return f"{self.tower}({self.value})"


@functools.lru_cache(maxsize=None)
def prime_field(p: int) -> FieldTower:
    p_, e = _factor_prime_power(p)
    if e != 1:
        raise NotPrimePower(f"{p} is not prime")
    return FieldTower(None, 1, (0, 1), p=p)


def _poly_divides(base: FieldTower, f: list[int], g: list[int]) -> bool:
    """True if monic ``g`` divides ``f`` (coefficient lists, lowest first)."""
    r = list(f)
    dg = len(g) - 1
    for deg in range(len(r) - 1, dg - 1, -1):
        c = r[deg]
        if c == 0:
            continue
        for j in range(dg + 1):
            r[deg - dg + j] = base._s_add(r[deg - dg + j], base._s_neg(base._s_mul(c, g[j])))
    return not any(r[:dg])


def _monic_polys(base: FieldTower, degree: int):
    q = base.order
    for c in range(q**degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(c % q)
            c //= q
        yield coeffs + [1]


def is_irreducible(base: FieldTower, poly: Sequence[int]) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg/2."""
    f = [int(c) for c in poly]
    deg = len(f) - 1
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(base, d):
            if _poly_divides(base, f, g):
                return False
    return True


def smallest_irreducible(base: FieldTower, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``m`` with the smallest integer encoding.

    Candidates are ordered by ``sum(c_i * q**i)`` over their lower coefficients,
    so the constant term is least significant.
    """
    for f in _monic_polys(base, m):
        if is_irreducible(base, f):
            return tuple(f)
    raise AssertionError("an irreducible polynomial of every degree exists")


@functools.lru_cache(maxsize=None)
def make_tower(q: int, m: int) -> FieldTower:
    """GF(q^m) over GF(q) with the smallest monic irreducible modulus.

    ``m == 1`` returns GF(q) itself.  A prime-power ``q = p^e`` is first built
    as ``make_tower(p, e)``.
    """
    p, e = _factor_prime_power(q)
    if m < 1:
        raise ValueError("degree must be positive")
    if q**m > MAX_ORDER:
        raise DegreeTooLarge(f"GF({q}^{m}) exceeds the enumeration cap {MAX_ORDER}")
    base = prime_field(p) if e == 1 else make_tower(p, e)
    if m == 1:
        return base
    return FieldTower(base, m, smallest_irreducible(base, m))


# --- vector and matrix representations ---------------------------------------


def _value(a) -> int:
    return a.value if isinstance(a, FieldElement) else int(a)


@functools.lru_cache(maxsize=None)
def _basis_change(tower: FieldTower, basis: tuple[int, ...]):
    from . import linalg

    if len(basis) != tower.m:
        raise BasisRankDeficient(f"basis needs {tower.m} elements, got {len(basis)}")
    B = np.array([tower.digits(b) for b in basis], dtype=np.int64).reshape(tower.m, tower.m)
    Bm = linalg.FMatrix(tower.base or tower, B)
    if linalg.rank(Bm) < tower.m:
        raise BasisRankDeficient(f"{basis} is not a basis of {tower}")
    return Bm, linalg.inverse(Bm)


def ext_b(a, basis: Sequence[int] | None = None, tower: FieldTower | None = None) -> np.ndarray:
    """Coordinates of ``a`` in ``basis`` as a length-m vector over GF(q)."""
    if tower is None:
        tower = a.tower
    coeffs = np.array(tower.digits(_value(a)), dtype=np.int64)
    if basis is None or tuple(basis) == tower.basis:
        return coeffs
    _, Binv = _basis_change(tower, tuple(int(b) for b in basis))
    return (tower.base or tower).matmul(coeffs, Binv.a)


def ext_b_inv(v, tower: FieldTower, basis: Sequence[int] | None = None) -> FieldElement:
    v = np.asarray(v, dtype=np.int64)
    if basis is not None and tuple(basis) != tower.basis:
        Bm, _ = _basis_change(tower, tuple(int(b) for b in basis))
        v = (tower.base or tower).matmul(v, Bm.a)
    return FieldElement(tower, tower.from_digits(v.tolist()))


def matrix_rep(a, basis: Sequence[int] | None = None, tower: FieldTower | None = None) -> np.ndarray:
    """m x m matrix of multiplication by ``a`` acting on row coordinate vectors.

    Row i is ``ext_b(basis[i] * a)``, so ``ext_b(b * a) == ext_b(b) @ matrix_rep(a)``.
    A non-default basis is handled by conjugating the polynomial-basis matrix.
    """
    if tower is None:
        tower = a.tower
    av = _value(a)
    base = tower.base or tower
    mr = np.array([tower.digits(tower._s_mul(tower.q**i, av)) for i in range(tower.m)], dtype=np.int64)
    mr = mr.reshape(tower.m, tower.m)
    if basis is None or tuple(basis) == tower.basis:
        return mr
    Bm, Binv = _basis_change(tower, tuple(int(b) for b in basis))
    return base.matmul(base.matmul(Bm.a, mr), Binv.a)


def vector_rep(a, basis: Sequence[int] | None = None, tower: FieldTower | None = None, *,
               index: int = 0, column: bool = False) -> np.ndarray:
    """Fixed row (default row 0) or column of :func:`matrix_rep`."""
    mr = matrix_rep(a, basis, tower)
    return mr[:, index] if column else mr[index]

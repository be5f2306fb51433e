"""Dense linear algebra over finite fields.

Matrices are :class:`FMatrix` objects wrapping an ``int64`` numpy array and the
field its entries live in.  Vectors are plain 1-D numpy arrays; the field is
taken from the matrix they are combined with.

Randomness is drawn from a Philox (counter-based) generator keyed by a 64-bit
seed.  Sub-streams are derived from ``(seed, *path)`` so a trial's random
choices do not depend on which worker runs it or in what order.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, NonUnique, NoSolution
from .gf import FieldTower, make_tower


def make_rng(seed, *path: int) -> np.random.Generator:
    """Deterministic generator for ``seed`` and an optional sub-stream path.

    Passing an existing Generator returns it unchanged (``path`` must be empty).
    """
    if isinstance(seed, np.random.Generator):
        if path:
            raise ValueError("cannot derive a sub-stream from a Generator")
        return seed
    entropy = [int(seed) & (2**64 - 1)] + [int(p) for p in path]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit child seed, stable across runs and workers."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1)] + [int(p) for p in path])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class FMatrix:
    """A matrix over a finite field.  Treat instances as immutable."""

    __slots__ = ("field", "a")
    __array_ufunc__ = None  # make ``ndarray @ FMatrix`` defer to __rmatmul__

    def __init__(self, field: FieldTower, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= field.order):
            raise ValueError(f"entries outside {field}")
        a.setflags(write=False)
        self.field = field
        self.a = a

    @classmethod
    def _wrap(cls, field, a) -> FMatrix:
        m = cls.__new__(cls)
        a = np.asarray(a, dtype=np.int64)
        a.setflags(write=False)
        m.field, m.a = field, a
        return m

    @classmethod
    def zeros(cls, field, rows: int, cols: int) -> FMatrix:
        return cls._wrap(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field, n: int) -> FMatrix:
        return cls._wrap(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> FMatrix:
        return FMatrix._wrap(self.field, self.a.T.copy())

    def _check(self, other: FMatrix):
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: FMatrix) -> FMatrix:
        self._check(other)
        return FMatrix._wrap(self.field, self.field.add(self.a, other.a))

    def __sub__(self, other: FMatrix) -> FMatrix:
        self._check(other)
        return FMatrix._wrap(self.field, self.field.sub(self.a, other.a))

    def __neg__(self) -> FMatrix:
        return FMatrix._wrap(self.field, self.field.neg(self.a))

    def __matmul__(self, other):
        if isinstance(other, FMatrix):
            self._check(other)
            return FMatrix._wrap(self.field, self.field.matmul(self.a, other.a))
        other = np.asarray(other, dtype=np.int64)
        return self.field.matmul(self.a, other[:, None])[:, 0]

    def __rmatmul__(self, vec):
        vec = np.asarray(vec, dtype=np.int64)
        return self.field.matmul(vec, self.a)

    def scale(self, c) -> FMatrix:
        return FMatrix._wrap(self.field, self.field.mul(self.a, c))

    def __eq__(self, other):
        return isinstance(other, FMatrix) and self.field == other.field and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.field, self.a.shape, self.a.tobytes()))

    def __getitem__(self, idx):
        sub = self.a[idx]
        if sub.ndim == 2:
            return FMatrix._wrap(self.field, sub.copy())
        return sub.copy() if isinstance(sub, np.ndarray) else int(sub)

    def columns(self, idx: Sequence[int]) -> FMatrix:
        return FMatrix._wrap(self.field, self.a[:, list(idx)])

    def rows_of(self, idx: Sequence[int]) -> FMatrix:
        return FMatrix._wrap(self.field, self.a[list(idx), :])

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __repr__(self):
        return f"FMatrix({self.field}, {self.a.tolist()})"


def hstack(mats: Iterable[FMatrix]) -> FMatrix:
    mats = list(mats)
    return FMatrix._wrap(mats[0].field, np.hstack([m.a for m in mats]))


def vstack(mats: Iterable[FMatrix]) -> FMatrix:
    mats = list(mats)
    return FMatrix._wrap(mats[0].field, np.vstack([m.a for m in mats]))


# --- elimination ---------------------------------------------------------------


def _rref_array(field: FieldTower, a: np.ndarray, ncols: int | None = None):
    R = np.array(a, dtype=np.int64, copy=True)
    rows, cols = R.shape
    ncols = cols if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    binary = field.order == 2
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            R[[r, i]] = R[[i, r]]
        if not binary and R[r, c] != 1:
            R[r] = field.mul(R[r], field.inv(R[r, c]))
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            if binary:
                R[hit] ^= R[r]
            else:
                R[hit] = field.sub(R[hit], field.mul(col[hit, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rref(M: FMatrix) -> tuple[FMatrix, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns."""
    R, piv = _rref_array(M.field, M.a)
    return FMatrix._wrap(M.field, R), len(piv), piv


def rank(M: FMatrix) -> int:
    return len(_rref_array(M.field, M.a)[1])


def row_basis(M: FMatrix) -> FMatrix:
    """The nonzero rows of rref(M): a canonical basis of the row space."""
    R, piv = _rref_array(M.field, M.a)
    return FMatrix._wrap(M.field, R[: len(piv)])


def nullspace(M: FMatrix) -> FMatrix:
    """Basis (as rows) of ``{x : M @ x = 0}``."""
    field = M.field
    R, piv = _rref_array(field, M.a)
    n = M.cols
    free = [c for c in range(n) if c not in set(piv)]
    N = np.zeros((len(free), n), dtype=np.int64)
    for j, f in enumerate(free):
        N[j, f] = 1
        for i, p in enumerate(piv):
            N[j, p] = field.neg(R[i, f])
    return FMatrix._wrap(field, N)


def left_kernel(A: FMatrix) -> FMatrix:
    """Basis (as rows) of ``{u : u @ A = 0}``."""
    return nullspace(A.T)


def inverse(M: FMatrix) -> FMatrix:
    n = M.rows
    if M.cols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = np.hstack([M.a, np.eye(n, dtype=np.int64)])
    R, piv = _rref_array(M.field, aug, ncols=n)
    if len(piv) < n:
        raise NoSolution("matrix is singular")
    return FMatrix._wrap(M.field, R[:, n:])


def solution_space(A: FMatrix, b) -> tuple[np.ndarray, FMatrix]:
    """All ``m`` with ``m @ A == b``: one particular solution and a kernel basis.

    Raises :class:`NoSolution` if the system is inconsistent.
    """
    field = A.field
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    k, n = A.shape
    if b.shape[0] != n:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {n}")
    # m A = b  <=>  A^T m^T = b^T ; eliminate on [A^T | b]
    aug = np.hstack([A.a.T, b[:, None]])
    R, piv = _rref_array(field, aug, ncols=k)
    rk = len(piv)
    if np.any(R[rk:, k] != 0):
        raise NoSolution("inconsistent system")
    sol = np.zeros(k, dtype=np.int64)
    for i, p in enumerate(piv):
        sol[p] = R[i, k]
    free = [c for c in range(k) if c not in set(piv)]
    K = np.zeros((len(free), k), dtype=np.int64)
    for j, f in enumerate(free):
        K[j, f] = 1
        for i, p in enumerate(piv):
            K[j, p] = field.neg(R[i, f])
    return sol, FMatrix._wrap(field, K)


def solve_right(A: FMatrix, b, *, allow_non_unique: bool = False) -> np.ndarray:
    """Solve ``m @ A == b`` for the row vector ``m``.

    Raises :class:`NoSolution` when inconsistent and :class:`NonUnique` when
    ``rank(A) < A.rows`` (unless ``allow_non_unique``, which returns a
    particular solution).
    """
    sol, K = solution_space(A, b)
    if K.rows and not allow_non_unique:
        raise NonUnique(f"rank {A.rows - K.rows} < {A.rows}", solution=sol, kernel=K)
    return sol


def span_vectors(field: FieldTower, basis: np.ndarray, limit: int = 1 << 16) -> np.ndarray:
    """All linear combinations of the rows of ``basis`` (at most ``limit``)."""
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, basis.shape[-1] if basis.size else 0)
    r = basis.shape[0]
    total = field.order**r
    if total > limit:
        raise ValueError(f"span has {total} elements, limit is {limit}")
    coeffs = (np.arange(total, dtype=np.int64)[:, None] // field.order ** np.arange(r, dtype=np.int64)) % field.order
    return field.matmul(coeffs, basis)


# --- sampling ------------------------------------------------------------------


def random_matrix(field: FieldTower, rows: int, cols: int, seed) -> FMatrix:
    rng = make_rng(seed)
    return FMatrix._wrap(field, rng.integers(0, field.order, size=(rows, cols), dtype=np.int64))


def random_invertible(field: FieldTower, k: int, seed) -> FMatrix:
    """Uniform invertible k x k matrix by rejection sampling."""
    if k < 1:
        raise ValueError("size must be positive")
    rng = make_rng(seed)
    while True:
        M = FMatrix._wrap(field, rng.integers(0, field.order, size=(k, k), dtype=np.int64))
        if rank(M) == k:
            return M


class PermMatrix:
    """Column permutation ``x -> x @ P`` with ``(x @ P)[j] == x[perm[j]]``."""

    __slots__ = ("perm",)
    __array_ufunc__ = None

    def __init__(self, perm: Sequence[int]):
        perm = np.asarray(perm, dtype=np.int64)
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("not a permutation")
        perm.setflags(write=False)
        self.perm = perm

    @classmethod
    def identity(cls, n: int) -> PermMatrix:
        return cls(np.arange(n))

    @property
    def n(self) -> int:
        return self.perm.size

    def inverse(self) -> PermMatrix:
        return PermMatrix(np.argsort(self.perm))

    def compose(self, other: PermMatrix) -> PermMatrix:
        """The permutation ``self @ other`` (apply self first, then other)."""
        return PermMatrix(self.perm[other.perm])

    def apply(self, x):
        """``x @ P`` for a vector, array of row vectors or FMatrix."""
        if isinstance(x, FMatrix):
            return x.columns(self.perm)
        return np.asarray(x)[..., self.perm]

    def __rmatmul__(self, x):
        return self.apply(x)

    def __matmul__(self, other: PermMatrix) -> PermMatrix:
        return self.compose(other)

    def to_matrix(self, field: FieldTower) -> FMatrix:
        return FMatrix.identity(field, self.n).columns(self.perm)

    def __eq__(self, other):
        return isinstance(other, PermMatrix) and np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())

    def __repr__(self):
        return f"PermMatrix({self.perm.tolist()})"


def random_perm(n: int, seed) -> PermMatrix:
    """Uniform permutation by Fisher-Yates shuffle."""
    if n < 1:
        raise ValueError("size must be positive")
    rng = make_rng(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return PermMatrix(perm)


# --- text format -----------------------------------------------------------------
# first line "rows cols q m", then one row per line of canonical integers


def field_header(field: FieldTower) -> tuple[int, int]:
    """The ``(q, m)`` pair that :func:`make_tower` maps back to ``field``."""
    return (field.p, 1) if field.is_prime else (field.q, field.m)


def format_matrix(M: FMatrix) -> str:
    q, m = field_header(M.field)
    lines = [f"{M.rows} {M.cols} {q} {m}"]
    lines += [" ".join(str(int(x)) for x in row) for row in M.a]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str | Sequence[str]) -> FMatrix:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormatError("empty matrix text")
    try:
        rows, cols, q, m = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise FormatError(f"bad matrix header {lines[0]!r}") from exc
    field = make_tower(q, m)
    body = lines[1 : 1 + rows]
    if len(body) != rows:
        raise FormatError(f"expected {rows} rows, found {len(body)}")
    data = [[int(x) for x in ln.split()] for ln in body]
    if any(len(r) != cols for r in data):
        raise FormatError(f"expected {cols} columns in every row")
    return FMatrix(field, np.array(data, dtype=np.int64).reshape(rows, cols))

"""Linear codes and the analytics the attacks need.

Everything here is exhaustive: codewords are enumerated explicitly, so codes
must stay small (``q**k <= ENUM_CAP``).  That is deliberate.  Exhaustive
answers are exact and serve as the oracle for anything cleverer.
"""

from __future__ import annotations

import enum
import itertools
import math
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (EnumerationTooLarge, FormatError, GivesUpAfterMaxTries,
                     NoSolution, ParametersInfeasible)
from .gf import FieldTower, prime_field
from .linalg import FMatrix

ENUM_CAP = 1 << 20  # max number of vectors any single enumeration may produce


def _check_enum(count: int, what: str) -> None:
    if count > ENUM_CAP:
        raise EnumerationTooLarge(f"{what}: {count} vectors exceeds cap {ENUM_CAP}")


def all_vectors(field: FieldTower, k: int) -> np.ndarray:
    """Every vector of GF(q)^k; row ``i`` has digits of ``i`` in base q."""
    _check_enum(field.order**k, f"GF({field.order})^{k}")
    q = field.order
    idx = np.arange(q**k, dtype=np.int64)
    return (idx[:, None] // (q ** np.arange(k, dtype=np.int64))) % q


def weight(v) -> np.ndarray | int:
    """Hamming weight along the last axis."""
    w = np.count_nonzero(np.asarray(v), axis=-1)
    return int(w) if np.ndim(w) == 0 else w


class DecodeStatus(enum.Enum):
    CORRECT = "correct"
    WRONG = "wrong"
    FAILURE = "failure"
    DECODED = "decoded"  # a codeword was found but there is no ground truth to judge it


@dataclass(frozen=True)
class DecodeOutcome:
    status: DecodeStatus
    codeword: np.ndarray | None = None
    distance: int | None = None

    @property
    def failed(self) -> bool:
        return self.status is DecodeStatus.FAILURE

    def classify(self, truth) -> DecodeOutcome:
        """Re-label against the transmitted codeword."""
        if self.failed:
            return self
        ok = np.array_equal(self.codeword, np.asarray(truth))
        return DecodeOutcome(DecodeStatus.CORRECT if ok else DecodeStatus.WRONG, self.codeword, self.distance)


Decoder = Callable[["LinearCode", np.ndarray], "np.ndarray | None"]


class LinearCode:
    """A linear [n, k] code over ``field`` given by a full-rank generator.

    Codewords, weight distribution, distances and the dual are computed on
    first use and cached.  ``decoder`` is an optional algebraic BMD decoder
    ``decoder(code, r) -> codeword or None`` used by :func:`bmd_decode` at the
    default radius.
    """

    def __init__(self, generator: FMatrix, name: str = "linear", decoder: Decoder | None = None,
                 *, d: int | None = None, d_dual: int | None = None, check: bool = True):
        if check and generator.rows and linalg.rank(generator) != generator.rows:
            raise ValueError("generator matrix is not full rank; use LinearCode.span")
        self.generator = generator
        self.name = name
        self.decoder = decoder
        self._lock = threading.RLock()
        self._codewords: np.ndarray | None = None
        self._d = d
        self._d_dual = d_dual
        self._dual: LinearCode | None = None
        self._wd: dict[int, int] | None = None

    @classmethod
    def span(cls, M: FMatrix, name: str = "span") -> LinearCode:
        """The code spanned by the rows of ``M`` (any rank)."""
        return cls(linalg.row_basis(M), name, check=False)

    @classmethod
    def zero(cls, field: FieldTower, n: int) -> LinearCode:
        return cls(FMatrix.zeros(field, 0, n), "zero", check=False)

    @property
    def field(self) -> FieldTower:
        return self.generator.field

    @property
    def n(self) -> int:
        return self.generator.cols

    @property
    def k(self) -> int:
        return self.generator.rows

    def __repr__(self):
        return f"LinearCode({self.name}, GF({self.field.order}); n={self.n}, k={self.k})"

    def encode(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        if self.k == 0:
            return np.zeros(m.shape[:-1] + (self.n,), dtype=np.int64)
        return self.field.matmul(m, self.generator.a)

    def message_of(self, c) -> np.ndarray:
        """Information vector of a codeword (raises NoSolution for non-codewords)."""
        return linalg.solve_right(self.generator, c)

    def contains(self, v) -> np.ndarray | bool:
        v = np.asarray(v, dtype=np.int64)
        H = self.dual().generator
        if H.rows == 0:
            return True if v.ndim == 1 else np.ones(v.shape[0], dtype=bool)
        s = self.field.matmul(v, H.a.T)
        out = ~np.any(s, axis=-1)
        return bool(out) if np.ndim(out) == 0 else out

    def codewords(self) -> np.ndarray:
        """All q^k codewords, row ``i`` encoding the message with index ``i``."""
        if self._codewords is None:
            with self._lock:
                if self._codewords is None:
                    cw = self.encode(all_vectors(self.field, self.k))
                    cw.setflags(write=False)
                    self._codewords = cw
        return self._codewords

    def codeword_set(self) -> set[tuple[int, ...]]:
        return {tuple(map(int, c)) for c in self.codewords()}

    def weight_distribution(self) -> dict[int, int]:
        if self._wd is None:
            with self._lock:
                if self._wd is None:
                    self._wd = dict(sorted(Counter(weight(self.codewords()).tolist()).items()))
        return self._wd

    @property
    def d(self) -> int:
        """Minimum distance; ``n + 1`` for the zero code."""
        if self._d is None:
            with self._lock:
                if self._d is None:
                    nz = [w for w in self.weight_distribution() if w > 0]
                    self._d = min(nz) if nz else self.n + 1
        return self._d

    def dual(self) -> LinearCode:
        if self._dual is None:
            with self._lock:
                if self._dual is None:
                    H = linalg.nullspace(self.generator) if self.k else FMatrix.identity(self.field, self.n)
                    dual = LinearCode(H, f"dual({self.name})", check=False, d=self._d_dual, d_dual=self._d)
                    dual._dual = self
                    self._dual = dual
        return self._dual

    @property
    def d_dual(self) -> int:
        if self._d_dual is None:
            self._d_dual = self.dual().d
        return self._d_dual

    def same_code(self, other: LinearCode) -> bool:
        return (self.field == other.field and self.n == other.n
                and linalg.row_basis(self.generator) == linalg.row_basis(other.generator))

    def permuted(self, perm: linalg.PermMatrix) -> LinearCode:
        return LinearCode(perm.apply(self.generator), f"{self.name}*P", check=False, d=self._d, d_dual=self._d_dual)


def dual(C: LinearCode) -> LinearCode:
    return C.dual()


def distances(C: LinearCode) -> tuple[int, int]:
    """``(d, d_dual)`` by exhaustive enumeration; ``n + 1`` stands for a trivial code."""
    return C.d, C.d_dual


def signature(C: LinearCode, i: int) -> dict[int, int]:
    """Weight histogram of the multiset of codewords of ``C`` punctured at ``i``."""
    if not 0 <= i < C.n:
        raise IndexError(f"position {i} outside 0..{C.n - 1}")
    cw = C.codewords()
    w = weight(cw) - (cw[:, i] != 0)
    return dict(sorted(Counter(w.tolist()).items()))


def signatures(C: LinearCode) -> list[tuple[tuple[int, int], ...]]:
    """Hashable signatures of every position."""
    cw = C.codewords()
    total = weight(cw)
    out = []
    for i in range(C.n):
        out.append(tuple(sorted(Counter((total - (cw[:, i] != 0)).tolist()).items())))
    return out


# --- decoding -----------------------------------------------------------------------


def nearest_codewords(C: LinearCode, R: np.ndarray, chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """For each row of ``R``: index of a nearest codeword and its distance.

    Ties are broken towards the smallest codeword index.
    """
    R = np.atleast_2d(np.asarray(R, dtype=np.int64))
    cw = C.codewords()
    idx = np.empty(R.shape[0], dtype=np.int64)
    dist = np.empty(R.shape[0], dtype=np.int64)
    if C.field.order == 2 and C.n <= 63:
        # packed bit vectors: one XOR + popcount per pair
        weights = np.int64(1) << np.arange(C.n, dtype=np.int64)
        cp, rp = cw @ weights, R @ weights
        for s in range(0, R.shape[0], chunk):
            d = np.bitwise_count(rp[s : s + chunk, None] ^ cp[None, :]).astype(np.int64)
            idx[s : s + chunk] = d.argmin(axis=1)
            dist[s : s + chunk] = d.min(axis=1)
        return idx, dist
    step = max(1, chunk // max(1, C.n))
    for s in range(0, R.shape[0], step):
        d = np.count_nonzero(R[s : s + step, None, :] != cw[None, :, :], axis=2)
        idx[s : s + step] = d.argmin(axis=1)
        dist[s : s + step] = d.min(axis=1)
    return idx, dist


def bmd_decode(C: LinearCode, r, radius: int | None = None, truth=None) -> DecodeOutcome:
    """Bounded-distance decoding: the codeword within ``radius`` of ``r`` or Failure.

    ``radius`` defaults to ``(d - 1) // 2``, where the answer is unique.  The
    code's algebraic decoder is used at that default radius when present;
    otherwise the search is exhaustive.
    """
    r = np.asarray(r, dtype=np.int64)
    if radius is None:
        radius = (C.d - 1) // 2
    if C.decoder is not None and radius == (C.d - 1) // 2:
        c = C.decoder(C, r)
        if c is None or weight(c != r) > radius:
            out = DecodeOutcome(DecodeStatus.FAILURE)
        else:
            out = DecodeOutcome(DecodeStatus.DECODED, np.asarray(c, dtype=np.int64), weight(c != r))
    else:
        i, dist = nearest_codewords(C, r[None, :])
        if dist[0] > radius:
            out = DecodeOutcome(DecodeStatus.FAILURE)
        else:
            out = DecodeOutcome(DecodeStatus.DECODED, C.codewords()[i[0]].copy(), int(dist[0]))
    return out if truth is None else out.classify(truth)


# --- supports ------------------------------------------------------------------------


def _low_weight_by_codewords(C: LinearCode, bound: int) -> np.ndarray:
    cw = C.codewords()
    w = weight(cw)
    return cw[(w > 0) & (w < bound)]


def _low_weight_by_vectors(C: LinearCode, bound: int) -> np.ndarray:
    """Codewords of weight < bound found by testing every low-weight vector."""
    field, n = C.field, C.n
    q = field.order
    H = C.dual().generator.a
    scal = np.arange(1, q, dtype=np.int64)
    found = []
    for w in range(1, bound):
        # first nonzero symbol fixed to 1: one representative per scalar class
        vals = np.array([(1,) + t for t in itertools.product(range(1, q), repeat=w - 1)], dtype=np.int64)
        step = max(1, ENUM_CAP // (vals.shape[0] * n))
        for sup in _batched(itertools.combinations(range(n), w), step):
            sup = np.array(sup, dtype=np.int64)
            V = np.zeros((sup.shape[0], vals.shape[0], n), dtype=np.int64)
            V[np.arange(sup.shape[0])[:, None, None], np.arange(vals.shape[0])[None, :, None], sup[:, None, :]] = vals[None]
            V = V.reshape(-1, n)
            if H.shape[0]:
                V = V[~np.any(field.matmul(V, H.T), axis=1)]
            if V.size:
                found.append(field.mul(scal[:, None, None], V[None, :, :]).reshape(-1, n))
    return np.vstack(found) if found else np.zeros((0, n), dtype=np.int64)


def _batched(it, size):
    it = iter(it)
    while chunk := list(itertools.islice(it, size)):
        yield chunk


def low_weight_codewords(C: LinearCode, bound: int) -> np.ndarray:
    """All nonzero codewords of weight < ``bound``.

    Uses whichever is cheaper: enumerating the q^k codewords, or enumerating
    the vectors of weight < bound and keeping those in the code.
    """
    if bound <= 1:
        return np.zeros((0, C.n), dtype=np.int64)
    q, n = C.field.order, C.n
    by_cw = q**C.k
    by_vec = sum(math.comb(n, w) * (q - 1) ** max(0, w - 1) for w in range(1, bound))
    if by_cw <= ENUM_CAP and by_cw <= by_vec:
        return _low_weight_by_codewords(C, bound)
    _check_enum(by_vec, "low-weight vectors")
    return _low_weight_by_vectors(C, bound)


def minimal_support_codewords(C: LinearCode, weight_bound: int) -> np.ndarray:
    """Minimal-support codewords of weight < ``weight_bound``, one per support.

    A nonzero codeword is minimal if no other nonzero codeword has a support
    strictly inside its own.  Any such smaller codeword is itself below the
    bound, so filtering the low-weight words against each other is exact.
    The representative kept per support has its first nonzero symbol equal to 1.
    Rows are sorted by weight, then by support.
    """
    words = low_weight_codewords(C, weight_bound)
    if words.shape[0] == 0:
        return words
    first = words[np.arange(words.shape[0]), np.argmax(words != 0, axis=1)]
    words = words[first == 1]
    S = (words != 0).astype(np.int64)
    _, keep = np.unique(S, axis=0, return_index=True)
    words, S = words[keep], S[keep]
    wt = S.sum(axis=1)
    minimal = np.ones(words.shape[0], dtype=bool)
    step = 2048
    for s in range(0, S.shape[0], step):
        inter = S[s : s + step] @ S.T  # inter[a, b] = |supp a & supp b|
        # b strictly inside a  <=>  |a & b| == wt(b) < wt(a)
        sub = (inter == wt[None, :]) & (wt[None, :] < wt[s : s + step, None])
        minimal[s : s + step] = ~sub.any(axis=1)
    words, S = words[minimal], S[minimal]
    order = sorted(range(words.shape[0]), key=lambda i: (int(S[i].sum()), tuple(-S[i])))
    return words[order]


def connected_components(words, n: int) -> list[list[int]]:
    """Union-find over supports; only positions covered by some word appear.

    Components are sorted lists, ordered by their smallest position.
    """
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    covered = set()
    for w in words:
        sup = np.flatnonzero(np.asarray(w))
        covered.update(sup.tolist())
        for j in sup[1:]:
            a, b = find(int(sup[0])), find(int(j))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in sorted(covered):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


# --- Reed-Solomon ------------------------------------------------------------------------


def _poly_eval(field: FieldTower, coeffs, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    for c in reversed(list(coeffs)):
        out = field.add(field.mul(out, x), int(c))
    return out


def _poly_divmod(field: FieldTower, num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = [int(c) for c in num]
    while len(den) > 1 and den[-1] == 0:
        den = den[:-1]
    if not den or den[-1] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = int(field.inv(den[-1]))
    dd = len(den) - 1
    quot = [0] * max(1, len(num) - dd)
    for deg in range(len(num) - 1, dd - 1, -1):
        c = int(field.mul(num[deg], lead_inv))
        if c == 0:
            continue
        quot[deg - dd] = c
        for j in range(dd + 1):
            num[deg - dd + j] = int(field.sub(num[deg - dd + j], field.mul(c, den[j])))
    return quot, num[:dd] if dd else [0]


class RSDecoder:
    """Berlekamp-Welch decoder for a generalised Reed-Solomon code."""

    def __init__(self, points: np.ndarray, multipliers: np.ndarray, k: int):
        self.points, self.multipliers, self.k = points, multipliers, k

    def __call__(self, C: LinearCode, r) -> np.ndarray | None:
        field = C.field
        n, k = C.n, self.k
        x = self.points
        y = field.div(np.asarray(r, dtype=np.int64), self.multipliers)
        e = (n - k) // 2
        # unknowns: Q_0..Q_{e+k-1}, E_0..E_{e-1}; E monic of degree e
        rows = [field.power(x, i) for i in range(e + k)]
        rows += [field.neg(field.mul(y, field.power(x, i))) for i in range(e)]
        A = FMatrix._wrap(field, np.array(rows, dtype=np.int64).reshape(e + k + e, n))
        b = field.mul(y, field.power(x, e))
        try:
            sol, _ = linalg.solution_space(A, b)
        except NoSolution:
            return None
        Q = sol[: e + k].tolist()
        E = sol[e + k :].tolist() + [1]
        P, rem = _poly_divmod(field, Q, E)
        if any(rem):
            return None
        P = (P + [0] * k)[:k]
        if len(P) > k:
            return None
        c = field.mul(_poly_eval(field, P, x), self.multipliers)
        return c if weight(c != np.asarray(r)) <= e else None


def rs_code(n: int, k: int, field: FieldTower, points=None, multipliers=None) -> LinearCode:
    """Generalised Reed-Solomon code ``{(v_j f(x_j))_j : deg f < k}``.

    Default points are ``1, a, a^2, ...`` for a primitive ``a`` when
    ``n <= q - 1``, and every field element (0 first) when ``n == q``.
    """
    q = field.order
    if not 1 <= k <= n:
        raise ParametersInfeasible(f"need 1 <= k <= n, got n={n}, k={k}")
    if points is None:
        if n <= q - 1:
            a, pts = field.primitive_element, [1]
            while len(pts) < n:
                pts.append(int(field.mul(pts[-1], a)))
            points = pts
        elif n == q:
            points = np.arange(q, dtype=np.int64)
        else:
            raise ParametersInfeasible(f"RS length {n} exceeds field size {q}")
    points = np.asarray(points, dtype=np.int64)
    if points.size != n or np.unique(points).size != n:
        raise ParametersInfeasible("evaluation points must be n distinct field elements")
    multipliers = np.ones(n, dtype=np.int64) if multipliers is None else np.asarray(multipliers, dtype=np.int64)
    if np.any(multipliers == 0):
        raise ParametersInfeasible("column multipliers must be nonzero")
    G = np.array([field.mul(multipliers, field.power(points, i)) for i in range(k)], dtype=np.int64)
    return LinearCode(FMatrix(field, G), f"RS({n},{k})", RSDecoder(points, multipliers, k),
                      d=n - k + 1, d_dual=k + 1 if k < n else n + 1, check=False)


# --- small families -----------------------------------------------------------------------


def repetition_code(n: int, field: FieldTower | None = None) -> LinearCode:
    field = field or prime_field(2)
    return LinearCode(FMatrix(field, np.ones((1, n), dtype=np.int64)), f"rep({n})", d=n)


def parity_code(n: int, field: FieldTower | None = None) -> LinearCode:
    """The [n, n-1, 2] single-parity-check code."""
    field = field or prime_field(2)
    G = np.hstack([np.eye(n - 1, dtype=np.int64), np.broadcast_to(field.neg(1), (n - 1, 1))])
    return LinearCode(FMatrix(field, G), f"parity({n})")


def full_space(n: int, field: FieldTower | None = None) -> LinearCode:
    field = field or prime_field(2)
    return LinearCode(FMatrix.identity(field, n), f"full({n})", d=1, d_dual=n + 1)


def hamming_code(r: int = 3) -> LinearCode:
    """Binary [2^r - 1, 2^r - 1 - r, 3] Hamming code in systematic form."""
    n = 2**r - 1
    cols = [c for c in range(1, n + 1) if c & (c - 1)]  # non-unit columns of H
    A = np.array([[(c >> b) & 1 for b in range(r)] for c in cols], dtype=np.int64)
    G = np.hstack([np.eye(n - r, dtype=np.int64), A])
    return LinearCode(FMatrix(prime_field(2), G), f"hamming({r})")


def random_code_with_distance(field: FieldTower, n: int, k: int, dmin: int, seed,
                              max_tries: int = 10_000) -> LinearCode:
    """Rejection-sample full-rank generators until the exhaustive distance is >= dmin."""
    _check_enum(field.order**k, f"random [{n},{k}] code")
    rng = linalg.make_rng(seed)
    msgs = all_vectors(field, k)[1:]
    for _ in range(max_tries):
        G = FMatrix._wrap(field, rng.integers(0, field.order, size=(k, n), dtype=np.int64))
        if linalg.rank(G) < k:
            continue
        w = weight(field.matmul(msgs, G.a)).min() if k else n + 1
        if w >= dmin:
            return LinearCode(G, f"random[{n},{k},{dmin}]", check=False, d=int(w))
    raise GivesUpAfterMaxTries(f"no [{n},{k},>={dmin}] code found in {max_tries} draws")


def lemma2_check(C: LinearCode, r: int) -> bool:
    """True iff every choice of ``r`` columns shows every r-tuple exactly q^(k-r) times."""
    if r == 0:
        return True
    if r > C.n:
        return False
    q = C.field.order
    if r > C.k:
        return False
    expected = q ** (C.k - r)
    cw = C.codewords()
    place = q ** np.arange(r, dtype=np.int64)
    for cols in itertools.combinations(range(C.n), r):
        counts = np.bincount(cw[:, cols] @ place, minlength=q**r)
        if np.any(counts != expected):
            return False
    return True


# --- text format --------------------------------------------------------------------------


def format_code(C: LinearCode) -> str:
    return f"code {C.name}\n" + linalg.format_matrix(C.generator)


def parse_code(text: str) -> LinearCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("code"):
        raise FormatError("code text must start with a 'code <family>' line")
    name = lines[0][4:].strip() or "linear"
    return LinearCode(linalg.parse_matrix(lines[1:]), name)


def codeword_set_of(words: Iterable[Sequence[int]]) -> set[tuple[int, ...]]:
    return {tuple(int(x) for x in w) for w in words}

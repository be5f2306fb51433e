"""Ordinary and generalised concatenated codes.

A GC code is described by

* an inner code B over GF(q) with a nested chain B = B^(0) > B^(1) > ... > B^(l) = {0},
  stored as a matrix ``theta`` whose rows are grouped by level: the rows of
  levels i..l span B^(i-1), and the k^(i) rows of level i pick a coset of
  B^(i) inside B^(i-1);
* one outer code A^(i) over GF(q^{k^(i)}) per level, all of length n_A.

Block b of a codeword is ``sum_i ext(a^(i)_b) @ theta_i``, where ``ext`` writes
an element of GF(q^{k^(i)}) in the polynomial basis over GF(q).  One level gives
an ordinary concatenated code.

Flat messages over GF(q) are laid out level-major, then by outer information
symbol, then by ext digit.  :func:`gcc_generator` and :func:`gcc_encode` agree
on this layout exactly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import codes, linalg
from .codes import ENUM_CAP, DecodeStatus, LinearCode, all_vectors
from .errors import (DimensionMismatch, EnumerationTooLarge, FieldMismatch, FormatError,
                     NotApplicable, ThetaNotInjective)
from .gf import FieldTower, make_tower
from .linalg import FMatrix


def level_field(inner: FieldTower, k: int) -> FieldTower:
    """GF(q^k) as a degree-k tower over the inner field GF(q)."""
    return inner if k == 1 else make_tower(inner.order, k)


def _ext(F: FieldTower, k: int, vals) -> np.ndarray:
    """Coordinates over GF(q) of GF(q^k) symbols; appends an axis of length k."""
    vals = np.asarray(vals, dtype=np.int64)
    return vals[..., None] if k == 1 else F.to_digits(vals)


def _unext(F: FieldTower, k: int, digits) -> np.ndarray:
    digits = np.asarray(digits, dtype=np.int64)
    return digits[..., 0] if k == 1 else F.from_digit_array(digits)


class PartitionTree:
    """A chain of nested subcodes given by a level-grouped basis ``theta``."""

    def __init__(self, theta: FMatrix, level_dims: Sequence[int]):
        level_dims = tuple(int(k) for k in level_dims)
        if any(k < 1 for k in level_dims) or sum(level_dims) != theta.rows:
            raise DimensionMismatch(f"level dimensions {level_dims} do not add up to {theta.rows} rows")
        if linalg.rank(theta) != theta.rows:
            raise ThetaNotInjective("theta rows are linearly dependent")
        self.theta = theta
        self.level_dims = level_dims
        self._level_words: dict[int, tuple[np.ndarray, int]] = {}

    @classmethod
    def from_chain(cls, chain: Sequence[FMatrix | LinearCode]) -> PartitionTree:
        """Adapted basis for B^(0) > B^(1) > ... (a trailing {0} may be omitted).

        Each level's rows are chosen greedily from the RREF basis of the larger
        code, so the construction is deterministic.
        """
        mats = [c.generator if isinstance(c, LinearCode) else c for c in chain]
        mats = [m for m in mats if m.rows and linalg.rank(m)]
        if not mats:
            raise DimensionMismatch("empty chain")
        field, n = mats[0].field, mats[0].cols
        cur = np.zeros((0, n), dtype=np.int64)
        levels = []
        for M in reversed(mats):
            target = linalg.row_basis(M).a
            if linalg.rank(FMatrix._wrap(field, np.vstack([cur, target]))) != target.shape[0]:
                raise DimensionMismatch("chain is not nested")
            new = []
            for row in target:
                trial = np.vstack([cur] + new + [row[None]])
                if linalg.rank(FMatrix._wrap(field, trial)) == trial.shape[0]:
                    new.append(row[None])
            if not new:
                raise DimensionMismatch("chain is not strictly decreasing")
            levels.append(np.vstack(new))
            cur = np.vstack([cur] + new)
        levels.reverse()
        theta = FMatrix._wrap(field, np.vstack(levels))
        return cls(theta, [lv.shape[0] for lv in levels])

    @property
    def field(self) -> FieldTower:
        return self.theta.field

    @property
    def n_B(self) -> int:
        return self.theta.cols

    @property
    def k_B(self) -> int:
        return self.theta.rows

    @property
    def ell(self) -> int:
        return len(self.level_dims)

    def offsets(self) -> list[int]:
        return [sum(self.level_dims[:i]) for i in range(self.ell + 1)]

    def level_rows(self, i: int) -> np.ndarray:
        """Rows of level ``i`` (0-based)."""
        o = self.offsets()
        return self.theta.a[o[i] : o[i + 1]]

    def subcode(self, i: int) -> LinearCode:
        """B^(i) for 0 <= i <= l."""
        o = self.offsets()
        if i == self.ell:
            return LinearCode.zero(self.field, self.n_B)
        return LinearCode(FMatrix._wrap(self.field, self.theta.a[o[i] :]), f"B^({i})", check=False)

    def inner_code(self) -> LinearCode:
        return self.subcode(0)

    @property
    def level_distances(self) -> tuple[int, ...]:
        """d^(i) = minimum distance of B^(i-1), for i = 1..l."""
        return tuple(self.subcode(i).d for i in range(self.ell))

    def level_words(self, i: int) -> tuple[np.ndarray, int]:
        """All words of B^(i) (0-based level ``i``) and the number of level-i labels.

        Word ``w`` has level-i label ``w % q**k_i`` (the label's integer is its
        digit vector read base q, which is also its value in GF(q^{k_i})).
        """
        if i not in self._level_words:
            o = self.offsets()
            rows = self.theta.a[o[i] :]
            words = self.field.matmul(all_vectors(self.field, rows.shape[0]), rows)
            words.setflags(write=False)
            self._level_words[i] = (words, self.field.order ** self.level_dims[i])
        return self._level_words[i]

    def _key(self):
        return (self.theta, self.level_dims)

    def __eq__(self, other):
        return isinstance(other, PartitionTree) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"PartitionTree(n_B={self.n_B}, dims={self.level_dims})"


class GcSpec:
    """A validated GC code: partition tree(s) plus one outer code per level.

    ``block_trees`` (one tree per inner block) gives the variant where block i
    uses its own map theta_i; otherwise every block uses ``tree``.
    """

    def __init__(self, tree: PartitionTree, outers: Sequence[LinearCode],
                 block_trees: Sequence[PartitionTree] | None = None, *, validate: bool = True):
        self.tree = tree
        self.outers = list(outers)
        self.block_trees = list(block_trees) if block_trees is not None else None
        if validate:
            self._validate()
        self._generator: FMatrix | None = None
        self._code: LinearCode | None = None

    def _validate(self):
        tree = self.tree
        if len(self.outers) != tree.ell:
            raise DimensionMismatch(f"{tree.ell} levels but {len(self.outers)} outer codes")
        n_A = {A.n for A in self.outers}
        if len(n_A) != 1:
            raise DimensionMismatch(f"outer codes have different lengths {sorted(n_A)}")
        for i, (A, k) in enumerate(zip(self.outers, tree.level_dims)):
            F = A.field
            if F.order != tree.field.order**k or (k == 1 and F != tree.field) or (k > 1 and F.base != tree.field):
                raise FieldMismatch(f"level {i + 1} needs an outer code over GF({tree.field.order}^{k}), got {F}")
        if self.block_trees is not None:
            if len(self.block_trees) != self.n_A:
                raise DimensionMismatch(f"{len(self.block_trees)} block maps for {self.n_A} blocks")
            for t in self.block_trees:
                if t.n_B != tree.n_B or t.level_dims != tree.level_dims or t.field != tree.field:
                    raise DimensionMismatch("block maps must share n_B, field and level dimensions")

    # parameters ---------------------------------------------------------------------
    @property
    def field(self) -> FieldTower:
        return self.tree.field

    @property
    def ell(self) -> int:
        return self.tree.ell

    @property
    def n_A(self) -> int:
        return self.outers[0].n

    @property
    def n_B(self) -> int:
        return self.tree.n_B

    @property
    def k_B(self) -> int:
        return self.tree.k_B

    @property
    def level_dims(self) -> tuple[int, ...]:
        return self.tree.level_dims

    @property
    def n(self) -> int:
        return self.n_A * self.n_B

    @property
    def k(self) -> int:
        """Dimension over GF(q): sum of k^(i) * k_A^(i)."""
        return sum(k * A.k for k, A in zip(self.level_dims, self.outers))

    @property
    def inner(self) -> LinearCode:
        return self.tree.inner_code()

    def trees(self) -> list[PartitionTree]:
        return self.block_trees if self.block_trees is not None else [self.tree] * self.n_A

    def inner_codes(self) -> list[LinearCode]:
        return [t.inner_code() for t in self.trees()]

    def blocks(self) -> list[list[int]]:
        """Column indices of each inner block in the unpermuted layout."""
        return [list(range(b * self.n_B, (b + 1) * self.n_B)) for b in range(self.n_A)]

    def __repr__(self):
        kind = "OCC" if self.ell == 1 else "GCC"
        return f"{kind}(q={self.field.order}; n={self.n}, k={self.k}; n_A={self.n_A}, n_B={self.n_B}, dims={self.level_dims})"


def build_gcc(inner: LinearCode, tree: PartitionTree, outers: Sequence[LinearCode]) -> GcSpec:
    """Validate and assemble a GC code (one level gives an OC code)."""
    if tree.field != inner.field or tree.n_B != inner.n:
        raise DimensionMismatch("partition tree and inner code disagree on field or length")
    if tree.k_B != inner.k or not tree.inner_code().same_code(inner):
        raise DimensionMismatch("theta does not span the inner code")
    return GcSpec(tree, outers)


def build_justesen_variant(spec: GcSpec, per_block_trees: Sequence[PartitionTree]) -> GcSpec:
    """Same outer codes, but block i is mapped by its own theta_i."""
    return GcSpec(spec.tree, spec.outers, per_block_trees)


# --- encoding ----------------------------------------------------------------------------


def flatten_message(spec: GcSpec, message: Sequence) -> np.ndarray:
    parts = []
    for k, A, m in zip(spec.level_dims, spec.outers, message):
        m = np.asarray(m, dtype=np.int64).reshape(-1)
        if m.size != A.k:
            raise DimensionMismatch(f"level message has length {m.size}, expected {A.k}")
        parts.append(_ext(A.field, k, m).reshape(-1))
    if len(parts) != spec.ell:
        raise DimensionMismatch(f"message has {len(parts)} levels, expected {spec.ell}")
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def unflatten_message(spec: GcSpec, flat) -> list[np.ndarray]:
    flat = np.asarray(flat, dtype=np.int64).reshape(-1)
    if flat.size != spec.k:
        raise DimensionMismatch(f"flat message has length {flat.size}, expected {spec.k}")
    out, pos = [], 0
    for k, A in zip(spec.level_dims, spec.outers):
        chunk = flat[pos : pos + k * A.k].reshape(A.k, k)
        out.append(_unext(A.field, k, chunk))
        pos += k * A.k
    return out


def _apply_theta(spec: GcSpec, outer_words: Sequence[np.ndarray]) -> np.ndarray:
    """Block words from outer codewords; ``outer_words[i]`` has shape (..., n_A)."""
    labels = np.concatenate([_ext(A.field, k, a) for k, A, a in zip(spec.level_dims, spec.outers, outer_words)],
                            axis=-1)  # (..., n_A, k_B)
    F = spec.field
    trees = spec.trees()
    if spec.block_trees is None:
        blocks = F.matmul(labels, spec.tree.theta.a)
    else:
        blocks = np.stack([F.matmul(labels[..., b, :], trees[b].theta.a) for b in range(spec.n_A)], axis=-2)
    return blocks.reshape(blocks.shape[:-2] + (spec.n,))


def gcc_encode(spec: GcSpec, message: Sequence) -> np.ndarray:
    """Outer-encode each level, then map every position through theta."""
    if len(message) != spec.ell:
        raise DimensionMismatch(f"message has {len(message)} levels, expected {spec.ell}")
    words = []
    for A, m in zip(spec.outers, message):
        m = np.asarray(m, dtype=np.int64).reshape(-1)
        if m.size != A.k:
            raise DimensionMismatch(f"level message has length {m.size}, expected {A.k}")
        words.append(A.encode(m))
    return _apply_theta(spec, words)


def gcc_generator(spec: GcSpec) -> FMatrix:
    """k x n generator over GF(q) in the flat message layout."""
    if spec._generator is None:
        rows = []
        for i, (k, A) in enumerate(zip(spec.level_dims, spec.outers)):
            F = A.field
            for s in range(A.k):
                for t in range(k):
                    x_t = 1 if k == 1 else spec.field.order**t
                    msgs = [np.zeros(B.k, dtype=np.int64) for B in spec.outers]
                    msgs[i][s] = x_t
                    rows.append(gcc_encode(spec, msgs))
        G = np.array(rows, dtype=np.int64).reshape(len(rows), spec.n)
        spec._generator = FMatrix._wrap(spec.field, G)
    return spec._generator


def gcc_code(spec: GcSpec) -> LinearCode:
    if spec._code is None:
        spec._code = LinearCode(gcc_generator(spec), repr(spec), check=False)
    return spec._code


# --- multistage decoding -----------------------------------------------------------------


@dataclass
class MultistageResult:
    status: DecodeStatus
    message: list[np.ndarray] | None = None
    flat: np.ndarray | None = None
    codeword: np.ndarray | None = None
    failed_stage: int | None = None
    stage_costs: list[int] = dc_field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.status is DecodeStatus.FAILURE


def _stage_costs(spec: GcSpec, y: np.ndarray, j: int) -> np.ndarray:
    """cost[b, label] = distance from block b of ``y`` to the level-j coset ``label``."""
    cost = np.empty((spec.n_A, spec.field.order ** spec.level_dims[j]), dtype=np.int64)
    trees = spec.trees()
    for b in range(spec.n_A):
        words, nlab = trees[b].level_words(j)
        dist = np.count_nonzero(words != y[b][None, :], axis=1)
        cost[b] = dist.reshape(-1, nlab).min(axis=0)
    return cost


def _outer_ml(A: LinearCode, cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Outer codeword minimising the summed block costs: (message, codeword, cost)."""
    cw = A.codewords()
    total = np.zeros(cw.shape[0], dtype=np.int64)
    for b in range(A.n):
        total += cost[b, cw[:, b]]
    best = int(total.argmin())
    q = A.field.order
    msg = (best // q ** np.arange(A.k, dtype=np.int64)) % q
    return msg, cw[best].copy(), int(total[best])


def gcc_decode_multistage(spec: GcSpec, received, ground_truth=None) -> MultistageResult:
    """Hard-decision multistage decoding.

    Stage j measures, for every block, the distance to each coset of B^(j) in
    B^(j-1), finds the outer codeword of A^(j) with the smallest total
    distance, declares Failure if that exceeds (d_A^(j) d^(j) - 1) // 2, and
    otherwise subtracts the level-j contribution before moving on.  The
    search is exhaustive over the outer code; when the outer code is too
    large to enumerate, blocks are hard-decided and the outer code's own BMD
    decoder is used instead.

    ``ground_truth`` (the transmitted codeword) turns DECODED into CORRECT or WRONG.
    """
    F = spec.field
    r = np.asarray(received, dtype=np.int64).reshape(-1)
    if r.size != spec.n:
        raise DimensionMismatch(f"received word has length {r.size}, expected {spec.n}")
    y = r.reshape(spec.n_A, spec.n_B).copy()
    trees = spec.trees()
    message, costs = [], []
    dists = [min(t.level_distances[j] for t in set(trees)) for j in range(spec.ell)]
    for j, (k, A) in enumerate(zip(spec.level_dims, spec.outers)):
        cost = _stage_costs(spec, y, j)
        limit = (A.d * dists[j] - 1) // 2
        if A.field.order**A.k <= ENUM_CAP:
            msg, a, total = _outer_ml(A, cost)
        else:
            hard = cost.argmin(axis=1)
            out = codes.bmd_decode(A, hard)
            if out.failed:
                return MultistageResult(DecodeStatus.FAILURE, failed_stage=j, stage_costs=costs)
            a = out.codeword
            msg = A.message_of(a)
            total = int(cost[np.arange(spec.n_A), a].sum())
        costs.append(total)
        if total > limit:
            return MultistageResult(DecodeStatus.FAILURE, failed_stage=j, stage_costs=costs)
        message.append(msg)
        digits = _ext(A.field, k, a)  # (n_A, k)
        for b in range(spec.n_A):
            y[b] = F.sub(y[b], F.matmul(digits[b], trees[b].level_rows(j)))
    codeword = F.sub(r, y.reshape(-1))
    status = DecodeStatus.DECODED
    if ground_truth is not None:
        ok = np.array_equal(codeword, np.asarray(ground_truth, dtype=np.int64).reshape(-1))
        status = DecodeStatus.CORRECT if ok else DecodeStatus.WRONG
    return MultistageResult(status, message, flatten_message(spec, message), codeword, None, costs)


# --- structural checks ---------------------------------------------------------------------


def min_distance_bound(spec: GcSpec) -> int:
    """min over levels j of d_A^(j) * d(B^(j-1)), taking the worst block map."""
    trees = set(spec.trees())
    return min(A.d * min(t.level_distances[j] for t in trees) for j, A in enumerate(spec.outers))


def occ_equivalence_check(spec: GcSpec) -> bool:
    """With equal level dimensions: the code is an OC code iff all outer codes coincide."""
    if len(set(spec.level_dims)) != 1:
        raise NotApplicable(f"level dimensions {spec.level_dims} differ")
    first = spec.outers[0]
    return all(first.same_code(A) for A in spec.outers[1:])


def _label_words(spec: GcSpec) -> np.ndarray:
    """All tuples (a^(1), ..., a^(l)) as per-block label vectors, shape (N, n_A, k_B)."""
    total = 1
    for A in spec.outers:
        total *= A.field.order**A.k
    if total > ENUM_CAP:
        raise EnumerationTooLarge(f"{total} outer tuples")
    per_level = [_ext(A.field, k, A.codewords()) for k, A in zip(spec.level_dims, spec.outers)]
    out = []
    for combo in itertools.product(*[range(p.shape[0]) for p in per_level]):
        out.append(np.concatenate([p[c] for p, c in zip(per_level, combo)], axis=-1))
    return np.array(out, dtype=np.int64)


def _invertible_matrices(field: FieldTower, k: int, cap: int = 1 << 16):
    q = field.order
    if q ** (k * k) > cap:
        raise EnumerationTooLarge(f"GL({k}, {q}) enumeration too large")
    for v in all_vectors(field, k * k):
        M = FMatrix._wrap(field, v.reshape(k, k))
        if linalg.rank(M) == k:
            yield M


def occ_linearity_oracle(spec: GcSpec) -> bool:
    """Brute force: is some relabelling of the blocks a GF(q^{k_B})-linear code?

    Every F_q-linear bijection between GF(q)^{k_B} and GF(q^{k_B}) is tried:
    block labels u become elements with coordinates ``u @ M``, and the
    resulting set of length-n_A vectors is tested for closure under
    multiplication by a primitive element.
    """
    F = spec.field
    big = level_field(F, spec.k_B)
    alpha = big.primitive_element
    words = _label_words(spec)  # (N, n_A, k_B)
    N = words.shape[0]
    q = F.order
    place = q ** np.arange(spec.n_A * spec.k_B, dtype=np.int64) if spec.n_A * spec.k_B < 40 else None
    for M in _invertible_matrices(F, spec.k_B):
        Minv = linalg.inverse(M).a
        elems = _unext(big, spec.k_B, F.matmul(words, M.a))  # (N, n_A)
        scaled = big.mul(elems, alpha)
        back = F.matmul(_ext(big, spec.k_B, scaled), Minv)  # (N, n_A, k_B)
        if place is not None:
            have = set((words.reshape(N, -1) @ place).tolist())
            ok = all(x in have for x in (back.reshape(N, -1) @ place).tolist())
        else:
            have = {w.tobytes() for w in words.reshape(N, -1)}
            ok = all(w.tobytes() in have for w in back.reshape(N, -1))
        if ok:
            return True
    return False


@dataclass(frozen=True)
class XiReport:
    xi_empty_guaranteed: bool
    threshold: int
    d_dual_inner: int
    d_dual_outers: tuple[int, ...]

    def __iter__(self):
        return iter((self.xi_empty_guaranteed, self.threshold))


def xi_emptiness_check(spec: GcSpec) -> XiReport:
    """Whether the low-weight dual words that locate inner blocks must be absent.

    threshold = min(d_A^(i)dual..., 2 d_B dual).  Block-locating words need
    weight below the threshold and support inside one block, so their weight
    is at least d_B dual.  If some outer dual distance is <= d_B dual there is
    no room for them and the block-recovery step has nothing to work with.
    """
    dB = min(B.d_dual for B in spec.inner_codes())
    dA = tuple(A.d_dual for A in spec.outers)
    threshold = min(min(dA), 2 * dB)
    return XiReport(dB >= min(dA), threshold, dB, dA)


def signatures_pairwise_distinct(inner_codes: Sequence[LinearCode]) -> bool:
    """True if no two distinct inner codes share a position signature multiset."""
    sigs = [tuple(sorted(codes.signatures(B))) for B in inner_codes]
    distinct = {}
    for B, s in zip(inner_codes, sigs):
        key = linalg.row_basis(B.generator)
        distinct.setdefault(key, s)
    vals = list(distinct.values())
    return len(set(vals)) == len(vals)


# --- spec files ----------------------------------------------------------------------------


def _field_json(F: FieldTower) -> list[int]:
    return list(linalg.field_header(F))


def spec_to_json(spec: GcSpec) -> dict:
    out = {
        "format": "gcspec-1",
        "field": _field_json(spec.field),
        "n_A": spec.n_A,
        "n_B": spec.n_B,
        "inner": spec.inner.generator.tolist(),
        "theta": spec.tree.theta.tolist(),
        "levels": [{"k": k, "outer_field": _field_json(A.field), "outer": A.generator.tolist(), "name": A.name}
                   for k, A in zip(spec.level_dims, spec.outers)],
    }
    if spec.block_trees is not None:
        out["block_theta"] = [t.theta.tolist() for t in spec.block_trees]
    return out


def spec_from_json(obj: dict) -> GcSpec:
    try:
        F = make_tower(*obj["field"])
        n_B = int(obj["n_B"])
        dims = [int(lv["k"]) for lv in obj["levels"]]
        theta = FMatrix(F, np.array(obj["theta"], dtype=np.int64).reshape(-1, n_B))
        inner = LinearCode(FMatrix(F, np.array(obj.get("inner", obj["theta"]), dtype=np.int64).reshape(-1, n_B)))
        n_A = int(obj["n_A"])
        outers = []
        for lv in obj["levels"]:
            Fo = make_tower(*lv["outer_field"])
            G = np.array(lv["outer"], dtype=np.int64).reshape(-1, n_A)
            outers.append(LinearCode(FMatrix._wrap(Fo, G) if G.size == 0 else FMatrix(Fo, G), lv.get("name", "outer")))
    except (DimensionMismatch, FieldMismatch, ThetaNotInjective):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad spec file: {exc}") from exc
    spec = build_gcc(inner, PartitionTree(theta, dims), outers)
    if "block_theta" in obj:
        trees = [PartitionTree(FMatrix(F, np.array(t, dtype=np.int64).reshape(-1, n_B)), dims)
                 for t in obj["block_theta"]]
        spec = build_justesen_variant(spec, trees)
    return spec


def save_spec(spec: GcSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_json(spec), fh, indent=1)
        fh.write("\n")


def load_spec(path) -> GcSpec:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    return spec_from_json(obj)

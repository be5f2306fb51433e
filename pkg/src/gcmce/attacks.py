"""Attacks on McEliece over concatenated codes.

* :func:`isd_attack`: plain information-set decoding.
* :func:`sendrier_step1`: locate the inner blocks from low-weight dual codewords.
* :func:`sendrier_step2`: align the blocks by position signatures.
* :func:`sendrier_step3_1`: read a permuted inner code off the aligned key.
* :func:`block_generators`: per-block inner codes straight from the block columns.
* :func:`nonstructural_attack`: decode inner blocks, then solve on clean blocks only.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import codes, linalg
from .codes import DecodeOutcome, DecodeStatus, LinearCode, weight
from .errors import (AmbiguousSignatures, InsufficientWords, MaxItersExceeded, NoSolution,
                     RankDeficientBlock, SignatureMismatch, TooFewCleanBlocks)
from .linalg import FMatrix, PermMatrix

COSET_CAP = 1 << 12  # solution sets up to this size are searched instead of rejected


def _candidates(A: FMatrix, b) -> np.ndarray | None:
    """Every ``m`` with ``m @ A == b`` (rows), or None if there are too many to list."""
    sol, K = linalg.solution_space(A, b)
    if K.rows == 0:
        return sol[None, :]
    F = A.field
    if F.order**K.rows > COSET_CAP:
        return None
    return F.add(sol[None, :], linalg.span_vectors(F, K.a, COSET_CAP))


def _accept(G: FMatrix, r: np.ndarray, cands: np.ndarray, d: int) -> np.ndarray | None:
    """First candidate whose codeword lies at distance < d/2 from r."""
    words = G.field.matmul(cands, G.a)
    dist = weight(words != r[None, :])
    ok = np.flatnonzero(2 * dist < d)
    return cands[ok[0]] if ok.size else None


@dataclass
class IsdResult:
    message: np.ndarray
    iterations: int
    delta: int
    elapsed: float


def isd_attack(G: FMatrix, r, t: int, delta: int | None = None, max_iters: int = 100_000, seed=0,
               d: int | None = None, stall: int = 20) -> IsdResult:
    """Sample delta coordinates until they are error-free and determine the message.

    A draw is accepted when ``r_delta = m G_delta`` is solvable and
    ``d_H(m G, r) < d/2`` (``d`` defaults to ``2t + 1``).  If the restricted
    system has a small solution set, all of it is checked, so an error-free
    draw always succeeds.  ``stall`` consecutive draws with too many solutions
    to list raise delta by one.
    """
    start = time.perf_counter()
    r = np.asarray(r, dtype=np.int64)
    k, n = G.shape
    delta = k if delta is None else delta
    d = 2 * t + 1 if d is None else d
    rng = linalg.make_rng(seed)
    unlisted = 0
    for it in range(1, max_iters + 1):
        cols = np.sort(rng.choice(n, size=min(delta, n), replace=False))
        try:
            cands = _candidates(G.columns(cols), r[cols])
        except NoSolution:
            continue
        if cands is None:
            unlisted += 1
            if unlisted >= stall and delta < n:
                delta, unlisted = delta + 1, 0
            continue
        unlisted = 0
        m = _accept(G, r, cands, d)
        if m is not None:
            return IsdResult(m, it, delta, time.perf_counter() - start)
    raise MaxItersExceeded(f"no error-free information set in {max_iters} draws")


# --- block structure --------------------------------------------------------------------


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint, covering, equal-size blocks of column indices (each sorted, blocks by first index)."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(int(i) for i in b)) for b in self.blocks), key=lambda b: b[0]))
        object.__setattr__(self, "blocks", blocks)
        flat = [i for b in blocks for i in b]
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("blocks must be disjoint and cover 0..n-1")
        if len({len(b) for b in blocks}) > 1:
            raise ValueError("blocks must have equal size")

    @property
    def n_A(self) -> int:
        return len(self.blocks)

    @property
    def n_B(self) -> int:
        return len(self.blocks[0])

    @property
    def n(self) -> int:
        return self.n_A * self.n_B

    def perm(self) -> PermMatrix:
        """Column permutation that puts the blocks next to each other."""
        return PermMatrix([i for b in self.blocks for i in b])

    @classmethod
    def ground_truth(cls, n_A: int, n_B: int, P: PermMatrix) -> BlockPartition:
        """True blocks of a public key ``S G P`` (public column j is secret column perm[j])."""
        groups: dict[int, list[int]] = {}
        for j, src in enumerate(P.perm.tolist()):
            groups.setdefault(src // n_B, []).append(j)
        return cls(tuple(tuple(g) for g in groups.values()))


def sendrier_step1(G: FMatrix, shape: tuple[int, int], weight_bound: int | None = None,
                   max_bound: int | None = None) -> BlockPartition:
    """Recover the inner blocks from minimal-support codewords of the dual code.

    Low-weight minimal dual codewords each sit inside a single block, and
    together they connect every block, so the connected components of their
    supports are the blocks.  Without ``weight_bound`` the bound is raised
    from ``max(2, 2 (n_B - ceil(k / n_A)))`` until the components form n_A
    blocks of size n_B, or ``max_bound`` (default 2 n_B + 1) is passed.
    """
    n_A, n_B = shape
    n = G.cols
    if n_A * n_B != n:
        raise ValueError(f"shape {shape} does not match length {n}")
    dual = LinearCode(linalg.nullspace(G), "public dual", check=False)
    if weight_bound is not None:
        bounds = [weight_bound]
    else:
        start = max(2, 2 * (n_B - math.ceil(G.rows / n_A)))
        bounds = range(start, (2 * n_B + 1 if max_bound is None else max_bound) + 1)
    found = None
    for bound in bounds:
        words = codes.minimal_support_codewords(dual, bound)
        comps = codes.connected_components(words, n)
        if len(comps) == n_A and all(len(c) == n_B for c in comps):
            return BlockPartition(tuple(tuple(c) for c in comps))
        found = (bound, len(words), sorted(len(c) for c in comps))
    raise InsufficientWords(f"components do not form {n_A} blocks of size {n_B} "
                            f"(last bound {found[0]}: {found[1]} words, component sizes {found[2]})")


def block_generators(G: FMatrix, partition: BlockPartition) -> list[LinearCode]:
    """Row space of the key restricted to each block, via Gaussian elimination."""
    return [LinearCode.span(G.columns(b), f"block{i}") for i, b in enumerate(partition.blocks)]


@dataclass
class Step2Result:
    """``order[b][j]``: public column of block b matched to reference position j."""

    order: list[list[int]]
    multiplicity: int = 1

    def perm(self) -> PermMatrix:
        return PermMatrix([i for b in self.order for i in b])

    def local_perms(self, partition: BlockPartition) -> list[list[int]]:
        """Within-block permutations as local indices."""
        return [[partition.blocks[b].index(i) for i in blk] for b, blk in enumerate(self.order)]


def sendrier_step2(G: FMatrix, partition: BlockPartition, strict: bool = True) -> Step2Result:
    """Align every block with block 0 by matching position signatures.

    Positions of block 0 are the reference, in increasing column order.  With
    repeated signatures, ``strict`` raises; otherwise equal signatures are
    matched in increasing column order and the number of equally good
    matchings is reported.
    """
    block_codes = block_generators(G, partition)
    ref_sigs = codes.signatures(block_codes[0])
    order, mult = [], 1
    repeated = [s for s, c in Counter(ref_sigs).items() if c > 1]
    if repeated and strict:
        raise AmbiguousSignatures(f"{len(repeated)} signature(s) shared by several positions of block 0")
    for b, (blk, C) in enumerate(zip(partition.blocks, block_codes)):
        sigs = codes.signatures(C)
        if Counter(sigs) != Counter(ref_sigs):
            raise SignatureMismatch(f"block {b} has a different signature multiset than block 0")
        pool: dict[tuple, list[int]] = {}
        for local, s in enumerate(sigs):
            pool.setdefault(s, []).append(blk[local])
        used = {s: 0 for s in pool}
        row = []
        for s in ref_sigs:
            row.append(pool[s][used[s]])
            used[s] += 1
        order.append(row)
        if b:
            for c in Counter(sigs).values():
                mult *= math.factorial(c)
    return Step2Result(order, mult)


def sendrier_step3_1(G_aligned: FMatrix, n_B: int, k_B: int | None = None) -> LinearCode:
    """Generator of the permuted inner code from the RREF of the aligned key.

    The RREF rows with a pivot among the first n_B columns, cut to those
    columns, generate the projection of the code onto block 0.
    """
    R, _, piv = linalg.rref(G_aligned)
    r = sum(1 for p in piv if p < n_B)
    if r == 0 or (k_B is not None and r < k_B):
        raise RankDeficientBlock(f"first block has rank {r}" + ("" if k_B is None else f" < {k_B}"))
    return LinearCode(FMatrix._wrap(G_aligned.field, R.a[:r, :n_B].copy()), "step3.1", check=False)


# --- non-structural attack ----------------------------------------------------------------


@dataclass
class AttackReport:
    message: list[int] | None
    success: bool
    iterations: int
    tau: int
    n_c: int | None
    n_w: int | None
    n_f: int
    per_block: list[str]
    elapsed: float
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _success_probability(n_c: int, n_w: int, tau: int) -> float:
    if tau > n_c:
        return 0.0
    return math.comb(n_c, tau) / math.comb(n_c + n_w, tau)


def nonstructural_attack(G: FMatrix, r, t: int, partition: BlockPartition, block_codes: Sequence[LinearCode],
                         tau: int | None = None, max_iters: int | None = None, seed=0, d: int | None = None,
                         truth=None, stall: int = 20) -> AttackReport:
    """Decode every inner block, then solve for the message on randomly chosen clean blocks.

    Part 1 BMD-decodes block b of ``r`` in ``block_codes[b]`` (whose columns
    follow ``partition.blocks[b]``) with radius (d_b - 1) // 2.  Part 2 draws
    ``tau`` blocks among those that did not fail and solves ``m G_tau`` = the
    decoded block words, accepting when ``d_H(m G, r) < d/2`` (``d`` defaults
    to ``2t + 1``).

    ``truth`` (the transmitted codeword) is used only to label blocks
    Correct/Wrong in the report.
    """
    start = time.perf_counter()
    r = np.asarray(r, dtype=np.int64)
    d = 2 * t + 1 if d is None else d
    F = G.field
    outcomes: list[DecodeOutcome] = []
    for blk, C in zip(partition.blocks, block_codes):
        tr = None if truth is None else np.asarray(truth)[list(blk)]
        outcomes.append(codes.bmd_decode(C, r[list(blk)], (C.d - 1) // 2, truth=tr))
    good = [b for b, o in enumerate(outcomes) if not o.failed]
    n_f = partition.n_A - len(good)
    n_c = n_w = None
    if truth is not None:
        n_c = sum(o.status is DecodeStatus.CORRECT for o in outcomes)
        n_w = sum(o.status is DecodeStatus.WRONG for o in outcomes)
    k_B = max(1, min(C.k for C in block_codes))
    tau = math.ceil(G.rows / k_B) if tau is None else tau
    tau0 = tau
    if tau > len(good):
        raise TooFewCleanBlocks(f"tau={tau} but only {len(good)} blocks decoded")
    if max_iters is None:
        t_B = max(0, min((C.d - 1) // 2 for C in block_codes))
        w_max = min(len(good), t // (t_B + 1))
        p_hat = _success_probability(len(good) - w_max, w_max, tau)
        max_iters = math.ceil(50 / p_hat) if p_hat > 0 else 10_000
        max_iters = max(max_iters, 100)
    corrected = r.copy()
    for b in good:
        corrected[list(partition.blocks[b])] = outcomes[b].codeword
    rng = linalg.make_rng(seed)
    unlisted = 0
    statuses = [o.status.value for o in outcomes]
    for it in range(1, max_iters + 1):
        chosen = np.sort(rng.choice(len(good), size=tau, replace=False))
        cols = np.array(sorted(i for c in chosen for i in partition.blocks[good[c]]), dtype=np.int64)
        try:
            cands = _candidates(G.columns(cols), corrected[cols])
        except NoSolution:
            continue
        if cands is None:
            unlisted += 1
            if unlisted >= stall and tau < len(good):
                tau, unlisted = tau + 1, 0
            continue
        unlisted = 0
        m = _accept(G, r, cands, d)
        if m is not None:
            assert 2 * weight((m @ G) != r) < d
            return AttackReport([int(x) for x in m], True, it, tau, n_c, n_w, n_f, statuses,
                                time.perf_counter() - start, {"tau_initial": tau0})
    raise MaxItersExceeded(f"no consistent clean-block draw in {max_iters} iterations "
                           f"(n_f={n_f}, tau={tau})")

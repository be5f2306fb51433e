"""Work factors of the attacks and the Monte Carlo estimate of inner-decoder statistics.

All binomials are exact integers; values become floats only at the end, and
``log2`` is taken on the exact rational so huge parameters do not overflow.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import codes, linalg
from .errors import InfeasibleParameters
from .gf import make_tower

REFERENCE_PARAMS = dict(n_A=128, n_B=16, k_B=7, d_B=5, t_B=2, k_GC=308, tau=44, n=2048, t=212)


def log2_fraction(x: Fraction) -> float:
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    return math.log2(x.numerator) - math.log2(x.denominator)


def _float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class IsdWorkFactor:
    value: float
    log2: float
    p: float
    expected_iterations: float


def isd_success_probability(n: int, t: int, delta: int) -> Fraction:
    """Chance that delta random positions avoid all t errors: C(n-t, delta) / C(n, delta)."""
    if delta > n - t or delta < 0 or t < 0:
        raise InfeasibleParameters(f"delta={delta} > n - t = {n - t}")
    return Fraction(math.comb(n - t, delta), math.comb(n, delta))


def isd_workfactor(n: int, k: int, t: int, delta: int) -> IsdWorkFactor:
    """delta^3 * C(n, delta) / C(n - t, delta)."""
    if delta < k:
        raise InfeasibleParameters(f"delta={delta} < k={k}")
    p = isd_success_probability(n, t, delta)
    W = Fraction(delta**3) / p
    return IsdWorkFactor(_float(W), log2_fraction(W), _float(p), _float(1 / p))


@dataclass(frozen=True)
class WorkFactorReport:
    W1: float
    W2: float
    W: float
    log2W: float
    log2W1: float
    log2W2: float
    p: float
    n_A: int
    n_B: int
    k_B: int
    t_B: int
    k_GC: int
    n_c: int
    n_w: int
    tau: int

    def to_json(self) -> dict:
        return asdict(self)


def nonstructural_workfactor(n_A: int, n_B: int, k_B: int, t_B: int, k_GC: int, n_c: int, n_w: int,
                             tau: int) -> WorkFactorReport:
    """W = W1 + W2 with

    W1 = n_A * k_B^3 * C(n_B, k_B) / C(n_B - t_B, k_B)   (ISD in every inner block)
    W2 = k_GC^3 / p,  p = C(n_c, tau) / C(n_c + n_w, tau)   (clean-block draws)
    """
    if tau > n_c or tau < 0:
        raise InfeasibleParameters(f"tau={tau} exceeds n_c={n_c}")
    if k_B > n_B - t_B:
        raise InfeasibleParameters(f"k_B={k_B} > n_B - t_B = {n_B - t_B}")
    if min(n_A, n_B, k_B, k_GC, n_c, n_w, t_B) < 0:
        raise InfeasibleParameters("parameters must be non-negative")
    W1 = Fraction(n_A * k_B**3 * math.comb(n_B, k_B), math.comb(n_B - t_B, k_B))
    p = Fraction(math.comb(n_c, tau), math.comb(n_c + n_w, tau))
    W2 = Fraction(k_GC**3) / p
    W = W1 + W2
    return WorkFactorReport(_float(W1), _float(W2), _float(W), log2_fraction(W), log2_fraction(W1),
                            log2_fraction(W2), _float(p), n_A, n_B, k_B, t_B, k_GC, n_c, n_w, tau)


# --- Monte Carlo ------------------------------------------------------------------------------


@dataclass(frozen=True)
class DecodeStats:
    p_c: float
    p_w: float
    p_f: float
    se_c: float
    se_w: float
    se_f: float
    trials: int
    codes: int
    counts: tuple[int, int, int]

    def to_json(self) -> dict:
        return asdict(self)


def _one_code(args) -> tuple[int, int, int]:
    """Correct / wrong / failure counts for one sampled code."""
    q, n, k, d, prob, fixed_weight, trials, seed, index = args
    field = make_tower(q, 1)
    code_seed = linalg.derive_seed(seed, index)
    C = codes.random_code_with_distance(field, n, k, d, linalg.derive_seed(code_seed, 0))
    rng = linalg.make_rng(code_seed, 1)
    radius = (C.d - 1) // 2 if d is None else (d - 1) // 2
    cw = C.codewords()
    sent = rng.integers(0, cw.shape[0], size=trials)
    if fixed_weight is None:
        mask = rng.random((trials, n)) < prob
    else:
        keys = rng.random((trials, n))
        mask = np.zeros((trials, n), dtype=bool)
        np.put_along_axis(mask, np.argsort(keys, axis=1)[:, :fixed_weight], True, axis=1)
    vals = rng.integers(1, q, size=(trials, n)) if q > 2 else np.ones((trials, n), dtype=np.int64)
    e = np.where(mask, vals, 0)
    r = field.add(cw[sent], e)
    idx, dist = codes.nearest_codewords(C, r)
    fail = dist > radius
    correct = ~fail & (idx == sent)
    return int(correct.sum()), int((~fail & ~correct).sum()), int(fail.sum())


def montecarlo_decode_stats(code_params: tuple[int, int, int] = (16, 7, 5), error_prob: float | None = 212 / 2048,
                            trials: int = 10_000, codes_sampled: int = 100, seed: int = 0, workers: int = 1,
                            fixed_weight: int | None = None, q: int = 2) -> DecodeStats:
    """Bounded-distance decoding statistics over random codes with distance >= d.

    For each of ``codes_sampled`` random [n, k, >= d] codes, ``trials`` random
    codewords get errors (independently per position with ``error_prob``, or
    exactly ``fixed_weight`` of them) and are decoded with radius (d-1)//2.
    Code i and its trials draw from a seed derived from ``(seed, i)``, so the
    result does not depend on ``workers``.  Standard errors are taken over
    the per-code rates.
    """
    n, k, d = code_params
    if fixed_weight is None and error_prob is None:
        raise ValueError("give error_prob or fixed_weight")
    jobs = [(q, n, k, d, error_prob, fixed_weight, trials, seed, i) for i in range(codes_sampled)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            per_code = list(pool.map(_one_code, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        per_code = [_one_code(j) for j in jobs]
    arr = np.array(per_code, dtype=np.int64).reshape(-1, 3)
    totals = arr.sum(axis=0)
    N = int(totals.sum())
    p = totals / N
    rates = arr / trials
    se = rates.std(axis=0, ddof=1) / math.sqrt(len(arr)) if len(arr) > 1 else np.sqrt(p * (1 - p) / N)
    return DecodeStats(float(p[0]), float(p[1]), float(p[2]), float(se[0]), float(se[1]), float(se[2]),
                       N, codes_sampled, (int(totals[0]), int(totals[1]), int(totals[2])))


def expected_counts(n_A: int, stats: DecodeStats) -> tuple[int, int, int]:
    """Round n_A p_c and n_A p_w to integers; failures take the remainder."""
    n_c = int(round(n_A * stats.p_c))
    n_w = int(round(n_A * stats.p_w))
    return n_c, n_w, n_A - n_c - n_w


@dataclass(frozen=True)
class ReferenceReport:
    workfactor: WorkFactorReport
    stats: DecodeStats | None
    n_f: int
    isd: IsdWorkFactor

    def to_json(self) -> dict:
        return {"workfactor": self.workfactor.to_json(), "stats": None if self.stats is None else self.stats.to_json(),
                "n_f": self.n_f, "isd_direct": asdict(self.isd)}


def appendix_b_report(seed: int = 0, trials: int = 10_000, codes_sampled: int = 100, workers: int = 1,
                      counts: tuple[int, int] | None = None, n_w: int | None = None) -> ReferenceReport:
    """Non-structural work factor for the (2048, 308) OC code with a (16,7,5) inner code.

    The block counts come from a Monte Carlo run unless ``counts = (n_c, n_w)``
    is given; ``n_w`` overrides only the wrong-block count.  tau = k_A = 44.
    Also reports plain ISD on the whole code (delta = k) for comparison.
    """
    P = REFERENCE_PARAMS
    stats = None
    if counts is None:
        stats = montecarlo_decode_stats((P["n_B"], P["k_B"], P["d_B"]), P["t"] / P["n"], trials, codes_sampled,
                                        seed, workers)
        n_c, nw, _ = expected_counts(P["n_A"], stats)
    else:
        n_c, nw = counts
    if n_w is not None:
        nw = n_w
    wf = nonstructural_workfactor(P["n_A"], P["n_B"], P["k_B"], P["t_B"], P["k_GC"], n_c, nw, P["tau"])
    isd = isd_workfactor(P["n"], P["k_GC"], P["t"], P["k_GC"])
    return ReferenceReport(wf, stats, P["n_A"] - n_c - nw, isd)

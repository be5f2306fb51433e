"""Small reference instances used by the CLI presets and the test-suite."""

from __future__ import annotations

import numpy as np

from . import linalg
from .codes import LinearCode, full_space, parity_code, repetition_code, rs_code
from .concat import GcSpec, PartitionTree, build_gcc, build_justesen_variant, level_field
from .errors import GivesUpAfterMaxTries
from .gf import make_tower, prime_field
from .linalg import FMatrix

GF2 = prime_field(2)


def rm_8_4_4() -> GcSpec:
    """GF(2)^2 split as {00,11} and its complement, outers rep(4) and parity(4).

    The result is the first-order Reed-Muller code of length 8.
    """
    tree = PartitionTree(FMatrix(GF2, [[1, 0], [1, 1]]), [1, 1])
    return build_gcc(full_space(2), tree, [repetition_code(4), parity_code(4)])


def occ_rs_parity() -> GcSpec:
    """RS(7,3) over GF(8) concatenated with the binary [4,3,2] parity code."""
    inner = parity_code(4)
    tree = PartitionTree(inner.generator, [3])
    return build_gcc(inner, tree, [rs_code(7, 3, make_tower(2, 3))])


def parity_chain_tree() -> PartitionTree:
    """parity(4) > {0000, 1100, 0011, 1111} > rep(4) > {0}; subcode distances 2, 2, 4."""
    return PartitionTree(FMatrix(GF2, [[1, 0, 1, 0], [1, 1, 0, 0], [1, 1, 1, 1]]), [1, 1, 1])


def random_outer(n: int, k: int, seed, d_dual_min: int = 1, d_min: int = 1, max_tries: int = 20_000) -> LinearCode:
    """Random binary [n,k] code with prescribed lower bounds on d and d_dual."""
    rng = linalg.make_rng(seed)
    for _ in range(max_tries):
        G = linalg.random_matrix(GF2, k, n, rng)
        if linalg.rank(G) < k:
            continue
        C = LinearCode(G, f"rand[{n},{k}]", check=False)
        if C.d >= d_min and C.d_dual >= d_dual_min:
            return C
    raise GivesUpAfterMaxTries(f"no [{n},{k}] code with d>={d_min}, d_dual>={d_dual_min}")


def step1_gcc(seed, n_A: int = 8, k_A: int = 6, d_dual_min: int = 5) -> GcSpec:
    """GC code where block recovery is guaranteed: every outer dual distance exceeds d_B dual = 4.

    Inner code: parity(4) with the chain parity > {0000,1111,...} > rep > {0}.
    """
    tree = parity_chain_tree()
    outers = [random_outer(n_A, k_A, linalg.derive_seed(seed, i), d_dual_min=d_dual_min) for i in range(tree.ell)]
    return build_gcc(parity_code(4), tree, outers)


def step1_counterexample(seed, n_A: int = 8, k_A: int = 6) -> GcSpec:
    """Like :func:`step1_gcc` but the last level uses a repetition outer (dual distance 2)."""
    tree = parity_chain_tree()
    outers = [random_outer(n_A, k_A, linalg.derive_seed(seed, i), d_dual_min=5) for i in range(tree.ell - 1)]
    outers.append(repetition_code(n_A))
    return build_gcc(parity_code(4), tree, outers)


def nonstructural_gcc(seed, n_A: int = 7) -> GcSpec:
    """Three-level binary GC code on the parity(4) chain with random outers.

    Outer parameters [7,3,4], [7,4,3], [7,6,2] against subcode distances
    2, 2, 4 give a designed distance of 6.
    """
    tree = parity_chain_tree()
    params = [(3, 4), (4, 3), (6, 2)]
    outers = [random_outer(n_A, k, linalg.derive_seed(seed, i), d_min=d) for i, (k, d) in enumerate(params)]
    return build_gcc(parity_code(4), tree, outers)


def random_inner_with_distinct_signatures(n: int, k: int, seed, max_tries: int = 2000) -> LinearCode:
    """Random binary code whose positions all have different signatures."""
    from .codes import signatures

    rng = linalg.make_rng(seed)
    for _ in range(max_tries):
        G = linalg.random_matrix(GF2, k, n, rng)
        if linalg.rank(G) < k:
            continue
        C = LinearCode(G, f"rand[{n},{k}]", check=False)
        if C.d >= 2 and len(set(signatures(C))) == n:
            return C
    raise GivesUpAfterMaxTries("no code with distinct signatures found")


def aligned_gcc(seed, n_A: int = 4, n_B: int = 16, k_B: int = 7, k_A: int = 2) -> GcSpec:
    """OC code: RS(n_A, k_A) over GF(2^k_B) on a random inner code with all signatures distinct.

    Random [16,7] binary codes have distinct signatures a few percent of the
    time; shorter codes almost never do.
    """
    inner = random_inner_with_distinct_signatures(n_B, k_B, seed)
    tree = PartitionTree(inner.generator, [k_B])
    return build_gcc(inner, tree, [rs_code(n_A, k_A, level_field(GF2, k_B))])


def justesen_pair(seed, n_A: int = 4, n_B: int = 16, k_B: int = 7) -> GcSpec:
    """Two alternating inner codes with different weight distributions."""
    b1 = random_inner_with_distinct_signatures(n_B, k_B, seed)
    rng_seed = linalg.derive_seed(seed, 1)
    for j in range(200):
        b2 = random_inner_with_distinct_signatures(n_B, k_B, linalg.derive_seed(rng_seed, j))
        if b2.weight_distribution() != b1.weight_distribution():
            break
    t1, t2 = PartitionTree(b1.generator, [k_B]), PartitionTree(b2.generator, [k_B])
    F = level_field(GF2, k_B)
    spec = build_gcc(b1, t1, [rs_code(n_A, 2, F)])
    return build_justesen_variant(spec, [t1 if b % 2 == 0 else t2 for b in range(n_A)])


def all_binary_subspaces(n: int) -> list[LinearCode]:
    """Every subspace of GF(2)^n as a code, {0} and the full space included."""
    layers = [{frozenset([0]): []}]
    for _ in range(n):
        nxt = {}
        for space, basis in layers[-1].items():
            for v in range(1, 2**n):
                if v in space:
                    continue
                grown = frozenset(space | {x ^ v for x in space})
                nxt.setdefault(grown, basis + [v])
        layers.append(nxt)
    out = []
    for layer in layers:
        for basis in layer.values():
            G = np.array([[(v >> j) & 1 for j in range(n)] for v in basis], dtype=np.int64).reshape(len(basis), n)
            out.append(LinearCode(linalg.row_basis(FMatrix(GF2, G)) if basis else FMatrix.zeros(GF2, 0, n),
                                  f"sub{len(out)}", check=False))
    return out

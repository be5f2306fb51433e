import numpy as np
import pytest
from hypothesis import given, strategies as st

from gcmce import linalg
from gcmce.errors import FormatError, NonUnique, NoSolution
from gcmce.gf import make_tower, prime_field
from gcmce.linalg import FMatrix, PermMatrix

from oracles import rank_mod_p

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (4, 2)]


def field_of(qm):
    return make_tower(*qm)


matrices = st.tuples(st.sampled_from(FIELDS), st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32))


def rand(qm, r, c, seed):
    return linalg.random_matrix(field_of(qm), r, c, seed)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32))
def test_rank_matches_textbook_elimination(p, r, c, seed):
    M = linalg.random_matrix(prime_field(p), r, c, seed)
    # force some dependence half the time
    if seed % 2 and r > 1:
        a = np.array(M.a)
        a[-1] = (a[0] * 2 + a[-1] * 0) % p
        M = FMatrix(M.field, a)
    assert linalg.rank(M) == rank_mod_p(M.tolist(), p)


@given(matrices)
def test_rref_shape_and_row_space(args):
    qm, r, c, seed = args
    M = rand(qm, r, c, seed)
    R, rk, piv = linalg.rref(M)
    assert rk == len(piv) and piv == sorted(piv)
    for i, p in enumerate(piv):
        assert R.a[i, p] == 1
        assert np.count_nonzero(R.a[:, p]) == 1
    assert not R.a[rk:].any()
    # same row space: each has rank rk stacked with the other
    assert linalg.rank(linalg.vstack([M, R])) == rk


@given(matrices)
def test_rank_invariant_under_invertible_transforms(args):
    qm, r, c, seed = args
    F = field_of(qm)
    M = rand(qm, r, c, seed)
    S = linalg.random_invertible(F, r, seed + 1)
    T = linalg.random_invertible(F, c, seed + 2)
    assert linalg.rank(S @ M @ T) == linalg.rank(M)


@given(matrices)
def test_nullspace(args):
    qm, r, c, seed = args
    M = rand(qm, r, c, seed)
    N = linalg.nullspace(M)
    assert N.rows + linalg.rank(M) == c
    if N.rows:
        assert not (M @ N.T).a.any()
        assert linalg.rank(N) == N.rows
    L = linalg.left_kernel(M)
    if L.rows:
        assert not (L @ M).a.any()


@given(st.sampled_from(FIELDS), st.integers(1, 6), st.integers(0, 2**32))
def test_inverse(qm, k, seed):
    F = field_of(qm)
    M = linalg.random_invertible(F, k, seed)
    Minv = linalg.inverse(M)
    assert M @ Minv == FMatrix.identity(F, k)
    assert Minv @ M == FMatrix.identity(F, k)


def test_inverse_singular():
    F = prime_field(2)
    with pytest.raises(NoSolution):
        linalg.inverse(FMatrix(F, [[1, 1], [1, 1]]))
    with pytest.raises(ValueError):
        linalg.inverse(FMatrix(F, [[1, 1, 0], [0, 1, 1]]))


@given(matrices)
def test_solution_space(args):
    qm, r, c, seed = args
    F = field_of(qm)
    A = rand(qm, r, c, seed)
    m = linalg.make_rng(seed, 9).integers(0, F.order, size=r)
    b = m @ A
    sol, K = linalg.solution_space(A, b)
    assert np.array_equal(sol @ A, b)
    assert K.rows == r - linalg.rank(A)
    for row in K.a:
        assert not (row @ A).any()
    if K.rows == 0:
        assert np.array_equal(linalg.solve_right(A, b), m)
    else:
        with pytest.raises(NonUnique) as info:
            linalg.solve_right(A, b)
        assert np.array_equal(info.value.solution @ A, b)
        assert info.value.kernel == K
        assert np.array_equal(linalg.solve_right(A, b, allow_non_unique=True) @ A, b)


def test_inconsistent_system():
    F = prime_field(2)
    A = FMatrix(F, [[1, 1, 0]])
    with pytest.raises(NoSolution):
        linalg.solution_space(A, [1, 0, 0])
    with pytest.raises(ValueError):
        linalg.solution_space(A, [1, 0])


def test_span_vectors():
    F = make_tower(3, 1)
    V = linalg.span_vectors(F, np.array([[1, 0, 1], [0, 1, 1]]))
    assert len({tuple(v) for v in V.tolist()}) == 9
    with pytest.raises(ValueError):
        linalg.span_vectors(F, np.eye(12, dtype=np.int64), limit=100)


def test_fmatrix_operations():
    F = make_tower(2, 2)
    A = FMatrix(F, [[1, 2], [3, 0]])
    B = FMatrix(F, [[0, 1], [1, 1]])
    assert (A + B) - B == A
    assert A + (-A) == FMatrix.zeros(F, 2, 2)
    assert (A @ B).T == B.T @ A.T
    v = np.array([1, 3])
    assert np.array_equal(v @ A, F.matmul(v, A.a))
    assert np.array_equal(A @ v, F.matmul(A.a, v))
    assert A.scale(1) == A
    assert A[0] is not None and A[0, 1] == 2
    assert A.columns([1]).tolist() == [[2], [0]]
    assert A.rows_of([1]).tolist() == [[3, 0]]
    assert hash(A) == hash(FMatrix(F, [[1, 2], [3, 0]]))
    with pytest.raises(ValueError):
        FMatrix(F, [[4]])
    with pytest.raises(ValueError):
        A + FMatrix(prime_field(2), [[1, 0], [0, 1]])


@given(st.integers(1, 20), st.integers(0, 2**32), st.integers(0, 2**32))
def test_permutations(n, s1, s2):
    F = prime_field(3)
    P, Q = linalg.random_perm(n, s1), linalg.random_perm(n, s2)
    x = linalg.make_rng(s1, 1).integers(0, 3, size=n)
    assert np.array_equal(P.apply(x), x @ P.to_matrix(F))
    assert np.array_equal(P.inverse().apply(P.apply(x)), x)
    assert np.array_equal(P.compose(Q).apply(x), Q.apply(P.apply(x)))
    assert np.array_equal(x @ P, P.apply(x))
    M = linalg.random_matrix(F, 3, n, s2)
    assert P.apply(M) == M @ P.to_matrix(F)


def test_perm_rejects_non_permutation():
    with pytest.raises(ValueError):
        PermMatrix([0, 0, 1])


def test_random_perm_is_roughly_uniform():
    counts = {}
    for s in range(3000):
        key = tuple(linalg.random_perm(3, s).perm.tolist())
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    assert min(counts.values()) > 400


def test_seed_derivation():
    assert linalg.derive_seed(5, 1) == linalg.derive_seed(5, 1)
    assert linalg.derive_seed(5, 1) != linalg.derive_seed(5, 2)
    a = linalg.make_rng(7, 3).integers(0, 1 << 30, 5)
    b = linalg.make_rng(7, 3).integers(0, 1 << 30, 5)
    assert np.array_equal(a, b)
    g = np.random.default_rng(0)
    assert linalg.make_rng(g) is g
    with pytest.raises(ValueError):
        linalg.make_rng(g, 1)


@pytest.mark.parametrize("qm", FIELDS + [(2, 4)])
def test_matrix_text_roundtrip(qm):
    M = rand(qm, 3, 5, 11)
    text = linalg.format_matrix(M)
    assert linalg.parse_matrix(text) == M
    assert linalg.parse_matrix("# comment\n" + text) == M


def test_matrix_text_errors():
    with pytest.raises(FormatError):
        linalg.parse_matrix("")
    with pytest.raises(FormatError):
        linalg.parse_matrix("2 2 2 1\n1 0\n")
    with pytest.raises(FormatError):
        linalg.parse_matrix("1 2 2 1\n1 0 1\n")
    with pytest.raises(FormatError):
        linalg.parse_matrix("x y\n")

from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from tropmeasure import linalg as la
from tropmeasure.lattices import (
    AffineLatticeMap, BilinearForm, IntLattice, covolume, dual_lattice, form_lattice,
    generalized_index, hnf_rows, index_of_image, integer_kernel, saturate, saturation_index,
    smith_normal_form, snf_diagonal, solve_integer, stabilizer_lattice,
)

from oracles import coset_count, det_int, determinantal_divisors

small = st.integers(-4, 4)
mat22 = st.lists(st.lists(small, min_size=2, max_size=2), min_size=2, max_size=2)
mat23 = st.lists(st.lists(small, min_size=3, max_size=3), min_size=2, max_size=2)


def test_snf_worked_example():
    # gcd of entries is 2 and det is 4, so the elementary divisors are (2, 2)
    assert snf_diagonal([[2, 4], [0, 2]]) == [2, 2]
    assert determinantal_divisors([[2, 4], [0, 2]]) == [2, 2]


def test_snf_simple_cases():
    assert snf_diagonal([[1, 0], [0, 1]]) == [1, 1]
    assert snf_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert snf_diagonal([[0, 0], [0, 0]]) == [0, 0]
    assert snf_diagonal([[4, 6]]) == [2]


@given(st.one_of(mat22, mat23))
def test_snf_factorization(M):
    U, D, V = smith_normal_form(M)
    assert la.matmul(la.matmul(U, M), V) == D
    assert abs(det_int(U)) == 1 and abs(det_int(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    assert all(x >= 0 for x in diag)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(st.one_of(mat22, mat23))
def test_snf_matches_minor_gcds(M):
    nz = [x for x in snf_diagonal(M) if x]
    assert nz == determinantal_divisors(M)


@given(mat22)
def test_index_against_cosets(M):
    if M[0][0] * M[1][1] - M[0][1] * M[1][0] == 0:
        with pytest.raises(ValueError):
            index_of_image(M)
        return
    assert index_of_image(M) == coset_count(M) == abs(det_int(M))


def test_index_in_sublattice_target():
    T = IntLattice.from_generators([(2, 0), (0, 1)], 2)
    assert index_of_image([[2, 0], [0, 3]], T) == 3
    with pytest.raises(ValueError):
        index_of_image([[1, 0], [0, 1]], T)


def test_hnf_is_canonical():
    a = hnf_rows([[2, 1], [0, 3]])
    b = hnf_rows([[2, 4], [2, 1]])  # same lattice: (2,4) = (2,1) + (0,3)
    assert a == b


@given(mat23)
def test_integer_kernel(M):
    K = integer_kernel(M)
    for v in K:
        assert la.matvec(M, v) == (0,) * len(M)
    assert len(K) == 3 - la.rank(M)


def test_solve_integer():
    assert solve_integer([[2, 0], [0, 3]], (4, 6)) == (2, 2)
    assert solve_integer([[2, 0], [0, 3]], (1, 0)) is None


def test_covolume_and_dual():
    L = IntLattice.from_generators([(2, 1), (0, 3)], 2)
    assert covolume(L) == 6
    D = dual_lattice(L)
    assert covolume(D) == F(1, 6)
    for u in D.basis:
        for v in L.basis:
            assert la.dot(u, v).denominator == 1


def test_covolume_of_rank_one_lattice_uses_saturated_coordinates():
    L = IntLattice.from_generators([(2, 2)], 2)
    assert covolume(L) == 2
    assert saturation_index(L) == 2
    assert saturate(L).basis == ((1, 1),)


def test_generalized_index():
    A = IntLattice.from_generators([(2, 0), (0, 2)], 2)
    B = IntLattice.from_generators([(1, 0), (0, 1)], 2)
    assert generalized_index(A, B) == 4
    assert generalized_index(B, A) == F(1, 4)


def test_stabilizer_lattice():
    S = stabilizer_lattice(IntLattice.standard(2), (F(1, 2), 0), [(1, 1)])
    assert covolume(S) == 1 and S.contains((1, 1)) and not S.contains((1, 0))
    S = stabilizer_lattice(IntLattice.from_generators([(2, 0), (0, 1)], 2), (0, 0), [(1, 1)])
    assert S.contains((2, 2)) and not S.contains((1, 1))


def test_form_lattice():
    I = [(1, 0), (0, 1)]
    b = BilinearForm([[2, 1], [1, 2]])
    assert covolume(form_lattice(b, IntLattice.standard(2), I), I) == 3


def test_bilinear_form_checks():
    with pytest.raises(ValueError):
        BilinearForm([[1, 2], [0, 1]])
    assert not BilinearForm([[1, 0], [0, 0]]).is_positive_definite()
    assert BilinearForm([[2, 1], [1, 2]]).is_positive_definite()
    with pytest.raises(ValueError):
        BilinearForm([[1, 2], [2, 1]]).require_positive_definite()


def test_affine_lattice_map():
    f = AffineLatticeMap(((1, 0), (0, 1), (1, 1)), (0, 0, F(1, 2)))
    assert f.n == 3 and f.d == 2 and f.is_injective
    assert f((1, 2)) == (1, 2, F(7, 2))
    with pytest.raises(ValueError):
        AffineLatticeMap(((F(1, 2),),), (0,))


@given(mat22, st.integers(1, 3))
def test_unimodular_change_preserves_lattice(M, k):
    U = [[1, k], [0, 1]]
    if det_int(M) == 0:
        return
    A = IntLattice.from_generators([tuple(c) for c in la.columns(M)], 2)
    B = IntLattice.from_generators([tuple(c) for c in la.columns(la.matmul(M, U))], 2)
    assert A.basis == B.basis

from fractions import Fraction as F
from itertools import product
from math import factorial

import pytest
from hypothesis import given, strategies as st

from tropmeasure import linalg as la
from tropmeasure.complexes import build_complex, is_transversal, scale_periodic
from tropmeasure.geometry import Polytope, PolytopalSet, volume
from tropmeasure.lattices import BilinearForm, IntLattice, covolume, form_lattice
from tropmeasure.plc import (
    CocycleData, PLConvexFunction, ample_check, check_cocycle, check_continuity, degree_at_vertex,
    dual_cell, dual_cell_by_inequalities, dual_complex_of, is_convex, is_generic,
    is_strongly_polyhedral, model_function_check, perturb_to_generic, scaled, vertex_classes,
    voronoi_model_function,
)

CASES = [
    (IntLattice.standard(1), [[1]]),
    (IntLattice.standard(1), [[2]]),
    (IntLattice.standard(2), [[1, 0], [0, 1]]),
    (IntLattice.standard(2), [[2, 0], [0, 1]]),
    (IntLattice.standard(2), [[2, 1], [1, 2]]),
]
IDS = ["Z-1", "Z-2", "Z2-I", "Z2-diag21", "Z2-hex"]


def std(n):
    return [tuple(F(int(i == j)) for j in range(n)) for i in range(n)]


def brute_voronoi(L, b, u, R=3):
    """``max_c (b(u, c) - b(c, c)/2)`` over half-lattice points near the origin."""
    n = L.ambient_dim
    best = None
    for a in product(range(-2 * R, 2 * R + 1), repeat=n):
        c = la.matvec(L.basis_columns(), [F(x, 2) for x in a])
        val = b(u, c) - b.quadratic(c)
        best = val if best is None else max(best, val)
    return best


@pytest.fixture(scope="module", params=list(range(len(CASES))), ids=IDS)
def model(request):
    L, M = CASES[request.param]
    b = BilinearForm(M)
    PC, g = voronoi_model_function(L, b)
    return L, b, PC, g


def test_voronoi_passes_checks(model):
    L, b, PC, g = model
    assert check_continuity(g)
    assert check_cocycle(g, g.cocycle)
    assert ample_check(g)
    D = dual_complex_of(g)
    assert D.order_reversal_failures() == [] and D.dimension_failures() == []


def test_dual_cells_cover_form_lattice(model):
    L, b, PC, g = model
    n = L.ambient_dim
    total = sum(volume(dual_cell(g, v)) for v in vertex_classes(g))
    assert total == covolume(form_lattice(b, L, std(n)), std(n)) == la.det(b.matrix)


def test_two_dual_cell_routes_agree(model):
    _, _, _, g = model
    for v in vertex_classes(g):
        assert dual_cell_by_inequalities(g, v.vertices[0]) == dual_cell(g, v)


def test_degree_sum_matches_covolume(model):
    L, b, _, g = model
    n = L.ambient_dim
    ok, N = model_function_check(g)
    gN = scaled(g, N)
    degs = [degree_at_vertex(gN, v.vertices[0]) for v in vertex_classes(g)]
    # degree of the line bundle: n! times the covolume of the form lattice
    assert sum(degs) / F(N) ** n == factorial(n) * la.det(b.matrix)


def test_frozen_vertex_degrees():
    # Z^2 with the hexagonal form: 8 vertex classes of degree 3 after scaling by N = 2
    L, M = CASES[4]
    PC, g = voronoi_model_function(L, BilinearForm(M))
    assert [len(PC.cells_of_dim(k)) for k in range(3)] == [8, 12, 4]
    ok, N = model_function_check(g)
    assert N == 2
    assert [degree_at_vertex(scaled(g, N), v.vertices[0]) for v in vertex_classes(g)] == [3] * 8


@given(st.integers(-12, 12), st.integers(-12, 12))
def test_voronoi_matches_brute_force(a, b_):
    L, M = CASES[4]
    b = BilinearForm(M)
    _, g = voronoi_model_function(L, b)
    u = (F(a, 5), F(b_, 7))
    assert g.evaluate(u) == g.max_of_pieces(u) == brute_voronoi(L, b, u)


@given(st.integers(-12, 12), st.integers(-12, 12), st.integers(-2, 2), st.integers(-2, 2))
def test_cocycle_relation(a, c, k1, k2):
    L, M = CASES[3]
    _, g = voronoi_model_function(L, BilinearForm(M))
    u, lam = (F(a, 5), F(c, 3)), (k1, k2)
    assert g.evaluate(la.add(u, lam)) == g.evaluate(u) + g.cocycle.z_at(lam, u)
    assert g.cocycle.relation_defect(lam, (1, -1)) == 0


def test_one_dimensional_voronoi_values():
    PC, g = voronoi_model_function(IntLattice.standard(1), BilinearForm([[1]]))
    assert g.evaluate((F(1, 8),)) == 0
    assert [P.vertices for P in PC.cells_of_dim(0)] == [((F(1, 4),),), ((F(3, 4),),)]


def test_cocycle_linear_part_round_trip():
    L = IntLattice.standard(2)
    coc = CocycleData.quadratic(L, BilinearForm([[2, 1], [1, 2]]), (F(1, 3), -1))
    assert coc.linear_part() == (F(1, 3), -1)


def test_convexity_failures():
    segs = build_complex([Polytope.box((0,), (1,)), Polytope.box((1,), (2,))])
    left, right = segs.cells_of_dim(1)
    concave = PLConvexFunction(segs, {left: ((1,), 0), right: ((0,), 1)})
    assert check_continuity(concave) and not is_convex(concave)
    flat = PLConvexFunction(segs, {left: ((1,), 0), right: ((1,), 0)})
    assert is_convex(flat) and not is_strongly_polyhedral(flat)
    jump = PLConvexFunction(segs, {left: ((0,), 0), right: ((1,), 0)})
    assert not check_continuity(jump)


def test_non_positive_form_rejected():
    with pytest.raises(ValueError):
        voronoi_model_function(IntLattice.standard(2), BilinearForm([[1, 0], [0, -1]]))


def test_perturbation_is_generic_and_transversal():
    sig = [Polytope.hull([(0, 0), (1, 1)]), Polytope.hull([(0, 0)]), Polytope.hull([(1, 1)])]
    PC, f = perturb_to_generic(IntLattice.standard(2), BilinearForm([[1, 0], [0, 1]]), sig, m_max=3, seed=7)
    assert ample_check(f) and check_cocycle(f, f.cocycle)
    top = PolytopalSet([sig[0]])
    for m in (1, 2, 3):
        assert is_generic(PC, sig, m)
        assert is_transversal(scale_periodic(PC, m), top)


def test_perturbation_is_deterministic():
    sig = [Polytope.hull([(0,)])]
    args = (IntLattice.standard(1), BilinearForm([[1]]), sig)
    a, _ = perturb_to_generic(*args, m_max=3, seed=7)
    b, _ = perturb_to_generic(*args, m_max=3, seed=7)
    c, _ = perturb_to_generic(*args, m_max=3, seed=8)
    assert a == b and a != c
    # the unperturbed Voronoi complex has vertices at 1/4 and 3/4
    assert all(P.vertices[0] not in ((F(1, 4),), (F(3, 4),)) for P in a.cells_of_dim(0))

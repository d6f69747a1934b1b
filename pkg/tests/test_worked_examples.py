"""Small worked examples with hand-checked values, one test per example."""

from fractions import Fraction as F

import pytest

from tropmeasure import linalg as la
from tropmeasure.complexes import (
    build_complex, build_periodic, grid_complex, is_transversal, open_face_class_count, scale_periodic,
    subdivides, transversal_vertices,
)
from tropmeasure.geometry import (
    Cone, Polytope, PolytopalSet, dual_cone, is_concave_at, local_cone, minkowski_sum, volume,
)
from tropmeasure.lattices import (
    BilinearForm, IntLattice, covolume, dual_lattice, form_lattice, index_of_image, saturate,
    snf_diagonal, stabilizer_lattice,
)
from tropmeasure.measure import (
    HaarPiece, PiecewiseHaarMeasure, Stratum, TropicalCycleInput, atoms, build_skeleton, canonical_measure,
    dimension_bound, multiplicity_of_component, skeleton_affine_map, skeleton_measure,
)
from tropmeasure.plc import (
    PLConvexFunction, degree_at_vertex, dual_cell, dual_cell_by_inequalities, dual_complex_of, is_generic,
    is_strongly_polyhedral, model_function_check, perturb_to_generic, scaled, vertex_classes,
    voronoi_model_function,
)
from tropmeasure.tropical import (
    TropicalPolynomial, check_pure_dimension, check_total_concavity, prevariety, sup_valuation,
    tropical_hypersurface, val_function,
)

from oracles import coset_count, shoelace

H = F(1, 2)
SQ = Polytope.box((0, 0), (1, 1))
TRI = Polytope.hull([(0, 0), (1, 0), (0, 1)])
LINE = TropicalPolynomial.make({(0, 0): 0, (1, 0): 0, (0, 1): 0})
STEP = TropicalPolynomial.make({(0,): 0, (1,): 1})


def pt(*x):
    return Polytope.hull([x])


def seg(a, b):
    return Polytope.hull([a, b])


def abs_function():
    C = build_complex([Polytope.box((-1,), (0,)), Polytope.box((0,), (1,))])
    left, right = C.cells_of_dim(1)
    return PLConvexFunction(C, {left: ((-1,), 0), right: ((1,), 0)})


# -- geometry ----------------------------------------------------------------


def test_hull_drops_interior_point():
    P = Polytope.hull([(0, 0), (1, 0), (0, 1), (H, F(1, 4))])
    assert set(P.vertices) == {(0, 0), (1, 0), (0, 1)}


def test_face_counts():
    assert len(SQ.faces(0)) == 4 and len(SQ.faces(1)) == 4
    assert len(TRI.faces(1)) == 3


@pytest.mark.parametrize("u,face", [((H, H), SQ), ((0, H), seg((0, 0), (0, 1))), ((0, 0), pt(0, 0))])
def test_open_faces(u, face):
    assert SQ.open_face_containing(u) == face


def test_dual_cones():
    assert dual_cone(Cone.make([(1, 0)], 2)).same_set(Cone.from_inequalities([(1, 0)], 2))
    assert dual_cone(Cone.make([], 3)).same_set(Cone.whole_space(3))


def test_local_cones():
    S = PolytopalSet([SQ])
    [c] = local_cone(S, (H, H))
    assert c.same_set(Cone.whole_space(2))
    [c] = local_cone(S, (0, H))
    assert c.same_set(Cone.from_inequalities([(1, 0)], 2))


def test_concavity_examples():
    rays = PolytopalSet([seg((0, 0), (-1, -1)), seg((0, 0), (0, 1)), seg((0, 0), (1, 0))])
    assert is_concave_at(rays, (0, 0))
    assert is_concave_at(PolytopalSet([seg((-1, 0), (1, 0))]), (0, 0))


def test_volumes_and_sums():
    assert volume(SQ) == 1 and volume(TRI) == H
    assert volume(Polytope.hull([(0, 0), (1, 1), (2, 0)])) == shoelace([(0, 0), (1, 1), (2, 0)]) == 1
    assert minkowski_sum(seg((0, 0), (1, 0)), seg((0, 0), (0, 1))) == SQ
    assert minkowski_sum(TRI, TRI) == Polytope.hull([(0, 0), (2, 0), (0, 2)])


# -- complexes ---------------------------------------------------------------


def test_complex_examples():
    assert build_complex([SQ, SQ.translate((1, 0))]).f_vector() == [6, 7, 2]
    assert build_complex([TRI]).f_vector() == [3, 3, 1]


def test_stars():
    C = build_complex([SQ.translate(v) for v in [(-1, -1), (-1, 0), (0, -1), (0, 0)]])
    assert len(C.star_n(pt(0, 0))) == 4
    assert C.star(SQ) == [SQ]
    D = build_complex([Polytope.box((-1,), (0,)), Polytope.box((0,), (1,))])
    assert len(D.star_n(pt(0))) == 2


def test_subdivision_examples():
    c = (F(1, 3), F(1, 3))
    corners = [(0, 0), (1, 0), (0, 1)]
    mids = [(H, 0), (H, H), (0, H)]
    # one small triangle per (corner, midpoint of an edge through that corner)
    bary = [Polytope.hull([c, v, m]) for v in corners for m in mids if TRI.open_face_containing(m).contains(v)]
    assert len(bary) == 6
    assert subdivides(build_complex(bary), build_complex([TRI]))
    grid = build_complex([SQ.translate(v) for v in [(0, 0), (1, 0), (0, 1), (1, 1)]])
    shifted = build_complex([SQ.translate((H, 0))])
    assert not subdivides(shifted, grid)
    halves = build_complex([Polytope.box((0,), (H,)), Polytope.box((H,), (1,))])
    assert subdivides(halves, build_complex([Polytope.box((0,), (1,))]))


def test_scaled_class_counts():
    S = scale_periodic(grid_complex(2), 2)
    assert open_face_class_count(S, 0) == 4 and open_face_class_count(S, 2) == 4
    T = scale_periodic(grid_complex(1), 3)
    assert open_face_class_count(T, 0) == 3 and open_face_class_count(T, 1) == 3
    assert open_face_class_count(grid_complex(2), 2) == 1
    assert open_face_class_count(scale_periodic(grid_complex(1), 5), 1) == 5


def test_transversality_examples():
    G = grid_complex(2)
    assert is_transversal(G, PolytopalSet([seg((F(1, 4), F(1, 4)), (F(3, 4), F(3, 4)))]))
    assert not is_transversal(G, PolytopalSet([seg((H, H), (1, 1))]))
    assert is_transversal(G, PolytopalSet([], 2))
    assert transversal_vertices(G, PolytopalSet([seg((F(1, 4), F(1, 4)), (F(3, 4), F(3, 4)))])).vertices == []
    shifted = build_periodic(IntLattice.standard(2), [SQ.translate((H, 0))])
    rep = transversal_vertices(shifted, PolytopalSet([seg((-H, -H), (H, H))]))
    # crossings: x = 1/2 at (1/2, 1/2); y = 0 at the origin, reported as its translate (1, 0)
    assert sorted(v.point for v in rep.vertices) == [(H, H), (1, 0)]


# -- lattices ---------------------------------------------------------------


def test_snf_examples():
    assert snf_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert snf_diagonal([[1, 0], [0, 1]]) == [1, 1]
    # d1 = gcd of entries = 2 and d1 d2 = |det| = 4, so the diagonal is (2, 2)
    assert snf_diagonal([[2, 4], [0, 2]]) == [2, 2]


@pytest.mark.parametrize("M,idx", [([[2, 0], [0, 3]], 6), ([[1, 0], [0, 1]], 1), ([[1, 1], [0, 2]], 2)])
def test_index_examples(M, idx):
    assert index_of_image(M) == coset_count(M) == idx


@pytest.mark.parametrize("gens,sat", [([(2, 0)], ((1, 0),)), ([(2, 2)], ((1, 1),)),
                                      ([(2, 0), (0, 3)], ((1, 0), (0, 1)))])
def test_saturation_examples(gens, sat):
    assert saturate(IntLattice.from_generators(gens, 2)).basis == sat


@pytest.mark.parametrize("point,direction,gen", [((0, 0), (1, 0), (1, 0)), ((0, 0), (1, 2), (1, 2)),
                                                 ((0, H), (1, 1), (1, 1))])
def test_stabilizer_examples(point, direction, gen):
    S = stabilizer_lattice(IntLattice.standard(2), point, [direction])
    assert S.basis == (gen,)


def test_dual_and_covolume_examples():
    assert dual_lattice(IntLattice.from_generators([(2,)])).basis == ((H,),)
    assert covolume(dual_lattice(IntLattice.from_generators([(1, 1), (0, 2)]))) == H
    assert covolume(IntLattice.standard(2)) == 1
    assert covolume(IntLattice.from_generators([(2, 0), (1, 3)])) == 6


@pytest.mark.parametrize("c,beta", [(1, 1), (2, 3), (3, F(1, 2))])
def test_form_lattice_one_dimensional(c, beta):
    L = form_lattice(BilinearForm([[beta]]), IntLattice.from_generators([(c,)]), [(1,)])
    assert L.basis == ((beta * c,),)


def test_form_lattice_examples():
    std = [(1, 0), (0, 1)]
    assert form_lattice(BilinearForm([[1, 0], [0, 1]]), IntLattice.standard(2), std) == IntLattice.standard(2)
    assert form_lattice(BilinearForm([[2, 0], [0, 1]]), IntLattice.standard(2), std).basis == ((2, 0), (0, 1))


# -- tropical ---------------------------------------------------------------


def test_val_function_examples():
    assert val_function(LINE, (2, 3)) == (0, [(0, 0)])
    assert val_function(STEP, (-1,)) == (0, [(0,), (1,)])
    assert sup_valuation(STEP, Polytope.box((-2,), (-1,))) == -1
    assert min(val_function(STEP, v)[0] for v in [(-2,), (-1,)]) == val_function(STEP, (-2,))[0]


def test_hypersurface_examples():
    assert tropical_hypersurface(TropicalPolynomial.make({(1, 1): 3}), Polytope.box((-1, -1), (1, 1))).is_empty()
    assert tropical_hypersurface(STEP, Polytope.box((-3,), (0,))).cells == [pt(-1)]
    H_ = tropical_hypersurface(LINE, Polytope.box((-2, -2), (2, 2)))
    assert check_pure_dimension(H_.polytopal_set(), 1)[0]
    assert not check_pure_dimension(PolytopalSet([seg((0, 0), (1, 0)), SQ.translate((3, 3))]), 1)[0]
    assert check_pure_dimension(PolytopalSet([], 2), 1)[0]


def test_prevariety_examples():
    W = Polytope.box((-2, -2), (2, 2))
    other = TropicalPolynomial.make({(0, 0): 0, (1, 0): -H, (0, 1): -1})
    S = prevariety([LINE, other], W)
    assert all(P.dim == 0 for P in S) and len(S) == 1
    far = TropicalPolynomial.make({(0,): 0, (1,): -1})
    assert len(prevariety([STEP, far], Polytope.box((-3,), (3,)))) == 0


def test_concavity_report_examples():
    W = Polytope.box((-2, -2), (2, 2))
    S = tropical_hypersurface(LINE, W).polytopal_set()
    rep = check_total_concavity(S, samples=[(0, 0), (-1, -1), (0, 1), (1, 0)], window=W)
    assert rep.verdicts == ["concave"] * 4
    rep = check_total_concavity(S, samples=[(2, 0)], window=W)
    assert rep.verdicts == ["boundary"]
    rep = check_total_concavity(PolytopalSet([seg((0, 0), (1, 0))]), samples=[(0, 0)])
    assert rep.verdicts == ["not concave"]


# -- piecewise linear functions ---------------------------------------------


def test_abs_function():
    f = abs_function()
    assert f.evaluate((H,)) == H and f.evaluate((0,)) == 0
    assert model_function_check(f) == (True, 1)
    assert is_strongly_polyhedral(f)
    assert dual_cell(f, pt(0)) == seg((-1,), (1,))
    assert dual_cell_by_inequalities(f, (0,)) == seg((-1,), (1,))
    assert dual_cell(f, Polytope.box((0,), (1,))) == pt(1)
    assert degree_at_vertex(f, (0,)) == 2


def test_peg_denominators():
    C = build_complex([Polytope.box((-1,), (0,)), Polytope.box((0,), (1,))])
    left, right = C.cells_of_dim(1)
    assert model_function_check(PLConvexFunction(C, {left: ((0,), 0), right: ((H,), 0)})) == (True, 2)


def test_fan_function_dual_cell():
    W = [Polytope.box((-1, -1), (0, 0)), Polytope.hull([(0, 0), (0, -1), (1, -1), (1, 1)]),
         Polytope.hull([(0, 0), (-1, 0), (-1, 1), (1, 1)])]
    C = build_complex(W)
    pieces = {W[0]: ((0, 0), 0), W[1]: ((1, 0), 0), W[2]: ((0, 1), 0)}
    f = PLConvexFunction(C, pieces)
    assert is_strongly_polyhedral(f)
    assert dual_cell(f, pt(0, 0)) == TRI


def test_one_dimensional_voronoi():
    PC, g = voronoi_model_function(IntLattice.standard(1), BilinearForm([[1]]))
    assert g.evaluate((F(1, 8),)) == 0
    assert [P.vertices for P in PC.top_cells()] == [((F(1, 4),), (F(3, 4),)), ((F(3, 4),), (F(5, 4),))]
    for u in [F(k, 16) for k in range(-16, 17)]:
        c = F(round(2 * u), 2)
        assert g.evaluate((u,)) == c * u - c * c / 2
    D = dual_complex_of(g)
    assert all(s.dim + D.cells[s].dim == 1 for s in D.cells)
    _, N = model_function_check(g)
    assert N == 2
    g2 = scaled(g, N)
    assert dual_cell(g2, pt(F(1, 4))) == seg((0,), (1,))
    assert degree_at_vertex(g2, (F(1, 4),)) == 1


def test_two_dimensional_voronoi():
    PC, g = voronoi_model_function(IntLattice.standard(2), BilinearForm([[1, 0], [0, 1]]))
    for P in PC.top_cells():
        c = tuple(sum(v[i] for v in P.vertices) / 4 for i in range(2))
        assert volume(P) == F(1, 4) and all(2 * x == int(2 * x) for x in c)
    for v in vertex_classes(g):
        assert volume(dual_cell(g, v)) == F(1, 4)


def test_voronoi_grid_is_not_generic_for_the_diagonal():
    PC, _ = voronoi_model_function(IntLattice.standard(2), BilinearForm([[1, 0], [0, 1]]))
    sigma = [seg((-1, -1), (1, 1)), pt(-1, -1), pt(1, 1)]
    # the diagonal passes through the Voronoi vertex (1/4, 1/4)
    assert not is_generic(PC, sigma, 1)
    assert is_generic(PC, [], 1)


def test_one_dimensional_perturbation():
    PC, _ = perturb_to_generic(IntLattice.standard(1), BilinearForm([[1]]), [pt(0)], m_max=3, seed=7)
    for m in (1, 2, 3):
        assert is_generic(PC, [pt(0)], m)
        for P in scale_periodic(PC, m).cells_of_dim(0):
            assert P.vertices[0][0] != 0
    PC0, _ = voronoi_model_function(IntLattice.standard(1), BilinearForm([[1]]))
    assert perturb_to_generic(IntLattice.standard(1), BilinearForm([[1]]), [], m_max=3)[0] == PC0


# -- measures ----------------------------------------------------------------


def test_atom_examples():
    one = TropicalCycleInput.make(IntLattice.standard(1), [([[1]], [0], H)])
    [A] = atoms(one)
    assert A.J == (0,) and A.pieces == [seg((0,), (H,))]


@pytest.mark.parametrize("beta,rho", [(1, 1), (2, 2)])
def test_density_examples(beta, rho):
    inp = TropicalCycleInput.make(IntLattice.standard(1), [([[1]], [0], 1)])
    mu = canonical_measure(inp, [BilinearForm([[beta]])])
    assert mu.densities() == [rho] and mu.total_mass() == rho
    f = skeleton_affine_map(build_skeleton([Stratum((0, 1), F(1), (), ((0, 1),), (0,))]), IntLattice.standard(1))
    assert skeleton_measure(f, [BilinearForm([[beta]])]).densities() == [rho]


def test_multiplicity_examples():
    Delta = seg((H, -1), (H, 1))
    for m, idx in [(1, 1), (2, 2)]:
        inp = TropicalCycleInput.make(IntLattice.standard(2), [([[m], [0]], [0, F(1, 3)], 1)])
        assert multiplicity_of_component(Delta, inp) == idx


def test_skeleton_examples():
    assert build_skeleton([Stratum((0, 1), F(1))]).f_vector() == [2, 1]
    assert build_skeleton([Stratum((0,), F(1))]).f_vector() == [1]
    glued = build_skeleton([Stratum((0, 1), F(1), (2,)), Stratum((1, 2), F(1), (2,)), Stratum((1,), F(1))])
    assert glued.f_vector() == [3, 2]
    single = build_skeleton([Stratum((0, 1, 2), F(1), (), ((5, 7, 1), (2, 0, 3)), (H, 0))])
    skeleton_affine_map(single, IntLattice.standard(2))


def test_total_mass_examples():
    unit = PiecewiseHaarMeasure([HaarPiece(Polytope.box((0,), (1,)), F(1), ((1,),), "unit")])
    assert unit.total_mass() == 1
    assert PiecewiseHaarMeasure().total_mass() == 0


def test_dimension_bound_examples():
    tri = build_skeleton([Stratum((0, 1, 2), F(1), (), ((0, 1, 0), (0, 0, 1)), (0, 0))])
    r, w = dimension_bound(skeleton_affine_map(tri, IntLattice.standard(2)))
    assert r == 2 and len(tri.strata[w].components) == 3
    const = build_skeleton([Stratum((0, 1, 2), F(1), (), ((1, 1, 1), (0, 0, 0)), (0, 0))])
    assert dimension_bound(skeleton_affine_map(const, IntLattice.standard(2)))[0] == 0

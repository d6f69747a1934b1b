"""Mixed volumes, lattice-index multiplicities and the canonical piecewise Haar
measures: the atom formula on periodic tropical cycles and the simplex formula
on skeletons of semistable models."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import ceil, factorial, floor
from typing import Iterable, Sequence

from . import linalg as la
from .geometry import Polytope, lebesgue_volume, minkowski_sum, split_by_hyperplanes, volume
from .lattices import (AffineLatticeMap, BilinearForm, IntLattice, coordinates, covolume, dual_lattice,
                       form_lattice, fundamental_parallelepiped, generalized_index, index_of_image,
                       smith_normal_form, solve_integer, span_lattice_basis, stabilizer_lattice)


class MeasureError(ValueError):
    """Invalid measure input; ``witness`` names the offending object."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# -- mixed volumes -----------------------------------------------------------


def mixed_volume(Ps: Sequence[Polytope]) -> Fraction:
    """Polarization ``(1/d!) sum_S (-1)^(d-|S|) vol(sum_{i in S} P_i)``."""
    d = len(Ps)
    if d == 0:
        raise ValueError("mixed volume of an empty family")
    if any(P.ambient_dim != d for P in Ps):
        raise ValueError(f"mixed volume needs {d} polytopes in R^{d}")
    total = Fraction(0)
    for k in range(1, d + 1):
        sign = -1 if (d - k) % 2 else 1
        for S in combinations(range(d), k):
            Q = Ps[S[0]]
            for i in S[1:]:
                Q = minkowski_sum(Q, Ps[i])
            total += sign * lebesgue_volume(Q)
    return total / factorial(d)


def zonotope_mixed_volume(generators: Sequence[Sequence[Sequence]]) -> Fraction:
    """Mixed volume of zonotopes ``Z_i = sum_k [0, g_ik]`` by the determinant sum."""
    d = len(generators)
    total = Fraction(0)
    for choice in product(*generators):
        total += abs(la.det(la.from_columns([la.vec(g) for g in choice], d)))
    return total / factorial(d)


def lattice_mixed_volume(lattices: Sequence[IntLattice]) -> Fraction:
    """Mixed volume of the Hermite-basis fundamental parallelepipeds."""
    for L in lattices:
        if not L.is_full_rank:
            raise ValueError("mixed volume of a lattice that is not full rank")
    return mixed_volume([Polytope.hull(fundamental_parallelepiped(L)) for L in lattices])


def _sum_forms(bs: Sequence[BilinearForm]) -> BilinearForm:
    n = bs[0].dim
    return BilinearForm([[sum(b.matrix[i][j] for b in bs) for j in range(n)] for i in range(n)])


def form_mixed_volume(forms: Sequence[BilinearForm], lattice_of) -> Fraction:
    """Symmetric multilinear extension of ``b -> covol(lattice_of(b))``, polarized in the forms.

    On equal forms this is the volume of a fundamental domain, hence the
    mixed volume of any fundamental domains; unlike the mixed volume of fixed
    parallelepipeds it does not depend on a choice of basis.
    """
    d = len(forms)
    std = [tuple(int(i == k) for k in range(d)) for i in range(d)]
    total = Fraction(0)
    for k in range(1, d + 1):
        sign = -1 if (d - k) % 2 else 1
        for S in combinations(range(d), k):
            L = lattice_of(_sum_forms([forms[i] for i in S]))
            if L.rank != d:
                raise MeasureError("form lattice is not complete")
            total += sign * covolume(L, std)
    return total / factorial(d)


# -- tropical cycle input and atoms ------------------------------------------


@dataclass(frozen=True)
class CycleSimplex:
    """Image of ``Sigma(d, vpi) = {x >= 0, sum x <= vpi}`` under ``x -> M x + t``."""

    map: AffineLatticeMap
    vpi: Fraction

    @property
    def d(self) -> int:
        return self.map.d

    def vertices(self) -> list[tuple]:
        t = self.map.translation
        pts = [t]
        for c in self.map.columns():
            pts.append(la.add(t, la.scale(self.vpi, c)))
        return pts

    def polytope(self) -> Polytope:
        return Polytope.hull(self.vertices())


@dataclass
class TropicalCycleInput:
    """Simplices ``rho_j`` covering a tropical variety in R^n/Lambda, with degree ``[X':X]``."""

    lattice: IntLattice
    simplices: list
    degree: int = 1

    def __post_init__(self):
        if not self.lattice.is_full_rank:
            raise MeasureError("the lattice must be full rank")
        if int(self.degree) != self.degree or self.degree < 1:
            raise MeasureError(f"degree must be a positive integer, got {self.degree}")
        if not self.simplices:
            raise MeasureError("a tropical cycle needs at least one simplex")
        ds = {s.d for s in self.simplices}
        if len(ds) != 1:
            raise MeasureError("simplices of different dimensions")
        for j, s in enumerate(self.simplices):
            if s.map.n != self.n:
                raise MeasureError(f"simplex {j} maps into R^{s.map.n}, lattice lives in R^{self.n}", j)
            if not s.map.is_injective:
                raise MeasureError(f"simplex {j}: linear part has rank {s.map.rank} < {s.d}", j)
            if s.vpi <= 0:
                raise MeasureError(f"simplex {j}: v(pi) must be positive", j)

    @classmethod
    def make(cls, lattice: IntLattice, maps: Iterable, degree: int = 1) -> "TropicalCycleInput":
        """``maps`` holds triples ``(M, t, vpi)`` with ``M`` given by rows."""
        simplices = [CycleSimplex(AffineLatticeMap(M, t), la.to_q(vpi)) for M, t, vpi in maps]
        return cls(lattice, simplices, degree)

    @property
    def n(self) -> int:
        return self.lattice.ambient_dim

    @property
    def d(self) -> int:
        return self.simplices[0].d


def abelian_cycle_input(lattice: IntLattice) -> TropicalCycleInput:
    """Tropical variety of ``X = A`` as the image of the Kuhn triangulation of R^n/Z^n.

    The simplices are parametrized through the lattice basis ``E``, i.e. via
    the isogeny ``R^n/Z^n -> R^n/Lambda`` of degree ``|det E|``, which becomes
    the degree ``[X':X]`` of the input.
    """
    n = lattice.ambient_dim
    if not lattice.is_integral:
        raise MeasureError("the lattice basis must be integral")
    E = lattice.basis_columns()
    maps = []
    for perm in permutations(range(n)):
        cols, acc = [], [0] * n
        for i in perm:
            acc[i] = 1
            cols.append(la.matvec(E, acc))
        maps.append((la.from_columns(cols, n), [0] * n, 1))
    return TropicalCycleInput.make(lattice, maps, abs(la.det(E)))


def _lattice_shifts(S_cols, A_pts, B_pts) -> list[tuple]:
    """Integer ``z`` with ``conv(A)`` and ``conv(B) + S z`` possibly meeting."""
    Sinv = la.inverse(S_cols)
    ca = [la.matvec(Sinv, p) for p in A_pts]
    cb = [la.matvec(Sinv, p) for p in B_pts]
    ranges = []
    for i in range(len(S_cols)):
        lo = min(a[i] for a in ca) - max(b[i] for b in cb)
        hi = max(a[i] for a in ca) - min(b[i] for b in cb)
        ranges.append(range(ceil(lo), floor(hi) + 1))
    return list(product(*ranges))


@dataclass
class SpanGroup:
    """Simplices whose affine spans agree modulo Lambda, in shared coordinates.

    ``u = anchor + N x + shifts[j]`` relates the local coordinates ``x`` of
    member ``j`` to R^n; ``stabilizer`` is Lambda(A_sigma) and ``S`` its basis
    in x-coordinates (columns).
    """

    members: list
    anchor: tuple
    basis: list
    shifts: dict
    stabilizer: IntLattice
    S: list
    local: dict  # j -> simplex in x-coordinates

    def to_ambient(self, j: int, P: Polytope) -> Polytope:
        off = la.add(self.anchor, self.shifts[j])
        return P.affine_image(la.from_columns(self.basis, len(self.anchor)), off)


def _local_simplex(vertices, anchor, basis, n) -> Polytope:
    Nm = la.from_columns(basis, n)
    pts = []
    for v in vertices:
        x = la.solve(Nm, la.sub(v, anchor))
        if x is None:
            raise MeasureError("simplex leaves the affine span of its group")
        pts.append(x)
    return Polytope.hull(pts)


def span_groups(inp: TropicalCycleInput) -> list[SpanGroup]:
    """Partition the simplices by affine span modulo Lambda."""
    n, lam = inp.n, inp.lattice
    E = lam.basis_columns()
    groups: list[SpanGroup] = []
    for j, s in enumerate(inp.simplices):
        dirs = s.map.columns()
        t = s.map.translation
        placed = False
        for g in groups:
            if not all(la.in_span(c, g.basis) for c in dirs) or len(dirs) != len(g.basis):
                continue
            perp = la.orthogonal_complement(g.basis, n)
            if perp:
                P = [list(p) for p in perp]
                z = solve_integer(la.matmul(P, E), la.matvec(P, la.sub(t, g.anchor)))
                if z is None:
                    continue
                shift = la.matvec(E, z)
            else:
                shift = tuple(Fraction(0) for _ in range(n))
            g.members.append(j)
            g.shifts[j] = shift
            g.local[j] = _local_simplex([la.sub(v, shift) for v in s.vertices()], g.anchor, g.basis, n)
            placed = True
            break
        if not placed:
            basis = span_lattice_basis(dirs, n)
            stab = stabilizer_lattice(lam, t, dirs)
            S = la.from_columns(list(coordinates(stab, basis).basis), len(basis))
            zero = tuple(Fraction(0) for _ in range(n))
            g = SpanGroup([j], t, basis, {j: zero}, stab, S, {})
            g.local[j] = _local_simplex(s.vertices(), t, basis, n)
            groups.append(g)
    return groups


def _overlapping_translates(g: SpanGroup, P: Polytope, k: int):
    """Translates ``local[k] + S z`` whose interior meets ``P``'s."""
    Q = g.local[k]
    out = []
    for z in _lattice_shifts(g.S, P.vertices, Q.vertices):
        T = Q.translate(la.matvec(g.S, [Fraction(c) for c in z]))
        I = P.intersect(T)
        if I is not None and I.dim == P.dim:
            out.append((z, T))
    return out


def check_injective_projection(inp: TropicalCycleInput) -> None:
    """Require each ``rho_j -> R^n/Lambda`` to be injective on interiors."""
    for g in span_groups(inp):
        for j in g.members:
            for z, _ in _overlapping_translates(g, g.local[j], j):
                if any(z):
                    raise MeasureError(f"simplex {j} overlaps its own translate by {z}", j)


@dataclass
class Atom:
    """Closure of an intersection of simplex interiors and complements modulo Lambda."""

    pieces: list
    J: tuple
    group: int
    anchor: tuple
    basis: list  # Z-basis of L_sigma ∩ Z^n
    stabilizer: IntLattice

    @property
    def dim(self) -> int:
        return len(self.basis)


def atoms(inp: TropicalCycleInput, groups: list[SpanGroup] | None = None) -> list[Atom]:
    """Atoms of the covering by the ``rho_j``, subdivided into genuine polytopes."""
    check_injective_projection(inp)
    groups = span_groups(inp) if groups is None else groups
    out: list[Atom] = []
    for gi, g in enumerate(groups):
        by_J: dict[tuple, list] = {}
        for j in g.members:
            R = g.local[j]
            overl = [(k, T) for k in g.members for _, T in _overlapping_translates(g, R, k)]
            cuts = sorted({h for _, T in overl for h in T.facets})
            for piece in split_by_hyperplanes(R, cuts):
                p = piece.interior_point()
                J = tuple(sorted({k for k, T in overl if T.in_relative_interior(p)}))
                if J[0] == j:
                    by_J.setdefault(J, []).append(g.to_ambient(j, piece))
        for J in sorted(by_J):
            out.append(Atom(sorted(by_J[J]), J, gi, g.anchor, g.basis, g.stabilizer))
    return out


# -- measures ----------------------------------------------------------------


@dataclass(frozen=True)
class HaarPiece:
    """Constant density w.r.t. Lebesgue measure in the coordinates of ``basis``."""

    support: Polytope
    density: Fraction
    basis: tuple
    label: str = ""

    def volume(self) -> Fraction:
        return volume(self.support, list(self.basis))

    def mass(self) -> Fraction:
        return self.density * self.volume()


@dataclass
class PiecewiseHaarMeasure:
    pieces: list = field(default_factory=list)

    def total_mass(self) -> Fraction:
        return sum((p.mass() for p in self.pieces), Fraction(0))

    def densities(self) -> list[Fraction]:
        return [p.density for p in self.pieces]

    def is_positive(self) -> bool:
        return all(p.density > 0 for p in self.pieces)


def total_mass(mu: PiecewiseHaarMeasure) -> Fraction:
    return mu.total_mass()


def _form_terms(forms) -> list[tuple[int, list[BilinearForm]]]:
    """Multilinear expansion: a pair ``(b_plus, b_minus)`` stands for ``b_plus - b_minus``."""
    slots = []
    for b in forms:
        if isinstance(b, BilinearForm):
            slots.append([(1, b.require_positive_definite())])
        else:
            bp, bm = b
            slots.append([(1, bp.require_positive_definite()), (-1, bm.require_positive_definite())])
    terms = []
    for choice in product(*slots):
        sign = 1
        for s, _ in choice:
            sign *= s
        terms.append((sign, [b for _, b in choice]))
    return terms


def _check_forms(forms, n: int, d: int):
    if len(forms) != d:
        raise MeasureError(f"need {d} forms, got {len(forms)}")
    for b in forms:
        for f in ([b] if isinstance(b, BilinearForm) else list(b)):
            if f.dim != n:
                raise MeasureError(f"form of dimension {f.dim} on R^{n}")


def atom_density(inp: TropicalCycleInput, atom: Atom, forms, basis: Sequence[Sequence] | None = None) -> Fraction:
    """Constant density of the canonical measure on ``atom``.

    ``basis`` is a Z-basis of ``L_sigma ∩ Z^n`` fixing the coordinates on
    ``L_sigma`` (default: the atom's Hermite basis); the density refers to
    Lebesgue measure in these coordinates.
    """
    n, d = inp.n, inp.d
    _check_forms(forms, n, d)
    N = [la.vec(v) for v in (atom.basis if basis is None else basis)]
    if len(N) != d:
        raise MeasureError(f"basis needs {d} vectors")
    stab = coordinates(atom.stabilizer, N)
    Ninv = la.left_inverse(N)
    dual = dual_lattice(stab)
    vol_stab = covolume(stab, [tuple(int(i == k) for k in range(d)) for i in range(d)])
    vol_dual = covolume(dual, [tuple(int(i == k) for k in range(d)) for i in range(d)])
    idx_sum = Fraction(0)
    for j in atom.J:
        K = la.matmul(Ninv, [list(r) for r in inp.simplices[j].map.linear])
        image = la.matmul(la.transpose(K), dual.basis_columns())
        try:
            idx = Fraction(index_of_image(image))
        except ValueError:
            idx = generalized_index(IntLattice.from_generators(la.columns(image), d), IntLattice.standard(d))
        idx_sum += idx
    V = Fraction(0)
    for sign, bs in _form_terms(forms):
        V += sign * form_mixed_volume(bs, lambda b: form_lattice(b, atom.stabilizer, N))
    return Fraction(factorial(d), inp.degree) * idx_sum * V / (vol_dual * vol_stab)


def canonical_measure(inp: TropicalCycleInput, forms, bases: dict | None = None) -> PiecewiseHaarMeasure:
    """Canonical measure of the cycle; ``bases`` optionally overrides the basis per atom index."""
    _check_forms(forms, inp.n, inp.d)
    mu = PiecewiseHaarMeasure()
    for i, A in enumerate(atoms(inp)):
        N = A.basis if not bases or i not in bases else [la.vec(v) for v in bases[i]]
        rho = atom_density(inp, A, forms, N)
        for P in A.pieces:
            mu.pieces.append(HaarPiece(P, rho, tuple(tuple(v) for v in N), f"atom {i} J={list(A.J)}"))
    return mu


def component_index(M, directions: Sequence[Sequence]) -> int:
    """``[Z^n/N_Delta : q_Delta(M Z^d)]`` for ``L_Delta = span(directions)``."""
    M = [[la.to_q(x) for x in row] for row in M]
    n = len(M)
    d = len(M[0])
    Nd = span_lattice_basis(directions, n)
    if len(Nd) + d != n:
        raise MeasureError(f"codimension of the cell is {n - len(Nd)}, expected {d}")
    if Nd:
        U, D, _ = smith_normal_form(la.from_columns(Nd, n))
        tail = [list(r) for r in la.matmul([[Fraction(x) for x in r] for r in U], M)[len(Nd):]]
    else:
        tail = M
    val = abs(la.det(tail))
    if val == 0:
        raise MeasureError("the cell is not transversal to the simplex")
    return int(val)


def multiplicity_of_component(Delta: Polytope, inp: TropicalCycleInput) -> Fraction:
    """``(1/[X':X]) sum_j ind(Delta, f_j)`` over the simplices meeting ``Delta`` mod Lambda."""
    n, d = inp.n, inp.d
    if Delta.dim != n - d:
        raise MeasureError(f"cell has dimension {Delta.dim}, expected codimension {d}")
    E = inp.lattice.basis_columns()
    total = 0
    for j, s in enumerate(inp.simplices):
        rho = s.polytope()
        meets = False
        for z in _lattice_shifts(E, rho.vertices, Delta.vertices):
            if rho.intersect(Delta.translate(la.matvec(E, [Fraction(c) for c in z]))) is not None:
                meets = True
                break
        if not meets:
            continue
        dirs = list(Delta.directions)
        if la.rank([list(v) for v in dirs] + s.map.columns()) < len(dirs) + d:
            raise MeasureError(f"cell is not transversal to simplex {j}", j)
        total += component_index(s.map.linear, dirs)
    return Fraction(total, inp.degree)


# -- skeletons ---------------------------------------------------------------


@dataclass(frozen=True)
class Stratum:
    components: tuple
    vpi: Fraction
    closure_of: tuple = ()
    M: tuple | None = None  # n x |components|, columns follow ``components``
    t: tuple | None = None

    @property
    def dim(self) -> int:
        """Dimension of the simplex Delta_S."""
        return len(self.components) - 1


class SkeletonError(MeasureError):
    pass


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class SkeletonComplex:
    """One simplex per stratum, glued along faces coming from shared strata closures.

    ``cells`` maps each class representative ``(stratum, face)`` to its members;
    ``upper[s]`` lists the strata whose closure contains stratum ``s``
    (reflexive, transitive).
    """

    strata: list
    upper: list
    cells: dict

    def simplex_vertices(self, s: int) -> list[tuple]:
        S = self.strata[s]
        return [(s, frozenset([c])) for c in S.components]

    def cell_of(self, s: int, face) -> tuple:
        face = frozenset(face)
        for rep, members in self.cells.items():
            if (s, face) in members:
                return rep
        raise KeyError((s, face))

    def f_vector(self) -> list[int]:
        top = max(len(F) for _, F in self.cells) if self.cells else 0
        out = [0] * top
        for _, F in self.cells:
            out[len(F) - 1] += 1
        return out

    @property
    def dim(self) -> int:
        return max(S.dim for S in self.strata)

    def vertices(self) -> list:
        return sorted(k for k in self.cells if len(k[1]) == 1)


def build_skeleton(strata: Sequence[Stratum]) -> SkeletonComplex:
    strata = list(strata)
    m = len(strata)
    for i, S in enumerate(strata):
        if not S.components or len(set(S.components)) != len(S.components):
            raise SkeletonError(f"stratum {i}: components must be distinct and nonempty", (i,))
        if S.vpi <= 0:
            raise SkeletonError(f"stratum {i}: v(pi) must be positive", (i,))
        for k in S.closure_of:
            if not 0 <= k < m or k == i:
                raise SkeletonError(f"stratum {i}: bad closure reference {k}", (i, k))
            T = strata[k]
            if not set(T.components) < set(S.components):
                raise SkeletonError(f"strata {i} and {k}: components not nested along the closure", (i, k))
            if T.vpi != S.vpi:
                raise SkeletonError(f"strata {i} and {k}: v(pi) differs on a glued face", (i, k))
    # strict inclusion of component sets along closures makes the relation acyclic
    closure = [set(S.closure_of) for S in strata]
    changed = True
    while changed:
        changed = False
        for i in range(m):
            new = set(closure[i])
            for k in closure[i]:
                new |= closure[k]
            if new != closure[i]:
                closure[i], changed = new, True
    # upper[k]: strata S with k in closure*(S), i.e. Delta_k is a face of Delta_S
    upper = [sorted({k} | {i for i in range(m) if k in closure[i]}) for k in range(m)]
    uf = _UnionFind()
    for i, S in enumerate(strata):
        for r in range(1, len(S.components) + 1):
            for F in combinations(sorted(S.components), r):
                uf.find((i, frozenset(F)))
    for k, T in enumerate(strata):
        for r in range(1, len(T.components) + 1):
            for F in combinations(sorted(T.components), r):
                for i in upper[k]:
                    uf.union((k, frozenset(F)), (i, frozenset(F)))
    classes: dict = {}
    for key in uf.parent:
        classes.setdefault(uf.find(key), []).append(key)
    cells = {}
    for members in classes.values():
        members.sort(key=lambda x: (x[0], sorted(x[1])))
        cells[members[0]] = members
    return SkeletonComplex(strata, upper, dict(sorted(cells.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1])))))


def _stratum_map(S: Stratum, i: int) -> tuple[list, tuple]:
    if S.M is None or S.t is None:
        raise SkeletonError(f"stratum {i} has no affine map data", (i,))
    M = [[la.to_q(x) for x in row] for row in S.M]
    if any(len(r) != len(S.components) for r in M):
        raise SkeletonError(f"stratum {i}: map needs one column per component", (i,))
    if any(x.denominator != 1 for r in M for x in r):
        raise SkeletonError(f"stratum {i}: linear part must be integral", (i,))
    return M, la.vec(S.t)


@dataclass
class SkeletonMap:
    """Validated affine maps ``u -> M_S u + t_S`` on the simplices, continuous mod Lambda."""

    skeleton: SkeletonComplex
    lattice: IntLattice
    maps: list

    def vertex_image(self, s: int, comp) -> tuple:
        M, t = self.maps[s]
        S = self.skeleton.strata[s]
        col = la.columns(M)[S.components.index(comp)]
        return la.add(la.scale(S.vpi, col), t)

    def linear_part(self, s: int) -> list:
        """``l_S^(0)``: columns ``M_Y - M_Y0`` for the components after the first."""
        M, _ = self.maps[s]
        cols = la.columns(M)
        n = len(M)
        return la.from_columns([la.sub(c, cols[0]) for c in cols[1:]], n) if len(cols) > 1 else [[] for _ in range(n)]

    def rank(self, s: int) -> int:
        L = self.linear_part(s)
        return la.rank(L) if L and L[0] else 0


def skeleton_affine_map(skel: SkeletonComplex, lattice: IntLattice, maps: Sequence | None = None) -> SkeletonMap:
    """Assemble per-stratum maps, checking agreement modulo Lambda on glued faces."""
    data = []
    for i, S in enumerate(skel.strata):
        if maps is not None:
            M, t = maps[i]
            S = Stratum(S.components, S.vpi, S.closure_of, tuple(tuple(r) for r in M), tuple(t))
        data.append(_stratum_map(S, i))
    n = lattice.ambient_dim
    for i, (M, t) in enumerate(data):
        if len(M) != n:
            raise SkeletonError(f"stratum {i}: map lands in R^{len(M)}, expected R^{n}", (i,))
    f = SkeletonMap(skel, lattice, data)
    for k, T in enumerate(skel.strata):
        for i in skel.upper[k]:
            for c in T.components:
                diff = la.sub(f.vertex_image(i, c), f.vertex_image(k, c))
                if not lattice.contains(diff):
                    raise SkeletonError(f"maps of strata {i} and {k} disagree at vertex {c}", (i, k, c))
    return f


def standard_simplex(d: int, vpi) -> Polytope:
    vpi = la.to_q(vpi)
    pts = [tuple(Fraction(0) for _ in range(d))]
    for i in range(d):
        pts.append(tuple(vpi if k == i else Fraction(0) for k in range(d)))
    return Polytope.hull(pts)


def preimage_lattice(L0, lattice: IntLattice) -> IntLattice:
    """``Lambda_S = (l^(0))^{-1}(Lambda)`` for an injective integral ``l^(0)`` (rows)."""
    n = len(L0)
    cols = la.columns(L0)
    inter = stabilizer_lattice(lattice, [0] * n, cols)
    out = coordinates(inter, cols)
    if not out.is_full_rank:
        raise SkeletonError("preimage lattice is not complete")
    return out


def simplex_density(L0, lattice: IntLattice, forms) -> Fraction:
    """``d! V(Lambda_S^{L_1..L_d}) / covol(Lambda_S)`` for a non-degenerate simplex."""
    d = len(L0[0])
    LS = preimage_lattice(L0, lattice)
    std = [tuple(int(i == k) for k in range(d)) for i in range(d)]

    def induced(b):
        gens = [la.matvec(la.transpose(L0), b.gradient(lam)) for lam in lattice.basis]
        return IntLattice.from_generators(gens, d)

    V = Fraction(0)
    for sign, bs in _form_terms(forms):
        V += sign * form_mixed_volume(bs, induced)
    return factorial(d) * V / covolume(LS, std)


def skeleton_measure(f: SkeletonMap, forms) -> PiecewiseHaarMeasure:
    """Measure on the d-simplices: zero on degenerate ones, constant density on the rest."""
    n = f.lattice.ambient_dim
    d = len(forms)
    _check_forms(forms, n, d)
    mu = PiecewiseHaarMeasure()
    std = tuple(tuple(int(i == k) for k in range(d)) for i in range(d))
    for s, S in enumerate(f.skeleton.strata):
        if S.dim != d:
            continue
        support = standard_simplex(d, S.vpi)
        if f.rank(s) < d:
            rho = Fraction(0)
        else:
            rho = simplex_density(f.linear_part(s), f.lattice, forms)
        mu.pieces.append(HaarPiece(support, rho, std, f"stratum {s}"))
    return mu


def dimension_bound(f: SkeletonMap) -> tuple[int, int]:
    """Largest image dimension over all simplices and a witness stratum with fewest components."""
    best = None
    for s, S in enumerate(f.skeleton.strata):
        key = (-f.rank(s), len(S.components), s)
        if best is None or key < best:
            best = key
    return -best[0], best[2]

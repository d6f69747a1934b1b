"""Exact rational polytopes, cones, faces, local cones and concavity.

Both conversions (points -> facets and halfspaces -> vertices) go through
one integer double-description routine, :func:`_extreme_rays`.  Constraints
are processed in input order and all outputs are sorted, so every result is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Sequence

from . import linalg as la


def _primitive_int(v: Sequence) -> tuple:
    return la.content_primitive(v)


def _extreme_rays(rows: list[tuple], dim: int) -> list[tuple]:
    """Extreme rays of the pointed cone ``{x : r . x >= 0 for r in rows}``.

    ``rows`` are integer vectors of length ``dim`` and must have rank ``dim``.
    """
    uniq = []
    seen = set()
    for r in rows:
        if any(r) and r not in seen:
            seen.add(r)
            uniq.append(r)
    rows = uniq
    basis_idx: list[int] = []
    for i, r in enumerate(rows):
        if la.rank([list(rows[j]) for j in basis_idx] + [list(r)]) > len(basis_idx):
            basis_idx.append(i)
            if len(basis_idx) == dim:
                break
    if len(basis_idx) < dim:
        raise ValueError("constraint system is not pointed (rank deficient)")
    inv = la.inverse([[Fraction(x) for x in rows[i]] for i in basis_idx])
    rays = []
    zsets = []
    for j in range(dim):
        col = [inv[i][j] for i in range(dim)]
        rays.append(_primitive_int(col))
        zsets.append(frozenset(basis_idx[i] for i in range(dim) if i != j))
    done = set(basis_idx)
    for i, h in enumerate(rows):
        if i in done:
            continue
        vals = [sum(a * b for a, b in zip(h, r)) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new_rays, new_z = [], []
        for k, v in enumerate(vals):
            if v > 0:
                new_rays.append(rays[k])
                new_z.append(zsets[k])
            elif v == 0:
                new_rays.append(rays[k])
                new_z.append(zsets[k] | {i})
        for p in pos:
            for q in neg:
                common = zsets[p] & zsets[q]
                if len(common) < dim - 2:
                    continue
                if any(o != p and o != q and common <= zsets[o] for o in range(len(rays))):
                    continue
                r = tuple(vals[p] * a - vals[q] * b for a, b in zip(rays[q], rays[p]))
                new_rays.append(_primitive_int(r))
                new_z.append(common | {i})
        rays, zsets = new_rays, new_z
        done.add(i)
    return sorted(set(rays))


@dataclass(frozen=True, order=True)
class Halfspace:
    """``{u : normal . u >= offset}`` with a primitive integer normal."""

    normal: tuple
    offset: Fraction

    @classmethod
    def make(cls, normal, offset) -> "Halfspace":
        normal = la.vec(normal)
        offset = la.to_q(offset)
        if not any(normal):
            raise ValueError("halfspace normal must be nonzero")
        den = la.common_denominator(normal)
        ints = [int(x * den) for x in normal]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        return cls(tuple(x // g for x in ints), offset * den / g)

    def slack(self, u) -> Fraction:
        return la.dot(self.normal, u) - self.offset

    def contains(self, u) -> bool:
        return self.slack(u) >= 0

    def flipped(self) -> "Halfspace":
        return Halfspace(tuple(-x for x in self.normal), -self.offset)


class Polytope:
    """A nonempty rational polytope with synchronized V- and H-representations.

    ``facets`` are the irredundant inequalities within the affine span;
    ``equalities`` cut out the affine span.  ``halfspaces`` lists both, an
    equality contributing two opposite halfspaces.
    """

    __slots__ = ("ambient_dim", "vertices", "facets", "equalities", "point",
                 "directions", "__dict__")

    def __init__(self, ambient_dim, vertices, facets, equalities, point, directions):
        self.ambient_dim = ambient_dim
        self.vertices = vertices
        self.facets = facets
        self.equalities = equalities
        self.point = point
        self.directions = directions

    # -- construction -------------------------------------------------------

    @classmethod
    def hull(cls, points: Iterable[Sequence]) -> "Polytope":
        pts = sorted(set(la.vec(p) for p in points))
        if not pts:
            raise ValueError("hull of an empty point set")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise ValueError("points of different dimensions")
        p0, dirs = la.affine_hull(pts)
        k = len(dirs)
        perp = la.orthogonal_complement(dirs, n)
        equalities = tuple(sorted(Halfspace.make(w, la.dot(w, p0)) for w in
                                  (_primitive_int(w) for w in perp)))
        if k == 0:
            return cls(n, (pts[0],), (), equalities, pts[0], ())
        C = la.left_inverse(dirs)
        local = [la.matvec(C, la.sub(p, p0)) for p in pts]
        if k == 1:
            xs = [x[0] for x in local]
            lo, hi = min(xs), max(xs)
            vert = [pts[xs.index(lo)], pts[xs.index(hi)]]
            local_facets = [((Fraction(1),), lo), ((Fraction(-1),), -hi)]
        else:
            den = la.common_denominator(x for p in local for x in p)
            rows = [tuple([den] + [int(x * den) for x in p]) for p in local]
            rays = _extreme_rays(rows, k + 1)
            local_facets = [(tuple(Fraction(a) for a in r[1:]), Fraction(-r[0])) for r in rays]
            vert = []
            for p, x in zip(pts, local):
                tight = [a for a, c in local_facets if la.dot(a, x) == c]
                if len(tight) >= k and la.rank([list(a) for a in tight]) == k:
                    vert.append(p)
        Ct = la.transpose(C)
        facets = []
        for a, c in local_facets:
            normal = la.matvec(Ct, a)
            facets.append(Halfspace.make(normal, c + la.dot(normal, p0)))
        return cls(n, tuple(sorted(vert)), tuple(sorted(set(facets))), equalities, p0, tuple(dirs))

    @classmethod
    def from_halfspaces(cls, halfspaces: Iterable[Halfspace], n: int) -> "Polytope | None":
        """Polytope cut out by the halfspaces, or None when empty.

        Raises ValueError for unbounded systems.
        """
        hs = list(halfspaces)
        rows = []
        for h in hs:
            den = la.common_denominator(list(h.normal) + [h.offset])
            rows.append(tuple([int(-h.offset * den)] + [int(x * den) for x in h.normal]))
        rows.append(tuple([1] + [0] * n))
        try:
            rays = _extreme_rays(rows, n + 1)
        except ValueError:
            raise ValueError("halfspace system is unbounded") from None
        verts = []
        for r in rays:
            if r[0] == 0:
                raise ValueError("halfspace system is unbounded")
            verts.append(tuple(Fraction(x, r[0]) for x in r[1:]))
        if not verts:
            return None
        return cls.hull(verts)

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polytope":
        from itertools import product
        lo, hi = la.vec(lo), la.vec(hi)
        return cls.hull(product(*[(a, b) for a, b in zip(lo, hi)]))

    # -- basic queries ------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.directions)

    @property
    def halfspaces(self) -> tuple:
        eq = []
        for e in self.equalities:
            eq.extend([e, e.flipped()])
        return tuple(self.facets) + tuple(eq)

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.dim, self.vertices)

    def __repr__(self):
        vs = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"Polytope[dim={self.dim}]({vs})"

    def contains(self, u) -> bool:
        u = la.vec(u)
        return all(e.slack(u) == 0 for e in self.equalities) and all(f.slack(u) >= 0 for f in self.facets)

    def __contains__(self, u) -> bool:
        return self.contains(u)

    def contains_polytope(self, other: "Polytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def in_relative_interior(self, u) -> bool:
        u = la.vec(u)
        return all(e.slack(u) == 0 for e in self.equalities) and all(f.slack(u) > 0 for f in self.facets)

    def interior_point(self) -> tuple:
        """Vertex barycenter, a point of the relative interior."""
        m = len(self.vertices)
        return tuple(sum(c) / m for c in zip(*self.vertices))

    def bbox(self) -> tuple[tuple, tuple]:
        cols = list(zip(*self.vertices))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)

    def translate(self, v) -> "Polytope":
        v = la.vec(v)
        return Polytope.hull(la.add(p, v) for p in self.vertices)

    def scale(self, c) -> "Polytope":
        c = la.to_q(c)
        return Polytope.hull(la.scale(c, p) for p in self.vertices)

    def affine_image(self, M, t) -> "Polytope":
        return Polytope.hull(la.add(la.matvec(M, p), la.vec(t)) for p in self.vertices)

    def intersect(self, other: "Polytope") -> "Polytope | None":
        return Polytope.from_halfspaces(self.halfspaces + other.halfspaces, self.ambient_dim)

    def intersect_halfspaces(self, hs: Iterable[Halfspace]) -> "Polytope | None":
        return Polytope.from_halfspaces(self.halfspaces + tuple(hs), self.ambient_dim)

    # -- faces --------------------------------------------------------------

    @cached_property
    def _facet_sets(self) -> list[frozenset]:
        return [frozenset(i for i, v in enumerate(self.vertices) if f.slack(v) == 0) for f in self.facets]

    @cached_property
    def face_lattice(self) -> dict[frozenset, int]:
        """All closed faces as vertex-index sets, mapped to their dimension."""
        full = frozenset(range(len(self.vertices)))
        faces = {full}
        frontier = [s for s in set(self._facet_sets) if s]
        faces.update(frontier)
        while frontier:
            nxt = []
            for F in frontier:
                for G in self._facet_sets:
                    H = F & G
                    if H and H not in faces:
                        faces.add(H)
                        nxt.append(H)
            frontier = nxt
        return {F: self._set_dim(F) for F in faces}

    def _set_dim(self, F) -> int:
        pts = [self.vertices[i] for i in sorted(F)]
        return len(la.affine_hull(pts)[1])

    def faces(self, k: int) -> list["Polytope"]:
        """All closed faces of dimension ``k``, sorted."""
        if not 0 <= k <= self.dim:
            raise ValueError(f"face dimension {k} out of range 0..{self.dim}")
        out = [Polytope.hull(self.vertices[i] for i in F) for F, d in self.face_lattice.items() if d == k]
        return sorted(out)

    def all_faces(self) -> list["Polytope"]:
        return sorted(Polytope.hull(self.vertices[i] for i in F) for F in self.face_lattice)

    def open_face_containing(self, u) -> "Polytope":
        """The closed face whose relative interior contains ``u``."""
        u = la.vec(u)
        if not self.contains(u):
            raise ValueError(f"point {u} is not in the polytope")
        S = frozenset(range(len(self.vertices)))
        for f, fs in zip(self.facets, self._facet_sets):
            if f.slack(u) == 0:
                S &= fs
        return Polytope.hull(self.vertices[i] for i in sorted(S))

    def is_face(self, other: "Polytope") -> bool:
        idx = {v: i for i, v in enumerate(self.vertices)}
        try:
            S = frozenset(idx[v] for v in other.vertices)
        except KeyError:
            return False
        return S in self.face_lattice

    # -- volume -------------------------------------------------------------

    def triangulation(self) -> list[tuple[int, ...]]:
        """Pulling triangulation as tuples of vertex indices."""
        lattice = self.face_lattice
        by_dim: dict[int, list[frozenset]] = {}
        for F, d in lattice.items():
            by_dim.setdefault(d, []).append(F)
        memo: dict[frozenset, list[tuple]] = {}

        def tri(F: frozenset, d: int) -> list[tuple]:
            if F in memo:
                return memo[F]
            if d == 0:
                res = [tuple(F)]
            else:
                v0 = min(F)
                res = []
                for G in by_dim.get(d - 1, []):
                    if G < F and v0 not in G:
                        res.extend((v0,) + s for s in tri(G, d - 1))
            memo[F] = res
            return res

        full = frozenset(range(len(self.vertices)))
        return tri(full, self.dim)

    def local_coordinates(self, basis: Sequence[Sequence] | None = None) -> list[tuple]:
        """Vertex coordinates in ``point + span(basis)``."""
        if basis is None:
            basis = default_span_basis(self)
        B = la.from_columns([la.vec(b) for b in basis], self.ambient_dim)
        out = []
        for v in self.vertices:
            x = la.solve(B, la.sub(v, self.point))
            if x is None:
                raise ValueError("basis does not span the polytope's direction space")
            out.append(x)
        return out


def default_span_basis(P: Polytope) -> list[tuple]:
    """Z-basis of ``span(directions) ∩ Z^n`` for ``P``."""
    from .lattices import span_lattice_basis
    return span_lattice_basis(P.directions, P.ambient_dim)


def hull_from_points(points) -> Polytope:
    return Polytope.hull(points)


def faces(P: Polytope, k: int) -> list[Polytope]:
    return P.faces(k)


def open_face_containing(P: Polytope, u) -> Polytope:
    return P.open_face_containing(u)


def volume(P: Polytope, basis: Sequence[Sequence] | None = None) -> Fraction:
    """Exact volume of ``P`` in its affine span.

    Full-dimensional polytopes use Lebesgue measure unless a basis is given.
    Lower-dimensional ones are measured in the coordinates of ``basis``
    (columns spanning the direction space), by default a Z-basis of the
    saturated lattice of the span.  A point has volume 1.
    """
    k = P.dim
    if k == 0:
        return Fraction(1)
    if basis is None and k == P.ambient_dim:
        coords = [la.sub(v, P.point) for v in P.vertices]
    else:
        if basis is not None and len(basis) != k:
            raise ValueError(f"basis has {len(basis)} vectors, polytope has dimension {k}")
        coords = P.local_coordinates(basis)
    total = Fraction(0)
    for s in P.triangulation():
        base = coords[s[0]]
        M = [la.sub(coords[i], base) for i in s[1:]]
        total += abs(la.det(M))
    return total / factorial(k)


def lebesgue_volume(P: Polytope) -> Fraction:
    """Volume in the ambient space: zero unless full-dimensional."""
    return volume(P) if P.is_full_dimensional else Fraction(0)


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    if P.ambient_dim != Q.ambient_dim:
        raise ValueError("Minkowski sum of polytopes in different dimensions")
    return Polytope.hull(la.add(p, q) for p in P.vertices for q in Q.vertices)


def split_by_hyperplanes(P: Polytope, hyperplanes: Iterable[Halfspace]) -> list[Polytope]:
    """Cut ``P`` along the boundary hyperplanes of the given halfspaces.

    Only hyperplanes meeting the relative interior cut; pieces keep the
    dimension of ``P``.
    """
    pieces = [P]
    for h in hyperplanes:
        nxt = []
        for Q in pieces:
            s = [h.slack(v) for v in Q.vertices]
            if min(s) < 0 < max(s):
                for side in (h, h.flipped()):
                    R = Q.intersect_halfspaces([Halfspace(side.normal, side.offset)])
                    if R is not None and R.dim == Q.dim:
                        nxt.append(R)
            else:
                nxt.append(Q)
        pieces = nxt
    return sorted(pieces)


def covered_by(Q: Polytope, pieces: Sequence[Polytope]) -> bool:
    """Whether ``Q`` lies in the union of ``pieces``."""
    relevant = [P for P in pieces if P.intersect(Q) is not None]
    if not relevant:
        return False
    if any(P.contains_polytope(Q) for P in relevant):
        return True
    cuts = []
    for P in relevant:
        cuts.extend(P.halfspaces)
    for cell in split_by_hyperplanes(Q, cuts):
        x = cell.interior_point()
        if not any(P.contains(x) for P in relevant):
            return False
    return True


# -- cones -------------------------------------------------------------------


@dataclass(frozen=True)
class Cone:
    """Convex cone ``R_+ . generators`` with apex at the origin."""

    ambient_dim: int
    generators: tuple

    @classmethod
    def make(cls, generators, n: int) -> "Cone":
        gens = sorted(set(_primitive_int(g) for g in generators if any(la.to_q(x) for x in g)))
        keep = list(gens)
        for g in gens:
            rest = [h for h in keep if h != g]
            if rest and _cone_contains(rest, n, g):
                keep = rest
        return cls(n, tuple(keep))

    @classmethod
    def from_inequalities(cls, normals, n: int) -> "Cone":
        """The cone ``{x : a . x >= 0 for a in normals}``."""
        return dual_cone(Cone.make(normals, n))

    @classmethod
    def whole_space(cls, n: int) -> "Cone":
        e = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        return cls.make(e + [tuple(-x for x in v) for v in e], n)

    @cached_property
    def _hrep(self) -> tuple[list, list]:
        return _cone_hrep(list(self.generators), self.ambient_dim)

    def inequalities(self) -> list[tuple]:
        """Normals ``a`` with cone = ``{x : a . x >= 0}`` (equalities doubled)."""
        ineq, eqs = self._hrep
        return list(ineq) + [e for w in eqs for e in (w, tuple(-x for x in w))]

    def contains(self, v) -> bool:
        ineq, eqs = self._hrep
        v = la.vec(v)
        return all(la.dot(w, v) == 0 for w in eqs) and all(la.dot(a, v) >= 0 for a in ineq)

    def __contains__(self, v):
        return self.contains(v)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def same_set(self, other: "Cone") -> bool:
        return self.contains_cone(other) and other.contains_cone(self)

    def is_subspace(self) -> bool:
        return all(self.contains(tuple(-x for x in g)) for g in self.generators)

    @property
    def dim(self) -> int:
        if not self.generators:
            return 0
        return la.rank([list(g) for g in self.generators])


def _cone_hrep(gens: list, n: int) -> tuple[list, list]:
    """Inequality and equality normals of cone(gens), via the tangent cone at 0."""
    if not gens:
        eye = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        return [], eye
    zero = tuple(0 for _ in range(n))
    P = Polytope.hull([zero] + [tuple(Fraction(x) for x in g) for g in gens])
    ineq = [f.normal for f in P.facets if f.slack(zero) == 0]
    eqs = [e.normal for e in P.equalities]
    return sorted(set(ineq)), eqs


def _cone_contains(gens, n, v) -> bool:
    ineq, eqs = _cone_hrep(list(gens), n)
    return all(la.dot(w, v) == 0 for w in eqs) and all(la.dot(a, v) >= 0 for a in ineq)


def dual_cone(sigma: Cone) -> Cone:
    """``{u' : u . u' >= 0 for all u in sigma}``, generated by sigma's H-normals."""
    return Cone.make(sigma.inequalities(), sigma.ambient_dim)


def tangent_cone(P: Polytope, u) -> Cone:
    """Directions ``w`` with ``u + [0, eps) w`` inside ``P``."""
    u = la.vec(u)
    active = [f.normal for f in P.facets if f.slack(u) == 0]
    for e in P.equalities:
        active.extend([e.normal, tuple(-x for x in e.normal)])
    return Cone.from_inequalities(active, P.ambient_dim)


# -- polytopal sets ------------------------------------------------------------


class PolytopalSet:
    """Finite union of polytopes in a common ambient space."""

    def __init__(self, polytopes: Iterable[Polytope], ambient_dim: int | None = None):
        self.polytopes = sorted(set(polytopes))
        if ambient_dim is None:
            if not self.polytopes:
                raise ValueError("ambient dimension required for the empty set")
            ambient_dim = self.polytopes[0].ambient_dim
        self.ambient_dim = ambient_dim
        if any(P.ambient_dim != ambient_dim for P in self.polytopes):
            raise ValueError("polytopes of a polytopal set must share the ambient space")

    def __iter__(self):
        return iter(self.polytopes)

    def __len__(self):
        return len(self.polytopes)

    def contains(self, u) -> bool:
        return any(P.contains(u) for P in self.polytopes)

    def __contains__(self, u):
        return self.contains(u)

    def maximal(self) -> list[Polytope]:
        """Members not contained in any other member."""
        ps = self.polytopes
        return [P for P in ps if not any(Q is not P and Q != P and Q.contains_polytope(P) for Q in ps)]

    def bbox(self):
        lo = [min(P.bbox()[0][i] for P in self.polytopes) for i in range(self.ambient_dim)]
        hi = [max(P.bbox()[1][i] for P in self.polytopes) for i in range(self.ambient_dim)]
        return tuple(lo), tuple(hi)

    def pure_dimension(self) -> int | None:
        """Common dimension of the maximal members, or None (empty or mixed)."""
        dims = {P.dim for P in self.maximal()}
        return dims.pop() if len(dims) == 1 else None


def local_cone(S: PolytopalSet, u) -> list[Cone]:
    """One tangent cone per member of ``S`` containing ``u``."""
    u = la.vec(u)
    members = [P for P in S.polytopes if P.contains(u)]
    if not members:
        raise ValueError(f"point {u} is not in the polytopal set")
    return [tangent_cone(P, u) for P in members]


def is_concave_at(S: PolytopalSet, u) -> bool:
    """Whether the convex hull of the local cone at ``u`` is a linear subspace."""
    gens = [g for c in local_cone(S, u) for g in c.generators]
    if not gens:
        return True
    hull = Cone.make(gens, S.ambient_dim)
    return hull.is_subspace()

"""Polytopal complexes, Lambda-periodic decompositions of R^n/Lambda, stars,
subdivisions, 1/m scaling and transversality."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, floor
from typing import Iterable, Sequence

from . import linalg as la
from .geometry import Polytope, PolytopalSet, covered_by, default_span_basis, volume
from .lattices import IntLattice, covolume


class ComplexError(ValueError):
    """Raised when cells violate the complex axioms; ``witness`` names the culprits."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _face_closure(cells: Iterable[Polytope]) -> set:
    out = set()
    for P in cells:
        if P in out:
            continue
        out.update(P.all_faces())
    return out


def _boxes_meet(P: Polytope, Q: Polytope) -> bool:
    (plo, phi), (qlo, qhi) = P.bbox(), Q.bbox()
    return all(a <= d and c <= b for a, b, c, d in zip(plo, phi, qlo, qhi))


def _proper_pair(P: Polytope, Q: Polytope) -> bool:
    """Empty intersection or a common closed face of both."""
    if not _boxes_meet(P, Q):
        return True
    inter = P.intersect(Q)
    return inter is None or (P.is_face(inter) and Q.is_face(inter))


class PolytopalComplex:
    """A finite polytopal complex; cells sorted by (dimension, vertices)."""

    def __init__(self, cells: Iterable[Polytope], ambient_dim: int):
        self.cells = sorted(set(cells))
        self.ambient_dim = ambient_dim
        self.index = {P: i for i, P in enumerate(self.cells)}

    @property
    def incidence(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` with cell i a proper face of cell j."""
        pairs = []
        for j, P in enumerate(self.cells):
            for F in P.all_faces():
                i = self.index[F]
                if i != j:
                    pairs.append((i, j))
        return sorted(pairs)

    def __len__(self):
        return len(self.cells)

    def __eq__(self, other):
        return isinstance(other, PolytopalComplex) and self.cells == other.cells

    def __hash__(self):
        return hash(tuple(self.cells))

    def cells_of_dim(self, k: int) -> list[Polytope]:
        return [P for P in self.cells if P.dim == k]

    def f_vector(self) -> list[int]:
        top = max((P.dim for P in self.cells), default=-1)
        return [len(self.cells_of_dim(k)) for k in range(top + 1)]

    def maximal_cells(self) -> list[Polytope]:
        faces = {i for i, _ in self.incidence}
        return [P for i, P in enumerate(self.cells) if i not in faces]

    def cell_id(self, sigma: Polytope) -> int:
        try:
            return self.index[sigma]
        except KeyError:
            raise ValueError(f"{sigma} is not a cell of the complex") from None

    def star(self, sigma: Polytope) -> list[Polytope]:
        self.cell_id(sigma)
        return [P for P in self.cells if P.contains_polytope(sigma)]

    def star_n(self, sigma: Polytope) -> list[Polytope]:
        return [P for P in self.star(sigma) if P.dim == self.ambient_dim]

    def support(self) -> PolytopalSet:
        return PolytopalSet(self.maximal_cells(), self.ambient_dim)

    def cells_meeting(self, P: Polytope) -> list[Polytope]:
        return [Q for Q in self.cells if _boxes_meet(P, Q) and Q.intersect(P) is not None]


def build_complex(cells: Iterable[Polytope], ambient_dim: int | None = None,
                  check: bool = True) -> PolytopalComplex:
    """Close ``cells`` under faces and verify proper intersections."""
    cells = list(cells)
    if ambient_dim is None:
        if not cells:
            raise ValueError("ambient dimension required for an empty complex")
        ambient_dim = cells[0].ambient_dim
    closed = _face_closure(cells)
    C = PolytopalComplex(closed, ambient_dim)
    if check:
        tops = C.maximal_cells()
        for a in range(len(tops)):
            for b in range(a + 1, len(tops)):
                if not _proper_pair(tops[a], tops[b]):
                    raise ComplexError(
                        f"cells {C.index[tops[a]]} and {C.index[tops[b]]} intersect improperly",
                        (C.index[tops[a]], C.index[tops[b]]))
    return C


def subdivides(D, C) -> bool:
    """Whether every cell of ``C`` is the union of the cells of ``D`` inside it."""
    for Delta in _cells(C):
        basis = default_span_basis(Delta)
        inside = [Q for Q in _candidate_cells(D, Delta)
                  if Q.dim == Delta.dim and Delta.contains_polytope(Q)]
        total = sum((volume(Q, basis) if Delta.dim else Fraction(1) for Q in inside), Fraction(0))
        target = volume(Delta, basis) if Delta.dim else Fraction(1)
        if total != target:
            return False
    return True


def _cells(C) -> list[Polytope]:
    return list(C.cells)


def _candidate_cells(D, P: Polytope) -> list[Polytope]:
    if isinstance(D, PeriodicComplex):
        return [Q for Q, _, _ in D.translates_meeting(P)]
    return D.cells_meeting(P)


# -- periodic complexes ----------------------------------------------------------


def _floor_vec(x) -> tuple:
    return tuple(floor(c) for c in x)


class PeriodicComplex:
    """A Lambda-periodic polytopal complex stored by canonical representatives.

    A representative is the translate of a cell whose lexicographically
    smallest vertex has Lambda-coordinates in ``[0, 1)^n``.  Injectivity of
    representatives into R^n/Lambda is a queried property
    (:meth:`is_injective`), not an invariant.
    """

    def __init__(self, lattice: IntLattice, cells: Iterable[Polytope]):
        if not lattice.is_full_rank:
            raise ValueError("periodic complexes need a full-rank lattice")
        self.lattice = lattice
        self.ambient_dim = lattice.ambient_dim
        self._B = lattice.basis_columns()
        self._Binv = la.inverse(self._B)
        reps = {self.canonical_cell(P)[0] for P in cells}
        self.cells = sorted(reps)
        self.index = {P: i for i, P in enumerate(self.cells)}

    # -- coordinates --------------------------------------------------------

    def coords(self, u) -> tuple:
        return la.matvec(self._Binv, la.vec(u))

    def lattice_vector(self, k) -> tuple:
        return la.matvec(self._B, [Fraction(x) for x in k])

    def canonical_shift(self, u) -> tuple:
        """Integer Lambda-coordinates ``k`` with ``u - B k`` in the fundamental domain."""
        return _floor_vec(self.coords(u))

    def canonical_point(self, u) -> tuple:
        return la.sub(la.vec(u), self.lattice_vector(self.canonical_shift(u)))

    def canonical_cell(self, P: Polytope) -> tuple[Polytope, tuple]:
        """``(rep, k)`` with ``P = rep + B k``."""
        k = self.canonical_shift(P.vertices[0])
        if not any(k):
            return P, k
        return P.translate(la.scale(-1, self.lattice_vector(k))), k

    def class_id(self, P: Polytope) -> int:
        rep, _ = self.canonical_cell(P)
        try:
            return self.index[rep]
        except KeyError:
            raise ValueError(f"{P} is not a cell of the periodic complex") from None

    # -- queries ------------------------------------------------------------

    def __len__(self):
        return len(self.cells)

    def __eq__(self, other):
        return (isinstance(other, PeriodicComplex) and self.lattice == other.lattice
                and self.cells == other.cells)

    def __hash__(self):
        return hash((self.lattice, tuple(self.cells)))

    def cells_of_dim(self, k: int) -> list[Polytope]:
        return [P for P in self.cells if P.dim == k]

    def top_cells(self) -> list[Polytope]:
        return self.cells_of_dim(self.ambient_dim)

    def open_face_class_count(self, k: int) -> int:
        """Number of open faces of codimension ``k`` modulo Lambda."""
        if not 0 <= k <= self.ambient_dim:
            raise ValueError(f"codimension {k} out of range 0..{self.ambient_dim}")
        return len(self.cells_of_dim(self.ambient_dim - k))

    def _shift_range(self, A_pts, B_pts) -> list[tuple]:
        """Integer k with ``conv(A) ∩ (conv(B) + B k)`` possibly nonempty."""
        ca = [self.coords(p) for p in A_pts]
        cb = [self.coords(p) for p in B_pts]
        ranges = []
        for i in range(self.ambient_dim):
            lo = min(a[i] for a in ca) - max(b[i] for b in cb)
            hi = max(a[i] for a in ca) - min(b[i] for b in cb)
            ranges.append(range(ceil(lo), floor(hi) + 1))
        return list(product(*ranges))

    def translates_meeting(self, P: Polytope, dims: Sequence[int] | None = None):
        """All ``(cell translate, rep index, k)`` meeting ``P``."""
        out = []
        for i, R in enumerate(self.cells):
            if dims is not None and R.dim not in dims:
                continue
            for k in self._shift_range(P.vertices, R.vertices):
                T = R.translate(self.lattice_vector(k)) if any(k) else R
                if _boxes_meet(P, T) and T.intersect(P) is not None:
                    out.append((T, i, k))
        return out

    def cells_containing(self, u) -> list[tuple[Polytope, int, tuple]]:
        pt = Polytope.hull([la.vec(u)])
        return [(T, i, k) for T, i, k in self.translates_meeting(pt)]

    def star(self, sigma: Polytope) -> list[tuple[Polytope, int, tuple]]:
        """Translates of cells containing the cell ``sigma`` (any translate of a rep)."""
        self.class_id(sigma)
        return [(T, i, k) for T, i, k in self.translates_meeting(sigma) if T.contains_polytope(sigma)]

    def star_n(self, sigma: Polytope):
        return [t for t in self.star(sigma) if t[0].dim == self.ambient_dim]

    def is_injective(self) -> bool:
        """Whether every representative maps injectively to R^n/Lambda."""
        for R in self.cells:
            for T, i, k in self.translates_meeting(R):
                if self.cells[i] == R and any(k):
                    return False
        return True

    def validate(self) -> None:
        """Raise ComplexError unless the translates tile R^n as a complex."""
        tops = self.top_cells()
        vol = sum((volume(P) for P in tops), Fraction(0))
        cov = covolume(self.lattice, [tuple(Fraction(int(i == j)) for j in range(self.ambient_dim))
                                      for i in range(self.ambient_dim)])
        if vol != cov:
            raise ComplexError(f"top cells have volume {vol}, lattice covolume is {cov}")
        closed = _face_closure(self.cells)
        for F in closed:
            self.class_id(F)
        for a, P in enumerate(tops):
            for b in range(a, len(tops)):
                Q = tops[b]
                for k in self._shift_range(P.vertices, Q.vertices):
                    if a == b and not any(k):
                        continue
                    T = Q.translate(self.lattice_vector(k))
                    if not _proper_pair(P, T):
                        raise ComplexError(
                            f"cell {self.index[P]} meets a translate of cell {self.index[Q]} improperly",
                            (self.index[P], self.index[Q], k))

    def restrict(self, window: Polytope) -> PolytopalComplex:
        """Finite complex of all translates meeting ``window`` (not clipped)."""
        return PolytopalComplex([T for T, _, _ in self.translates_meeting(window)], self.ambient_dim)


def build_periodic(lattice: IntLattice, cells: Iterable[Polytope], check: bool = True) -> PeriodicComplex:
    PC = PeriodicComplex(lattice, _face_closure(cells))
    if check:
        PC.validate()
    return PC


def grid_complex(n: int, lattice: IntLattice | None = None) -> PeriodicComplex:
    """Unit-cube grid, periodic under ``lattice`` (default Z^n)."""
    lattice = lattice or IntLattice.standard(n)
    cube = Polytope.box([0] * n, [1] * n)
    if lattice == IntLattice.standard(n):
        return build_periodic(lattice, [cube], check=False)
    # cover a fundamental domain of a sublattice of Z^n with unit cubes
    B = lattice.basis_columns()
    pts = [la.matvec(B, e) for e in product((0, 1), repeat=n)]
    lo = [floor(min(p[i] for p in pts)) for i in range(n)]
    hi = [floor(max(p[i] for p in pts)) for i in range(n)]
    cubes = [cube.translate(a) for a in product(*[range(l, h + 1) for l, h in zip(lo, hi)])]
    return build_periodic(lattice, cubes)


def scale_periodic(PC: PeriodicComplex, m: int) -> PeriodicComplex:
    """The decomposition (1/m)C of R^n/Lambda, same lattice."""
    if m < 1:
        raise ValueError("scale factor must be a positive integer")
    if m == 1:
        return PC
    n = PC.ambient_dim
    inv = Fraction(1, m)
    cells = []
    for R in PC.top_cells() or PC.cells:
        small = R.scale(inv)
        for a in product(range(m), repeat=n):
            shift = la.scale(inv, PC.lattice_vector(a))
            cells.append(small.translate(shift))
    return PeriodicComplex(PC.lattice, _face_closure(cells))


def open_face_class_count(PC: PeriodicComplex, k: int) -> int:
    return PC.open_face_class_count(k)


# -- transversality ----------------------------------------------------------------


@dataclass
class TransversalVertex:
    point: tuple
    cell: Polytope
    class_id: int


@dataclass
class TransversalVertexReport:
    vertices: list

    def classes(self) -> dict[int, list]:
        out: dict[int, list] = {}
        for v in self.vertices:
            out.setdefault(v.class_id, []).append(v.point)
        return out


def _pure_dim_of(S: PolytopalSet) -> int | None:
    if not len(S):
        return None
    d = S.pure_dimension()
    if d is None:
        raise ValueError("polytopal set is not of pure dimension")
    return d


def _pieces(C, Delta: Polytope, S: PolytopalSet, periodic: bool) -> list[Polytope]:
    pieces = []
    for sigma in S:
        if periodic:
            for k in C._shift_range(Delta.vertices, sigma.vertices):
                T = sigma.translate(C.lattice_vector(k)) if any(k) else sigma
                if _boxes_meet(Delta, T):
                    I = Delta.intersect(T)
                    if I is not None:
                        pieces.append(I)
        elif _boxes_meet(Delta, sigma):
            I = Delta.intersect(sigma)
            if I is not None:
                pieces.append(I)
    return sorted(set(pieces))


def _union_pure(pieces: list[Polytope], target: int) -> bool:
    if any(P.dim > target for P in pieces):
        return False
    top = [P for P in pieces if P.dim == target]
    for P in pieces:
        if P.dim < target and not (top and covered_by(P, top)):
            return False
    return True


def transversality_witness(C, S: PolytopalSet) -> Polytope | None:
    """First cell violating transversality, or None.

    For periodic complexes ``S`` is read modulo Lambda.
    """
    d = _pure_dim_of(S)
    if d is None:
        return None
    n = C.ambient_dim
    periodic = isinstance(C, PeriodicComplex)
    for Delta in C.cells:
        target = d - (n - Delta.dim)
        pieces = _pieces(C, Delta, S, periodic)
        if not pieces:
            continue
        if target < 0 or not _union_pure(pieces, target):
            return Delta
    return None


def is_transversal(C, S: PolytopalSet) -> bool:
    return transversality_witness(C, S) is None


def transversal_vertices(C, S: PolytopalSet) -> TransversalVertexReport:
    """Points of ``Delta ∩ S`` over cells of codimension ``d``, keyed by cell class."""
    w = transversality_witness(C, S)
    if w is not None:
        raise ComplexError(f"complex is not transversal to the set at cell {w}", w)
    d = _pure_dim_of(S)
    if d is None:
        return TransversalVertexReport([])
    n = C.ambient_dim
    periodic = isinstance(C, PeriodicComplex)
    out = []
    for i, Delta in enumerate(C.cells):
        if Delta.dim != n - d:
            continue
        pts = sorted({P.vertices[0] for P in _pieces(C, Delta, S, periodic) if P.dim == 0})
        out.extend(TransversalVertex(p, Delta, i) for p in pts)
    return TransversalVertexReport(out)

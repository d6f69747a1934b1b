"""Piecewise-linear convex functions on (periodic) complexes: cocycles, model
and ampleness checks, dual cells and complexes, toric degrees, and the Voronoi
construction with its random rational perturbation to a generic decomposition."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, lcm
from typing import Iterable, Sequence

from . import linalg as la
from .complexes import (ComplexError, PeriodicComplex, PolytopalComplex, _boxes_meet,
                        _face_closure, build_periodic, is_transversal, transversality_witness)
from .geometry import Halfspace, Polytope, PolytopalSet, default_span_basis, volume
from .lattices import BilinearForm, IntLattice, covolume, solve_integer, span_lattice_basis


@dataclass(frozen=True)
class CocycleData:
    """Automorphy data ``z_lam(u) = z_lam(0) + b(u, lam)`` of a Lambda-periodic function.

    ``z0`` holds ``z_e(0)`` for the Hermite basis vectors ``e`` of the lattice;
    other values follow from ``z_{l+r}(0) = z_l(0) + z_r(0) + b(l, r)``.
    """

    lattice: IntLattice
    form: BilinearForm
    z0: tuple

    @classmethod
    def quadratic(cls, lattice: IntLattice, form: BilinearForm, linear=None) -> "CocycleData":
        """``z_lam(0) = q(lam) + l . lam`` with ``q = b/2``."""
        lin = la.vec(linear) if linear is not None else tuple(Fraction(0) for _ in range(lattice.ambient_dim))
        return cls(lattice, form, tuple(form.quadratic(e) + la.dot(lin, e) for e in lattice.basis))

    @classmethod
    def zero(cls, lattice: IntLattice) -> "CocycleData":
        n = lattice.ambient_dim
        return cls(lattice, BilinearForm([[0] * n for _ in range(n)]), tuple(Fraction(0) for _ in lattice.basis))

    def _coords(self, lam) -> tuple:
        x = la.solve(self.lattice.basis_columns(), la.vec(lam))
        if x is None or any(c.denominator != 1 for c in x):
            raise ValueError(f"{lam} is not in the lattice")
        return x

    def linear_part(self) -> tuple:
        """Vector ``l`` with ``z_lam(0) = q(lam) + l . lam``."""
        vals = [z - self.form.quadratic(e) for z, e in zip(self.z0, self.lattice.basis)]
        Bt = [list(e) for e in self.lattice.basis]
        return la.solve(Bt, vals)

    def z(self, lam) -> Fraction:
        self._coords(lam)
        lam = la.vec(lam)
        return self.form.quadratic(lam) + la.dot(self.linear_part(), lam)

    def z_at(self, lam, u) -> Fraction:
        return self.z(lam) + self.form(la.vec(u), la.vec(lam))

    def relation_defect(self, lam, rho) -> Fraction:
        """``z_{l+r}(0) - z_l(0) - z_r(0) - b(l, r)``, zero for a genuine cocycle."""
        lam, rho = la.vec(lam), la.vec(rho)
        return self.z(la.add(lam, rho)) - self.z(lam) - self.z(rho) - self.form(lam, rho)

    def translate_piece(self, peg, c, lam) -> tuple[tuple, Fraction]:
        """Affine data on ``Delta + lam`` given data ``(peg, c)`` on ``Delta``."""
        lam = la.vec(lam)
        Bl = self.form.gradient(lam)
        return la.add(peg, Bl), c - la.dot(peg, lam) + self.z(lam) - la.dot(lam, Bl)


@dataclass
class PLConvexFunction:
    """Affine data ``u -> peg . u + c`` on each top cell of a complex.

    For periodic complexes the data is given on the representatives and
    extended to translates through ``cocycle``.
    """

    complex: object
    pieces: dict  # top cell (representative) -> (peg, c)
    cocycle: CocycleData | None = None

    def __post_init__(self):
        self.pieces = {P: (la.vec(m), la.to_q(c)) for P, (m, c) in self.pieces.items()}
        n = self.complex.ambient_dim
        tops = [P for P in self.complex.cells if P.dim == n]
        missing = [P for P in tops if P not in self.pieces]
        if missing:
            raise ValueError(f"no affine data for top cell {missing[0]}")
        if self.periodic and self.cocycle is None:
            self.cocycle = CocycleData.zero(self.complex.lattice)

    @property
    def periodic(self) -> bool:
        return isinstance(self.complex, PeriodicComplex)

    @property
    def ambient_dim(self) -> int:
        return self.complex.ambient_dim

    def piece_at(self, rep: Polytope, k, cocycle: CocycleData | None = None) -> tuple[tuple, Fraction]:
        """Affine data on the translate ``rep + B k``."""
        m, c = self.pieces[rep]
        if not self.periodic or not any(k):
            return m, c
        data = cocycle or self.cocycle
        return data.translate_piece(m, c, self.complex.lattice_vector(k))

    def top_translates_meeting(self, P: Polytope):
        """``(translate, rep, k)`` for top cells meeting ``P``."""
        n = self.ambient_dim
        if self.periodic:
            return [(T, self.complex.cells[i], k) for T, i, k in self.complex.translates_meeting(P, dims=[n])]
        zero = tuple(0 for _ in range(n))
        return [(Q, Q, zero) for Q in self.complex.cells
                if Q.dim == n and _boxes_meet(P, Q) and Q.intersect(P) is not None]

    def star_n_pieces(self, sigma: Polytope):
        """Affine data of the top cells containing ``sigma``."""
        return [(T,) + self.piece_at(R, k) for T, R, k in self.top_translates_meeting(sigma)
                if T.contains_polytope(sigma)]

    def evaluate(self, u) -> Fraction:
        u = la.vec(u)
        pt = Polytope.hull([u])
        hits = self.top_translates_meeting(pt)
        if not hits:
            raise ValueError(f"point {u} is outside the domain")
        T, R, k = hits[0]
        m, c = self.piece_at(R, k)
        return la.dot(m, u) + c

    def max_of_pieces(self, u, radius=1) -> Fraction:
        """Maximum of the affine pieces of all top cells within ``radius`` of ``u`` (box)."""
        u = la.vec(u)
        box = Polytope.box([x - radius for x in u], [x + radius for x in u])
        vals = []
        for T, R, k in self.top_translates_meeting(box):
            m, c = self.piece_at(R, k)
            vals.append(la.dot(m, u) + c)
        return max(vals)

    def walls(self):
        """``(P, T, piece_P, piece_T, P ∩ T)`` over top reps P and top neighbours T."""
        n = self.ambient_dim
        out = []
        for P in [Q for Q in self.complex.cells if Q.dim == n]:
            mp, cp = self.pieces[P]
            for T, R, k in self.top_translates_meeting(P):
                if T == P:
                    continue
                I = P.intersect(T)
                out.append((P, T, (mp, cp), self.piece_at(R, k), I, R, k))
        return out


def _continuity_failure(f: PLConvexFunction, cocycle: CocycleData | None):
    n = f.ambient_dim
    for P in [Q for Q in f.complex.cells if Q.dim == n]:
        mp, cp = f.pieces[P]
        for T, R, k in f.top_translates_meeting(P):
            if T == P:
                continue
            m, c = f.piece_at(R, k, cocycle)
            I = P.intersect(T)
            for v in I.vertices:
                if la.dot(mp, v) + cp != la.dot(m, v) + c:
                    return P, T, v
    return None


def check_continuity(f: PLConvexFunction) -> bool:
    return _continuity_failure(f, None) is None


def check_cocycle(f: PLConvexFunction, data: CocycleData) -> bool:
    """Extend ``f`` from its representatives through ``data`` and test continuity."""
    if not f.periodic:
        raise ValueError("cocycle check needs a periodic function")
    if data.lattice != f.complex.lattice:
        return False
    return _continuity_failure(f, data) is None


def is_convex(f: PLConvexFunction) -> bool:
    """Continuity plus local convexity across every wall (``A_P >= A_T`` on ``P``)."""
    if not check_continuity(f):
        return False
    for P, T, (mp, cp), (m, c), I, _, _ in f.walls():
        if I.dim != f.ambient_dim - 1:
            continue
        if any(la.dot(mp, v) + cp < la.dot(m, v) + c for v in P.vertices):
            return False
    return True


def is_strongly_polyhedral(f: PLConvexFunction) -> bool:
    """Convex with distinct pegs across every wall, so top cells are the affinity domains."""
    if not is_convex(f):
        return False
    return all(mp != m for _, _, (mp, _), (m, _), I, _, _ in f.walls() if I.dim == f.ambient_dim - 1)


def ample_check(f: PLConvexFunction) -> bool:
    return is_strongly_polyhedral(f)


def model_function_check(f: PLConvexFunction) -> tuple[bool, int]:
    """Rationality of the pegs and their common denominator ``N``.

    For periodic functions the gradients ``B lam`` of the cocycle are
    included, so ``N`` clears the pegs of every translate.
    """
    dens = [x.denominator for m, _ in f.pieces.values() for x in m]
    if f.periodic:
        dens += [x.denominator for e in f.complex.lattice.basis for x in f.cocycle.form.gradient(e)]
    return True, lcm(*dens) if dens else 1


def scaled(f: PLConvexFunction, N) -> PLConvexFunction:
    """The function ``N f`` (cocycle data scaled accordingly)."""
    N = la.to_q(N)
    pieces = {P: (la.scale(N, m), N * c) for P, (m, c) in f.pieces.items()}
    coc = None
    if f.cocycle is not None:
        B = [[N * x for x in row] for row in f.cocycle.form.matrix]
        coc = CocycleData(f.cocycle.lattice, BilinearForm(B), tuple(N * z for z in f.cocycle.z0))
    return PLConvexFunction(f.complex, pieces, coc)


# -- dual cells ------------------------------------------------------------------


def _require_cell(f: PLConvexFunction, sigma: Polytope):
    if f.periodic:
        f.complex.class_id(sigma)
    else:
        f.complex.cell_id(sigma)


def dual_cell(f: PLConvexFunction, sigma: Polytope) -> Polytope:
    """``conv{peg of Delta : Delta a top cell containing sigma}``."""
    _require_cell(f, sigma)
    pegs = [m for _, m, _ in f.star_n_pieces(sigma)]
    if not pegs:
        raise ValueError(f"no top cell contains {sigma}")
    return Polytope.hull(pegs)


def dual_cell_by_inequalities(f: PLConvexFunction, u0) -> Polytope:
    """Subgradients at ``u0``: ``{w : w . (u - u0) <= peg . (u - u0)}`` over the star."""
    u0 = la.vec(u0)
    pt = Polytope.hull([u0])
    hs = []
    for T, m, _ in f.star_n_pieces(pt):
        for v in T.vertices:
            d = la.sub(v, u0)
            if any(d):
                hs.append(Halfspace.make(la.scale(-1, d), -la.dot(m, d)))
    P = Polytope.from_halfspaces(hs, f.ambient_dim)
    if P is None:
        raise ValueError("empty subdifferential; the function is not convex at this point")
    return P


@dataclass
class DualComplex:
    """Dual cells indexed by the (representative) cells of the source complex."""

    source: object
    cells: dict = field(default_factory=dict)

    def order_reversal_failures(self) -> list:
        bad = []
        items = list(self.cells.items())
        for s, sd in items:
            for t, td in items:
                if s != t and t.contains_polytope(s) and not sd.contains_polytope(td):
                    bad.append((s, t))
        return bad

    def dimension_failures(self) -> list:
        n = self.source.ambient_dim
        return [s for s, sd in self.cells.items() if s.dim + sd.dim != n]


def dual_complex_of(f: PLConvexFunction) -> DualComplex:
    D = DualComplex(f.complex)
    for sigma in f.complex.cells:
        D.cells[sigma] = dual_cell(f, sigma)
    return D


def containing_cell(f: PLConvexFunction, u) -> Polytope:
    """The cell (a translate, for periodic complexes) with ``u`` in its relative interior."""
    u = la.vec(u)
    pt = Polytope.hull([u])
    if f.periodic:
        cands = [T for T, _, _ in f.complex.translates_meeting(pt)]
    else:
        cands = [C for C in f.complex.cells if C.contains(u)]
    inner = [C for C in cands if C.in_relative_interior(u)]
    if not inner:
        raise ValueError(f"point {u} is outside the complex")
    return min(inner, key=lambda C: C.dim)


def _integral_pegs(f, pegs):
    if any(x.denominator != 1 for m in pegs for x in m):
        _, N = model_function_check(f)
        raise ValueError(f"pegs are not integral; scale the function by N = {N} first")


def degree_at_vertex(f: PLConvexFunction, u, d: int | None = None) -> Fraction:
    """``d! vol(Delta(u)^f) / vol(Z^n ∩ Delta(u)^perp)`` for integral pegs.

    The dual cell is measured in the coordinates of a Z-basis of
    ``Z^n ∩ Delta(u)^perp``, which absorbs the covolume factor.
    """
    cell = containing_cell(f, u)
    codim = f.ambient_dim - cell.dim
    if d is None:
        d = codim
    if d != codim:
        raise ValueError(f"cell through the point has codimension {codim}, not {d}")
    pegs = [m for _, m, _ in f.star_n_pieces(cell)]
    _integral_pegs(f, pegs)
    if d == 0:
        return Fraction(1)
    dual = Polytope.hull(pegs)
    if dual.dim != d:
        raise ValueError("dual cell is degenerate; the function is not strongly polyhedral here")
    perp = la.orthogonal_complement(list(cell.directions), f.ambient_dim)
    basis = span_lattice_basis(perp, f.ambient_dim)
    return factorial(d) * volume(dual, basis)


def degree_at_vertex_restricted(f: PLConvexFunction, u, subspace: Sequence[Sequence]) -> Fraction:
    """Same degree through the restriction of ``f`` to ``u + subspace``.

    ``d! vol({u}^g) / vol(P(Z^n ∩ Delta(u)^perp))`` with ``P`` the restriction
    of functionals to ``subspace``; both volumes in the dual coordinates of a
    Z-basis of ``subspace ∩ Z^n``.
    """
    cell = containing_cell(f, u)
    n = f.ambient_dim
    d = n - cell.dim
    N = span_lattice_basis(subspace, n)
    if len(N) != d:
        raise ValueError("subspace dimension must equal the codimension of the cell")
    if la.rank([list(x) for x in list(N) + list(cell.directions)] or [[0] * n]) != n:
        raise ValueError("subspace is not transversal to the cell")
    pegs = [m for _, m, _ in f.star_n_pieces(cell)]
    _integral_pegs(f, pegs)
    if d == 0:
        return Fraction(1)
    restricted = Polytope.hull([tuple(la.dot(b, m) for b in N) for m in pegs])
    perp = la.orthogonal_complement(list(cell.directions), n)
    W = span_lattice_basis(perp, n)
    image = [tuple(la.dot(b, w) for b in N) for w in W]
    cov = abs(la.det(image))
    return factorial(d) * volume(restricted, [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]) / cov


def vertex_classes(f: PLConvexFunction) -> list[Polytope]:
    return [P for P in f.complex.cells if P.dim == 0]


# -- the Voronoi construction -------------------------------------------------------


def _half_points(lattice: IntLattice) -> list[tuple]:
    n = lattice.ambient_dim
    out = []
    for theta in product((0, Fraction(1, 2)), repeat=n):
        p = tuple(Fraction(0) for _ in range(n))
        for t, e in zip(theta, lattice.basis):
            p = la.add(p, la.scale(t, e))
        out.append(p)
    return out


def _box(lattice: IntLattice, R: int):
    n = lattice.ambient_dim
    for k in product(range(-R, R + 1), repeat=n):
        yield k, la.matvec(lattice.basis_columns(), [Fraction(x) for x in k])


def _voronoi_zero_cell(lattice: IntLattice, b: BilinearForm) -> tuple[Polytope, int]:
    """Voronoi cell of 0 in (1/2)Lambda under ``q``, with the neighbour radius used."""
    n = lattice.ambient_dim
    target = covolume(lattice, [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]) / 2 ** n
    for R in range(2, 8):
        hs = []
        for k, v in _box(lattice, R):
            if any(k):
                c = la.scale(Fraction(1, 2), v)
                hs.append(Halfspace.make(la.scale(-1, b.gradient(c)), -b.quadratic(c)))
        try:
            V0 = Polytope.from_halfspaces(hs, n)
        except ValueError:
            continue
        if V0 is not None and volume(V0) == target:
            return V0, R
    raise ValueError("could not certify the Voronoi cell (coverage check failed)")


def voronoi_model_function(lattice: IntLattice, b: BilinearForm, linear=None,
                           check: bool = True) -> tuple[PeriodicComplex, PLConvexFunction]:
    """``g = max_c (b(u, c) - q(c) + l . u)`` over ``c`` in (1/2)Lambda and its cells."""
    b.require_positive_definite()
    n = lattice.ambient_dim
    if not lattice.is_full_rank:
        raise ValueError("lattice must be full rank")
    lin = la.vec(linear) if linear is not None else tuple(Fraction(0) for _ in range(n))
    V0, _ = _voronoi_zero_cell(lattice, b)
    probe = PeriodicComplex(lattice, [])
    cells, pieces = [], {}
    for u in _half_points(lattice):
        cell = V0.translate(u)
        rep, k = probe.canonical_cell(cell)
        c = la.sub(u, probe.lattice_vector(k))
        cells.append(rep)
        pieces[rep] = (la.add(b.gradient(c), lin), -b.quadratic(c))
    PC = build_periodic(lattice, cells, check=check)
    f = PLConvexFunction(PC, pieces, CocycleData.quadratic(lattice, b, lin))
    return PC, f


# -- genericity --------------------------------------------------------------------


def _directions(P: Polytope) -> list:
    return [list(d) for d in P.directions]


def genericity_witness(C: PeriodicComplex, sigma_list: Iterable[Polytope], m: int = 1):
    """First ``(sigma, Delta, reason)`` violating genericity of (1/m)C, or None."""
    n = C.ambient_dim
    sigmas = sorted(_face_closure(sigma_list))
    E = C.lattice.basis_columns()
    for s in sigmas:
        Ls = _directions(s)
        for D in C.cells:
            LD = _directions(D)
            W = Ls + LD
            rank = la.rank(W) if W else 0
            dim = s.dim + D.dim - n
            if dim >= 0:
                if rank != n:
                    return s, D, "affine spans meet in the wrong dimension"
                continue
            perp = la.orthogonal_complement([tuple(w) for w in W], n)
            Pm = [list(p) for p in perp]
            # A_s + lam meets (1/m)(A_D + mu) iff P(p_D/m - p_s) in P((1/m) Lambda)
            target = la.matvec(Pm, la.sub(la.scale(Fraction(1, m), D.point), s.point))
            A = [[x / m for x in row] for row in la.matmul(Pm, E)]
            if solve_integer(A, target) is not None:
                return s, D, "affine spans meet although their dimensions sum below n"
    return None


def is_generic(C: PeriodicComplex, sigma_list: Iterable[Polytope], m: int = 1) -> bool:
    return genericity_witness(C, sigma_list, m) is None


class PerturbationError(RuntimeError):
    pass


_EPS_PRIME = 1_000_003


def _perturbed_cells(lattice, b, deltas, epsilons, R):
    """Top cells and pieces for the perturbed approximations ``A_{i,lam}``."""
    n = lattice.ambient_dim
    centers = _half_points(lattice)
    ms = [la.add(b.gradient(u), dl) for u, dl in zip(centers, deltas)]
    cs = [-b.quadratic(u) + e for u, e in zip(centers, epsilons)]

    def affine(h, lam):
        Bl = b.gradient(lam)
        return la.add(ms[h], Bl), cs[h] - b.quadratic(lam) - la.dot(ms[h], lam)

    out = []
    for i, u in enumerate(centers):
        mi, ci = ms[i], cs[i]
        hs = []
        for h in range(len(centers)):
            for k, lam in _box(lattice, R):
                if h == i and not any(k):
                    continue
                mh, ch = affine(h, lam)
                if mi != mh:
                    hs.append(Halfspace.make(la.sub(mi, mh), ch - ci))
        P = Polytope.from_halfspaces(hs, n)
        if P is None or not P.is_full_dimensional:
            return None
        out.append((P, mi, ci))
    return out


def perturb_to_generic(lattice: IntLattice, b: BilinearForm, sigma_list: Sequence[Polytope],
                       m_max: int = 1, seed: int = 0, max_attempts: int = 40,
                       ) -> tuple[PeriodicComplex, PLConvexFunction]:
    """Random rational perturbation of the Voronoi model function that is generic
    with respect to ``sigma_list`` for every scale ``1..m_max`` and ample."""
    b.require_positive_definite()
    PC0, g0 = voronoi_model_function(lattice, b)
    sigma_list = list(sigma_list)
    if not sigma_list:
        return PC0, g0
    n = lattice.ambient_dim
    _, R = _voronoi_zero_cell(lattice, b)
    R = min(R, 2)
    den = lcm(*[x.denominator for P in PC0.cells for v in P.vertices for x in v], 1)
    rng = random.Random(seed)
    centers = _half_points(lattice)
    last = None
    for attempt in range(1, max_attempts + 1):
        scale = Fraction(1, 16 * den * attempt * 1000)
        deltas = [tuple(scale * rng.randint(-999, 999) for _ in range(n)) for _ in centers]
        # constants get an extra prime in the denominator so that no bisector
        # offset is cleared by the primitive scaling of its normal
        epsilons = [scale * Fraction(rng.randint(-999_999, 999_999), _EPS_PRIME) for _ in centers]
        tops = _perturbed_cells(lattice, b, deltas, epsilons, R)
        if tops is None:
            last = "a perturbed cell collapsed"
            continue
        if sum((volume(P) for P, _, _ in tops), Fraction(0)) != covolume(
                lattice, [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]):
            last = "perturbed cells do not tile the torus"
            continue
        probe = PeriodicComplex(lattice, [])
        coc = CocycleData.quadratic(lattice, b)
        cells, pieces = [], {}
        for P, m, c in tops:
            rep, k = probe.canonical_cell(P)
            if any(k):
                m, c = coc.translate_piece(m, c, la.scale(-1, probe.lattice_vector(k)))
            cells.append(rep)
            pieces[rep] = (m, c)
        try:
            PC = build_periodic(lattice, cells)
        except ComplexError as e:
            last = str(e)
            continue
        f = PLConvexFunction(PC, pieces, coc)
        if not ample_check(f):
            last = "perturbed function is not strongly polyhedral"
            continue
        bad = None
        for m in range(1, m_max + 1):
            w = genericity_witness(PC, sigma_list, m)
            if w is not None:
                bad = (m, w)
                break
        if bad is not None:
            last = f"scale {bad[0]}: {bad[1][2]} for {bad[1][0]} and {bad[1][1]}"
            continue
        return PC, f
    raise PerturbationError(f"no generic perturbation after {max_attempts} attempts; last failure: {last}")


def top_members(sigma_list: Iterable[Polytope]) -> PolytopalSet:
    """Union of the top-dimensional members of a face-closed family."""
    sig = list(sigma_list)
    top = max(P.dim for P in sig)
    return PolytopalSet([P for P in sig if P.dim == top])

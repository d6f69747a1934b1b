"""Tropical polynomials: evaluation, supremum valuation over polytopes, corner-locus
hypersurfaces inside a window, prevarieties and the structural checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from . import linalg as la
from .complexes import PolytopalComplex, build_complex
from .geometry import Halfspace, Polytope, PolytopalSet, is_concave_at


@dataclass(frozen=True)
class TropicalPolynomial:
    """Finite map from exponent vectors to the valuations of their coefficients."""

    dim: int
    terms: tuple  # sorted ((exp, val), ...)

    @classmethod
    def make(cls, terms, dim: int | None = None) -> "TropicalPolynomial":
        items = terms.items() if isinstance(terms, dict) else terms
        out = {}
        for exp, val in items:
            e = tuple(int(x) for x in exp)
            if e in out:
                raise ValueError(f"duplicate exponent {e}")
            out[e] = la.to_q(val)
        if not out:
            raise ValueError("a tropical polynomial needs at least one term")
        dims = {len(e) for e in out}
        if len(dims) != 1:
            raise ValueError("exponent vectors of different lengths")
        n = dims.pop()
        if dim is not None and dim != n:
            raise ValueError(f"exponents have length {n}, expected {dim}")
        return cls(n, tuple(sorted(out.items())))

    @property
    def support(self) -> list[tuple]:
        return [e for e, _ in self.terms]

    def shifted(self, c) -> "TropicalPolynomial":
        """Valuations ``v(a_m) + m . c``; the hypersurface moves by ``-c``."""
        c = la.vec(c)
        return TropicalPolynomial(self.dim, tuple((e, v + la.dot(e, c)) for e, v in self.terms))


def val_function(f: TropicalPolynomial, u) -> tuple[Fraction, list[tuple]]:
    """``min_m (v(a_m) + m . u)`` and the exponents attaining it."""
    u = la.vec(u)
    if len(u) != f.dim:
        raise ValueError(f"point has length {len(u)}, polynomial lives in dimension {f.dim}")
    vals = [(v + la.dot(e, u), e) for e, v in f.terms]
    best = min(x for x, _ in vals)
    return best, [e for x, e in vals if x == best]


def sup_valuation(f: TropicalPolynomial, P: Polytope) -> Fraction:
    """Valuation of the supremum norm over ``val^{-1}(P)``: the minimum over vertices."""
    return min(val_function(f, v)[0] for v in P.vertices)


def lattice_length(points: Sequence[Sequence[int]]) -> int:
    """Lattice length of the segment spanned by collinear integer points."""
    pts = sorted(tuple(p) for p in points)
    g = 0
    for a, b in zip(pts[-1], pts[0]):
        g = gcd(g, abs(a - b))
    return g


@dataclass
class TropicalHypersurface:
    """Corner locus of ``f`` inside ``window``.

    ``cells`` are the maximal cells meeting the window interior, each with its
    minimizing exponents and an informational weight (lattice length of the
    dual Newton edge).  ``boundary_cells`` only touch the window boundary.
    """

    polynomial: TropicalPolynomial
    window: Polytope
    cells: list
    argmin: list
    weights: list
    boundary_cells: list = field(default_factory=list)

    @property
    def ambient_dim(self) -> int:
        return self.polynomial.dim

    def polytopal_set(self) -> PolytopalSet:
        return PolytopalSet(self.cells, self.ambient_dim)

    def complex(self, check: bool = False) -> PolytopalComplex:
        return build_complex(self.cells, self.ambient_dim, check=check)

    def contains(self, u) -> bool:
        return any(P.contains(u) for P in self.cells + self.boundary_cells)

    def is_empty(self) -> bool:
        return not self.cells and not self.boundary_cells


def _pair_cell(f: TropicalPolynomial, a: tuple, b: tuple, window: Polytope) -> Polytope | None:
    va, vb = dict(f.terms)[a], dict(f.terms)[b]
    diff = la.sub(a, b)
    hs = [Halfspace.make(diff, vb - va), Halfspace.make(la.scale(-1, diff), va - vb)]
    for e, v in f.terms:
        if e != a and e != b:
            hs.append(Halfspace.make(la.sub(e, a), va - v))
    return window.intersect_halfspaces(hs)


def _meets_interior(P: Polytope, window: Polytope) -> bool:
    # barycenter slack vanishes on a window facet only if all vertices lie on it
    x = P.interior_point()
    return all(f.slack(x) > 0 for f in window.facets)


def tropical_hypersurface(f: TropicalPolynomial, window: Polytope) -> TropicalHypersurface:
    """Cells of ``{u in window : the minimum is attained at least twice}``."""
    if not window.is_full_dimensional:
        raise ValueError("window must be full-dimensional")
    if window.ambient_dim != f.dim:
        raise ValueError("window and polynomial dimensions differ")
    raw = set()
    for a, b in combinations(f.support, 2):
        P = _pair_cell(f, a, b, window)
        if P is not None:
            raw.add(P)
    raw = sorted(raw)
    maximal = [P for P in raw if not any(Q != P and Q.contains_polytope(P) for Q in raw)]
    inner, outer = [], []
    for P in maximal:
        (inner if _meets_interior(P, window) else outer).append(P)
    argmins, weights = [], []
    for P in inner:
        _, am = val_function(f, P.interior_point())
        argmins.append(am)
        weights.append(lattice_length(am) if P.dim == f.dim - 1 else 0)
    return TropicalHypersurface(f, window, inner, argmins, weights, outer)


def prevariety(fs: Sequence[TropicalPolynomial], window: Polytope) -> PolytopalSet:
    """Intersection of the hypersurfaces of ``fs`` inside ``window``."""
    if not fs:
        raise ValueError("prevariety of an empty list")
    hyps = [tropical_hypersurface(f, window) for f in fs]
    current = sorted(set(hyps[0].cells + hyps[0].boundary_cells))
    for H in hyps[1:]:
        nxt = set()
        for P in current:
            for Q in H.cells + H.boundary_cells:
                I = P.intersect(Q)
                if I is not None:
                    nxt.add(I)
        current = sorted(nxt)
    S = PolytopalSet(current, window.ambient_dim)
    return PolytopalSet(S.maximal(), window.ambient_dim)


def check_pure_dimension(S: PolytopalSet, d: int) -> tuple[bool, list[Polytope]]:
    """Whether every maximal member has dimension ``d``; offenders as witnesses."""
    bad = [P for P in S.maximal() if P.dim != d]
    return not bad, bad


@dataclass
class ConcavityReport:
    """Per-sample verdict: ``"concave"``, ``"not concave"`` or ``"boundary"`` (excluded)."""

    samples: list
    verdicts: list

    @property
    def ok(self) -> bool:
        return all(v != "not concave" for v in self.verdicts)

    def failures(self) -> list:
        return [s for s, v in zip(self.samples, self.verdicts) if v == "not concave"]


def auto_samples(S: PolytopalSet) -> list[tuple]:
    """One relative-interior point per cell (all faces of all members)."""
    cells = set()
    for P in S:
        cells.update(P.all_faces())
    return sorted({P.interior_point() for P in cells})


def check_total_concavity(S: PolytopalSet, samples: Iterable | None = None,
                          window: Polytope | None = None) -> ConcavityReport:
    """Concavity verdict at each sample; window-boundary samples are excluded."""
    samples = auto_samples(S) if samples is None else [la.vec(s) for s in samples]
    verdicts = []
    for u in samples:
        if not S.contains(u):
            raise ValueError(f"sample {u} is not in the polytopal set")
        if window is not None and not window.in_relative_interior(u):
            verdicts.append("boundary")
        else:
            verdicts.append("concave" if is_concave_at(S, u) else "not concave")
    return ConcavityReport(samples, verdicts)

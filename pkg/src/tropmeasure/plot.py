"""Deterministic SVG figures for objects in dimension at most two."""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from itertools import product
from typing import Sequence

from . import linalg as la
from .geometry import Polytope

SIZE = 480
MARGIN = 24


def _project(P: Polytope, axes: Sequence[int] | None) -> list[tuple]:
    n = P.ambient_dim
    if axes is None:
        if n > 2:
            raise ValueError(f"cannot plot dimension {n} without a projection")
        axes = list(range(n))
    pts = []
    for v in P.vertices:
        p = [v[i] for i in axes]
        while len(p) < 2:
            p.append(Fraction(0))
        pts.append(tuple(p))
    return sorted(set(pts))


def _cyclic(pts: list[tuple]) -> list[tuple]:
    """Order the vertices of a convex polygon counterclockwise, exactly."""
    if len(pts) < 3:
        return pts
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)

    def half(p):
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def cmp(a, b):
        ha, hb = half(a), half(b)
        if ha != hb:
            return ha - hb
        cross = (a[0] - cx) * (b[1] - cy) - (a[1] - cy) * (b[0] - cx)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(pts, key=cmp_to_key(cmp))


class Canvas:
    def __init__(self, shapes: list[list[tuple]]):
        allp = [p for s in shapes for p in s]
        if allp:
            lo = [min(p[i] for p in allp) for i in range(2)]
            hi = [max(p[i] for p in allp) for i in range(2)]
        else:
            lo, hi = [Fraction(0)] * 2, [Fraction(1)] * 2
        span = max(hi[0] - lo[0], hi[1] - lo[1]) or Fraction(1)
        self.lo, self.hi = lo, hi
        self.k = Fraction(SIZE - 2 * MARGIN) / span
        self.items: list[str] = []

    def xy(self, p) -> tuple[str, str]:
        x = MARGIN + (p[0] - self.lo[0]) * self.k
        y = SIZE - MARGIN - (p[1] - self.lo[1]) * self.k
        return f"{float(x):.3f}", f"{float(y):.3f}"

    def shape(self, pts, stroke="#1f3a93", fill="none", opacity=None, width=1.5):
        if len(pts) == 1:
            x, y = self.xy(pts[0])
            self.items.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{stroke}"/>')
        elif len(pts) == 2:
            (x1, y1), (x2, y2) = self.xy(pts[0]), self.xy(pts[1])
            self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{stroke}" '
                              f'stroke-width="{width}"/>')
        else:
            coords = " ".join(",".join(self.xy(p)) for p in _cyclic(pts))
            op = f' fill-opacity="{opacity:.3f}"' if opacity is not None else ""
            self.items.append(f'<polygon points="{coords}" fill="{fill}"{op} stroke="{stroke}" '
                              f'stroke-width="{width}"/>')

    def label(self, p, text: str):
        x, y = self.xy(p)
        self.items.append(f'<text x="{x}" y="{y}" font-size="10" text-anchor="middle">{text}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + self.items + ["</svg>"]) + "\n"


def _centroid(pts):
    return tuple(sum(p[i] for p in pts) / len(pts) for i in range(2))


def polytopes_svg(polys: Sequence[Polytope], axes=None, stroke="#1f3a93") -> str:
    shapes = [_project(P, axes) for P in polys]
    c = Canvas(shapes)
    for s in shapes:
        c.shape(s, stroke=stroke)
    return c.render()


def periodic_svg(cells: Sequence[Polytope], lattice_basis: Sequence[Sequence], axes=None) -> str:
    """Representatives and their translates by small lattice vectors."""
    polys = []
    n = len(lattice_basis)
    for a in product((-1, 0, 1), repeat=n):
        shift = [Fraction(0)] * len(lattice_basis[0])
        for k, b in zip(a, lattice_basis):
            shift = la.add(shift, la.scale(k, b))
        polys.extend(P.translate(shift) for P in cells)
    return polytopes_svg(polys, axes, stroke="#555555")


def measure_svg(pieces: Sequence[tuple[Polytope, Fraction]], axes=None) -> str:
    """Pieces shaded by density, each labeled with its exact density."""
    shapes = [(_project(P, axes), rho) for P, rho in pieces]
    c = Canvas([s for s, _ in shapes])
    top = max((abs(rho) for _, rho in shapes), default=Fraction(1)) or Fraction(1)
    for s, rho in shapes:
        c.shape(s, stroke="#8b0000", fill="#d9534f", opacity=0.15 + 0.7 * float(abs(rho) / top))
        c.label(_centroid(s), la.qstr(rho))
    return c.render()

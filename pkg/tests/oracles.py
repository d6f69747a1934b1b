"""Brute-force reference computations, independent of the library code paths."""

from fractions import Fraction
from itertools import combinations, product
from math import gcd


def det_int(M):
    """Laplace expansion; fine for the tiny matrices used in tests."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * det_int([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(n))


def determinantal_divisors(M):
    """Elementary divisors from gcds of k x k minors."""
    m, n = len(M), len(M[0])
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, det_int([[M[r][c] for c in cols] for r in rows]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def coset_count(M):
    """Index of the column lattice of a nonsingular 2x2 integer matrix, by enumeration.

    The image contains D Z^2 for D = |det M|, so the index is D^2 over the
    number of image classes modulo D.
    """
    D = abs(M[0][0] * M[1][1] - M[0][1] * M[1][0])
    seen = set()
    for a, b in product(range(D), repeat=2):
        seen.add(((M[0][0] * a + M[0][1] * b) % D, (M[1][0] * a + M[1][1] * b) % D))
    return D * D // len(seen)


def shoelace(poly):
    """Area of a polygon given in cyclic order."""
    s = Fraction(0)
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        s += Fraction(x1) * Fraction(y2) - Fraction(x2) * Fraction(y1)
    return abs(s) / 2


def grid(lo, hi, step):
    """Rational grid points ``lo, lo + step, ..., hi`` in each coordinate."""
    k = int((Fraction(hi) - Fraction(lo)) / step)
    return [Fraction(lo) + i * step for i in range(k + 1)]

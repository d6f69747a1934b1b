"""Exact linear algebra over the rationals.

Matrices are lists of rows; vectors are tuples of :class:`fractions.Fraction`.
Everything here is small dense Gaussian elimination; the geometric kernel
never sees a float.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Vec = tuple
Matrix = list


def to_q(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValueError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, _, q = s.partition("/")
            try:
                num, den = int(p), int(q)
            except ValueError:
                raise ValueError(f"malformed rational {x!r}") from None
            if den == 0:
                raise ValueError(f"zero denominator in {x!r}")
            return Fraction(num, den)
        try:
            return Fraction(int(s))
        except ValueError:
            raise ValueError(f"malformed rational {x!r}") from None
    raise ValueError(f"not a rational: {x!r}")


def qstr(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def vec(xs: Iterable) -> tuple:
    return tuple(to_q(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> list:
    return [list(vec(r)) for r in rows]


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u, v) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, u) -> tuple:
    return tuple(c * a for a in u)


def transpose(A: Sequence[Sequence]) -> list:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    Bt = transpose(B)
    return [[dot(row, col) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in A)


def identity(n: int) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def columns(A: Sequence[Sequence]) -> list:
    """Columns of ``A`` as tuples."""
    return [tuple(c) for c in zip(*A)] if A else []


def from_columns(cols: Sequence[Sequence], nrows: int | None = None) -> list:
    if not cols:
        return [[] for _ in range(nrows or 0)]
    return [list(r) for r in zip(*cols)]


def rref(A: Sequence[Sequence]) -> tuple[list, list]:
    """Reduced row echelon form and pivot column indices."""
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], ncols: int | None = None) -> list:
    """Basis (list of tuples) of the right kernel of ``A``."""
    if not A:
        n = ncols if ncols is not None else 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    R, piv = rref(A)
    n = len(A[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(tuple(v))
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> tuple | None:
    """One solution of ``A x = b`` or None when inconsistent."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return tuple(x)


def det(A: Sequence[Sequence]) -> Fraction:
    M = [[Fraction(x) for x in row] for row in A]
    n = len(M)
    if n == 0:
        return Fraction(1)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


def inverse(A: Sequence[Sequence]) -> list:
    n = len(A)
    aug = [list(row) + list(e) for row, e in zip(A, identity(n))]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def left_inverse(B_cols: Sequence[Sequence]) -> list:
    """Rows ``C`` with ``C @ B = I`` for a full-column-rank basis ``B``.

    ``C = (B^T B)^{-1} B^T``, so ``C^T a`` lies in the column space of ``B``.
    """
    Bt = [list(c) for c in B_cols]
    G = matmul(Bt, transpose(Bt))
    return matmul(inverse(G), Bt)


def content_primitive(v: Sequence) -> tuple:
    """Scale a nonzero rational vector to a primitive integer vector (positive factor)."""
    den = reduce(lcm, (Fraction(x).denominator for x in v), 1)
    ints = [int(Fraction(x) * den) for x in v]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in ints)


def common_denominator(xs: Iterable) -> int:
    return reduce(lcm, (Fraction(x).denominator for x in xs), 1)


def affine_hull(points: Sequence[Sequence]) -> tuple[tuple, list]:
    """Base point and a basis (list of tuples) of the direction space."""
    p0 = tuple(points[0])
    diffs = [sub(p, p0) for p in points[1:]]
    if not diffs:
        return p0, []
    R, piv = rref(diffs)
    return p0, [tuple(R[i]) for i in range(len(piv))]


def orthogonal_complement(basis: Sequence[Sequence], n: int) -> list:
    """Basis of the orthogonal complement of span(basis) in Q^n."""
    if not basis:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return nullspace([list(b) for b in basis])


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    if all(x == 0 for x in v):
        return True
    if not basis:
        return False
    return rank([list(b) for b in basis] + [list(v)]) == rank([list(b) for b in basis])

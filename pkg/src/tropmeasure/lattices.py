"""Integer and rational lattices: Smith/Hermite forms, indices, saturation,
stabilizers, duals, covolumes and the lattices induced by bilinear forms.

Lattice bases are stored as lists of basis *vectors*.  Matrices passed to
``smith_normal_form`` are lists of rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from . import linalg as la


def _int_matrix(M) -> list[list[int]]:
    out = []
    for row in M:
        r = []
        for x in row:
            q = Fraction(x)
            if q.denominator != 1:
                raise ValueError(f"non-integer entry {q} in integer matrix")
            r.append(int(q))
        out.append(r)
    return out


def smith_normal_form(M) -> tuple[list, list, list]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with nonnegative entries
    and ``d1 | d2 | ...``.  The pivot is always an entry of minimal absolute
    value, found by a row-major scan, so the transforms are reproducible.
    """
    A = _int_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, A, V
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is not None:
                A[t] = [a + b for a, b in zip(A[t], A[bad])]
                U[t] = [a + b for a, b in zip(U[t], U[bad])]
                continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V


def snf_diagonal(M) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; zero rows dropped."""
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    n = len(A[0])
    out_row = 0
    for c in range(n):
        rest = range(out_row, len(A))
        while True:
            nz = [i for i in rest if A[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(A[i][c]), i))
            A[out_row], A[piv] = A[piv], A[out_row]
            done = True
            for i in range(out_row + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[out_row][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[out_row])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if out_row < len(A) and A[out_row][c] != 0:
            if A[out_row][c] < 0:
                A[out_row] = [-a for a in A[out_row]]
            p = A[out_row][c]
            for i in range(out_row):
                q = A[i][c] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[out_row])]
            out_row += 1
            if out_row == len(A):
                break
    return [r for r in A[:out_row] if any(r)]


def _rational_hnf(vectors: Sequence[Sequence]) -> list[tuple]:
    vectors = [tuple(Fraction(x) for x in v) for v in vectors]
    if not vectors:
        return []
    den = la.common_denominator(x for v in vectors for x in v)
    H = hnf_rows([[int(x * den) for x in v] for v in vectors])
    return [tuple(Fraction(x, den) for x in r) for r in H]


def integer_kernel(A) -> list[tuple]:
    """Basis of ``{y in Z^n : A y = 0}`` for a rational matrix ``A`` (rows)."""
    A = [[Fraction(x) for x in row] for row in A]
    if not A:
        raise ValueError("integer_kernel needs the column count; use integer_kernel_n")
    return integer_kernel_n(A, len(A[0]))


def integer_kernel_n(A, n: int) -> list[tuple]:
    A = [[Fraction(x) for x in row] for row in A if any(Fraction(x) for x in row)]
    if not A:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    scaled = [[int(x * la.common_denominator(row)) for x in row] for row in A]
    _, D, V = smith_normal_form(scaled)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i] != 0)
    return [tuple(Fraction(V[i][j]) for i in range(n)) for j in range(r, n)]


def solve_integer(A, b) -> tuple | None:
    """One integer solution of ``A y = b`` (rational A, b) or None."""
    A = [[Fraction(x) for x in row] for row in A]
    b = [Fraction(x) for x in b]
    m = len(A)
    n = len(A[0]) if m else 0
    den = la.common_denominator([x for row in A for x in row] + b)
    Ai = [[int(x * den) for x in row] for row in A]
    bi = [int(x * den) for x in b]
    U, D, V = smith_normal_form(Ai)
    c = [sum(U[i][k] * bi[k] for k in range(m)) for i in range(m)]
    z = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            z[i] = c[i] // d
    return tuple(Fraction(sum(V[i][j] * z[j] for j in range(n))) for i in range(n))


@dataclass(frozen=True)
class IntLattice:
    """A discrete subgroup of Q^n given by a canonical (Hermite) basis.

    Bases may be rational; ``basis`` holds the row-HNF of the generators
    scaled by their common denominator, so equal lattices compare equal.
    """

    ambient_dim: int
    basis: tuple = field(default=())

    @classmethod
    def from_generators(cls, vectors, ambient_dim: int | None = None) -> "IntLattice":
        vectors = [tuple(la.to_q(x) for x in v) for v in vectors]
        if ambient_dim is None:
            if not vectors:
                raise ValueError("ambient dimension required for the zero lattice")
            ambient_dim = len(vectors[0])
        return cls(ambient_dim, tuple(_rational_hnf(vectors)))

    @classmethod
    def standard(cls, n: int) -> "IntLattice":
        return cls.from_generators([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    def basis_columns(self) -> list:
        """Basis as an ambient_dim x rank matrix (rows)."""
        return la.from_columns(self.basis, self.ambient_dim)

    def contains(self, v) -> bool:
        v = la.vec(v)
        if self.rank == 0:
            return all(x == 0 for x in v)
        return solve_integer(self.basis_columns(), v) is not None

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for b in self.basis for x in b)

    def __contains__(self, v) -> bool:
        return self.contains(v)


@dataclass(frozen=True)
class BilinearForm:
    """Symmetric rational form ``b(u, v) = u^T B v``."""

    matrix: tuple

    def __post_init__(self):
        M = tuple(tuple(la.to_q(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", M)
        n = len(M)
        if any(len(r) != n for r in M):
            raise ValueError("bilinear form matrix must be square")
        if any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
            raise ValueError("bilinear form must be symmetric")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, u, v) -> Fraction:
        return la.dot(u, la.matvec(self.matrix, v))

    def quadratic(self, u) -> Fraction:
        return self(u, u) / 2

    def gradient(self, v) -> tuple:
        """Vector ``m`` with ``b(u, v) = m . u`` for all u."""
        return la.matvec(self.matrix, v)

    def is_positive_definite(self) -> bool:
        M = [list(r) for r in self.matrix]
        return all(la.det([row[:k] for row in M[:k]]) > 0 for k in range(1, self.dim + 1))

    def require_positive_definite(self) -> "BilinearForm":
        if not self.is_positive_definite():
            raise ValueError("bilinear form is not positive definite")
        return self

    def gram(self, vectors) -> list:
        return [[self(u, v) for v in vectors] for u in vectors]


@dataclass(frozen=True)
class AffineLatticeMap:
    """``x -> M x + t`` with integer linear part ``M`` (n x d, rows)."""

    linear: tuple
    translation: tuple

    def __post_init__(self):
        M = tuple(tuple(int(la.to_q(x)) if la.to_q(x).denominator == 1 else _bad(x) for x in r)
                  for r in self.linear)
        object.__setattr__(self, "linear", M)
        object.__setattr__(self, "translation", la.vec(self.translation))
        if len(self.translation) != len(M):
            raise ValueError("translation length must match the row count of the linear part")

    @property
    def n(self) -> int:
        return len(self.linear)

    @property
    def d(self) -> int:
        return len(self.linear[0]) if self.linear else 0

    @property
    def rank(self) -> int:
        return la.rank([list(r) for r in self.linear])

    @property
    def is_injective(self) -> bool:
        return self.rank == self.d

    def __call__(self, x) -> tuple:
        return la.add(la.matvec(self.linear, la.vec(x)), self.translation)

    def columns(self) -> list:
        return la.columns([[Fraction(x) for x in r] for r in self.linear])


def _bad(x):
    raise ValueError(f"linear part must be integral, got {x!r}")


def coordinates(L: IntLattice, coords: Sequence[Sequence]) -> IntLattice:
    """Express ``L`` (inside span(coords)) in the coordinates of the basis ``coords``."""
    C = la.from_columns([la.vec(c) for c in coords], L.ambient_dim)
    out = []
    for b in L.basis:
        x = la.solve(C, b)
        if x is None:
            raise ValueError("lattice vector outside the span of the coordinate basis")
        out.append(x)
    return IntLattice.from_generators(out, len(coords))


def index_of_image(M, target: IntLattice | None = None) -> int:
    """Index of the lattice spanned by the columns of ``M`` inside ``target``.

    ``M`` is a k x d matrix (rows); ``target`` defaults to Z^k and must have
    rank d.  The image must be a full-rank sublattice of ``target``.
    """
    M = [[Fraction(x) for x in row] for row in M]
    k = len(M)
    d = len(M[0]) if k else 0
    if target is None:
        target = IntLattice.standard(k)
    if target.rank != d:
        raise ValueError(f"target has rank {target.rank}, image has {d} generators")
    T = target.basis_columns()
    C = []
    for col in la.columns(M):
        x = la.solve(T, col)
        if x is None:
            raise ValueError("image is not contained in the span of the target")
        C.append(x)
    coord = la.from_columns(C, d)
    if la.rank(coord) < d:
        raise ValueError("image is rank deficient; the map is not injective")
    if any(x.denominator != 1 for row in coord for x in row):
        raise ValueError("image is not a sublattice of the target")
    return prod(snf_diagonal(coord))


def generalized_index(sub: IntLattice, sup: IntLattice) -> Fraction:
    """``covol(sub) / covol(sup)`` for lattices of equal rank spanning the same space.

    Agrees with the group index when ``sub`` is contained in ``sup``.
    """
    if sub.rank != sup.rank:
        raise ValueError("lattices of different rank")
    if sub.rank == 0:
        return Fraction(1)
    coords = list(sup.basis)
    return abs(la.det(la.from_columns([b for b in coordinates(sub, coords).basis], sub.rank)))


def saturate(L: IntLattice) -> IntLattice:
    """``span_Q(L) ∩ Z^n``."""
    n = L.ambient_dim
    if L.rank == 0:
        return L
    B = [[int(x * la.common_denominator(b)) for x in b] for b in L.basis]
    cols = la.from_columns([tuple(Fraction(x) for x in b) for b in B], n)
    U, D, _ = smith_normal_form(cols)
    Uinv = la.inverse([[Fraction(x) for x in r] for r in U])
    r = L.rank
    gens = [tuple(Uinv[i][j] for i in range(n)) for j in range(r)]
    return IntLattice.from_generators(gens, n)


def saturation_index(L: IntLattice) -> int:
    S = saturate(L)
    return int(generalized_index(L, S))


def span_lattice_basis(directions, n: int) -> list[tuple]:
    """Z-basis of ``span(directions) ∩ Z^n`` (canonical Hermite form)."""
    directions = [la.vec(v) for v in directions if any(la.to_q(x) for x in v)]
    if not directions:
        return []
    R, piv = la.rref(directions)
    gens = [tuple(R[i]) for i in range(len(piv))]
    return list(saturate(IntLattice.from_generators(gens, n)).basis)


def stabilizer_lattice(lam: IntLattice, point, directions) -> IntLattice:
    """Lattice vectors translating ``point + span(directions)`` into itself."""
    n = lam.ambient_dim
    if not lam.is_full_rank:
        raise ValueError("stabilizer needs a full-rank lattice")
    perp = la.orthogonal_complement([la.vec(d) for d in directions if any(la.to_q(x) for x in d)], n)
    E = lam.basis_columns()
    if not perp:
        return lam
    PE = la.matmul([list(p) for p in perp], E)
    ker = integer_kernel_n(PE, n)
    gens = [la.matvec(E, y) for y in ker]
    return IntLattice.from_generators(gens, n)


def dual_lattice(L: IntLattice, coords: Sequence[Sequence] | None = None) -> IntLattice:
    """Dual lattice ``{l : l(L) ⊂ Z}`` in the dual coordinates of ``coords``.

    Without ``coords`` the lattice must be full rank and the standard
    coordinates are used.
    """
    if coords is not None:
        L = coordinates(L, coords)
    if not L.is_full_rank:
        raise ValueError("dual lattice needs a full-rank lattice in its coordinates")
    B = L.basis_columns()
    Binv_T = la.transpose(la.inverse(B))
    return IntLattice.from_generators(la.columns(Binv_T), L.ambient_dim)


def covolume(L: IntLattice, coords: Sequence[Sequence] | None = None) -> Fraction:
    """Volume of a fundamental domain, measured in ``coords``.

    Default coordinates: a Z-basis of the saturation of the span of ``L``.
    """
    if L.rank == 0:
        return Fraction(1)
    if coords is None:
        coords = span_lattice_basis(L.basis, L.ambient_dim)
    C = coordinates(L, coords)
    if not C.is_full_rank:
        raise ValueError("lattice is not full rank in the given coordinates")
    return abs(la.det(C.basis_columns()))


def form_lattice(b: BilinearForm, L: IntLattice, V: Sequence[Sequence]) -> IntLattice:
    """Lattice of functionals ``b(., lam)`` restricted to span(V), lam in L.

    Returned in the coordinates of (span V)* dual to the basis ``V``.
    """
    V = [la.vec(v) for v in V]
    k = len(V)
    gens = []
    for lam in L.basis:
        grad = b.gradient(lam)
        gens.append(tuple(la.dot(v, grad) for v in V))
    out = IntLattice.from_generators(gens, k)
    if out.rank != k:
        raise ValueError("bilinear form is degenerate on the subspace")
    return out


def fundamental_parallelepiped(L: IntLattice):
    """Points spanning the half-open parallelepiped of the Hermite basis (closed hull)."""
    from itertools import product

    pts = []
    for eps in product((0, 1), repeat=L.rank):
        p = tuple(Fraction(0) for _ in range(L.ambient_dim))
        for e, bvec in zip(eps, L.basis):
            if e:
                p = la.add(p, bvec)
        pts.append(p)
    return pts

"""JSON schemas for every object the command line reads or writes.

Rationals travel as ``"p/q"`` strings; parsers raise :class:`SchemaError`
on anything malformed so callers can tell bad input from failed checks.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction

from . import linalg as la
from .complexes import PeriodicComplex, build_periodic
from .geometry import Polytope
from .lattices import BilinearForm, IntLattice
from .measure import PiecewiseHaarMeasure, Stratum, TropicalCycleInput
from .plc import CocycleData, DualComplex, PLConvexFunction
from .tropical import TropicalHypersurface, TropicalPolynomial


class SchemaError(ValueError):
    pass


# -- primitives ---------------------------------------------------------------


def q(x) -> Fraction:
    if isinstance(x, float):
        raise SchemaError(f"floats are not accepted, got {x!r}; use a \"p/q\" string")
    try:
        return la.to_q(x)
    except (ValueError, TypeError) as e:
        raise SchemaError(str(e)) from None


def qvec(xs) -> tuple:
    if not isinstance(xs, list):
        raise SchemaError(f"expected a list of rationals, got {xs!r}")
    return tuple(q(x) for x in xs)


def qmat(rows) -> list:
    if not isinstance(rows, list) or not rows:
        raise SchemaError(f"expected a nonempty list of rows, got {rows!r}")
    out = [list(qvec(r)) for r in rows]
    if len({len(r) for r in out}) != 1:
        raise SchemaError("rows of different lengths")
    return out


def ints(rows) -> list:
    M = qmat(rows)
    if any(x.denominator != 1 for r in M for x in r):
        raise SchemaError("expected an integer matrix")
    return [[int(x) for x in r] for r in M]


def svec(v) -> list:
    return [la.qstr(x) for x in v]


def smat(M) -> list:
    return [svec(r) for r in M]


def field_of(obj, key, kind=None):
    if not isinstance(obj, dict):
        raise SchemaError(f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemaError(f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return val


def dumps(obj) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON ({e})") from None
    except OSError as e:
        raise SchemaError(f"{path}: {e.strerror}") from None


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return sha256_bytes(fh.read())


# -- geometry -----------------------------------------------------------------


def polytope_to_json(P: Polytope) -> dict:
    return {"vertices": [svec(v) for v in P.vertices]}


def polytope_from_json(obj) -> Polytope:
    if isinstance(obj, dict) and "lo" in obj:
        lo, hi = qvec(obj["lo"]), qvec(field_of(obj, "hi"))
        if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
            raise SchemaError("box needs lo <= hi of equal length")
        return Polytope.box(lo, hi)
    pts = qmat(field_of(obj, "vertices", list))
    return Polytope.hull([tuple(p) for p in pts])


def lattice_to_json(L: IntLattice) -> dict:
    return {"basis": smat(L.basis)}


def lattice_from_json(obj) -> IntLattice:
    if isinstance(obj, int) and not isinstance(obj, bool):
        if obj < 1:
            raise SchemaError("lattice dimension must be positive")
        return IntLattice.standard(obj)
    basis = obj["basis"] if isinstance(obj, dict) and "basis" in obj else obj
    M = qmat(basis)
    L = IntLattice.from_generators(M, len(M[0]))
    if not L.is_full_rank:
        raise SchemaError("lattice basis is not full rank")
    return L


def form_to_json(b) -> dict:
    if isinstance(b, BilinearForm):
        return {"matrix": smat(b.matrix)}
    return {"plus": smat(b[0].matrix), "minus": smat(b[1].matrix)}


def _form(M) -> BilinearForm:
    try:
        return BilinearForm(qmat(M))
    except ValueError as e:
        raise SchemaError(str(e)) from None


def form_from_json(obj):
    """A ``BilinearForm`` or a difference pair ``(plus, minus)``."""
    if isinstance(obj, dict) and "plus" in obj:
        return (_form(obj["plus"]), _form(field_of(obj, "minus")))
    if isinstance(obj, dict):
        M = obj["form"] if "form" in obj else field_of(obj, "matrix")
    else:
        M = obj
    return _form(M)


# -- tropical -----------------------------------------------------------------


def polynomial_to_json(f: TropicalPolynomial) -> dict:
    return {"dim": f.dim, "terms": [{"exp": list(e), "val": la.qstr(v)} for e, v in f.terms]}


def polynomial_from_json(obj) -> TropicalPolynomial:
    terms = field_of(obj, "terms", list)
    items = []
    for t in terms:
        exp = field_of(t, "exp", list)
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in exp):
            raise SchemaError(f"exponents must be integers, got {exp!r}")
        items.append((tuple(exp), q(field_of(t, "val"))))
    dim = obj.get("dim")
    if dim is not None and (not isinstance(dim, int) or isinstance(dim, bool)):
        raise SchemaError("dim must be an integer")
    try:
        return TropicalPolynomial.make(items, dim)
    except ValueError as e:
        raise SchemaError(str(e)) from None


def hypersurface_to_json(H: TropicalHypersurface) -> dict:
    cells = []
    for P, am, w in zip(H.cells, H.argmin, H.weights):
        c = polytope_to_json(P)
        c["argmin"] = [list(e) for e in am]
        c["weight"] = w
        cells.append(c)
    return {"kind": "hypersurface", "polynomial": polynomial_to_json(H.polynomial),
            "window": polytope_to_json(H.window), "cells": cells,
            "boundary_cells": [polytope_to_json(P) for P in H.boundary_cells]}


# -- model functions ----------------------------------------------------------


def function_to_json(f: PLConvexFunction, form: BilinearForm | None = None) -> dict:
    PC = f.complex
    tops = PC.top_cells()
    pieces = [{"cell": i, "peg": svec(f.pieces[P][0]), "c": la.qstr(f.pieces[P][1])} for i, P in enumerate(tops)]
    out = {"kind": "model_function", "lattice": lattice_to_json(PC.lattice),
           "cells": [polytope_to_json(P) for P in tops], "pieces": pieces,
           "f_vector": [len(PC.cells_of_dim(k)) for k in range(PC.ambient_dim + 1)]}
    if f.cocycle is not None:
        out["form"] = {"matrix": smat(f.cocycle.form.matrix)}
        out["linear"] = svec(f.cocycle.linear_part())
    return out


def function_from_json(obj, check: bool = True) -> PLConvexFunction:
    if not isinstance(obj, dict):
        raise SchemaError("a model function is a JSON object")
    if obj.get("kind") not in (None, "model_function"):
        raise SchemaError(f"expected a model function, got kind {obj.get('kind')!r}")
    lam = lattice_from_json(field_of(obj, "lattice"))
    tops = [polytope_from_json(c) for c in field_of(obj, "cells", list)]
    pieces = {}
    for p in field_of(obj, "pieces", list):
        i = field_of(p, "cell", int)
        if not 0 <= i < len(tops):
            raise SchemaError(f"piece refers to unknown cell {i}")
        pieces[tops[i]] = (qvec(field_of(p, "peg", list)), q(field_of(p, "c")))
    if len(pieces) != len(tops):
        raise SchemaError("every top cell needs exactly one piece")
    PC = build_periodic(lam, tops, check=check)
    probe = {}
    for P, piece in pieces.items():
        rep, k = PC.canonical_cell(P)
        if any(k):
            raise SchemaError("top cells must be given by their canonical representatives")
        probe[rep] = piece
    form = form_from_json(obj["form"]) if "form" in obj else None
    coc = CocycleData.quadratic(lam, form, qvec(obj.get("linear", ["0"] * lam.ambient_dim))) if form else None
    return PLConvexFunction(PC, probe, coc)


def dual_complex_to_json(D: DualComplex) -> dict:
    cells = []
    for s, sd in D.cells.items():
        cells.append({"cell": polytope_to_json(s), "dual": polytope_to_json(sd)})
    return {"kind": "dual_complex", "cells": cells}


def periodic_cells_from_json(obj) -> PeriodicComplex:
    lam = lattice_from_json(field_of(obj, "lattice"))
    return build_periodic(lam, [polytope_from_json(c) for c in field_of(obj, "cells", list)])


# -- measures -----------------------------------------------------------------


def cycle_from_json(obj) -> TropicalCycleInput:
    lam = lattice_from_json(field_of(obj, "lattice"))
    n = obj.get("n", lam.ambient_dim)
    if n != lam.ambient_dim:
        raise SchemaError(f"n = {n} but the lattice lives in dimension {lam.ambient_dim}")
    maps = []
    for s in field_of(obj, "simplices", list):
        M = ints(field_of(s, "M", list))
        maps.append((M, qvec(field_of(s, "t", list)), q(s.get("vpi", "1/1"))))
    degree = obj.get("degree", 1)
    if not isinstance(degree, int) or isinstance(degree, bool):
        raise SchemaError("degree must be an integer")
    return TropicalCycleInput.make(lam, maps, degree)


def cycle_to_json(inp: TropicalCycleInput) -> dict:
    return {"n": inp.n, "lattice": lattice_to_json(inp.lattice), "degree": inp.degree,
            "simplices": [{"M": [list(r) for r in s.map.linear], "t": svec(s.map.translation),
                           "vpi": la.qstr(s.vpi)} for s in inp.simplices]}


def strata_from_json(obj) -> list[Stratum]:
    out = []
    for s in field_of(obj, "strata", list):
        comps = field_of(s, "components", list)
        M = ints(s["M"]) if "M" in s else None
        t = qvec(s["t"]) if "t" in s else None
        out.append(Stratum(tuple(comps), q(s.get("vpi", "1/1")), tuple(s.get("closure_of", [])),
                           tuple(tuple(r) for r in M) if M else None, t))
    return out


def measure_to_json(mu: PiecewiseHaarMeasure) -> dict:
    pieces = [{"support": polytope_to_json(p.support), "density": la.qstr(p.density),
               "basis": [[int(x) for x in v] for v in p.basis], "label": p.label} for p in mu.pieces]
    return {"kind": "measure", "pieces": pieces, "total_mass": la.qstr(mu.total_mass())}

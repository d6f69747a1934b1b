"""Command-line front end.

Every verb reads JSON, writes one JSON (or SVG) artifact atomically and prints
a run report.  Exit codes: 0 success, 2 failed validation (with a witness),
3 malformed input.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction
from itertools import permutations
from math import factorial

from . import io
from . import linalg as la
from . import measure as ms
from . import plc, plot
from .complexes import ComplexError, build_complex, build_periodic, scale_periodic, transversality_witness
from .geometry import PolytopalSet, volume
from .lattices import covolume, form_lattice
from .tropical import check_pure_dimension, check_total_concavity, sup_valuation, tropical_hypersurface, val_function

VERBS = ("tropicalize", "supval", "voronoi-model", "generic-decomposition", "dual-complex", "degree",
         "check", "measure", "mixed-volume", "atoms", "skeleton", "plot")
DEFAULT_SEED = 20240601


class ValidationFailure(Exception):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _std(n):
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def _require(ok: bool, name: str, verified: list, witness=None):
    if not ok:
        raise ValidationFailure(f"invariant failed: {name}", witness)
    verified.append(name)


# -- verbs ------------------------------------------------------------------------


def _part(args, flag: str, key: str | None = None):
    """Object from ``--flag`` if given, else field ``key`` of the ``--input`` bundle."""
    path = getattr(args, flag, None)
    if path:
        return io.load(path)
    if not getattr(args, "input", None):
        alt = f"--input with a {key!r} field" if key else "--input"
        raise io.SchemaError(f"--{flag} (or {alt}) is required")
    obj = io.load(args.input)
    return obj if key is None else io.field_of(obj, key)


def _bundle(args) -> dict:
    obj = io.load(args.input) if getattr(args, "input", None) else {}
    if not isinstance(obj, dict):
        raise io.SchemaError("the input bundle must be a JSON object")
    return obj


def do_tropicalize(args, verified):
    f = io.polynomial_from_json(_part(args, "poly"))
    W = io.polytope_from_json(_part(args, "window", "window"))
    H = tropical_hypersurface(f, W)
    if args.verify:
        S = H.polytopal_set()
        ok, bad = check_pure_dimension(S, f.dim - 1)
        _require(ok or H.is_empty(), "pure dimension", verified, [io.polytope_to_json(P) for P in bad])
        rep = check_total_concavity(S, window=W) if H.cells else None
        _require(rep is None or rep.ok, "total concavity", verified,
                 rep and [io.svec(u) for u in rep.failures()])
    return io.hypersurface_to_json(H)


def do_supval(args, verified):
    f = io.polynomial_from_json(_part(args, "poly", "polynomial"))
    P = io.polytope_from_json(_part(args, "polytope", "polytope"))
    value = sup_valuation(f, P)
    where = [v for v in P.vertices if val_function(f, v)[0] == value]
    if args.verify:
        _require(val_function(f, P.interior_point())[0] >= value, "vertex principle", verified)
    return {"kind": "supval", "value": la.qstr(value), "vertices": [io.svec(v) for v in where]}


def _lattice_form(args):
    lam = io.lattice_from_json(_part(args, "lattice", "lattice"))
    b = io.form_from_json(_part(args, "form", "form"))
    if isinstance(b, tuple):
        raise io.SchemaError("the model function needs a single form, not a difference pair")
    if b.dim != lam.ambient_dim:
        raise io.SchemaError("form and lattice dimensions differ")
    return lam, b


def _verify_model(f, lam, b, verified):
    _require(plc.check_cocycle(f, plc.CocycleData.quadratic(lam, b, f.cocycle.linear_part())),
             "cocycle", verified)
    _require(plc.ample_check(f), "ample", verified)
    n = lam.ambient_dim
    mass = sum((volume(plc.dual_cell(f, v)) for v in plc.vertex_classes(f)), Fraction(0))
    _require(mass == covolume(form_lattice(b, lam, _std(n)), _std(n)), "dual covering", verified)


def do_voronoi_model(args, verified):
    lam, b = _lattice_form(args)
    obj = _bundle(args)
    linear = io.qvec(obj["linear"]) if "linear" in obj else None
    _, f = plc.voronoi_model_function(lam, b, linear)
    if args.verify:
        _verify_model(f, lam, b, verified)
    return io.function_to_json(f)


def do_generic_decomposition(args, verified):
    lam, b = _lattice_form(args)
    sig = _part(args, "sigma", "sigma")
    if isinstance(sig, dict):
        sig = io.field_of(sig, "sigma", list)
    if not isinstance(sig, list):
        raise io.SchemaError("sigma must be a list of polytopes")
    sigma = [io.polytope_from_json(p) for p in sig]
    m_max = args.mmax if args.mmax is not None else _bundle(args).get("m_max", 1)
    if not isinstance(m_max, int) or isinstance(m_max, bool) or m_max < 1:
        raise io.SchemaError("m_max must be a positive integer")
    PC, f = plc.perturb_to_generic(lam, b, sigma, m_max=m_max, seed=args.seed)
    if args.verify:
        _verify_model(f, lam, b, verified)
        top = plc.top_members(sigma)
        for m in range(1, m_max + 1):
            _require(plc.is_generic(PC, sigma, m), f"generic m={m}", verified)
            w = transversality_witness(scale_periodic(PC, m), top)
            _require(w is None, f"transversal m={m}", verified, w and io.polytope_to_json(w))
    out = io.function_to_json(f)
    out["seed"] = args.seed
    return out


def do_dual_complex(args, verified):
    f = io.function_from_json(_part(args, "plf"))
    D = plc.dual_complex_of(f)
    if args.verify:
        _require(not D.order_reversal_failures(), "order reversal", verified)
        _require(not D.dimension_failures(), "complementary dimensions", verified)
    return io.dual_complex_to_json(D)


def do_degree(args, verified):
    f = io.function_from_json(_part(args, "plf"))
    ok, N = plc.model_function_check(f)
    g = plc.scaled(f, N) if N != 1 else f
    n = f.ambient_dim
    rows, total = [], Fraction(0)
    for v in plc.vertex_classes(g):
        deg = plc.degree_at_vertex(g, v.vertices[0])
        total += deg
        rows.append({"vertex": io.svec(v.vertices[0]), "degree": la.qstr(deg)})
    norm = total / Fraction(N) ** n
    if args.vertex:
        v = io.load(args.vertex)
        u = io.qvec(io.field_of(v, "vertex", list) if isinstance(v, dict) else v)
        if len(u) != n:
            raise io.SchemaError(f"vertex has length {len(u)}, expected {n}")
        rep = f.complex.canonical_point(u)
        if not any(P.vertices[0] == rep for P in f.complex.cells_of_dim(0)):
            raise ValidationFailure("point is not a vertex of the complex", io.svec(u))
        deg = plc.degree_at_vertex(g, rep)
        return {"kind": "degree", "N": N, "vertex": io.svec(u), "degree": la.qstr(deg),
                "normalized_degree": la.qstr(deg / Fraction(N) ** n)}
    if args.verify and f.cocycle is not None:
        lam, b = f.complex.lattice, f.cocycle.form
        target = factorial(n) * covolume(form_lattice(b, lam, _std(n)), _std(n))
        _require(norm == target, "degree sum equals d! covol", verified)
    return {"kind": "degree", "N": N, "vertices": rows, "sum": la.qstr(total), "normalized_sum": la.qstr(norm)}


def do_check(args, verified):
    obj = io.load(args.input)
    if not (args.transversal or args.generic):
        raise io.SchemaError("check needs --transversal or --generic")
    cells = [io.polytope_from_json(c) for c in io.field_of(obj, "cells", list)]
    if "lattice" in obj:
        C = build_periodic(io.lattice_from_json(obj["lattice"]), cells)
    else:
        C = build_complex(cells)
    result = {"kind": "check"}
    if args.transversal:
        S = PolytopalSet([io.polytope_from_json(p) for p in io.field_of(obj, "set", list)])
        w = transversality_witness(C, S)
        if w is not None:
            cid = C.class_id(w) if hasattr(C, "class_id") else C.cell_id(w)
            raise ValidationFailure("complex is not transversal to the set",
                                    {"cell_id": cid, "cell": io.polytope_to_json(w)})
        verified.append("transversal")
        result["transversal"] = True
    if args.generic:
        sigma = [io.polytope_from_json(p) for p in io.field_of(obj, "sigma", list)]
        for m in range(1, obj.get("m_max", 1) + 1):
            w = plc.genericity_witness(C, sigma, m)
            if w is not None:
                raise ValidationFailure(f"not generic at scale {m}: {w[2]}",
                                        {"cell": io.polytope_to_json(w[0]), "sigma": io.polytope_to_json(w[1])})
            verified.append(f"generic m={m}")
        result["generic"] = True
    return result


def _forms(paths):
    return [io.form_from_json(io.load(p)) for p in paths]


def _unimodular(rng, d):
    U = [[int(i == j) for j in range(d)] for i in range(d)]
    if d == 1:
        return [[rng.choice((1, -1))]]
    for _ in range(4 * d):
        i, j = rng.sample(range(d), 2)
        c = rng.randint(-2, 2)
        for r in range(d):
            U[r][i] += c * U[r][j]
    return U


def do_measure(args, verified):
    obj = io.load(args.input)
    forms = _forms(args.forms)
    definite = all(not isinstance(b, tuple) for b in forms)
    if args.kind == "cycle":
        inp = io.cycle_from_json(obj)
        mu = ms.canonical_measure(inp, forms)
        if args.verify:
            rng = random.Random(args.seed)
            for i, A in enumerate(ms.atoms(inp)):
                base = ms.atom_density(inp, A, forms)
                for _ in range(3):
                    U = _unimodular(rng, A.dim)
                    N = la.columns(la.matmul(la.from_columns(A.basis, inp.n), U))
                    _require(ms.atom_density(inp, A, forms, N) == base, f"basis invariance atom {i}", verified)
    else:
        strata = io.strata_from_json(obj)
        lam = io.lattice_from_json(io.field_of(obj, "lattice"))
        f = ms.skeleton_affine_map(ms.build_skeleton(strata), lam)
        mu = ms.skeleton_measure(f, forms)
    if args.verify and definite:
        nonzero = [p for p in mu.pieces if p.density != 0]
        _require(all(p.density > 0 for p in nonzero), "positivity", verified)
    return io.measure_to_json(mu)


def do_mixed_volume(args, verified):
    Ps = [io.polytope_from_json(io.load(p)) for p in args.polytopes]
    try:
        V = ms.mixed_volume(Ps)
    except ValueError as e:
        raise io.SchemaError(str(e)) from None
    if args.verify and len(Ps) <= 4:
        _require(all(ms.mixed_volume([Ps[i] for i in p]) == V for p in permutations(range(len(Ps)))),
                 "symmetry", verified)
    return {"kind": "mixed_volume", "value": la.qstr(V)}


def do_atoms(args, verified):
    inp = io.cycle_from_json(io.load(args.input))
    out = []
    for A in ms.atoms(inp):
        out.append({"J": list(A.J), "pieces": [io.polytope_to_json(P) for P in A.pieces],
                    "basis": [[int(x) for x in v] for v in A.basis],
                    "stabilizer": io.lattice_to_json(A.stabilizer)})
    return {"kind": "atoms", "atoms": out}


def do_skeleton(args, verified):
    obj = io.load(args.input)
    skel = ms.build_skeleton(io.strata_from_json(obj))
    cells = [{"stratum": s, "face": sorted(F), "members": [[t, sorted(G)] for t, G in mem]}
             for (s, F), mem in skel.cells.items()]
    out = {"kind": "skeleton", "f_vector": skel.f_vector(), "cells": cells}
    if "lattice" in obj:
        f = ms.skeleton_affine_map(skel, io.lattice_from_json(obj["lattice"]))
        r, w = ms.dimension_bound(f)
        out["dimension_bound"] = {"value": r, "witness": w,
                                  "components": list(skel.strata[w].components)}
        if args.verify:
            _require(len(skel.strata[w].components) >= r + 1, "witness components", verified)
    return out


def do_plot(args, verified):
    obj = io.load(args.input)
    kind = obj.get("kind") if isinstance(obj, dict) else None
    axes = args.project
    if kind == "hypersurface":
        polys = [io.polytope_from_json(c) for c in obj["cells"] + obj.get("boundary_cells", [])]
        return plot.polytopes_svg(polys, axes)
    if kind == "model_function":
        lam = io.lattice_from_json(obj["lattice"])
        return plot.periodic_svg([io.polytope_from_json(c) for c in obj["cells"]], lam.basis, axes)
    if kind == "dual_complex":
        return plot.polytopes_svg([io.polytope_from_json(c["dual"]) for c in obj["cells"]], axes)
    if kind == "measure":
        return plot.measure_svg([(io.polytope_from_json(p["support"]), io.q(p["density"])) for p in obj["pieces"]], axes)
    if kind == "atoms":
        return plot.polytopes_svg([io.polytope_from_json(P) for A in obj["atoms"] for P in A["pieces"]], axes)
    raise io.SchemaError(f"cannot plot objects of kind {kind!r}")


HANDLERS = {"tropicalize": do_tropicalize, "supval": do_supval, "voronoi-model": do_voronoi_model,
            "generic-decomposition": do_generic_decomposition, "dual-complex": do_dual_complex,
            "degree": do_degree, "check": do_check, "measure": do_measure, "mixed-volume": do_mixed_volume,
            "atoms": do_atoms, "skeleton": do_skeleton, "plot": do_plot}


# -- driver -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", "--out", help="write the result here (atomically) instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--verify", action="store_true", help="run the invariant suite before writing")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    p = argparse.ArgumentParser(prog="tropmeasure", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    flags = {"tropicalize": ("poly", "window"), "supval": ("poly", "polytope"),
             "voronoi-model": ("lattice", "form"), "generic-decomposition": ("lattice", "form", "sigma"),
             "dual-complex": ("plf",), "degree": ("plf", "vertex"), "atoms": (), "skeleton": ()}
    for verb, names in flags.items():
        sp = sub.add_parser(verb, parents=[common])
        sp.add_argument("--input", "-i", required=not names,
                        help="JSON bundle holding the inputs" + (" (alternative to the flags below)" if names else ""))
        for name in names:
            sp.add_argument(f"--{name}", help=f"JSON file with the {name}")
        if verb == "generic-decomposition":
            sp.add_argument("--mmax", type=int, help="largest scale m checked for genericity (default 1)")
    c = sub.add_parser("check", parents=[common])
    c.add_argument("--input", "-i", required=True)
    c.add_argument("--transversal", action="store_true")
    c.add_argument("--generic", action="store_true")
    m = sub.add_parser("measure", parents=[common])
    m.add_argument("kind", choices=("cycle", "skeleton"))
    m.add_argument("--input", "-i", required=True)
    m.add_argument("--forms", nargs="+", required=True)
    mv = sub.add_parser("mixed-volume", parents=[common])
    mv.add_argument("polytopes", nargs="+")
    pl = sub.add_parser("plot", parents=[common])
    pl.add_argument("--input", "-i", required=True)
    pl.add_argument("--project", type=int, nargs=2, metavar=("I", "J"))
    return p


def _inputs(args) -> list[str]:
    paths = []
    for key in ("input", "poly", "window", "polytope", "lattice", "form", "sigma", "plf", "vertex"):
        if getattr(args, key, None):
            paths.append(getattr(args, key))
    paths += list(getattr(args, "forms", None) or [])
    paths += list(getattr(args, "polytopes", None) or [])
    return paths


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    verified: list[str] = []
    report = {"verb": args.verb, "seed": args.seed, "inputs": {}, "verified": verified}
    out_stream = sys.stderr if args.output is None else sys.stdout
    t0 = time.perf_counter()
    try:
        for path in _inputs(args):
            try:
                report["inputs"][path] = io.sha256_file(path)
            except OSError as e:
                raise io.SchemaError(f"{path}: {e.strerror}") from None
        result = HANDLERS[args.verb](args, verified)
        text = result if isinstance(result, str) else io.dumps(result)
    except io.SchemaError as e:
        report.update(status="schema error", error=str(e))
        out_stream.write(io.dumps(report))
        return 3
    except ValidationFailure as e:
        report.update(status="validation failure", error=str(e), witness=e.witness)
        out_stream.write(io.dumps(report))
        return 2
    except (ComplexError, ms.MeasureError) as e:
        w = e.witness
        if hasattr(w, "vertices"):
            w = io.polytope_to_json(w)
        report.update(status="validation failure", error=str(e), witness=repr(w) if w is not None else None)
        out_stream.write(io.dumps(report))
        return 2
    except (ValueError, plc.PerturbationError) as e:
        report.update(status="validation failure", error=str(e), witness=None)
        out_stream.write(io.dumps(report))
        return 2
    report["output"] = io.sha256_bytes(text.encode())
    if args.timings:
        report["seconds"] = round(time.perf_counter() - t0, 6)
    report["status"] = "ok"
    if args.output is None:
        sys.stdout.write(text)
    else:
        io.atomic_write(args.output, text)
        report["output_path"] = args.output
    out_stream.write(io.dumps(report))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

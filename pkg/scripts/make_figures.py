"""Write the standard figures (as SVG) through the command line front end."""

import argparse
import json
import tempfile
from pathlib import Path

from tropmeasure.cli import run


def dump(path: Path, obj) -> str:
    path.write_text(json.dumps(obj))
    return str(path)


def main(out: Path, seed: int) -> int:
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        t = Path(tmp)
        poly = dump(t / "f.json", {"dim": 2, "terms": [{"exp": [0, 0], "val": "0"}, {"exp": [1, 0], "val": "0"},
                                                       {"exp": [0, 1], "val": "0"}, {"exp": [1, 1], "val": "1/2"},
                                                       {"exp": [2, 0], "val": "1"}]})
        win = dump(t / "w.json", {"lo": [-2, -2], "hi": [2, 2]})
        lat = dump(t / "l.json", {"basis": [[1, 0], [0, 1]]})
        hexf = dump(t / "b.json", {"form": [[2, 1], [1, 2]]})
        eye = dump(t / "i.json", {"form": [[1, 0], [0, 1]]})
        sigma = dump(t / "s.json", [{"vertices": [[0, 0], [1, 1]]}, {"vertices": [[0, 0]]}, {"vertices": [[1, 1]]}])
        cyc = dump(t / "c.json", {"lattice": 2, "simplices": [
            {"M": [[2], [0]], "t": [0, 0], "vpi": "1/2"}, {"M": [[1], [1]], "t": [0, "1/2"], "vpi": "1"}]})
        steps = [
            ["tropicalize", "--poly", poly, "--window", win, "-o", str(t / "h.json")],
            ["plot", "--input", str(t / "h.json"), "-o", str(out / "hypersurface.svg")],
            ["voronoi-model", "--lattice", lat, "--form", hexf, "-o", str(t / "v.json")],
            ["plot", "--input", str(t / "v.json"), "-o", str(out / "voronoi_model.svg")],
            ["dual-complex", "--plf", str(t / "v.json"), "-o", str(t / "d.json")],
            ["plot", "--input", str(t / "d.json"), "-o", str(out / "dual_complex.svg")],
            ["generic-decomposition", "--lattice", lat, "--form", eye, "--sigma", sigma, "--mmax", "2",
             "--seed", str(seed), "-o", str(t / "g.json")],
            ["plot", "--input", str(t / "g.json"), "-o", str(out / "generic_decomposition.svg")],
            ["measure", "cycle", "--input", cyc, "--forms", eye, "-o", str(t / "mu.json")],
            ["plot", "--input", str(t / "mu.json"), "-o", str(out / "measure.svg")],
        ]
        for argv in steps:
            code = run(argv)
            if code:
                return code
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--seed", type=int, default=20240601)
    a = ap.parse_args()
    raise SystemExit(main(a.out, a.seed))

"""Total mass of the canonical measure on R^n/Lambda versus the degree of the model.

For each lattice and form, the measure route (atom densities summed over a
fundamental domain) and the degree route (local degrees of the scaled Voronoi
model function) are computed independently and printed side by side.
"""

import argparse
import time
from dataclasses import dataclass, field
from fractions import Fraction

from tropmeasure.lattices import BilinearForm, IntLattice
from tropmeasure.measure import abelian_cycle_input, canonical_measure
from tropmeasure.plc import degree_at_vertex, model_function_check, scaled, vertex_classes, voronoi_model_function


@dataclass
class Config:
    cases: list = field(default_factory=lambda: [
        ([[1]], [[1]]),
        ([[1]], [[2]]),
        ([[3]], [[1]]),
        ([[1, 0], [0, 1]], [[1, 0], [0, 1]]),
        ([[1, 0], [0, 1]], [[2, 1], [1, 2]]),
        ([[2, 1], [0, 3]], [[1, 0], [0, 1]]),
        ([[1, 0], [0, 2]], [[2, 1], [1, 2]]),
    ])


def degree_route(L, b):
    _, f = voronoi_model_function(L, b)
    _, N = model_function_check(f)
    g = scaled(f, N)
    return sum(degree_at_vertex(g, v.vertices[0]) for v in vertex_classes(g)) / Fraction(N) ** L.ambient_dim


def main(cfg: Config) -> int:
    print(f"{'lattice':<22}{'form':<22}{'mass':>8}{'degree':>8}{'sec':>8}")
    bad = 0
    for E, M in cfg.cases:
        t = time.perf_counter()
        L, b = IntLattice.from_generators(E), BilinearForm(M)
        mass = canonical_measure(abelian_cycle_input(L), [b] * L.ambient_dim).total_mass()
        deg = degree_route(L, b)
        bad += mass != deg
        print(f"{str(E):<22}{str(M):<22}{str(mass):>8}{str(deg):>8}{time.perf_counter() - t:>8.2f}")
    print("all agree" if not bad else f"{bad} disagreements")
    return 1 if bad else 0


if __name__ == "__main__":
    argparse.ArgumentParser(description=__doc__.splitlines()[0]).parse_args()
    raise SystemExit(main(Config()))

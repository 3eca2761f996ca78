"""Tabulate the soliton vector of the triangle as its preferred point moves.

    python scripts/soliton_grid.py --steps 10
"""
import argparse
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from abreu_lab.extremal import extremal_affine
from abreu_lab.generators import simplex
from abreu_lab.labelling import cone_labels
from abreu_lab.soliton import soliton_vector


@dataclass(frozen=True)
class GridConfig:
    steps: int = 10
    spacing: Fraction = Fraction(1, 21)

    def coordinates(self):
        mid = (self.steps + 1) // 2 + 1
        return [Fraction(1, 3) + (k - mid) * self.spacing for k in range(1, self.steps + 1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=GridConfig.steps)
    ap.add_argument("--spacing", type=Fraction, default=GridConfig.spacing)
    args = ap.parse_args()
    cfg = GridConfig(args.steps, args.spacing)

    g = cfg.coordinates()
    print(f"{'x':>7} {'y':>7} {'a1':>11} {'a2':>11} {'|a|':>10} {'A const':>8}")
    for x in g:
        for y in g:
            if x <= 0 or y <= 0 or x + y >= 1:
                continue
            P = cone_labels(simplex(2), 1, (x, y))
            a = soliton_vector(P).a
            const = extremal_affine(P).is_constant
            print(f"{str(x):>7} {str(y):>7} {a[0]:>11.6f} {a[1]:>11.6f} {np.linalg.norm(a):>10.3e} {str(const):>8}")


if __name__ == "__main__":
    main()

"""Solve the Hirzebruch Einstein problem at increasing resolution and report the
error against the closed-form potential.

    python scripts/refinement_study.py --resolutions 12 16 24 32
"""
import argparse
import time
from dataclasses import dataclass
from fractions import Fraction

from abreu_lab.generators import hirzebruch
from abreu_lab.mongeampere import SolverConfig, compare, solve
from abreu_lab.potential import hirzebruch_closed_form


@dataclass(frozen=True)
class StudyConfig:
    resolutions: tuple = (12, 16, 24, 32)
    delta: float = 0.05

    def tol(self, resolution: int) -> float:
        # coarse grids stall well above 1e-8
        return {12: 1e-4, 16: 1e-6}.get(resolution, 1e-8)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolutions", type=int, nargs="+", default=list(StudyConfig.resolutions))
    ap.add_argument("--delta", type=float, default=StudyConfig.delta)
    args = ap.parse_args()
    cfg = StudyConfig(tuple(args.resolutions), args.delta)

    P = hirzebruch(1)
    ref = hirzebruch_closed_form(Fraction(9, 7))
    print(f"{'N':>4} {'deviation':>11} {'H error':>11} {'u error':>11} {'time':>7}")
    for n in cfg.resolutions:
        t0 = time.perf_counter()
        res = solve(P, config=SolverConfig(resolution=n, tol=cfg.tol(n)))
        c = compare(res.model, ref, delta=cfg.delta)
        print(f"{n:>4} {res.deviation:>11.3e} {c.h_max:>11.3e} {c.u_gauge:>11.3e} {time.perf_counter() - t0:>6.1f}s")


if __name__ == "__main__":
    main()

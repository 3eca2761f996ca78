"""Solve for the Einstein metric on the Hirzebruch trapezoid and audit the result.

    python scripts/hirzebruch_solve.py --resolution 32
"""
import argparse
from dataclasses import dataclass
from fractions import Fraction

from abreu_lab.generators import hirzebruch
from abreu_lab.mongeampere import SolverConfig, compare, solve
from abreu_lab.potential import boundary_check, einstein_residual, hirzebruch_closed_form, interior_grid


@dataclass(frozen=True)
class RunConfig:
    resolution: int = 32
    tol: float = 1e-8
    continuation_steps: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=RunConfig.resolution)
    ap.add_argument("--tol", type=float, default=RunConfig.tol)
    ap.add_argument("--continuation-steps", type=int, default=RunConfig.continuation_steps)
    args = ap.parse_args()
    cfg = RunConfig(args.resolution, args.tol, args.continuation_steps)

    res = solve(hirzebruch(1), config=SolverConfig(resolution=cfg.resolution, tol=cfg.tol,
                                                   continuation_steps=cfg.continuation_steps))
    print(f"solver: deviation {res.deviation:.3e} after {res.iterations} iterations")
    for s, dev in res.history:
        print(f"  s = {s:.3f}  deviation {dev:.3e}")
    print(f"labels: {[tuple(str(v) for v in h.normal) for h in res.polytope.halfspaces]}")

    grid = interior_grid(res.polytope, 30, delta=0.01)
    r = einstein_residual(res.model, res.polytope, lam=1, grid=grid)
    print(f"Einstein residual on independent grid: {r.deviation:.3e}")
    bc = boundary_check(res.model, tol=1e-6)
    print(f"boundary conditions: {'pass' if bc.passed else 'FAIL'}")
    c = compare(res.model, hirzebruch_closed_form(Fraction(9, 7)))
    print(f"closed form: H error {c.h_max:.3e}, u error mod affine {c.u_gauge:.3e} on {c.n_points} points")


if __name__ == "__main__":
    main()

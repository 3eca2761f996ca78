"""abreu-lab command line interface.

Facets are numbered from 1 in every report; the Python API is 0-based.
Exit codes: 0 success, 2 invalid input, 3 non-convergence.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import io
from .errors import (
    AbreuLabError,
    DomainMismatch,
    Empty,
    GeometryError,
    MaxIterations,
    NoConvergence,
    NotCollinear,
    NotSimple,
    ParseError,
    QuadratureNotConverged,
    RedundantFacet,
    Unbounded,
)
from .extremal import CONSTANCY_TOL, barycenter_criterion, extremal_affine
from .generators import hirzebruch, rectangle, simplex, square
from .labelling import (
    MONOTONE_RTOL,
    SMOOTH_TOL,
    cone_angles,
    delzant_check,
    einstein_normalize,
    monotone_point,
    rationality,
)
from .measure import moments
from .mongeampere import SolverConfig, compare, solve
from .potential import (
    abreu_scalar,
    boundary_check,
    einstein_residual,
    guillemin,
    hirzebruch_closed_form,
    interior_grid,
)
from .soliton import soliton_vector

EXIT_OK, EXIT_INVALID, EXIT_NOCONV = 0, 2, 3

HIRZEBRUCH_REFERENCE = ((1, 0), (-1, 0), (0, 1), (1, -1))


def example_file(name: str) -> io.PolytopeFile:
    if name == "square":
        return io.PolytopeFile(square())
    if name == "simplex":
        return io.PolytopeFile(simplex(2))
    if name == "rectangle":
        return io.PolytopeFile(rectangle())
    if name == "hirzebruch":
        ref = tuple(tuple(Fraction(t) for t in v) for v in HIRZEBRUCH_REFERENCE)
        return io.PolytopeFile(hirzebruch(1), ref)
    raise ValueError(f"unknown example {name!r}")


EXAMPLE_NAMES = ("square", "simplex", "rectangle", "hirzebruch")


# -- formatting --------------------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def fmt_vec(vs) -> str:
    return "(" + ", ".join(fmt(v) for v in vs) + ")"


def _exact_or_float(exact, values):
    return list(exact) if exact is not None else [float(v) for v in values]


def _affine_text(coeffs) -> str:
    terms = [fmt(coeffs[0])]
    for i, c in enumerate(coeffs[1:], start=1):
        if c != 0:
            terms.append(f"{fmt(c)} x{i}")
    return " + ".join(terms)


def _lattice_warning(pf: io.PolytopeFile):
    if pf.has_floats:
        warnings.warn("input contains floats; lattice results rely on rational recognition", stacklevel=2)


# -- commands ----------------------------------------------------------------------

def cmd_info(pf, args):
    P = pf.polytope
    cert = monotone_point(P)
    res = {
        "dim": P.dim,
        "n_facets": P.n_facets,
        "exact": P.is_exact,
        "facets": [{"facet": k + 1, "normal": list(h.normal), "offset": h.offset} for k, h in enumerate(P.halfspaces)],
        "vertices": [list(v) for v in (P.exact_vertices if P.is_exact else P.vertices.tolist())],
        "volume": P.volume,
        "barycenter": P.barycenter,
        "monotone": cert is not None,
    }
    if cert is not None:
        res["preferred_point"] = _exact_or_float(cert.exact_point, cert.preferred_point)
        res["common_value"] = cert.exact_value if cert.exact_value is not None else cert.common_value
    lines = [f"dimension: {P.dim}", f"facets: {P.n_facets}"]
    lines += [f"  facet {k + 1}: normal {fmt_vec(h.normal)}, offset {fmt(h.offset)}" for k, h in enumerate(P.halfspaces)]
    lines.append(f"vertices: {len(P.vertices)}")
    lines += [f"  {fmt_vec(v)}" for v in res["vertices"]]
    lines += [f"volume: {fmt(P.volume)}", f"barycenter: {fmt_vec(P.barycenter)}",
              f"monotone: {'yes' if cert else 'no'}"]
    if cert is not None:
        lines.append(f"preferred point: {fmt_vec(res['preferred_point'])}, common value {fmt(res['common_value'])}")
    return res, {"monotone_rtol": MONOTONE_RTOL}, lines


def cmd_moments(pf, args):
    md = moments(pf.polytope)
    W = [list(r) for r in md.W_exact] if md.W_exact is not None else md.W
    Z = list(md.Z_exact) if md.Z_exact is not None else md.Z
    lines = ["W (basis 1, x1, ..., xn):"] + [f"  {fmt_vec(r)}" for r in W] + [f"Z: {fmt_vec(Z)}"]
    return {"W": W, "Z": Z, "exact": md.W_exact is not None}, {}, lines


def cmd_extremal(pf, args):
    tol = args.tol if args.tol is not None else CONSTANCY_TOL
    ex = extremal_affine(pf.polytope, tol)
    bc = barycenter_criterion(pf.polytope, tol)
    coeffs = _exact_or_float(ex.exact_coefficients, ex.coefficients)
    res = {
        "coefficients": coeffs,
        "constant": ex.is_constant,
        "condition_number": ex.condition_number,
        "barycenter_interior": bc.bary_interior,
        "barycenter_boundary": bc.bary_boundary,
        "barycenters_coincide": bc.coincide,
    }
    lines = [
        f"A(x) = {_affine_text(coeffs)} (constant: {'yes' if ex.is_constant else 'no'})",
        f"barycenter of P: {fmt_vec(bc.bary_interior)}",
        f"barycenter of boundary: {fmt_vec(bc.bary_boundary)}",
        f"condition number: {ex.condition_number:.3g}",
    ]
    return res, {"constancy_tol": tol}, lines


def cmd_normalize(pf, args):
    out, cert = einstein_normalize(pf.polytope)
    labels = [list(h.normal) for h in out.halfspaces]
    offsets = [h.offset for h in out.halfspaces]
    point = _exact_or_float(cert.exact_point, cert.preferred_point)
    scales = []
    for h_old, h_new in zip(pf.polytope.halfspaces, out.halfspaces):
        j = int(np.argmax(np.abs(np.asarray(h_old.normal, dtype=float))))
        scales.append(h_new.normal[j] / h_old.normal[j])
    res = {"labels": labels, "offsets": offsets, "scales": scales, "preferred_point": point, "common_value": 1}
    lines = ["Einstein labels:"]
    lines += [f"  facet {k + 1}: {fmt_vec(nu)} (scale {fmt(s)})" for k, (nu, s) in enumerate(zip(labels, scales))]
    lines += [f"preferred point: {fmt_vec(point)}", "common value: 1"]
    if args.output:
        io.emit(io.PolytopeFile(out, pf.reference_labels), args.output)
        lines.append(f"written: {args.output}")
    return res, {"monotone_rtol": MONOTONE_RTOL}, lines


def cmd_soliton(pf, args):
    tol = args.tol if args.tol is not None else 1e-10
    sv = soliton_vector(pf.polytope, tol=tol)
    res = {"a": sv.a, "residual": sv.residual, "iterations": sv.iterations, "preferred_point": sv.preferred_point,
           "kaehler_einstein": bool(np.linalg.norm(sv.a) <= 1e-8)}
    lines = [f"soliton vector a: {fmt_vec(sv.a)}", f"moment residual: {sv.residual:.3g}",
             f"iterations: {sv.iterations}", f"preferred point: {fmt_vec(sv.preferred_point)}"]
    return res, {"newton_tol": tol, "a_zero_tol": 1e-8}, lines


def _reference_polytope(pf):
    if pf.reference_labels is None:
        raise ParseError("this command needs 'reference_labels' in the input file", "reference_labels")
    try:
        return pf.polytope.with_labels(pf.reference_labels)
    except GeometryError as exc:
        raise NotCollinear(str(exc)) from None


def cmd_angles(pf, args):
    tol = args.tol if args.tol is not None else SMOOTH_TOL
    rep = cone_angles(_reference_polytope(pf), pf.polytope, tol)
    rows = []
    lines = ["facet  a_k       type         angle"]
    for f in rep.facets:
        a = f.exact_ratio if f.exact_ratio is not None else f.ratio
        rows.append({"facet": f.facet + 1, "ratio": a, "kind": f.kind.value, "angle": f.angle})
        lines.append(f"{f.facet + 1:<6} {fmt(a):<9} {f.kind.value:<12} 2π·{fmt(a)}")
    return {"facets": rows}, {"smooth_tol": tol}, lines


def cmd_rationality(pf, args):
    _lattice_warning(pf)
    rep = rationality(pf.polytope, strict=True)
    res = {"is_lattice_polytope": rep.is_lattice_polytope, "vertex_denominator": rep.vertex_denominator,
           "minimal_scale": rep.minimal_scale, "scaled_normals": rep.scaled_normals}
    lines = [f"lattice polytope (after clearing denominators): {'yes' if rep.is_lattice_polytope else 'no'}",
             f"vertex denominator: {rep.vertex_denominator}",
             f"minimal integral scale s: {fmt(rep.minimal_scale)}",
             "scaled normals: " + ", ".join(fmt_vec(v) for v in rep.scaled_normals)]
    return res, {"recognition_rtol": 1e-11}, lines


def cmd_delzant(pf, args):
    _lattice_warning(pf)
    P = _reference_polytope(pf) if args.reference else pf.polytope
    rep = delzant_check(P, rescale=args.rescale)
    rows = [{"vertex": v, "facets": [k + 1 for k in fs], "det": d} for v, fs, d in rep.determinants]
    lines = [f"vertex {fmt_vec(r['vertex'])}: facets {r['facets']}, |det| = {r['det']}" for r in rows]
    lines.append(f"Delzant: {'yes' if rep.is_delzant else 'no'}")
    if rep.caveat:
        lines.append(f"note: {rep.caveat}")
    return {"vertices": rows, "is_delzant": rep.is_delzant, "lattice_index": rep.lattice_index,
            "caveat": rep.caveat}, {}, lines


def _model(pf, args):
    if args.model == "hirzebruch":
        model = hirzebruch_closed_form(io.parse_number(args.C or "1", "C"))
        if pf is not None and not np.allclose(pf.polytope.vertices, model.polytope.vertices):
            raise DomainMismatch("input polytope is not the Hirzebruch trapezoid")
        return model
    if pf is None:
        raise ParseError("--input is required for the Guillemin model", "input")
    return guillemin(pf.polytope)


def cmd_check_potential(pf, args):
    tol = args.tol if args.tol is not None else 1e-6
    model = _model(pf, args)
    P = model.polytope
    bc = boundary_check(model, P, samples=args.samples, tol=tol)
    X = interior_grid(P, 50)
    S = abreu_scalar(model, X)
    ex = extremal_affine(P)
    res = {
        "model": args.model,
        "boundary_passed": bc.passed,
        "max_kernel_defect": max(s.kernel_defect for s in bc.samples),
        "max_derivative_defect": max(s.derivative_defect for s in bc.samples),
        "violations": [{"facet": s.facet + 1, "point": s.point} for s in bc.violations],
        "scalar_curvature": {"min": S.min(), "max": S.max(), "mean": S.mean(), "deviation": S.max() - S.min()},
        "extremal_coefficients": ex.coefficients,
    }
    lines = [
        f"boundary conditions: {'pass' if bc.passed else 'FAIL'} "
        f"(max |H nu| = {res['max_kernel_defect']:.3g}, max |dH(nu,nu) - 2nu| = {res['max_derivative_defect']:.3g})",
        f"scalar curvature on {len(X)} grid points: min {S.min():.12g}, max {S.max():.12g}",
        f"extremal affine function: {_affine_text(ex.coefficients)}",
    ]
    if monotone_point(P) is not None:
        er = einstein_residual(model, P, lam=args.lam)
        res["einstein_deviation"] = er.deviation
        lines.append(f"Einstein residual deviation (lambda={fmt(args.lam)}, a=0): {er.deviation:.3g}")
    return res, {"boundary_tol": tol, "grid": 50}, lines


def _solver_config(args) -> SolverConfig:
    kw = {"resolution": args.resolution}
    if args.tol is not None:
        kw["tol"] = args.tol
    return SolverConfig(**kw)


def _solve_report(r):
    return {
        "deviation": r.deviation,
        "check_deviation": r.check_deviation,
        "iterations": r.iterations,
        "a": r.a,
        "lambda": r.lam,
        "preferred_point": r.preferred_point,
        "labels": [list(h.normal) for h in r.polytope.halfspaces],
        "basis": {"lower": r.model.basis.lower, "upper": r.model.basis.upper, "degree": r.model.basis.degree},
        "coefficients": r.model.coeffs,
    }


def cmd_solve(pf, args):
    cfg = _solver_config(args)
    r = solve(pf.polytope, lam=args.lam, config=cfg)
    res = _solve_report(r)
    lines = [f"residual deviation: {r.deviation:.3g} (check grid {r.check_deviation:.3g})",
             f"iterations: {r.iterations}", f"soliton vector a: {fmt_vec(r.a)}",
             f"basis: Chebyshev total degree {r.model.basis.degree}, {r.model.basis.size} coefficients"]
    return res, {"tol": cfg.tol, "resolution": cfg.resolution, "boundary_layer": cfg.boundary_layer}, lines


def cmd_compare(pf, args):
    cfg = _solver_config(args)
    r = solve(pf.polytope, lam=args.lam, config=cfg)
    if args.model == "hirzebruch":
        # default: the closed form on the labels the solver actually used
        C = io.parse_number(args.C, "C") if args.C is not None else r.polytope.halfspaces[2].normal[1]
        ref = hirzebruch_closed_form(C)
    else:
        ref = guillemin(r.polytope)
    cmp = compare(ref, r.model, delta=args.delta)
    res = {"solver": {"deviation": r.deviation, "iterations": r.iterations},
           "h_max": cmp.h_max, "h_mean": cmp.h_mean, "u_gauge": cmp.u_gauge, "n_points": cmp.n_points}
    lines = [f"solver deviation: {r.deviation:.3g}",
             f"H relative difference: max {cmp.h_max:.3g}, mean {cmp.h_mean:.3g} on {cmp.n_points} points",
             f"u difference modulo affine functions: {cmp.u_gauge:.3g}"]
    return res, {"tol": cfg.tol, "resolution": cfg.resolution, "delta": args.delta}, lines


COMMANDS = {
    "info": cmd_info,
    "moments": cmd_moments,
    "extremal": cmd_extremal,
    "normalize": cmd_normalize,
    "soliton": cmd_soliton,
    "angles": cmd_angles,
    "rationality": cmd_rationality,
    "delzant": cmd_delzant,
    "check-potential": cmd_check_potential,
    "solve": cmd_solve,
    "compare": cmd_compare,
}
NEEDS_INPUT = {"info", "moments", "extremal", "normalize", "soliton", "angles", "rationality", "delzant",
               "solve", "compare"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abreu-lab", description="Labelled polytopes, extremal and Einstein metrics.")
    ap.add_argument("command", choices=[*COMMANDS, "examples"])
    ap.add_argument("name", nargs="?", help="example name (examples command)")
    ap.add_argument("--input", "-i")
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--tol", type=float)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--resolution", type=int, default=32)
    ap.add_argument("--output", "-o")
    ap.add_argument("--model", choices=["guillemin", "hirzebruch"], default="guillemin")
    ap.add_argument("--C", help="Hirzebruch scale, e.g. 9/7 (check-potential default 1; compare default: solver labels)")
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--reference", action="store_true", help="delzant: check the reference labels")
    ap.add_argument("--rescale", action="store_true", help="delzant: rescale labels to be integral first")
    return ap


def _write(text: str, args):
    if args.output and args.command not in ("normalize",):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def describe(exc: Exception) -> str:
    """Error message with facets numbered from 1."""
    one = lambda fs: [k + 1 for k in fs]  # noqa: E731
    if isinstance(exc, Unbounded):
        return (f"Unbounded: region is unbounded in direction {fmt_vec(np.asarray(exc.direction) + 0.0)}; "
                f"facets parallel to it: {one(exc.facets)}")
    if isinstance(exc, Empty):
        return f"Empty: half-spaces have empty interior (tightest facets {one(exc.facets)})"
    if isinstance(exc, NotSimple):
        return f"NotSimple: vertex {fmt_vec(exc.vertex)} lies on facets {one(exc.facets)}"
    if isinstance(exc, RedundantFacet):
        return f"RedundantFacet: facet {exc.facet + 1} does not support a codimension-one face"
    return f"{type(exc).__name__}: {exc}"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "examples":
            if not args.name:
                sys.stdout.write("\n".join(EXAMPLE_NAMES) + "\n")
                return EXIT_OK
            _write(io.dumps(example_file(args.name), vertices=False), args)
            return EXIT_OK
        if args.command in NEEDS_INPUT and not args.input:
            raise ParseError("--input is required", "input")
        pf = io.parse(args.input) if args.input else None
        result, tols, lines = COMMANDS[args.command](pf, args)
        if args.json:
            text = io.dump_report(io.report(args.command, result, tols))
        else:
            tol_line = ", ".join(f"{k}={fmt(v)}" for k, v in tols.items())
            text = "\n".join(lines + ([f"tolerances: {tol_line}"] if tol_line else [])) + "\n"
        _write(text, args)
        return EXIT_OK
    except (NoConvergence, MaxIterations, QuadratureNotConverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (AbreuLabError, ValueError) as exc:
        print(f"error: {describe(exc)}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

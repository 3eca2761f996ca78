"""Acceptance suite: one test per criterion, each timed, each printing a PASS/FAIL line."""
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from abreu_lab.extremal import extremal_affine
from abreu_lab.generators import hirzebruch, hirzebruch_delzant, random_polytope, rectangle, simplex, square
from abreu_lab.labelling import (
    SingularityClass,
    cone_angles,
    cone_labels,
    delzant_check,
    einstein_normalize,
    monotone_point,
    rationality,
)
from abreu_lab.measure import AffineFunction, Polynomial2, boundary_barycenter, integrate_facet, moments, psi_map
from abreu_lab.mongeampere import SolverConfig, compare, solve
from abreu_lab.potential import (
    abreu_scalar,
    boundary_check,
    einstein_residual,
    guillemin,
    hirzebruch_closed_form,
    interior_grid,
)
from abreu_lab.soliton import soliton_vector

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(number, title, limit):
    """Yields a dict for measured values; records one line with timing and verdict."""
    rec = {"checks": [], "detail": ""}
    t0 = time.perf_counter()
    try:
        yield rec
    finally:
        elapsed = time.perf_counter() - t0
        checks = rec["checks"] + [("runtime", elapsed < limit)]
        ok = all(c for _, c in checks)
        failed = [name for name, c in checks if not c]
        line = (f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {rec['detail']} "
                f"({elapsed:.2f}s, limit {limit:g}s)" + (f" failed: {', '.join(failed)}" if failed else ""))
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert ok, line


def check(rec, name, ok):
    rec["checks"].append((name, bool(ok)))


def test_simplex_facet_measures():
    with criterion(1, "simplex facet measures", 1.0) as rec:
        errs = []
        for n, expected in [(2, 1.0), (3, 0.5)]:
            P = simplex(n)
            one = Polynomial2.monomial(n, 0)
            masses = [integrate_facet(P, k, one) for k in range(n + 1)]
            check(rec, f"exact n={n}", masses == [Fraction(expected)] * (n + 1))
            errs.append(max(abs(float(m) - expected) for m in masses))
        check(rec, "tolerance", max(errs) <= 1e-12)
        rec["detail"] = f"masses 1 and 1/2, max error {max(errs):.1e}"


def test_psi_identity():
    with criterion(2, "Psi-map identity", 30.0) as rec:
        rng = np.random.default_rng(2)
        worst, worst_label = 0.0, 0.0
        for dim, count in [(2, 200), (3, 50)]:
            for _ in range(count):
                P = random_polytope(rng, dim=dim)
                f = AffineFunction(rng.normal(), rng.normal(size=dim))
                lin = np.asarray(f.linear)
                scale = P.volume * np.linalg.norm(lin)
                psi = psi_map(P, f)
                worst = max(worst, np.linalg.norm(psi + P.volume * lin) / scale)
                Q = P.relabel(rng.uniform(0.1, 10.0, size=P.n_facets))
                worst_label = max(worst_label, np.linalg.norm(psi_map(Q, f) - psi) / scale)
        check(rec, "identity", worst <= 1e-9)
        check(rec, "label independence", worst_label <= 1e-9)
        rec["detail"] = f"200 polygons + 50 3-polytopes, rel. error {worst:.1e}, relabelled {worst_label:.1e}"


def test_einstein_normalisation_pipeline():
    with criterion(3, "Einstein normalisation pipeline", 30.0) as rec:
        rng = np.random.default_rng(3)
        mono = a_dev = bary = 0.0
        monotone = True
        for _ in range(100):
            P = random_polytope(rng)
            Q, _ = einstein_normalize(P)
            c = monotone_point(Q)
            if c is None:
                monotone = False
                continue
            A = extremal_affine(Q).coefficients
            bP = P.barycenter
            mono = max(mono, c.residual)
            a_dev = max(a_dev, abs(A[0] - 4), np.abs(A[1:]).max() * P.diameter)
            bary = max(bary, np.abs(c.preferred_point - bP).max(), np.abs(boundary_barycenter(Q) - bP).max())
        check(rec, "monotone", monotone and mono <= 1e-9)
        check(rec, "A = 4", a_dev <= 1e-8)
        check(rec, "barycenters", bary <= 1e-9)
        rec["detail"] = f"100 polygons, monotone residual {mono:.1e}, |A - 4| {a_dev:.1e}, barycenters {bary:.1e}"


def test_hirzebruch_constants():
    with criterion(4, "Hirzebruch constants", 5.0) as rec:
        P = hirzebruch(1)
        c = monotone_point(P)
        check(rec, "preferred point", c.exact_point == (Fraction(14, 9), Fraction(7, 9)))
        check(rec, "common value", c.exact_value == Fraction(7, 9))
        A = extremal_affine(P)
        check(rec, "A = 36/7", abs(A.coefficients[0] - 36 / 7) <= 1e-10 and np.abs(A.coefficients[1:]).max() <= 1e-10)
        rep = cone_angles(hirzebruch_delzant(), P)
        ratios = [f.exact_ratio for f in rep.facets]
        check(rec, "cone angles", ratios == [Fraction(5, 7), Fraction(4, 7), 1, 1])
        check(rec, "facet 1 conical", rep.facets[0].kind is SingularityClass.CONICAL
              and math.isclose(rep.facets[0].angle, 2 * math.pi * 5 / 7))
        dz = delzant_check(hirzebruch_delzant())
        check(rec, "Delzant", dz.is_delzant and all(d == 1 for _, _, d in dz.determinants))
        s = rationality(P).minimal_scale
        check(rec, "scale 20", s == 20)
        rec["detail"] = (f"p = (14/9, 7/9), c = 7/9, A = {A.exact_coefficients[0]}, "
                         f"a = ({', '.join(map(str, ratios))}), s = {s}")


def test_closed_form_audit():
    with criterion(5, "closed-form metric audit", 10.0) as rec:
        u = hirzebruch_closed_form(1)
        bc = boundary_check(u, hirzebruch(1), tol=1e-6)
        S = abreu_scalar(u, interior_grid(u.polytope, 50))
        dev = float(np.abs(S - 36 / 7).max())
        check(rec, "analytic", u.analytic)
        check(rec, "boundary", bc.passed)
        check(rec, "S = 36/7", dev <= 1e-6)
        rec["detail"] = (f"boundary defects <= {max(max(s.kernel_defect, s.derivative_defect) for s in bc.samples):.1e}, "
                         f"|S - 36/7| {dev:.1e} on {len(S)} points")


def test_einstein_residual():
    with criterion(6, "Einstein residual certification", 10.0) as rec:
        sq = einstein_residual(guillemin(square()), lam=1.0).deviation
        hz = einstein_residual(hirzebruch_closed_form(Fraction(9, 7)), lam=1.0).deviation
        check(rec, "square", sq <= 1e-10)
        check(rec, "Hirzebruch", hz <= 1e-6)
        rec["detail"] = f"square {sq:.1e}, Hirzebruch C=9/7 {hz:.1e}"


def test_soliton_vector():
    with criterion(7, "soliton vector", 120.0) as rec:
        a_norm = 0.0
        rng = np.random.default_rng(7)
        ke = [square(), simplex(2), hirzebruch(1), einstein_normalize(rectangle())[0]]
        ke += [einstein_normalize(random_polytope(rng))[0] for _ in range(5)]
        for P in ke:
            a_norm = max(a_norm, np.linalg.norm(soliton_vector(P).a))
        check(rec, "a = 0", a_norm <= 1e-8)
        # 10 x 10 grid of preferred points around the barycenter of the simplex
        g = [Fraction(1, 3) + Fraction(k - 6, 21) for k in range(1, 11)]
        mismatches = points = 0
        shifted_res, smallest = 0.0, np.inf
        for x in g:
            for y in g:
                if x + y >= 1:
                    continue
                points += 1
                P = cone_labels(simplex(2), 1, (x, y))
                sv = soliton_vector(P)
                zero = np.linalg.norm(sv.a) <= 1e-8
                mismatches += zero != extremal_affine(P).is_constant
                if (x, y) != (Fraction(1, 3), Fraction(1, 3)):
                    shifted_res = max(shifted_res, sv.residual)
                    smallest = min(smallest, np.linalg.norm(sv.a))
        check(rec, "a != 0 when shifted", smallest > 1e-8)
        check(rec, "residual", shifted_res <= 1e-10)
        check(rec, "iff", mismatches == 0)
        rec["detail"] = (f"|a| <= {a_norm:.1e} on {len(ke)} KE labellings; {points} grid points, "
                         f"min |a| off-barycenter {smallest:.2e}, residual {shifted_res:.1e}, {mismatches} mismatches")


def test_monge_ampere_solver():
    with criterion(8, "Monge-Ampere solver", 60.0 + 600.0 + 600.0) as rec:
        t0 = time.perf_counter()
        # start away from the exact answer f = 0
        cfg = SolverConfig(resolution=32)
        basis = solve(square(), config=SolverConfig(resolution=32, max_iter=1)).model.basis
        damping = (1.0 + np.asarray(basis.indices).sum(axis=1)) ** 4
        start = 0.1 * np.random.default_rng(8).normal(size=basis.size) / damping
        res = solve(square(), config=cfg, initial=start)
        f_inf = float(np.abs(res.model.correction(interior_grid(square(), 50))).max())
        t_a = time.perf_counter() - t0
        direct = all(s == 1.0 for s, _ in res.history)
        check(rec, "(a) square", f_inf <= 1e-4 and t_a < 60 and direct and res.iterations > 0)

        t0 = time.perf_counter()
        res = solve(hirzebruch(1), config=SolverConfig(resolution=32))
        cmp = compare(res.model, hirzebruch_closed_form(Fraction(9, 7)), delta=0.05)
        t_b = time.perf_counter() - t0
        check(rec, "(b) Hirzebruch", cmp.h_max <= 1e-3 and t_b < 600)

        t0 = time.perf_counter()
        res = solve(cone_labels(simplex(2), 1, (Fraction(2, 5), Fraction(3, 10))), config=SolverConfig(resolution=32))
        t_c = time.perf_counter() - t0
        check(rec, "(c) soliton", res.deviation <= 1e-8 and t_c < 600)
        rec["detail"] = (f"(a) |f| {f_inf:.1e} after {res.iterations} iterations in {t_a:.1f}s; (b) H rel. error {cmp.h_max:.1e} in {t_b:.1f}s; "
                         f"(c) deviation {res.deviation:.1e}, a1 = {res.a[0]:.6f} in {t_c:.1f}s")


def test_scaling_laws():
    with criterion(9, "scaling laws", 10.0) as rec:
        rng = np.random.default_rng(9)
        scale_err = relabel_err = 0.0
        for _ in range(50):
            P = random_polytope(rng)
            s = rng.uniform(0.1, 10.0)
            Q = P.relabel([s] * P.n_facets)
            mP, mQ = moments(P), moments(Q)
            AP, AQ = extremal_affine(P).coefficients, extremal_affine(Q).coefficients
            scale_err = max(scale_err,
                            np.abs(mQ.Z - mP.Z / s).max() / np.abs(mP.Z / s).max(),
                            np.abs(AQ - AP / s).max() / np.abs(AP / s).max())
            R = P.relabel(rng.uniform(0.1, 10.0, size=P.n_facets))
            N1, _ = einstein_normalize(P)
            N2, _ = einstein_normalize(R)
            relabel_err = max(relabel_err,
                              np.abs(N1.normals - N2.normals).max() / np.abs(N1.normals).max(),
                              np.abs(N1.offsets - N2.offsets).max() / np.abs(N1.offsets).max())
        check(rec, "A/s and Z/s", scale_err <= 1e-10)
        check(rec, "relabelling", relabel_err <= 1e-10)
        rec["detail"] = f"50 polygons, scaling error {scale_err:.1e}, relabelling error {relabel_err:.1e}"

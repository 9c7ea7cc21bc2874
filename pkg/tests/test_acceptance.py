"""Acceptance criteria 1-12.  Each test prints one PASS/FAIL line
(visible with ``pytest -s`` or in the ``-v`` captured output on failure)."""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np
import pytest
from scipy.spatial.distance import directed_hausdorff

from ncatenoid import errors
from ncatenoid.fluxmodel import FluxData, inverse_stereographic, random_rotation
from ncatenoid.polyalg import ComplexPoly, poly_roots
from ncatenoid.residues import build_matrix_A, verify_solution, weierstrass_from_solution, weierstrass_polys
from ncatenoid.solver import (
    C_WINDOW,
    ZETA3,
    congruent,
    eqf_relative,
    eqf_residuals,
    kernel_B,
    named_example,
    parallel5_family,
    phi_quartic,
    solve,
    solve_type2,
    solve_type3,
    square_flux_roots,
    tetrahedral_points,
    zm_family,
)
from ncatenoid.surface import SamplingConfig, contour_flux, hopf_weight, loop_closure, metric_density, sample_surface

S2 = math.sqrt(2)
CFG = SamplingConfig()


def report(num, ok, detail=""):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"criterion {num} failed: {detail}"


def _random_type3(rng):
    v = rng.normal(size=(3, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    a = rng.uniform(0.3, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
    s = -(a @ v)
    a4 = np.linalg.norm(s)
    return FluxData(np.vstack([v, s / a4]), np.append(a, a4))


def _random_type2(rng):
    th = rng.uniform(0, 2 * np.pi, 3)
    v = np.stack([np.cos(th), np.zeros(3), np.sin(th)], 1)
    a = rng.uniform(0.3, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
    s = -(a @ v)
    a4 = np.linalg.norm(s)
    R = random_rotation(rng)
    return FluxData(np.vstack([v, s / a4]) @ R.T, np.append(a, a4))


def _oracle_errors(c):
    """(reduction2, max rel flux err, max hopf err, |total flux|, max closure)."""
    w = weierstrass_from_solution(c)
    flux, hopf, clos = [], [], []
    total = np.zeros(3)
    for j in range(c.n):
        f = contour_flux(w, j, CFG)
        total += f
        want = 4 * math.pi * c.a[j] * inverse_stereographic(c.p[j])
        flux.append(np.linalg.norm(f - want) / (4 * math.pi * abs(c.a[j]) or 1.0))
        hopf.append(abs(hopf_weight(w, j, CFG)[0] - c.a[j]))
        re, size = loop_closure(w, j, CFG)
        clos.append(float(np.max(np.abs(re))) / size)
    return verify_solution(c).reduction2_residual, max(flux), max(hopf), float(np.linalg.norm(total)), max(clos)


def _all_solver_candidates():
    out = []
    for name, par in [("tetrahedral", {}), ("square-flux", {"p": 1.2}), ("square-flux", {"p": 0.7}),
                      ("jorge-meeks", {}), ("parallel4", {}), ("parallel5", {}), ("zm", {"m": 3}),
                      ("zm", {"m": 4, "t": 0.5 + 0.5j})]:
        out += list(named_example(name, par).candidates)
    rng = np.random.default_rng(7)
    for _ in range(6):
        out += solve_type3(_random_type3(rng))
        out += solve_type2(_random_type2(rng))
    return out


def test_c01_tetrahedral_quartic():
    p = tetrahedral_points()
    phi = phi_quartic(*p[:3])
    ref = ComplexPoly.from_roots([1 / S2, 1 / S2, -S2, -S2], 3 / 8)
    err = float(np.max(np.abs(phi.coeffs - ref.coeffs)))
    lead = abs(p[0]) ** 2 * abs(np.conjugate(p[1]) * p[2] + 1) ** 2
    report(1, err < 1e-10 and abs(phi.lc - 3 / 8) < 1e-10 and abs(lead - 0.5 * 0.75) < 1e-15,
           f"coef err {err:.2e}, lc {phi.lc.real:.15g}")


def test_c01_oracle_interpolated_determinant():
    # independent route: det A(t) at q = (t, p2, p3, inf), interpolated
    p = tetrahedral_points()
    ts = np.cos(np.pi * (np.arange(5) + 0.5) / 5) * 2 + 0.1
    vals = []
    for t in ts:
        det = np.linalg.det(build_matrix_A(p, (t, p[1], p[2], complex(math.inf, 0))))
        vals.append((p[1] - p[2]) ** 2 * (t - p[1]) ** 2 * (t - p[2]) ** 2 * det)
    V = np.vander(ts, 5, increasing=True).astype(complex)
    coef = np.linalg.solve(V, np.array(vals))
    assert np.allclose(coef, phi_quartic(*p[:3]).coeffs, atol=1e-10)


def test_c02_kernel_values():
    p = tetrahedral_points()
    B = np.array(kernel_B(1 / S2, *p[:3]).B)
    Bm = np.array(kernel_B(-S2, *p[:3]).B)
    target = 9 / (4 * S2)
    e1 = np.max(np.abs(B - target))
    e2 = abs(B[:3].sum() - 27 / (4 * S2))
    e3 = np.max(np.abs(Bm - target * ZETA3 ** np.arange(4)))
    e4 = abs(Bm[:3].sum())
    report(2, max(e1, e2, e3, e4) < 1e-10, f"max err {max(e1, e2, e3, e4):.2e}")


def test_c03_closed_form_polynomials():
    p = tetrahedral_points()
    inf = complex(math.inf, 0)
    k = 9 / (4 * S2)
    P = ComplexPoly
    expect = {
        1 / S2: (P([S2, 0, 0, -1]) * k, P([0, 0, 27 / (4 * S2)]),
                 P([-1 / (2 * S2), 0, 0, 1])),
        -S2: (P([-1 / (2 * S2), 1.5, 3 / S2, 1]) * (-k), P([1 / S2, 1]) * (-27 / 8),
              P([1 / S2, 1.5, 3 / S2, 1])),
    }
    worst = 0.0
    for t, (Pe, Qe, Re) in expect.items():
        B = kernel_B(t, *p[:3]).B
        # P~, Q~, R~ are the Weierstrass polynomials built with b = B(t)
        Pt, Qt, Rt = weierstrass_polys((t, p[1], p[2], inf), B, p)
        for got, ref in ((Pt, Pe), (Qt, Qe), (Rt, Re)):
            n = max(len(got.coeffs), len(ref.coeffs))
            g = np.pad(got.coeffs, (0, n - len(got.coeffs)))
            r = np.pad(ref.coeffs, (0, n - len(ref.coeffs)))
            worst = max(worst, float(np.max(np.abs(g - r))))
    report(3, worst < 1e-10, f"max coef err {worst:.2e}")


def test_c04_square_flux_family():
    roots = square_flux_roots(1.2)
    real = all(abs(r.imag) < 1e-12 for r in roots)
    vals = sorted(r.real for r in roots)
    ref = sorted([1.0976, 10.815, -0.91078, -0.09246])
    close = max(abs(a - b) for a, b in zip(vals, ref))
    recip = max(min(abs(-1 / r - s) for s in roots) for r in roots)
    cands = named_example("square-flux", {"p": 1.2}).candidates
    distinct = len(cands) == 4 and not any(congruent(x, y) for x, y in itertools.combinations(cands, 2))
    report(4, real and close < 1e-3 and recip < 1e-9 and distinct,
           f"roots {[round(v, 6) for v in vals]}, max dev {close:.1e}, pairing {recip:.1e}")


def test_c05_real_root_window():
    bad = []
    for p in np.linspace(0.4, 2.5, 200):
        has_real = any(abs(r.imag) < 1e-6 for r in square_flux_roots(float(p)))
        inside = 1 / C_WINDOW <= p <= C_WINDOW
        if has_real != inside:
            bad.append(float(p))
    report(5, not bad, f"mismatches {bad}")


def test_c06_c11_verification_closure():
    worst = np.zeros(5)
    for c in _all_solver_candidates():
        worst = np.maximum(worst, _oracle_errors(c))
    r2, fl, hw, tot, cl = worst
    report(6, r2 < 1e-9 and fl < 1e-6 and hw < 1e-8 and tot < 1e-8,
           f"reduction2 {r2:.1e}, flux {fl:.1e}, hopf {hw:.1e}, total {tot:.1e}")
    report(11, cl < 1e-6, f"closure {cl:.1e}")


def test_c07_solution_count_bounds():
    rng = np.random.default_rng(2024)
    m3 = max(len(solve_type3(_random_type3(rng))) for _ in range(500))
    m2 = max(len(solve_type2(_random_type2(rng))) for _ in range(200))
    report(7, m3 <= 4 and m2 <= 4, f"max TYPE III {m3}, max TYPE II {m2}")


def _flux(vs, a):
    v = np.asarray(vs, float)
    return FluxData(v / np.linalg.norm(v, axis=1)[:, None], np.asarray(a, float))


def test_c08_obstruction_suite():
    e1, e3 = [1, 0, 0], [0, 0, 1]
    m3 = [0, 0, -1]
    cases = {
        1: _flux([e3, e3], [1, -1]),
        2: _flux([e3, e3, m3], [1, 1, 2]),
        3: _flux([m3, e3, e3, e3], [3, 1, 1, 1]),
        4: _flux([e3, m3, e1, e1], [1, 1, 1, -1]),
    }
    ok = True
    for cond, d in cases.items():
        with pytest.raises(errors.NoSolution) as info:
            solve(d)
        ok &= cond in {h.condition for h in info.value.obstructions}
    kind, fam = solve(_flux([m3, e3, e3, e3], [3, -1, 2, 2]))
    pts = sorted(fam.q, key=lambda z: z.real)
    fam_ok = np.allclose(pts, [-1, 0, 1], atol=0) and float(np.max(np.abs(eqf_residuals(fam.q, fam.a)))) == 0.0
    report(8, ok and fam_ok, f"tags ok {ok}, exceptional family {pts}")


def test_c09_type1_families():
    worst = 0.0
    fams = [parallel5_family((-1.0, 1.0, 1.0, 1.0))] + [zm_family(m) for m in (2, 3, 4)]
    for fam in fams:
        worst = max(worst, float(np.max(np.abs(eqf_residuals(fam.q, fam.a)))), eqf_relative(fam.q, fam.a))
    spread = 0.0
    for fam in fams:
        for r in (0.5, 2.0):
            reps = []
            for th in np.linspace(0, 2 * np.pi, 5, endpoint=False):
                w = fam.weierstrass(r * cmath.exp(1j * th))
                reps.append(np.array([contour_flux(w, j, CFG) for j in range(len(fam.q) + 1)]))
            spread = max(spread, max(float(np.max(np.abs(x - reps[0]))) for x in reps))
    report(9, worst < 1e-10 and spread < 1e-9, f"Eqf {worst:.1e}, flux spread over arg t {spread:.1e}")


def test_c10_branch_detection():
    ex = named_example("square-flux", {"p": 1.0})
    c = next(c for c in ex.candidates if abs(c.q[0] + 1) < 1e-12)
    w = weierstrass_from_solution(c)
    # a common zero of P and Q is a branch point: the metric vanishes there
    common = min(poly_roots(w.Q), key=lambda z: abs(w.P(z)) / (abs(w.P.lc) * (1 + abs(z)) ** w.P.degree))
    dens = metric_density(w, common)
    scale = metric_density(w, common + 0.3)
    jm = weierstrass_from_solution(named_example("jorge-meeks").candidates[0])
    ok = w.branched and w.resultant_rel < 1e-9 and dens < 1e-9 * scale and jm.gauss_degree == 3 and not jm.branched
    report(10, ok, f"resultant rel {w.resultant_rel:.1e}, metric at z={common:.6g}: {dens:.1e}; "
                   f"jorge-meeks degree {jm.gauss_degree}")


def test_c12_catenoid_sanity():
    kind, fam = solve(_flux([[0, 0, 1], [0, 0, -1]], [1, 1]))
    w = fam.weierstrass(1.0)
    mesh = sample_surface(w, CFG)
    z = mesh.domain
    fin = np.isfinite(z.real)

    def closed(z):
        return np.stack([(z + 1 / z).real, (1j / z - 1j * z).real, 2 * np.log(np.abs(z))], -1)

    from ncatenoid.surface import base_point
    exact = closed(z[fin]) - closed(np.array([base_point(w, CFG)]))
    got = mesh.vertices[fin]
    h = max(directed_hausdorff(got, exact)[0], directed_hausdorff(exact, got)[0])
    report(12, kind == "TYPE_I" and h < 1e-5, f"Hausdorff {h:.1e} over {fin.sum()} vertices")

"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each.  Run with `pytest tests/test_acceptance.py -v -s`."""

import cmath
import math
import time

import numpy as np

from monodeform.dyson import (
    DysonExpansion,
    closed_form_jump,
    cocycle_identity_residual,
    cocycle_jump,
    correction_C,
    deformation_delta,
    dyson_expand,
    evaluate_dyson,
    perturbed_monodromy_first_order,
)
from monodeform.hypergeom import ghe_coefficient_polys, ghe_operator, pochhammer
from monodeform.odecore import MeromorphicSystem, PerturbationSpec
from monodeform.paths import line_path, loop_around
from monodeform.ratfun import ComplexPoly, RationalFn
from monodeform.spectral import (
    eigenvalue_shift,
    hierarchy_shift_residual,
    normalized_density_profile,
)
from monodeform.transport import FundamentalMatrix, monodromy, transport
from monodeform.varpar import hypergeometric_deformed_series

A, B, C = 0.3, 0.7, 0.4
ZERO = RationalFn.zero()
ONE = RationalFn.const(1.0)


def report(n: int, label: str, ok: bool, detail: str = ""):
    print(f"ACCEPTANCE {n} [{label}]: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {n} ({label}) failed: {detail}"


def _corner(h21):
    return PerturbationSpec("meromorphic", ((ZERO, ZERO), (h21, ZERO)))


def _match(eigs, expected):
    err = 0.0
    pool = list(eigs)
    for e in expected:
        best = min(pool, key=lambda z: abs(z - e))
        err = max(err, abs(best - e))
        pool.remove(best)
    return err


def test_criterion_1_unperturbed_monodromy(hyp_system, frob0, frob1):
    t0 = time.perf_counter()
    loop0 = loop_around(0, 0.25, 0.5, avoid=hyp_system.singularities)
    md0 = monodromy(hyp_system, frob0, loop0, tol=1e-11)
    err0 = _match(md0.eigenvalues, [1.0, cmath.exp(-2j * math.pi * C)])
    loop1 = loop_around(1, 0.25, 0.5, avoid=hyp_system.singularities)
    md1 = monodromy(hyp_system, frob1, loop1, tol=1e-11)
    err1 = _match(md1.eigenvalues, [1.0, cmath.exp(2j * math.pi * (C - A - B))])
    elapsed = time.perf_counter() - t0
    report(1, "unperturbed monodromy", err0 < 1e-6 and err1 < 1e-6 and elapsed < 5.0,
           f"eig errors {err0:.2e}/{err1:.2e}, {elapsed:.2f}s")


def test_criterion_2_trivial_deformation(hyp_system, frob0):
    pert = _corner(RationalFn.from_coeffs([1.0], [0.0, 1.0, -1.0]))
    # first-order coefficient from the from-zero correction integrals
    loop = loop_around(0, 0.25, 0.5, avoid=hyp_system.singularities)
    delta, m0, c_x, _ = deformation_delta(hyp_system, pert, frob0, 0.5, [loop],
                                          tol=1e-11, from_zero=True)
    looped = np.linalg.inv(m0) @ (delta + c_x) @ m0
    _, coeff = perturbed_monodromy_first_order(m0, c_x, looped)
    coeff_norm = float(np.max(np.abs(coeff)))

    # direct perturbed monodromy in the distinguished perturbed frame
    rho = 1e-3
    exp0 = dyson_expand(hyp_system, pert, 2, None, frob0, from_zero=True)
    w0rho = evaluate_dyson(frob0.value, exp0, rho)
    frame = FundamentalMatrix(0.5, w0rho, "perturbed-frame")
    md = monodromy(hyp_system, frame, loop, tol=1e-12, pert=pert, rho=rho)
    m0_exact = np.diag([1.0, cmath.exp(-2j * math.pi * C)])
    dev = float(np.max(np.abs(md.matrix - m0_exact)))
    report(2, "trivial deformation",
           coeff_norm < 1e-6 and dev < 1e-5,
           f"coefficient norm {coeff_norm:.2e}, direct deviation {dev:.2e}")


def test_criterion_3_log_frame_worked_example():
    inv_x = RationalFn.from_coeffs([1.0], [0.0, 1.0])
    sys = MeromorphicSystem(2, ((ZERO, ONE), (ZERO, inv_x.scale(-1.0))))
    pert = PerturbationSpec("meromorphic", ((inv_x, inv_x), (ZERO, inv_x)))
    x0, x1 = 0.25, 0.6
    w0 = FundamentalMatrix(x0, np.array(
        [[1.0, cmath.log(x0) / (2j * math.pi)], [0.0, 1.0 / (2j * math.pi * x0)]],
        dtype=complex), "explicit")
    corr = correction_C(sys, pert, w0, line_path(x0, x1), tol=1e-12, route="ode")

    def c_cf(z):
        return np.array([[cmath.log(z), -1 / (2j * math.pi * z)],
                         [0.0, cmath.log(z)]], dtype=complex)

    c_err = float(np.max(np.abs(corr.value - (c_cf(x1) - c_cf(x0)))))
    jump = cocycle_jump(sys, pert, w0, 0j, x0, tol=1e-12, route="ode",
                        constancy_probes=[0.2, 0.35])
    d_err = float(np.max(np.abs(jump.delta - 2j * math.pi * np.eye(2))))
    report(3, "log-frame worked example", c_err < 1e-7 and d_err < 1e-6,
           f"C error {c_err:.2e}, jump error {d_err:.2e}")


def test_criterion_4_closed_form_jump_laws(hyp_system, frob0):
    worst_rel = 0.0
    for lam in (0.25, 0.5, 0.8):
        pert = PerturbationSpec("power", ((ZERO, ZERO), (ONE, ZERO)), lam)
        jump = cocycle_jump(hyp_system, pert, frob0, 0j, 0.5, tol=1e-11)
        assert len(jump.probe_data) >= 3
        for _, delta, ref in jump.probe_data:
            pred = closed_form_jump("power", lam, ref)
            worst_rel = max(worst_rel, float(np.max(np.abs(delta - pred))
                                             / np.max(np.abs(pred))))
    pert_log = PerturbationSpec("log", ((ZERO, ZERO), (ONE, ZERO)))
    jump = cocycle_jump(hyp_system, pert_log, frob0, 0j, 0.5, tol=1e-11)
    for _, delta, ref in jump.probe_data:
        pred = closed_form_jump("log", None, ref)
        worst_rel = max(worst_rel, float(np.max(np.abs(delta - pred))
                                         / np.max(np.abs(pred))))
    pert_mero = _corner(RationalFn.from_coeffs([1.0], [0.0, 1.0, -1.0]))
    jump_m = cocycle_jump(hyp_system, pert_mero, frob0, 0j, 0.5, tol=1e-11,
                          from_zero=True)
    report(4, "closed-form jump laws",
           worst_rel < 1e-6 and jump_m.constancy_residual < 1e-7,
           f"worst relative {worst_rel:.2e}, meromorphic constancy "
           f"{jump_m.constancy_residual:.2e}")


def test_criterion_5_cocycle_identity(hyp_system, frob0):
    den = ComplexPoly.make([0, 0, 1.0]) * ComplexPoly.make([1.0, -2.0, 1.0])
    pert = _corner(RationalFn.make(ComplexPoly.one(), den))  # poles at 0 and 1
    probe = 0.5
    g0 = loop_around(0, 0.25, probe, avoid=hyp_system.singularities)
    g1 = loop_around(1, 0.25, probe, avoid=hyp_system.singularities)
    d0, m0, _, _ = deformation_delta(hyp_system, pert, frob0, probe, [g0], 1e-11, route="ode")
    d1, m1, _, _ = deformation_delta(hyp_system, pert, frob0, probe, [g1], 1e-11, route="ode")
    d01, _, _, _ = deformation_delta(hyp_system, pert, frob0, probe, [g1, g0], 1e-11,
                                     route="ode")
    deltas = {"g0": d0, "g1": d1, ("g0", "g1"): d01}
    mons = {"g0": m0, "g1": m1}
    resid = cocycle_identity_residual(deltas, mons, ("g0", "g1"))
    bad = dict(deltas)
    bad["g0"] = 2 * d0
    control = cocycle_identity_residual(bad, mons, ("g0", "g1"))
    report(5, "cocycle identity", resid < 1e-7 and control > 1e-3,
           f"residual {resid:.2e}, negative control {control:.2e}")


def test_criterion_6_dyson_order_scaling(hyp_system, frob0):
    pert = _corner(RationalFn.from_coeffs([8.0], [0.0, 1.0, -1.0]))
    path = line_path(0.5, 0.8)
    wx = transport(hyp_system, None, 0, path, frob0, tol=1e-13).w.value
    exp = dyson_expand(hyp_system, pert, 3, path, frob0, tol=1e-13, route="ode")
    ok = True
    details = []
    for K in (1, 2, 3):
        expK = DysonExpansion(K, exp.terms[:K], exp.basepoint, exp.endpoint,
                              exp.path, exp.branch)
        errs = []
        for rho in (1e-2, 5e-3):
            direct = transport(hyp_system, pert, rho, path, frob0, tol=1e-13).w.value
            errs.append(float(np.max(np.abs(direct - evaluate_dyson(wx, expK, rho)))))
        ratio = errs[0] / errs[1]
        target = 2.0 ** (K + 1)
        ok = ok and (abs(ratio - target) <= 0.15 * target)
        details.append(f"K={K}: {ratio:.2f} (target {target:.0f})")
    report(6, "truncation order scaling", ok, "; ".join(details))


def test_criterion_7_oracle_triangle(hyp_system, frob0, connected_basis):
    rho, K = 1e-3, 2
    pert = _corner(RationalFn.from_coeffs([1.0], [0.0, 1.0, -1.0]))  # f = 1
    series = hypergeometric_deformed_series(A, B, C, lambda x: 1.0, K, (1.0, 0.0),
                                            basepoint=0.5, tol=1e-12,
                                            basis=connected_basis)
    v0 = np.array([1.0, 0.0], dtype=complex)
    worst = {"vd": 0.0, "vdir": 0.0, "ddir": 0.0}
    for x in np.linspace(0.2, 0.8, 13):
        if abs(x - 0.5) < 1e-12:
            wx, terms = frob0.value, [np.zeros((2, 2), complex)] * K
        else:
            path = line_path(0.5, x)
            terms = dyson_expand(hyp_system, pert, K, path, frob0, tol=1e-12,
                                 route="ode").terms
            wx = transport(hyp_system, None, 0, path, frob0, tol=1e-12).w.value
        acc = np.eye(2, dtype=complex)
        for k, t in enumerate(terms, start=1):
            acc = acc + t * rho**k
        dyson_val = (wx @ acc @ v0)[0]
        psi0 = np.asarray(frob0.value) @ v0
        col = np.column_stack([psi0, [0.0, 1.0]])
        if abs(x - 0.5) < 1e-12:
            direct_val = psi0[0]
        else:
            direct_val = transport(hyp_system, pert, rho, line_path(0.5, x),
                                   FundamentalMatrix(0.5, col, "column"),
                                   tol=1e-13).w.value[0, 0]
        vp = series.evaluate(x, rho)
        worst["vd"] = max(worst["vd"], abs(vp - dyson_val))
        worst["vdir"] = max(worst["vdir"], abs(vp - direct_val))
        worst["ddir"] = max(worst["ddir"], abs(dyson_val - direct_val))
    ok = all(v < 1e-8 for v in worst.values())
    report(7, "oracle triangle", ok,
           f"varpar-dyson {worst['vd']:.2e}, varpar-direct {worst['vdir']:.2e}, "
           f"dyson-direct {worst['ddir']:.2e}")


def test_criterion_8_operator_assembly():
    q0, q1, q2 = ghe_coefficient_polys([A, B], [C])
    exact = (q2.coeffs == (0j, 1 + 0j, -1 + 0j)
             and q1.coeffs == (C + 0j, -(A + B + 1) + 0j)
             and len(q0.coeffs) == 1 and abs(q0.coeffs[0] + A * B) < 1e-15)
    upper, lower = [0.3, 0.7, 1.1], [0.9, 1.3]
    ode = ghe_operator(upper, lower)
    coeffs = []
    for m in range(51):
        num = 1.0
        for u in upper:
            num *= pochhammer(u, m).real
        den = math.factorial(m)
        for l in lower:
            den *= pochhammer(l, m).real
        coeffs.append(num / den)
    p = ComplexPoly.make(coeffs)
    x = 0.2
    derivs = [p(x)]
    d = p
    for _ in range(3):
        d = d.deriv()
        derivs.append(d(x))
    resid = abs(ode.residual(x, tuple(derivs)))
    report(8, "operator assembly", exact and resid < 1e-8,
           f"p=2 exact: {exact}, p=3 residual {resid:.2e}")


def test_criterion_9_abel_wronskian(connected_basis):
    vals = []
    for x in (0.2, 0.5, 0.8):
        det = np.linalg.det(connected_basis.matrix(x))
        vals.append(det * x**C * (1 - x) ** (A + B + 1 - C))
    spread = max(abs(v - vals[0]) for v in vals) / abs(vals[0])
    report(9, "Abel Wronskian invariant", spread < 1e-8, f"relative spread {spread:.2e}")


def test_criterion_10_spectral_shift():
    params = (0.3, 0.7, 1.2)
    s1 = eigenvalue_shift(lambda x: 1.0, params)
    sx = eigenvalue_shift(lambda x: x, params)
    combo = eigenvalue_shift(lambda x: 2.0 + 3.0 * x, params)
    lin_err = abs(combo.lambda1 - 2 * s1.lambda1 - 3 * sx.lambda1)
    unit_err = abs(s1.lambda1 - 1.0)
    feq = normalized_density_profile(params)
    sat = eigenvalue_shift(feq, params).saturation
    hier = hierarchy_shift_residual(lambda x: x, params)
    ok = (lin_err < 1e-9 and abs(sat - 1.0) < 1e-6
          and hier["residual_l2"] < 1e-6 and unit_err < 1e-9)
    report(10, "spectral shift", ok,
           f"linearity {lin_err:.2e}, saturation-1 {abs(sat - 1):.2e}, "
           f"hierarchy {hier['residual_l2']:.2e}, unit shift err {unit_err:.2e}")

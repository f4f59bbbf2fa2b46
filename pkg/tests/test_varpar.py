import math

import numpy as np
import pytest

from monodeform.errors import WronskianVanishes
from monodeform.hypergeom import hypergeometric_ode
from monodeform.odecore import ScalarODE
from monodeform.ratfun import RationalFn
from monodeform.varpar import (
    deformed_series,
    hierarchy,
    hypergeometric_deformed_series,
    particular_solution_2nd,
    particular_solution_nth,
    series_to_csv,
)

A, B, C = 0.3, 0.7, 0.4


def test_hierarchy_structure():
    ode = hypergeometric_ode(A, B, C)
    levels = hierarchy(ode, lambda x: 1.0, 3)
    assert [lv.k for lv in levels] == [1, 2, 3]
    assert all(lv.source == lv.k - 1 for lv in levels)
    assert all(lv.ode is ode for lv in levels)


def test_hierarchy_rhs_for_unit_coupling(connected_basis):
    # deformation -(ab + rho f) y with f = 1: level-1 forcing is y0/(x(1-x))
    ode = hypergeometric_ode(A, B, C)
    g = lambda x: -1.0 / (x * (1 - x))
    levels = hierarchy(ode, g, 2)
    y0 = lambda x: connected_basis.y1(x)
    rhs = levels[0].rhs(g, y0)
    for x in (0.3, 0.6):
        expect = connected_basis.y1(x)[0] / (x * (1 - x))
        assert abs(rhs(x) - expect) < 1e-12


def test_particular_zero_forcing(connected_basis):
    sol = particular_solution_2nd(A, B, C, lambda x: 0.0, basis=connected_basis)
    v, d = sol(0.7)
    assert abs(v) < 1e-12 and abs(d) < 1e-12


def test_particular_substitute_back_residual(connected_basis):
    # independent check: y_p'' from Richardson finite differences of y_p'
    g = lambda x: math.sin(3 * x) / (x * (1 - x))
    sol = particular_solution_2nd(A, B, C, g, basis=connected_basis, tol=1e-12)
    for x in np.linspace(0.15, 0.85, 20):
        v, d = sol(x)
        h = 1e-4

        def d1(hh):
            return (sol(x + hh)[1] - sol(x - hh)[1]) / (2 * hh)

        d2 = (4 * d1(h / 2) - d1(h)) / 3
        resid = x * (1 - x) * d2 + (C - (A + B + 1) * x) * d - A * B * v - x * (1 - x) * g(x)
        assert abs(resid) < 1e-7


def test_abel_wronskian_scaling(connected_basis):
    det = {}
    for x in (0.3, 0.7):
        w = connected_basis.matrix(x)
        det[x] = np.linalg.det(w) * x**C * (1 - x) ** (A + B + 1 - C)
    assert abs(det[0.3] - det[0.7]) < 1e-10 * abs(det[0.3])


def test_nth_reduces_to_2nd(connected_basis):
    ode = hypergeometric_ode(A, B, C)
    g = lambda x: 1.0 / (x * (1 - x))
    basis = [lambda x: connected_basis.y1(x), lambda x: connected_basis.y2(x)]
    sol_n = particular_solution_nth(ode, basis, g, basepoint=0.5, tol=1e-12)
    sol_2 = particular_solution_2nd(A, B, C, g, basis=connected_basis, tol=1e-12)
    for x in (0.3, 0.55, 0.8):
        vn, dn = sol_n(x)
        v2, d2 = sol_2(x)
        assert abs(vn - v2) < 1e-9
        assert abs(dn - d2) < 1e-9


def test_nth_first_order_integrating_factor():
    # y' + a y = g with constant a: y_p = (g0/a)(1 - e^{a(x0 - x)})
    a, g0, x0 = 0.8, 1.7, 0.0
    ode = ScalarODE(1, (RationalFn.const(a),))
    basis = [lambda x: (math.exp(-a * x), -a * math.exp(-a * x))]
    sol = particular_solution_nth(ode, basis, lambda x: g0, basepoint=x0, tol=1e-12)
    for x in (0.4, 1.1):
        v, _ = sol(x)
        expect = (g0 / a) * (1 - math.exp(a * (x0 - x)))
        assert abs(v - expect) < 1e-10


def test_cramer_constraint_identities(connected_basis):
    ode = hypergeometric_ode(A, B, C)
    g = lambda x: math.cos(x)
    basis = [lambda x: connected_basis.y1(x), lambda x: connected_basis.y2(x)]
    sol = particular_solution_nth(ode, basis, g, basepoint=0.5, tol=1e-12)
    for x in (0.25, 0.5, 0.75):
        up = sol.uprime(x)
        y1v, y1d = connected_basis.y1(x)
        y2v, y2d = connected_basis.y2(x)
        assert abs(up[0] * y1v + up[1] * y2v) < 1e-10          # sum u_i' y_i = 0
        assert abs(up[0] * y1d + up[1] * y2d - g(x)) < 1e-10   # sum u_i' y_i' = g


def test_column_replacement_zero_forcing(connected_basis):
    ode = hypergeometric_ode(A, B, C)
    basis = [lambda x: connected_basis.y1(x), lambda x: connected_basis.y2(x)]
    sol = particular_solution_nth(ode, basis, lambda x: 0.0, basepoint=0.5)
    assert np.max(np.abs(sol.uprime(0.33))) < 1e-15


def test_wronskian_vanishes_guard():
    ode = ScalarODE(2, (RationalFn.zero(), RationalFn.zero()))
    dependent = [lambda x: (1.0, 0.0), lambda x: (2.0, 0.0)]
    with pytest.raises(WronskianVanishes):
        particular_solution_nth(ode, dependent, lambda x: 1.0, basepoint=0.5)


def test_wronskian_nonvanishing_on_interval(connected_basis):
    for x in np.linspace(0.1, 0.9, 17):
        det = np.linalg.det(connected_basis.matrix(x))
        assert abs(det) > 1e-3


def test_deformed_series_zero_coupling(connected_basis):
    series = hypergeometric_deformed_series(A, B, C, lambda x: 0.0, 2,
                                            basis=connected_basis)
    assert series.terms[0].provenance == "homogeneous"
    for k in (1, 2):
        v, d = series.term(k)(0.65)
        assert abs(v) < 1e-12 and abs(d) < 1e-12


def test_deformed_series_order_by_order_residual(connected_basis):
    # applying the deformed operator to the K-truncated series leaves a
    # residual that shrinks like rho^(K+1)
    K = 1
    series = hypergeometric_deformed_series(A, B, C, lambda x: 1.0, K,
                                            basis=connected_basis, tol=1e-12)
    x = 0.6

    def residual(rho):
        v = series.evaluate(x, rho)
        d = series.evaluate_derivative(x, rho)
        h = 1e-4

        def d1(hh):
            return (series.evaluate_derivative(x + hh, rho)
                    - series.evaluate_derivative(x - hh, rho)) / (2 * hh)

        d2 = (4 * d1(h / 2) - d1(h)) / 3
        return abs(x * (1 - x) * d2 + (C - (A + B + 1) * x) * d - (A * B + rho) * v)

    r1, r2 = residual(0.1), residual(0.05)
    assert r1 / r2 == pytest.approx(2 ** (K + 1), rel=0.25)


def test_series_evaluate_and_terms(connected_basis):
    series = hypergeometric_deformed_series(A, B, C, lambda x: 1.0, 2,
                                            basis=connected_basis, tol=1e-12)
    x, rho = 0.45, 1e-2
    total = sum(series.term(k)(x)[0] * rho**k for k in range(3))
    assert abs(series.evaluate(x, rho) - total) < 1e-14


def test_series_csv_export(tmp_path, connected_basis):
    series = hypergeometric_deformed_series(A, B, C, lambda x: 1.0, 1,
                                            basis=connected_basis, tol=1e-11)
    out = tmp_path / "terms.csv"
    series_to_csv(series, [0.4, 0.5, 0.6], str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "x,re_y0,im_y0,re_y1,im_y1"
    assert len(lines) == 4


def test_generic_deformed_series_matches_hypergeometric(connected_basis):
    # the generic n-th order driver and the Abel-based order-2 driver agree
    ode = hypergeometric_ode(A, B, C)
    g = lambda x: -1.0 / (x * (1 - x))
    basis = [lambda x: connected_basis.y1(x), lambda x: connected_basis.y2(x)]
    s_gen = deformed_series(ode, g, 2, basis, (1.0, 0.0), basepoint=0.5, tol=1e-12)
    s_hyp = hypergeometric_deformed_series(A, B, C, lambda x: 1.0, 2,
                                           basis=connected_basis, tol=1e-12)
    for x in (0.35, 0.65):
        for k in (1, 2):
            v1, _ = s_gen.term(k)(x)
            v2, _ = s_hyp.term(k)(x)
            assert abs(v1 - v2) < 1e-9

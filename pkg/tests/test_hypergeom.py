import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monodeform.errors import DegenerateParams, InvalidLower, NoConvergence
from monodeform.hypergeom import (
    HypergeomParams,
    elem_sym,
    ghe_coefficient_polys,
    ghe_operator,
    hyp2f1,
    hyp_second_derivative,
    local_basis_0,
    local_basis_1,
    pFq,
    pFq_derivative,
    pochhammer,
    stirling2,
    weight_omega,
)
from monodeform.ratfun import ComplexPoly

A, B, C = 0.3, 0.7, 0.4


# --- pochhammer / stirling / elementary symmetric ---------------------------


def test_pochhammer_cases():
    assert pochhammer(2.7 + 1j, 0) == 1
    assert pochhammer(1.0, 4) == 24
    assert abs(pochhammer(0.5, 2) - 0.75) < 1e-15


@given(st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)), st.integers(0, 8))
def test_pochhammer_recurrence(a, m):
    assert abs(pochhammer(a, m + 1) - pochhammer(a, m) * (a + m)) < 1e-9 * (1 + abs(pochhammer(a, m + 1)))


def test_stirling_cases():
    for k in range(7):
        assert stirling2(k, k) == 1
    assert stirling2(3, 2) == 3
    assert stirling2(4, 2) == 7
    assert stirling2(5, 2) == 15
    assert stirling2(0, 0) == 1
    assert stirling2(4, 0) == 0


def test_stirling_inversion_identity():
    # sum_n c(k,n) * falling_factorial(x, n) == x^k
    for k in range(7):
        for x in range(1, 7):
            acc = 0
            for n in range(k + 1):
                ff = 1
                for i in range(n):
                    ff *= x - i
                acc += stirling2(k, n) * ff
            assert acc == x**k


def _theta(p: ComplexPoly) -> ComplexPoly:
    return p.deriv().shift_up(1)


def test_theta_operator_expansion():
    # (x d/dx)^k f == sum_n c(k,n) x^n f^(n) for polynomials, exactly
    f = ComplexPoly.make([2, -1, 3, 0.5, 1])
    for k in range(6):
        lhs = f
        for _ in range(k):
            lhs = _theta(lhs)
        rhs = ComplexPoly.zero()
        dn = f
        for n in range(k + 1):
            rhs = rhs + dn.shift_up(n).scale(stirling2(k, n))
            dn = dn.deriv()
        assert lhs.coeffs == pytest.approx(rhs.coeffs)


def test_commutator_shift_identity():
    # d/dz theta^n = (theta+1)^n d/dz on monomials up to degree 6
    for n in range(4):
        for deg in range(7):
            mono = ComplexPoly.make([0] * deg + [1])
            lhs = mono
            for _ in range(n):
                lhs = _theta(lhs)
            lhs = lhs.deriv()
            rhs = mono.deriv()
            for _ in range(n):
                # (theta + 1) acting
                rhs = _theta(rhs) + rhs
            # compare coefficient lists (theta+1)^n via binomial expansion is
            # exactly the repeated application used here
            assert lhs.coeffs == pytest.approx(rhs.coeffs)


def test_elem_sym_cases():
    assert elem_sym([2, 3, 5], 0) == 1
    assert elem_sym([2 + 1j, 3], 1) == 5 + 1j
    assert elem_sym([2, 3, 5], 2) == 31
    with pytest.raises(IndexError):
        elem_sym([1, 2], 3)


@given(st.lists(st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)), min_size=1, max_size=6),
       st.randoms())
def test_elem_sym_permutation_invariance(vals, rnd):
    k = min(2, len(vals))
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    assert abs(elem_sym(vals, k) - elem_sym(shuffled, k)) < 1e-9 * (1 + abs(elem_sym(vals, k)))


# --- series ------------------------------------------------------------------


def test_pfq_at_zero_is_one():
    p = HypergeomParams.f21(2.3, -1.1, 0.7)
    assert pFq(p, 0.0) == 1.0


def test_2f1_log_value():
    # 2F1(1,1;2;x) = -log(1-x)/x
    val = hyp2f1(1, 1, 2, 0.5)
    assert abs(val - (-math.log(0.5) / 0.5)) < 1e-13


def test_term_ratio_identity():
    a, b, c, x = 0.4, 1.3, 0.9, 0.3
    for m in (0, 1, 5, 10):
        tm = pochhammer(a, m) * pochhammer(b, m) / (pochhammer(c, m) * math.factorial(m)) * x**m
        tm1 = pochhammer(a, m + 1) * pochhammer(b, m + 1) / (
            pochhammer(c, m + 1) * math.factorial(m + 1)) * x ** (m + 1)
        ratio = (a + m) * (b + m) * x / ((c + m) * (1 + m))
        assert abs(tm1 / tm - ratio) < 1e-12


def test_invalid_lower_parameter():
    with pytest.raises(InvalidLower):
        HypergeomParams((1.0 + 0j,), (-2.0 + 0j,))
    with pytest.raises(InvalidLower):
        HypergeomParams((1.0 + 0j,), (0j,))


def test_no_convergence_outside_disk(monkeypatch):
    import monodeform.hypergeom as hg

    monkeypatch.setattr(hg, "MAX_TERMS", 2000)
    with pytest.raises(NoConvergence):
        hg._pfq_series((1.0 + 0j, 1.0 + 0j), (2.0 + 0j,), 1.5 + 0.1j, 1e-14)


@given(st.floats(0.05, 0.95), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_2f1_matches_mpmath(x, a, b):
    c = 1.37  # fixed non-degenerate lower parameter
    ours = hyp2f1(a, b, c, x)
    ref = complex(mpmath.hyp2f1(a, b, c, x))
    assert abs(ours - ref) < 1e-10 * (1 + abs(ref))


def test_derivative_contiguous_vs_mpmath():
    p = HypergeomParams.f21(A, B, C)
    x = 0.31
    ref = complex(mpmath.diff(lambda t: mpmath.hyp2f1(A, B, C, t), x))
    assert abs(pFq_derivative(p, x) - ref) < 1e-9


# --- local bases ---------------------------------------------------------------


def _residual_y(a, b, c, x, val, der, der2):
    return x * (1 - x) * der2 + (c - (a + b + 1) * x) * der - a * b * val


def _series_second_derivative(params: HypergeomParams, x, front_mu=0.0):
    """Termwise second derivative of x^mu * pFq(params; x)."""
    f = pFq(params, x)
    df = pFq_derivative(params, x)
    shifted = HypergeomParams(tuple(u + 1 for u in params.upper),
                              tuple(l + 1 for l in params.lower))
    fac = 1.0
    for u in params.upper:
        fac *= u
    for l in params.lower:
        fac /= l
    ddf = fac * pFq_derivative(shifted, x)
    mu = front_mu
    front = x**mu
    return front * (mu * (mu - 1) * f / x**2 + 2 * mu * df / x + ddf)


def test_local_basis_0_unit_value():
    basis = local_basis_0(A, B, C)
    v, _ = basis.y1(1e-30)
    assert abs(v - 1) < 1e-12


def test_local_basis_0_second_member_residual():
    basis = local_basis_0(A, B, C)
    x = 0.3
    v, d = basis.y2(x)
    p2 = HypergeomParams.f21(A - C + 1, B - C + 1, 2 - C)
    d2 = _series_second_derivative(p2, x, front_mu=1 - C)
    assert abs(_residual_y(A, B, C, x, v, d, d2)) < 1e-10


def test_local_basis_0_exponents():
    basis = local_basis_0(A, B, C)
    assert basis.exponent_pair == (0j, 1 - C)


def test_local_basis_degenerate_params():
    with pytest.raises(DegenerateParams):
        local_basis_0(0.3, 0.7, 1.0)
    with pytest.raises(DegenerateParams):
        local_basis_1(0.3, 0.7, 1.0)  # c - a - b = 0


def test_local_basis_1_exponents_and_value():
    basis = local_basis_1(A, B, C)
    assert basis.exponent_pair == (0j, C - A - B)
    v, _ = basis.y1(1.0 - 1e-30)
    assert abs(v - 1) < 1e-12


@pytest.mark.parametrize("point", [0, 1])
def test_local_basis_residuals_20_points(point):
    basis = local_basis_0(A, B, C) if point == 0 else local_basis_1(A, B, C)
    xs = np.linspace(0.05, 0.55, 20) if point == 0 else np.linspace(0.45, 0.95, 20)
    for x in xs:
        for member in (basis.y1, basis.y2):
            v, d = member(x)
            d2 = hyp_second_derivative(A, B, C, x, v, d)
            # independent check: second derivative from first-derivative
            # finite differences (Richardson)
            h = 1e-5
            def d1(hh):
                return (member(x + hh)[1] - member(x - hh)[1]) / (2 * hh)
            d2_fd = (4 * d1(h / 2) - d1(h)) / 3
            assert abs(_residual_y(A, B, C, x, v, d, d2_fd)) < 1e-8
            assert abs(d2 - d2_fd) < 1e-7 * (1 + abs(d2))


def test_connected_basis_seam_continuity(connected_basis):
    # both evaluation routes agree where the zones overlap
    direct = connected_basis._columns(connected_basis.basis0, 0.55)
    connected = connected_basis._columns(connected_basis.basis1, 0.55) @ connected_basis.connection
    assert np.max(np.abs(direct - connected)) < 1e-11


def test_connected_basis_near_one(connected_basis):
    v, d = connected_basis.y1(0.9993)
    ref = complex(mpmath.hyp2f1(A, B, C, 0.9993))
    assert abs(v - ref) < 1e-9 * (1 + abs(ref))


# --- operator assembly ----------------------------------------------------------


def test_ghe_p2_polynomial_identity():
    q0, q1, q2 = ghe_coefficient_polys([A, B], [C])
    assert q2.coeffs == pytest.approx((0j, 1 + 0j, -1 + 0j))        # x(1-x)
    assert q1.coeffs == pytest.approx((C + 0j, -(A + B + 1) + 0j))  # c-(a+b+1)x
    assert q0.coeffs == pytest.approx((-A * B + 0j,))               # -ab


def test_ghe_p1_annihilates_binomial_series():
    # solution of the order-1 equation is (1-x)^(-a)
    a = 0.37
    ode = ghe_operator([a], [])
    x = 0.4
    y = (1 - x) ** (-a)
    dy = a * (1 - x) ** (-a - 1)
    assert abs(ode.residual(x, (y, dy))) < 1e-12


def test_ghe_p3_annihilates_3f2_partial_sum():
    upper = [0.3, 0.7, 1.1]
    lower = [0.9, 1.3]
    ode = ghe_operator(upper, lower)
    # 50-term partial sum as an exact polynomial
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
    assert abs(ode.residual(x, tuple(derivs))) < 1e-8


def test_weight_omega_cases():
    assert abs(weight_omega(0.5, 0.5, 1.0, 0.37) - 1.0) < 1e-15
    assert abs(weight_omega(0.3, 0.7, 0.4, 0.5) - 1.0) < 1e-12
    # x -> 0 with Re(c) > 1 vanishes
    assert abs(weight_omega(0.3, 0.7, 1.8, 1e-8)) < 1e-6
    with pytest.raises(ValueError):
        weight_omega(0.3, 0.7, 0.4, 1.5)

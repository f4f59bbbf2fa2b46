"""Hypergeometric series, local solution bases, and operator assembly.

The generalized hypergeometric equation of order p is assembled from Stirling
numbers of the second kind and elementary symmetric polynomials of the
parameters; its order-2 case is

    x(1-x) y'' + [c - (a+b+1)x] y' - ab y = 0

with local bases at 0 and 1 built from 2F1 series.  Evaluation anywhere on
(0, 1) routes through whichever expansion point is closer, with the constant
change of basis between the two frames computed once at a midpoint.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateParams, InvalidLower, NoConvergence
from .odecore import MeromorphicSystem, ScalarODE, companion
from .ratfun import ComplexPoly, RationalFn

INT_TOL = 1e-8  # distance-to-integer threshold for genericity checks
SERIES_TOL = 1e-14
MAX_TERMS = 10**6

# Evaluators return (value, derivative); `arg` is the continuously tracked
# argument of the local variable (x at the point 0, 1-x at the point 1),
# None meaning the principal branch.
Evaluator = Callable[..., tuple[complex, complex]]


def is_near_integer(z: complex, tol: float = INT_TOL) -> bool:
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


@dataclass(frozen=True)
class HypergeomParams:
    """Upper parameters a_1..a_p and lower parameters b_1..b_q."""

    upper: tuple[complex, ...]
    lower: tuple[complex, ...]

    def __post_init__(self):
        for b in self.lower:
            if is_near_integer(b, 1e-12) and round(b.real) <= 0:
                raise InvalidLower(f"lower parameter {b} is a non-positive integer")

    @staticmethod
    def f21(a: complex, b: complex, c: complex) -> "HypergeomParams":
        return HypergeomParams((complex(a), complex(b)), (complex(c),))

    def generic_at0(self) -> bool:
        c = self.lower[0]
        return not is_near_integer(c)

    def generic_at1(self) -> bool:
        a, b = self.upper
        c = self.lower[0]
        return not is_near_integer(c - a - b)


def pochhammer(a: complex, m: int) -> complex:
    """Rising factorial a (a+1) ... (a+m-1); empty product for m=0."""
    acc = 1.0 + 0j
    for i in range(m):
        acc *= a + i
    return acc


def stirling2(k: int, n: int) -> int:
    """Stirling number of the second kind via c(k+1,m) = m c(k,m) + c(k,m-1)."""
    if n < 0 or n > k:
        return 0
    row = [1]  # k = 0
    for _ in range(k):
        prev = row + [0]
        row = [0] * len(prev)
        for m in range(len(prev)):
            row[m] = m * prev[m] + (prev[m - 1] if m > 0 else 0)
    return row[n]


def elem_sym(vals: Sequence[complex], k: int) -> complex:
    """Elementary symmetric polynomial e_k via the product recurrence."""
    if k < 0 or k > len(vals):
        raise IndexError(f"e_{k} undefined for {len(vals)} arguments")
    e = [1.0 + 0j] + [0j] * k
    for v in vals:
        for j in range(k, 0, -1):
            e[j] += v * e[j - 1]
    return e[k]


@lru_cache(maxsize=1 << 18)
def _pfq_series(upper: tuple, lower: tuple, x: complex, tol: float) -> complex:
    term = 1.0 + 0j
    acc = 1.0 + 0j
    quiet = 0
    for m in range(MAX_TERMS):
        ratio = x / (m + 1)
        for a in upper:
            ratio *= a + m
        for b in lower:
            ratio /= b + m
        term = term * ratio
        acc += term
        try:
            small = abs(term) < tol * max(abs(acc), 1e-300)
        except OverflowError:
            raise NoConvergence(f"pFq series diverges at x={x}") from None
        if not (term.real == term.real and term.imag == term.imag):  # NaN guard
            raise NoConvergence(f"pFq series lost finiteness at x={x}")
        if small:
            quiet += 1
            if quiet >= 3:
                return acc
        else:
            quiet = 0
    raise NoConvergence(f"pFq series at x={x} exceeded {MAX_TERMS} terms")


def pFq(params: HypergeomParams, x: complex, tol: float = SERIES_TOL) -> complex:
    """Partial sums of the hypergeometric series, stopping once the term
    drops below tol * |sum| for three consecutive terms."""
    for b in params.lower:
        if is_near_integer(b, 1e-12) and round(b.real) <= 0:
            raise InvalidLower(f"lower parameter {b} hit a non-positive integer")
    if x == 0:
        return 1.0 + 0j
    return _pfq_series(params.upper, params.lower, complex(x), tol)


def hyp2f1(a: complex, b: complex, c: complex, x: complex, tol: float = SERIES_TOL) -> complex:
    return pFq(HypergeomParams.f21(a, b, c), x, tol)


def pFq_derivative(params: HypergeomParams, x: complex, tol: float = SERIES_TOL) -> complex:
    """d/dx pFq = (prod a_j / prod b_k) * pFq(a+1; b+1; x) (contiguous shift)."""
    fac = 1.0 + 0j
    for a in params.upper:
        fac *= a
    for b in params.lower:
        fac /= b
    shifted = HypergeomParams(
        tuple(a + 1 for a in params.upper), tuple(b + 1 for b in params.lower)
    )
    return fac * pFq(shifted, x, tol)


def _power(base_abs: float, arg: float, mu: complex) -> complex:
    """base^mu with base = base_abs * exp(i*arg) on the tracked branch."""
    return cmath.exp(mu * (cmath.log(base_abs) + 1j * arg))


@dataclass(frozen=True)
class LocalBasis:
    """Solution pair (y1, y2) of the order-2 equation at an expansion point."""

    point: complex
    y1: Evaluator
    y2: Evaluator
    exponent_pair: tuple[complex, complex]


def local_basis_0(a: complex, b: complex, c: complex, tol: float = SERIES_TOL) -> LocalBasis:
    """Basis at 0: y1 = 2F1(a,b;c;x), y2 = x^(1-c) 2F1(a-c+1,b-c+1;2-c;x)."""
    if is_near_integer(c):
        raise DegenerateParams(f"c={c} is (near-)integer; the basis at 0 degenerates")
    p1 = HypergeomParams.f21(a, b, c)
    p2 = HypergeomParams.f21(a - c + 1, b - c + 1, 2 - c)

    def y1(x: complex, arg: float | None = None) -> tuple[complex, complex]:
        return pFq(p1, x, tol), pFq_derivative(p1, x, tol)

    def y2(x: complex, arg: float | None = None) -> tuple[complex, complex]:
        theta = cmath.phase(x) if arg is None else arg
        front = _power(abs(x), theta, 1 - c)
        f = pFq(p2, x, tol)
        df = pFq_derivative(p2, x, tol)
        val = front * f
        der = front * ((1 - c) * f / x + df)
        return val, der

    return LocalBasis(0j, y1, y2, (0j, 1 - c))


def local_basis_1(a: complex, b: complex, c: complex, tol: float = SERIES_TOL) -> LocalBasis:
    """Basis at 1 in w = 1-x: exponents 0 and c-a-b (needs c-a-b non-integer)."""
    if is_near_integer(c - a - b):
        raise DegenerateParams(f"c-a-b={c - a - b} is (near-)integer; the basis at 1 degenerates")
    p1 = HypergeomParams.f21(a, b, a + b - c + 1)
    p2 = HypergeomParams.f21(c - a, c - b, c - a - b + 1)

    def y1(x: complex, arg: float | None = None) -> tuple[complex, complex]:
        w = 1 - x
        return pFq(p1, w, tol), -pFq_derivative(p1, w, tol)

    def y2(x: complex, arg: float | None = None) -> tuple[complex, complex]:
        w = 1 - x
        theta = cmath.phase(w) if arg is None else arg
        front = _power(abs(w), theta, c - a - b)
        g = pFq(p2, w, tol)
        dg = pFq_derivative(p2, w, tol)
        val = front * g
        der = -front * ((c - a - b) * g / w + dg)
        return val, der

    return LocalBasis(1.0 + 0j, y1, y2, (0j, c - a - b))


def hyp_second_derivative(a: complex, b: complex, c: complex, x: complex,
                          y: complex, dy: complex) -> complex:
    """y'' recovered from the order-2 equation itself."""
    return (a * b * y - (c - (a + b + 1) * x) * dy) / (x * (1 - x))


class ConnectedBasis:
    """Global evaluator for the basis-at-0 pair across (0, 1).

    Near 1 the series at 0 converges too slowly, so the pair is re-expressed
    in the basis at 1 through the constant matrix K with W0(x) = W1(x) K,
    fixed by matching both frames at a midpoint where both series converge
    quickly.  Evaluation is principal-branch; use the local bases directly
    for branch-tracked continuation.
    """

    def __init__(self, a: complex, b: complex, c: complex,
                 match_point: float = 0.5, tol: float = SERIES_TOL):
        self.a, self.b, self.c = complex(a), complex(b), complex(c)
        self.tol = tol
        self.basis0 = local_basis_0(a, b, c, tol)
        self.basis1 = local_basis_1(a, b, c, tol)
        w0 = self._columns(self.basis0, match_point)
        w1 = self._columns(self.basis1, match_point)
        self.connection = np.linalg.solve(w1, w0)

    @staticmethod
    def _columns(basis: LocalBasis, x: complex) -> np.ndarray:
        v1, d1 = basis.y1(x)
        v2, d2 = basis.y2(x)
        return np.array([[v1, v2], [d1, d2]], dtype=complex)

    def matrix(self, x: complex) -> np.ndarray:
        """W(x) = [[y1, y2], [y1', y2']] of the basis-at-0 pair."""
        if abs(x) <= 0.6 or abs(x) <= abs(1 - x):
            return self._columns(self.basis0, x)
        return self._columns(self.basis1, x) @ self.connection

    def y1(self, x: complex) -> tuple[complex, complex]:
        w = self.matrix(x)
        return complex(w[0, 0]), complex(w[1, 0])

    def y2(self, x: complex) -> tuple[complex, complex]:
        w = self.matrix(x)
        return complex(w[0, 1]), complex(w[1, 1])


def ghe_coefficient_polys(upper: Sequence[complex], lower: Sequence[complex]) -> list[ComplexPoly]:
    """Raw polynomial coefficients [Q_0, ..., Q_p] of the order-p operator,
    scaled so that Q_p(z) = z^(p-1) (z_target - z) matches the classical sign
    (for p=2 this is exactly x(1-x), c-(a+b+1)x, -ab).

    The y^(n) coefficient combines the Stirling expansion of (z d/dz)^k on
    the left with the binomial-shifted expansion on the right:
        Q_n = -[ L_n z^n - R_n z^(n-1) ],
        L_n = sum_{k=n}^{p} c(k,n) e_{p-k}(upper),
        R_n = sum_{k=n-1}^{p-1} e_{p-k-1}(lower-1) sum_{j=n-1}^{k} C(k,j) c(j,n-1).
    """
    p = len(upper)
    if p < 1:
        raise ValueError("need at least one upper parameter")
    if len(lower) != p - 1:
        raise ValueError("expect q = p-1 lower parameters")
    shifted = [b - 1 for b in lower]
    polys: list[ComplexPoly] = []
    for n in range(p + 1):
        ln = sum(stirling2(k, n) * elem_sym(upper, p - k) for k in range(n, p + 1))
        coeffs = [0j] * (p + 1)
        coeffs[n] -= ln
        if n >= 1:
            rn = 0j
            for k in range(n - 1, p):
                inner = sum(comb(k, j) * stirling2(j, n - 1) for j in range(n - 1, k + 1))
                rn += elem_sym(shifted, p - k - 1) * inner
            coeffs[n - 1] += rn
        polys.append(ComplexPoly.make(coeffs))
    return polys


def ghe_operator(upper: Sequence[complex], lower: Sequence[complex]) -> ScalarODE:
    """Monic ScalarODE for the order-p generalized hypergeometric equation."""
    polys = ghe_coefficient_polys(upper, lower)
    leading = polys[-1]
    coeffs = tuple(RationalFn.make(q, leading) for q in polys[:-1])
    return ScalarODE(len(upper), coeffs)


def hypergeometric_ode(a: complex, b: complex, c: complex) -> ScalarODE:
    return ghe_operator([a, b], [c])


def hypergeometric_system(a: complex, b: complex, c: complex) -> MeromorphicSystem:
    return companion(hypergeometric_ode(a, b, c))


def weight_omega(a: complex, b: complex, c: complex, x: float) -> complex:
    """Weight x^(c-1) (1-x)^(a+b-c) on the real interval (0, 1)."""
    if not (0.0 < x < 1.0):
        raise ValueError("weight is defined on the open interval (0, 1)")
    return cmath.exp((c - 1) * cmath.log(x) + (a + b - c) * cmath.log(1.0 - x))

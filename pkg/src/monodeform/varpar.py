"""Recursive series solutions of deformed equations by variation of parameters.

A zeroth-order deformation L[y] + rho*g(x)*y = 0 of a monic equation L[y]=0
expands as y = sum_k y_k rho^k with the hierarchy L[y_k] = -g * y_{k-1}.
Each level is solved as y_k = sum_i u_i y_i with the u_i' given by Cramer's
rule over the basis Wronskian and integrated from a fixed basepoint, so every
term beyond the zeroth carries zero initial data there.  This module is the
independent oracle for the Dyson-type expansion: both must agree to
O(rho^(K+1)) against direct integration.

Solution callables used throughout map x -> (value, derivative).
"""

from __future__ import annotations

import bisect
import cmath
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NonIntegrableForcing, WronskianVanishes
from .hypergeom import ConnectedBasis, hypergeometric_ode
from .odecore import ScalarODE
from .quadrature import gauss_legendre_panel

SolutionFn = Callable[[float], tuple[complex, complex]]


@dataclass(frozen=True)
class HierarchyLevel:
    """Level k of the hierarchy: same homogeneous operator, forcing from k-1."""

    k: int
    ode: ScalarODE
    source: int  # index of the term feeding the right-hand side

    def rhs(self, g: Callable[[float], complex], y_prev: SolutionFn) -> Callable[[float], complex]:
        return lambda x: -g(x) * y_prev(x)[0]


def hierarchy(ode: ScalarODE, g: Callable[[float], complex], K: int) -> list[HierarchyLevel]:
    """The K inhomogeneous problems for L[y] + rho*g*y = 0, orders 1..K."""
    if K < 1:
        raise ValueError("K must be at least 1")
    return [HierarchyLevel(k, ode, k - 1) for k in range(1, K + 1)]


class _Cumulative:
    """Cached cumulative integral of a vector integrand from a basepoint.

    Values at previously requested points serve as anchors; a new request
    integrates adaptively (Gauss-Legendre with interval halving) only over
    the gap to the nearest anchor.
    """

    def __init__(self, integrand: Callable[[float], np.ndarray], basepoint: float,
                 tol: float = 1e-11, max_depth: int = 42):
        self.integrand = integrand
        self.tol = tol
        self.max_depth = max_depth
        probe = np.asarray(integrand(float(basepoint)), dtype=complex)
        self._xs = [float(basepoint)]
        self._vals = {float(basepoint): np.zeros_like(probe)}

    def _adaptive(self, a: float, b: float, depth: int = 0) -> np.ndarray:
        whole = gauss_legendre_panel(self.integrand, a, b, 16)
        mid = 0.5 * (a + b)
        split = (gauss_legendre_panel(self.integrand, a, mid, 16)
                 + gauss_legendre_panel(self.integrand, mid, b, 16))
        err = np.max(np.abs(whole - split))
        if err <= self.tol * max(1.0, float(np.max(np.abs(split)))):
            return split
        if depth >= self.max_depth:
            raise NonIntegrableForcing(
                f"quadrature for u_i failed to converge on [{a}, {b}]"
            )
        return (self._adaptive(a, mid, depth + 1)
                + self._adaptive(mid, b, depth + 1))

    def __call__(self, x: float) -> np.ndarray:
        x = float(x)
        got = self._vals.get(x)
        if got is not None:
            return got
        i = bisect.bisect_left(self._xs, x)
        anchors = [self._xs[j] for j in (i - 1, i) if 0 <= j < len(self._xs)]
        a = min(anchors, key=lambda t: abs(t - x))
        val = self._vals[a] + self._adaptive(a, x)
        bisect.insort(self._xs, x)
        self._vals[x] = val
        return val


@dataclass
class ParticularSolution:
    """y_p = sum u_i y_i with u_i(basepoint) = 0 and sum u_i' y_i^(j) = 0
    for j <= n-2 enforced pointwise by the Cramer construction."""

    basis: Sequence[Callable]
    uprime: Callable[[float], np.ndarray]
    u: _Cumulative
    forcing: Callable[[float], complex]
    ode: ScalarODE

    def __call__(self, x: float) -> tuple[complex, complex]:
        uv = self.u(x)
        cols = [fn(x) for fn in self.basis]
        val = sum(ui * col[0] for ui, col in zip(uv, cols))
        der = sum(ui * col[1] for ui, col in zip(uv, cols))
        return complex(val), complex(der)

    def second_derivative(self, x: float) -> complex:
        """From the level equation: y'' = G - A_1 y' - A_0 y (order 2 only)."""
        if self.ode.order != 2:
            raise ValueError("closed-form second derivative implemented for order 2")
        v, d = self(x)
        return (self.forcing(x) - self.ode.coeffs[1](x) * d - self.ode.coeffs[0](x) * v)


def particular_solution_nth(
    ode: ScalarODE,
    basis: Sequence[Callable[[float], Sequence[complex]]],
    forcing: Callable[[float], complex],
    basepoint: float,
    tol: float = 1e-11,
) -> ParticularSolution:
    """General variation of parameters: u_i' = det(Omega_i)/det(W), where
    Omega_i replaces column i of the Wronskian matrix by (0,...,0,forcing)."""
    n = ode.order
    if len(basis) != n:
        raise ValueError("need n basis solutions")

    def uprime(x: float) -> np.ndarray:
        cols = [np.asarray(fn(x), dtype=complex)[:n] for fn in basis]
        w = np.column_stack(cols)
        detw = np.linalg.det(w)
        scale = max(np.max(np.abs(w)), 1e-300) ** n
        if abs(detw) < 1e-13 * scale:
            raise WronskianVanishes(f"Wronskian ~ {detw} at x={x}")
        g = forcing(x)
        out = np.zeros(n, dtype=complex)
        for i in range(n):
            omega = w.copy()
            omega[:, i] = 0.0
            omega[n - 1, i] = g
            out[i] = np.linalg.det(omega) / detw
        return out

    u = _Cumulative(uprime, basepoint, tol)
    two_col = [(lambda x, fn=fn: tuple(np.asarray(fn(x), dtype=complex)[:2])) for fn in basis]
    return ParticularSolution(two_col, uprime, u, forcing, ode)


def particular_solution_2nd(
    a: complex,
    b: complex,
    c: complex,
    forcing: Callable[[float], complex],
    x_range: tuple[float, float] = (0.05, 0.95),
    tol: float = 1e-11,
    basepoint: Optional[float] = None,
    basis: Optional[ConnectedBasis] = None,
) -> ParticularSolution:
    """Order-2 hypergeometric case with the Wronskian pinned by Abel's
    formula: det W = A x^-c (1-x)^(c-a-b-1), the constant A measured at the
    basepoint.  u1' = -G y2 / det W and u2' = +G y1 / det W."""
    if basepoint is None:
        basepoint = 0.5 * (x_range[0] + x_range[1])
    cb = basis if basis is not None else ConnectedBasis(a, b, c)
    w0 = cb.matrix(basepoint)
    det0 = complex(np.linalg.det(w0))
    abel_const = det0 * cmath.exp(c * cmath.log(basepoint)
                                  + (a + b + 1 - c) * cmath.log(1 - basepoint))
    ode = hypergeometric_ode(a, b, c)

    def uprime(x: float) -> np.ndarray:
        inv_detw = cmath.exp(c * cmath.log(x) + (a + b + 1 - c) * cmath.log(1 - x)) / abel_const
        g = forcing(x)
        y1v, _ = cb.y1(x)
        y2v, _ = cb.y2(x)
        return np.array([-g * y2v * inv_detw, g * y1v * inv_detw], dtype=complex)

    u = _Cumulative(uprime, basepoint, tol)
    return ParticularSolution([cb.y1, cb.y2], uprime, u, forcing, ode)


@dataclass(frozen=True)
class SeriesTerm:
    k: int
    provenance: str  # "homogeneous" | "particular"
    fn: SolutionFn

    def __call__(self, x: float) -> tuple[complex, complex]:
        return self.fn(x)


@dataclass(frozen=True)
class SeriesSolution:
    order: int
    terms: tuple[SeriesTerm, ...]

    def term(self, k: int) -> SeriesTerm:
        return self.terms[k]

    def evaluate(self, x: float, rho: complex) -> complex:
        return sum(t(x)[0] * rho ** t.k for t in self.terms)

    def evaluate_derivative(self, x: float, rho: complex) -> complex:
        return sum(t(x)[1] * rho ** t.k for t in self.terms)


def deformed_series(
    ode: ScalarODE,
    g: Callable[[float], complex],
    K: int,
    basis: Sequence[Callable],
    init_coeffs: Sequence[complex],
    basepoint: float = 0.5,
    tol: float = 1e-11,
) -> SeriesSolution:
    """Series solution of L[y] + rho*g*y = 0 to order K.

    The zeroth term is the homogeneous combination with the given basis
    coefficients; every higher term is the particular solution with zero
    initial data at the basepoint (u_i(basepoint) = 0), which makes the
    series unique and directly comparable to the gauge-transform expansion.
    """
    n = ode.order

    def y0(x: float) -> tuple[complex, complex]:
        acc_v = 0j
        acc_d = 0j
        for coef, fn in zip(init_coeffs, basis):
            vals = np.asarray(fn(x), dtype=complex)
            acc_v += coef * vals[0]
            acc_d += coef * vals[1]
        return acc_v, acc_d

    terms = [SeriesTerm(0, "homogeneous", y0)]
    levels = hierarchy(ode, g, K)
    for level in levels:
        rhs = level.rhs(g, terms[level.source].fn)
        if n == 2:
            full_basis = [
                (lambda x, fn=fn: np.asarray(fn(x), dtype=complex)[:2]) for fn in basis
            ]
        else:
            full_basis = basis
        part = particular_solution_nth(ode, full_basis, rhs, basepoint, tol)
        terms.append(SeriesTerm(level.k, "particular", part))
    return SeriesSolution(K, tuple(terms))


def hypergeometric_deformed_series(
    a: complex,
    b: complex,
    c: complex,
    f: Callable[[float], complex],
    K: int,
    init_coeffs: Sequence[complex] = (1.0, 0.0),
    basepoint: float = 0.5,
    tol: float = 1e-11,
    basis: Optional[ConnectedBasis] = None,
) -> SeriesSolution:
    """Series for x(1-x)y'' + [c-(a+b+1)x]y' - (ab + rho f(x)) y = 0.

    In monic form the coupling is g = -f / (x(1-x)), so each hierarchy level
    reads L[y_k] = f * y_{k-1} / (x(1-x))."""
    cb = basis if basis is not None else ConnectedBasis(a, b, c)
    ode = hypergeometric_ode(a, b, c)
    g = lambda x: -f(x) / (x * (1 - x))
    terms = []
    cb_basis = [cb.y1, cb.y2]

    def y0(x: float) -> tuple[complex, complex]:
        v1, d1 = cb.y1(x)
        v2, d2 = cb.y2(x)
        return (init_coeffs[0] * v1 + init_coeffs[1] * v2,
                init_coeffs[0] * d1 + init_coeffs[1] * d2)

    terms.append(SeriesTerm(0, "homogeneous", y0))
    for level in hierarchy(ode, g, K):
        rhs = level.rhs(g, terms[level.source].fn)
        part = particular_solution_2nd(a, b, c, rhs, tol=tol, basepoint=basepoint, basis=cb)
        terms.append(SeriesTerm(level.k, "particular", part))
    return SeriesSolution(K, tuple(terms))


def series_to_csv(series: SeriesSolution, xs: Sequence[float], path: str) -> None:
    """Sampled terms as CSV columns (x, Re y_k, Im y_k for each k)."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["x"]
        for k in range(series.order + 1):
            header += [f"re_y{k}", f"im_y{k}"]
        writer.writerow(header)
        for x in xs:
            row = [f"{x:.16g}"]
            for t in series.terms:
                v, _ = t(x)
                row += [f"{v.real:.16g}", f"{v.imag:.16g}"]
            writer.writerow(row)

"""Rational-coefficient linear ODE systems and perturbed right-hand sides.

A scalar equation y^(n) + A_{n-1} y^(n-1) + ... + A_0 y = 0 with rational
coefficients reduces to the first-order system psi' = A(x) psi in the
standard companion frame (state (y, y', ..., y^(n-1)), superdiagonal ones,
last row -A_0 ... -A_{n-1}).  Perturbed systems psi' = (A + rho*B) psi carry
B in one of three shapes: meromorphic H(x), power-weighted x^lam * H(x), or
logarithmic log(x) * H(x); the multivalued weights are evaluated on a
continuously tracked branch.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import BranchRequired, SingularPoint, UnsupportedKind
from .ratfun import ComplexPoly, RationalFn

DEDUP_TOL = 1e-9

KIND_MEROMORPHIC = "meromorphic"
KIND_POWER = "power"
KIND_LOG = "log"
KINDS = (KIND_MEROMORPHIC, KIND_POWER, KIND_LOG)


def exclusion_radius(x: complex) -> float:
    """Default guard radius around poles for evaluation at x."""
    return 1e-6 * (1.0 + abs(x))


def _dedup(points: Sequence[complex], tol: float = DEDUP_TOL) -> list[complex]:
    out: list[complex] = []
    for p in points:
        if not any(abs(p - q) <= tol * (1.0 + abs(p)) for q in out):
            out.append(p)
    return sorted(out, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


@dataclass(frozen=True)
class ScalarODE:
    """Monic scalar equation y^(n) + coeffs[n-1] y^(n-1) + ... + coeffs[0] y = 0."""

    order: int
    coeffs: tuple[RationalFn, ...]  # A_0, ..., A_{n-1}

    def __post_init__(self):
        if self.order < 1 or len(self.coeffs) != self.order:
            raise ValueError("ScalarODE needs exactly `order` coefficients A_0..A_{n-1}")

    def residual(self, x: complex, derivs: Sequence[complex]) -> complex:
        """y^(n) + sum A_k y^(k) given derivs = (y, y', ..., y^(n))."""
        if len(derivs) != self.order + 1:
            raise ValueError("need derivatives up to order n")
        acc = derivs[self.order]
        for k, a in enumerate(self.coeffs):
            acc += a(x) * derivs[k]
        return acc


@dataclass(frozen=True)
class MeromorphicSystem:
    """First-order system psi' = A(x) psi with rational entries."""

    dim: int
    entries: tuple[tuple[RationalFn, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.dim or any(len(r) != self.dim for r in self.entries):
            raise ValueError("entries must form a dim x dim grid")

    @cached_property
    def singularities(self) -> tuple[complex, ...]:
        pts: list[complex] = []
        for row in self.entries:
            for e in row:
                pts.extend(e.poles())
        return tuple(_dedup(pts))

    def evaluate(self, x: complex, guard: bool = True) -> np.ndarray:
        if guard:
            r = exclusion_radius(x)
            for s in self.singularities:
                if abs(x - s) < r:
                    raise SingularPoint(f"x={x} within exclusion radius of pole {s}")
        return np.array([[e(x) for e in row] for row in self.entries], dtype=complex)

    def trace_at(self, x: complex) -> complex:
        return sum(self.entries[i][i](x) for i in range(self.dim))


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation matrix B(x): H, x^lam * H, or log(x) * H."""

    kind: str
    H: tuple[tuple[RationalFn, ...], ...]
    lam: Optional[complex] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedKind(f"unknown perturbation kind {self.kind!r}")
        if self.kind == KIND_POWER and self.lam is None:
            raise ValueError("power-weighted perturbation needs an exponent")

    @property
    def dim(self) -> int:
        return len(self.H)

    @property
    def multivalued(self) -> bool:
        return self.kind in (KIND_POWER, KIND_LOG)

    @cached_property
    def poles(self) -> tuple[complex, ...]:
        pts: list[complex] = []
        for row in self.H:
            for e in row:
                pts.extend(e.poles())
        return tuple(_dedup(pts))

    def h_matrix(self, x: complex) -> np.ndarray:
        return np.array([[e(x) for e in row] for row in self.H], dtype=complex)

    def weight(self, x: complex, branch=None) -> complex:
        """The scalar multivalued factor at x on the tracked branch."""
        if self.kind == KIND_MEROMORPHIC:
            return 1.0 + 0j
        if branch is None:
            raise BranchRequired(f"kind {self.kind!r} needs a branch state at x={x}")
        theta = branch.arg(0j)
        logx = cmath.log(abs(x)) + 1j * theta
        if self.kind == KIND_LOG:
            return logx
        return cmath.exp(self.lam * logx)

    def matrix(self, x: complex, branch=None, guard: bool = True) -> np.ndarray:
        if guard:
            r = exclusion_radius(x)
            for s in self.poles:
                if abs(x - s) < r:
                    raise SingularPoint(f"x={x} within exclusion radius of pole {s}")
        return self.weight(x, branch) * self.h_matrix(x)


def companion(ode: ScalarODE) -> MeromorphicSystem:
    """Companion system: superdiagonal ones, last row (-A_0, ..., -A_{n-1})."""
    n = ode.order
    zero, one = RationalFn.zero(), RationalFn.const(1.0)
    rows = []
    for i in range(n - 1):
        rows.append(tuple(one if j == i + 1 else zero for j in range(n)))
    rows.append(tuple(a.scale(-1.0) for a in ode.coeffs))
    return MeromorphicSystem(n, tuple(rows))


def system_singularities(sys: MeromorphicSystem) -> list[complex]:
    """Deduplicated denominator roots of all entries."""
    return list(sys.singularities)


def perturbed_rhs(
    sys: MeromorphicSystem,
    pert: Optional[PerturbationSpec],
    rho: complex,
    x: complex,
    branch=None,
) -> np.ndarray:
    """A(x) + rho * B(x), with multivalued weights on the tracked branch."""
    a = sys.evaluate(x)
    if pert is None or rho == 0:
        return a
    return a + rho * pert.matrix(x, branch)


# --- JSON encoding -------------------------------------------------------
# Polynomials serialize as [[re, im], ...] ascending in degree; kinds use the
# string tags "meromorphic" | "power" | "log"; scalars as [re, im].


def _c2j(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _j2c(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def poly_to_json(p: ComplexPoly) -> list[list[float]]:
    return [_c2j(c) for c in p.coeffs]


def poly_from_json(data) -> ComplexPoly:
    return ComplexPoly.make([_j2c(v) for v in data])


def ratfn_to_json(r: RationalFn) -> dict:
    return {"num": poly_to_json(r.num), "den": poly_to_json(r.den)}


def ratfn_from_json(data) -> RationalFn:
    return RationalFn.make(poly_from_json(data["num"]), poly_from_json(data["den"]))


def scalar_ode_to_json(ode: ScalarODE) -> dict:
    return {"order": ode.order, "coeffs": [ratfn_to_json(c) for c in ode.coeffs]}


def scalar_ode_from_json(data) -> ScalarODE:
    return ScalarODE(int(data["order"]), tuple(ratfn_from_json(c) for c in data["coeffs"]))


def system_to_json(sys: MeromorphicSystem) -> dict:
    return {"dim": sys.dim, "entries": [[ratfn_to_json(e) for e in row] for row in sys.entries]}


def system_from_json(data) -> MeromorphicSystem:
    return MeromorphicSystem(
        int(data["dim"]),
        tuple(tuple(ratfn_from_json(e) for e in row) for row in data["entries"]),
    )


def perturbation_to_json(p: PerturbationSpec) -> dict:
    out = {"kind": p.kind, "H": [[ratfn_to_json(e) for e in row] for row in p.H]}
    if p.lam is not None:
        out["lambda"] = _c2j(p.lam)
    return out


def perturbation_from_json(data) -> PerturbationSpec:
    lam = _j2c(data["lambda"]) if "lambda" in data else None
    return PerturbationSpec(
        data["kind"],
        tuple(tuple(ratfn_from_json(e) for e in row) for row in data["H"]),
        lam,
    )

"""Numerical analytic continuation of fundamental matrices along paths.

Transport integrates W' = (A + rho B)(z) W along each path segment with an
embedded adaptive Runge-Kutta 5(4) pair (constant-speed segment parameters,
so the control is arclength-equivalent).  Branch arguments of multivalued
perturbation weights come from the exact per-segment argument tables, not
from the integrator state.  The monodromy of a closed loop is read off in
the convention W(loop . x) = W(x) M.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IllConditioned, NonFiniteValue, StepSizeUnderflow
from .hypergeom import local_basis_0, local_basis_1
from .odecore import MeromorphicSystem, PerturbationSpec
from .paths import ArgTracker, BranchState, PathSpec

COND_LIMIT = 1e12
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class FundamentalMatrix:
    """Value of a fundamental solution matrix at a basepoint."""

    basepoint: complex
    value: np.ndarray
    provenance: str = "identity-at-basepoint"
    # optional direct evaluator (z, branch) -> matrix for series-backed bases
    evaluator: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.value, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "value", v)
        if abs(np.linalg.det(v)) == 0:
            raise IllConditioned("fundamental matrix is singular at the basepoint")

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    @property
    def cond(self) -> float:
        return float(np.linalg.cond(self.value))


@dataclass(frozen=True)
class MonodromyDatum:
    center: Optional[complex]
    loop: PathSpec
    matrix: np.ndarray
    eigenvalues: tuple[complex, ...]


class TransportResult(NamedTuple):
    w: FundamentalMatrix
    branch: BranchState
    steps: int


def identity_basis(basepoint: complex, dim: int) -> FundamentalMatrix:
    return FundamentalMatrix(basepoint, np.eye(dim, dtype=complex), "identity-at-basepoint")


def frobenius_basis(a: complex, b: complex, c: complex, point: int,
                    x0: complex, tol: float = 1e-14) -> FundamentalMatrix:
    """Fundamental matrix with columns (y_i, y_i') of the local basis at 0 or 1.

    The attached evaluator recomputes W(z) from the series on any branch,
    which is what makes quadrature-based correction integrals possible near
    the expansion point.
    """
    if point == 0:
        basis = local_basis_0(a, b, c, tol)

        def evaluator(z: complex, branch: Optional[BranchState] = None) -> np.ndarray:
            arg = branch.arg(0j) if branch is not None else None
            v1, d1 = basis.y1(z)
            v2, d2 = basis.y2(z, arg)
            return np.array([[v1, v2], [d1, d2]], dtype=complex)

        tag = "frobenius-at-0"
    elif point == 1:
        basis = local_basis_1(a, b, c, tol)

        def evaluator(z: complex, branch: Optional[BranchState] = None) -> np.ndarray:
            # tracked arg of z-1 maps to the local variable w = 1-z by -pi,
            # chosen so real z < 1 stays on the principal branch
            arg = branch.arg(1.0 + 0j) - math.pi if branch is not None else None
            v1, d1 = basis.y1(z)
            v2, d2 = basis.y2(z, arg)
            return np.array([[v1, v2], [d1, d2]], dtype=complex)

        tag = "frobenius-at-1"
    else:
        raise ValueError("Frobenius bases are built at the points 0 or 1")
    return FundamentalMatrix(complex(x0), evaluator(complex(x0)), tag, evaluator)


def tracked_points(sys: MeromorphicSystem, pert: Optional[PerturbationSpec],
                   path: Optional[PathSpec] = None) -> list[complex]:
    pts = list(sys.singularities)
    if pert is not None:
        pts.extend(pert.poles)
        if pert.multivalued:
            pts.append(0j)
    if path is not None:
        pts.extend(path.arc_centers())
    out: list[complex] = []
    for p in pts:
        if not any(abs(p - q) <= 1e-9 * (1 + abs(p)) for q in out):
            out.append(p)
    return out


def _segment_rhs(sys, pert, rho, seg, tracker, seg_index, dim):
    multivalued = pert is not None and pert.multivalued

    def rhs(t, y):
        z = seg.point(t)
        v = seg.velocity(t)
        a = sys.evaluate(z)
        if pert is not None and rho != 0:
            if multivalued:
                theta = tracker.arg(seg_index, t, 0j)
                logz = cmath.log(abs(z)) + 1j * theta
                w = logz if pert.kind == "log" else cmath.exp(pert.lam * logz)
            else:
                w = 1.0
            a = a + rho * w * pert.h_matrix(z)
        return (a @ y.reshape(dim, dim)).ravel() * v

    return rhs


def transport(
    sys: MeromorphicSystem,
    pert: Optional[PerturbationSpec],
    rho: complex,
    path: PathSpec,
    w0: FundamentalMatrix,
    tol: float = DEFAULT_TOL,
    start_branch: Optional[BranchState] = None,
) -> TransportResult:
    """Continue w0 along the path; returns the end value, the branch state,
    and the accepted step count."""
    if abs(path.start - w0.basepoint) > 1e-9:
        raise ValueError("w0 is not based at the path start")
    pts = tracked_points(sys, pert, path)
    tracker = ArgTracker(path, pts, start_branch)
    dim = w0.dim
    y = np.array(w0.value, dtype=complex).ravel()
    steps = 0
    rtol = max(tol, 1e-13)
    scale = max(1.0, float(np.max(np.abs(y))))
    for i, seg in enumerate(path.segments):
        rhs = _segment_rhs(sys, pert, rho, seg, tracker, i, dim)
        sol = solve_ivp(rhs, (0.0, 1.0), y, method="RK45",
                        rtol=rtol, atol=rtol * 1e-2 * scale, dense_output=False)
        if not sol.success:
            raise StepSizeUnderflow(f"integrator failed on segment {i}: {sol.message}")
        y = sol.y[:, -1]
        steps += sol.t.size - 1
        if not np.all(np.isfinite(y.view(float))):
            raise NonFiniteValue(f"non-finite transport state on segment {i}")
    w_end = FundamentalMatrix(path.end, y.reshape(dim, dim), w0.provenance, w0.evaluator)
    return TransportResult(w_end, tracker.end_state, steps)


def monodromy(
    sys: MeromorphicSystem,
    basis: FundamentalMatrix,
    loop: PathSpec,
    tol: float = DEFAULT_TOL,
    pert: Optional[PerturbationSpec] = None,
    rho: complex = 0,
) -> MonodromyDatum:
    """M = W(basepoint)^-1 W(after loop), so that W(loop . x) = W(x) M."""
    if not loop.is_closed:
        raise ValueError("monodromy needs a closed loop")
    if basis.cond > COND_LIMIT:
        raise IllConditioned(f"basis condition number {basis.cond:.3e} exceeds {COND_LIMIT:.0e}")
    res = transport(sys, pert, rho, loop, basis, tol)
    m = np.linalg.solve(np.asarray(basis.value), np.asarray(res.w.value))
    eigs = tuple(sorted((complex(e) for e in np.linalg.eigvals(m)),
                        key=lambda z: (round(z.real, 12), round(z.imag, 12))))
    centers = loop.arc_centers()
    return MonodromyDatum(centers[0] if centers else None, loop, m, eigs)


def branch_factor(state: Optional[BranchState], kind: str, lam: Optional[complex],
                  x: complex) -> complex:
    """x^lam or log x on the branch recorded in `state` (1 for meromorphic)."""
    if kind == "meromorphic":
        return 1.0 + 0j
    from .errors import BranchRequired

    if state is None:
        raise BranchRequired(f"kind {kind!r} needs a branch state at x={x}")
    logx = cmath.log(abs(x)) + 1j * state.arg(0j)
    if kind == "log":
        return logx
    if kind == "power":
        return cmath.exp(lam * logx)
    from .errors import UnsupportedKind

    raise UnsupportedKind(kind)

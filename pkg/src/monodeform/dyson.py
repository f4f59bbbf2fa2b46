"""Gauge-correction integrals, first-order monodromy deformations, and
cocycle jumps.

For a perturbed system psi' = (A + rho B) psi with unperturbed fundamental
matrix W, the nested path-ordered integrals

    C_1(x) = int_{x0}^{x} G dt,   C_k(x) = int_{x0}^{x} G(t) C_{k-1}(t) dt,
    G = W^{-1} B W,

build the expansion W_rho = W (I + C_1 rho + C_2 rho^2 + ...); the repeated
integrals share their lower limit on paper but the path-ordered nesting is
the reading consistent with the ordered-exponential solution operator, and
is validated here against direct integration.  The first-order change of a
monodromy matrix is M_rho = M + (M C(loop.x) M^{-1} - C(x)) M rho + O(rho^2),
and the jump delta(loop) = M C(loop.x) M^{-1} - C(x) satisfies the cocycle
identity delta(g) - delta(g h) + M_g delta(h) M_g^{-1} = 0, where the
composite g h traverses h first (function-style composition, making loop ->
monodromy a homomorphism).

Two integration routes are implemented and cross-checked: an augmented
adaptive ODE transport (any basis), and piecewise-Chebyshev quadrature with
the fundamental matrix evaluated directly from its Frobenius series (needed
for integrals anchored at the singular point 0 itself).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    InconsistentBasepoint,
    NonFiniteValue,
    NonIntegrableEndpoint,
    ShapeMismatch,
    StepSizeUnderflow,
    UnsupportedKind,
)
from .odecore import KIND_LOG, KIND_MEROMORPHIC, KIND_POWER, MeromorphicSystem, PerturbationSpec
from .paths import ArgTracker, Arc, BranchState, PathSpec, line_path, loop_around, path_hash
from .quadrature import cheb_cumulative, cheb_nodes, estimate_endpoint_exponent
from .transport import FundamentalMatrix, tracked_points

HEAD_RATIO = 0.25
HEAD_LEVELS = 44
PANEL_NODES = 32
CONSTANCY_FRACTIONS = (0.3, 0.5, 0.7)


class _ZoneError(ValueError):
    """Contour exceeds the series-evaluator convergence zone."""


# --- result types -----------------------------------------------------------


@dataclass(frozen=True)
class CorrectionC:
    """C at the end of a path (zero at the contour start by convention)."""

    value: np.ndarray
    path: Optional[PathSpec]
    branch: Optional[BranchState]
    basepoint: complex
    from_zero: bool
    plain: Optional[np.ndarray] = None  # int W^-1 H W over the same contour


@dataclass(frozen=True)
class DysonExpansion:
    order: int
    terms: tuple[np.ndarray, ...]  # C_1..C_K at the endpoint (term 0 = identity)
    basepoint: complex
    endpoint: complex
    path: Optional[PathSpec]
    branch: Optional[BranchState]


@dataclass(frozen=True)
class CocycleJump:
    center: complex
    delta: np.ndarray
    x_probe: complex
    constancy_residual: float
    monodromy: np.ndarray = field(default=None, compare=False)
    reference: Optional[np.ndarray] = field(default=None, compare=False)
    # (probe, delta, reference) for every probe evaluated, main probe first
    probe_data: tuple = field(default=(), compare=False)


# --- small linear algebra helpers -------------------------------------------


def _gauge_matrix(w: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """W^{-1} @ rhs via the adjugate for 2x2 (avoids cond-limited solves on
    the wildly scaled columns near a singular point)."""
    if w.shape == (2, 2):
        det = w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]
        adj = np.array([[w[1, 1], -w[0, 1]], [-w[1, 0], w[0, 0]]], dtype=complex)
        return (adj @ rhs) / det
    return np.linalg.solve(w, rhs)


def _maxabs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m)))


# --- series-quadrature route -------------------------------------------------


@dataclass
class _Panel:
    zs: np.ndarray
    dzdtau: np.ndarray
    branches: list


def _line_pieces(z0: complex, z1: complex, obstacles: Sequence[complex]) -> list[tuple[complex, complex]]:
    """Split a chord into pieces short relative to their pole distance."""
    out = []
    stack = [(z0, z1)]
    while stack:
        a, b = stack.pop()
        mid = 0.5 * (a + b)
        dist = min((abs(mid - p) for p in obstacles), default=math.inf)
        if abs(b - a) <= max(0.5 * dist, 1e-4) or abs(b - a) < 1e-9:
            out.append((a, b))
        else:
            stack.append((mid, b))
            stack.append((a, mid))
    out.sort(key=lambda ab: abs(ab[0] - z0))
    return out


def _panels_for_path(path: PathSpec, points: Sequence[complex],
                     start: Optional[BranchState], nodes: int) -> tuple[list[_Panel], BranchState]:
    tracker = ArgTracker(path, points, start)
    taus = cheb_nodes(nodes)
    panels: list[_Panel] = []
    for i, seg in enumerate(path.segments):
        if isinstance(seg, Arc):
            dists = [seg.radius]
            for p in points:
                if abs(p - seg.center) > 1e-12 * (1 + abs(p)):
                    dists.append(abs(abs(p - seg.center) - seg.radius))
            min_dist = min(dists)
            dtheta_max = max(0.5 * min_dist / seg.radius, 0.05)
            n_pieces = max(1, math.ceil(abs(seg.theta1 - seg.theta0) / min(dtheta_max, math.pi / 4)))
            cuts = [j / n_pieces for j in range(n_pieces + 1)]
        else:
            pieces = _line_pieces(seg.z0, seg.z1, points)
            total = abs(seg.z1 - seg.z0)
            cuts = [0.0]
            for a, b in pieces:
                cuts.append(cuts[-1] + abs(b - a) / total if total > 0 else 1.0)
            cuts[-1] = 1.0
        for t0, t1 in zip(cuts, cuts[1:]):
            ts = t0 + 0.5 * (taus + 1.0) * (t1 - t0)
            zs = np.array([seg.point(t) for t in ts])
            dz = np.array([seg.velocity(t) * 0.5 * (t1 - t0) for t in ts])
            brs = [tracker.state_at(i, t) for t in ts]
            panels.append(_Panel(zs, dz, brs))
    return panels, tracker.end_state


def _panels_for_head(end: complex, points: Sequence[complex], nodes: int,
                     levels: int = HEAD_LEVELS, ratio: float = HEAD_RATIO) -> list[_Panel]:
    """Geometric panels along the ray from 0 to `end` (innermost first),
    on the principal branch."""
    taus = cheb_nodes(nodes)
    u = end / abs(end)
    panels = []
    for m in range(levels - 1, -1, -1):
        hi = abs(end) * ratio**m
        lo = abs(end) * ratio ** (m + 1)
        ss = lo + 0.5 * (taus + 1.0) * (hi - lo)
        zs = np.array([s * u for s in ss])
        dz = np.full(nodes, u * 0.5 * (hi - lo), dtype=complex)
        brs = [BranchState.principal(z, points) for z in zs]
        panels.append(_Panel(zs, dz, brs))
    return panels


def _series_sweep(
    evaluator: Callable,
    pert: PerturbationSpec,
    panel_groups: Sequence[list[_Panel]],
    K: int,
    dim: int,
    want_plain: bool,
):
    """Run the nested cumulative sweeps; returns per-group markers
    (W, [C_1..C_K], plain, branch) at each group boundary."""
    c_vals = [np.zeros((dim, dim), dtype=complex) for _ in range(K)]
    d_val = np.zeros((dim, dim), dtype=complex)
    markers = []
    for group in panel_groups:
        for panel in group:
            n = len(panel.zs)
            pv = np.empty((n, dim, dim), dtype=complex)
            wt = np.empty(n, dtype=complex)
            for j in range(n):
                z = panel.zs[j]
                br = panel.branches[j]
                w = evaluator(z, br)
                pv[j] = _gauge_matrix(w, pert.h_matrix(z) @ w) * panel.dzdtau[j]
                wt[j] = pert.weight(z, br)
            gv = wt[:, None, None] * pv
            start = [c.copy() for c in c_vals]
            prev_nodes = None
            for k in range(1, K + 1):
                if k == 1:
                    integrand = gv
                else:
                    integrand = np.einsum("nij,njk->nik", gv, prev_nodes)
                cum = cheb_cumulative(integrand.reshape(n, dim * dim), 1.0)
                nodes_k = start[k - 1][None, :, :] + cum.reshape(n, dim, dim)
                prev_nodes = nodes_k
                c_vals[k - 1] = nodes_k[-1]
            if want_plain:
                cum = cheb_cumulative(pv.reshape(n, dim * dim), 1.0)
                d_val = d_val + cum.reshape(n, dim, dim)[-1]
        last = group[-1]
        z_end, br_end = last.zs[-1], last.branches[-1]
        markers.append((evaluator(z_end, br_end), [c.copy() for c in c_vals],
                        d_val.copy(), br_end))
    return markers


def _series_route_markers(
    sys: MeromorphicSystem,
    pert: PerturbationSpec,
    basis: FundamentalMatrix,
    paths: Sequence[PathSpec],
    K: int,
    want_plain: bool,
    from_zero: bool,
    nodes: int = PANEL_NODES,
):
    if basis.evaluator is None:
        raise _ZoneError("series route needs a basis with a series evaluator")
    if basis.provenance not in ("frobenius-at-0", "frobenius-at-1"):
        raise _ZoneError(f"series route undefined for provenance {basis.provenance!r}")
    pts = tracked_points(sys, pert)
    for p in paths:
        for c in p.arc_centers():
            if not any(abs(c - q) <= 1e-9 * (1 + abs(c)) for q in pts):
                pts.append(c)
    groups: list[list[_Panel]] = []
    if from_zero:
        start_z = paths[0].start if paths else basis.basepoint
        if not (abs(start_z.imag) < 1e-12 and start_z.real > 0):
            raise ValueError("from-zero contours start on the positive real axis")
        _check_endpoint_integrable(basis, pert, pts, start_z)
        groups.append(_panels_for_head(start_z, pts, nodes))
        state = BranchState.principal(start_z, pts)
    else:
        start_z = paths[0].start
        state = BranchState.principal(start_z, pts)
    for p in paths:
        panels, state = _panels_for_path(p, pts, state, nodes)
        groups.append(panels)
    zone_center = 0.0 if basis.provenance == "frobenius-at-0" else 1.0
    reach = max(
        abs(panel.zs[j] - zone_center)
        for g in groups for panel in g for j in range(len(panel.zs))
    )
    if reach > 0.88:
        raise _ZoneError(
            f"contour leaves the series convergence zone (reach {reach:.3f})"
        )
    # with from_zero the first marker is the end of the head piece (at the
    # contour start itself), followed by one marker per path
    return _series_sweep(basis.evaluator, pert, groups, K, basis.dim, want_plain)


def _check_endpoint_integrable(basis, pert, pts, start_z):
    u = start_z / abs(start_z)

    def probe(s: float):
        z = s * u
        br = BranchState.principal(z, pts)
        w = basis.evaluator(z, br)
        return pert.weight(z, br) * _gauge_matrix(w, pert.h_matrix(z) @ w)

    expo = estimate_endpoint_exponent(probe, 0.0, +1.0, probe=1e-5 * abs(start_z))
    if expo <= -0.999:
        raise NonIntegrableEndpoint(
            f"correction integrand has endpoint exponent {expo:.3f} <= -1 at 0"
        )


# --- augmented ODE route ------------------------------------------------------


def _ode_route_markers(
    sys: MeromorphicSystem,
    pert: PerturbationSpec,
    basis: FundamentalMatrix,
    paths: Sequence[PathSpec],
    K: int,
    want_plain: bool,
    tol: float,
):
    """Chain of transports carrying (W, C_1..C_K, plain) across the paths."""
    pts = tracked_points(sys, pert)
    for p in paths:
        for c in p.arc_centers():
            if not any(abs(c - q) <= 1e-9 * (1 + abs(c)) for q in pts):
                pts.append(c)
    dim = basis.dim
    n2 = dim * dim
    nblocks = 1 + K + (1 if want_plain else 0)
    y = np.zeros(nblocks * n2, dtype=complex)
    y[:n2] = np.asarray(basis.value).ravel()
    state = BranchState.principal(paths[0].start, pts)
    multivalued = pert.multivalued
    rtol = max(tol, 1e-13)
    markers = []
    for path in paths:
        tracker = ArgTracker(path, pts, state)
        for i, seg in enumerate(path.segments):

            def rhs(t, yy, seg=seg, i=i):
                z = seg.point(t)
                v = seg.velocity(t)
                w = yy[:n2].reshape(dim, dim)
                out = np.empty_like(yy)
                out[:n2] = (sys.evaluate(z) @ w).ravel() * v
                plain = _gauge_matrix(w, pert.h_matrix(z) @ w) * v
                if multivalued:
                    theta = tracker.arg(i, t, 0j)
                    logz = cmath.log(abs(z)) + 1j * theta
                    wt = logz if pert.kind == KIND_LOG else cmath.exp(pert.lam * logz)
                else:
                    wt = 1.0
                g = wt * plain
                prev = None
                for k in range(1, K + 1):
                    blk = slice(k * n2, (k + 1) * n2)
                    if k == 1:
                        out[blk] = g.ravel()
                    else:
                        out[blk] = (g @ prev).ravel()
                    prev = yy[blk].reshape(dim, dim)
                if want_plain:
                    out[(K + 1) * n2:] = plain.ravel()
                return out

            sol = solve_ivp(rhs, (0.0, 1.0), y, method="RK45",
                            rtol=rtol, atol=rtol * 1e-2)
            if not sol.success:
                raise StepSizeUnderflow(f"augmented transport failed: {sol.message}")
            y = sol.y[:, -1]
            if not np.all(np.isfinite(y.view(float))):
                raise NonFiniteValue("non-finite augmented state")
        state = tracker.end_state
        w_end = y[:n2].reshape(dim, dim).copy()
        c_list = [y[k * n2:(k + 1) * n2].reshape(dim, dim).copy() for k in range(1, K + 1)]
        d_val = y[(K + 1) * n2:].reshape(dim, dim).copy() if want_plain else None
        markers.append((w_end, c_list, d_val, state))
    return markers


def _route_markers(sys, pert, basis, paths, K, want_plain, tol, from_zero, route):
    if route == "auto":
        if from_zero or basis.evaluator is not None:
            try:
                return _series_route_markers(sys, pert, basis, paths, K, want_plain,
                                             from_zero)
            except _ZoneError:
                if from_zero:
                    raise
        return _ode_route_markers(sys, pert, basis, paths, K, want_plain, tol)
    if route == "series":
        return _series_route_markers(sys, pert, basis, paths, K, want_plain, from_zero)
    if from_zero:
        raise ValueError("from-zero contours require the series route")
    return _ode_route_markers(sys, pert, basis, paths, K, want_plain, tol)


# --- public operations --------------------------------------------------------


def correction_C(
    sys: MeromorphicSystem,
    pert: PerturbationSpec,
    basis: FundamentalMatrix,
    path: Optional[PathSpec],
    tol: float = 1e-10,
    from_zero: bool = False,
    route: str = "auto",
    want_plain: bool = False,
) -> CorrectionC:
    """C = int W^{-1} B W dt along the path (plus the [0, start] head when
    from_zero), with W continued from the basis and B branch-tracked."""
    paths = [path] if path is not None else []
    if not paths and not from_zero:
        raise ValueError("need a path or a from-zero contour")
    want_plain = want_plain or pert.kind == KIND_LOG
    markers = _route_markers(sys, pert, basis, paths, 1, want_plain, tol, from_zero, route)
    w_end, c_list, d_val, branch = markers[-1]
    return CorrectionC(c_list[0], path, branch, 0j if from_zero else basis.basepoint,
                       from_zero, d_val)


def dyson_expand(
    sys: MeromorphicSystem,
    pert: PerturbationSpec,
    K: int,
    path: Optional[PathSpec],
    basis: FundamentalMatrix,
    tol: float = 1e-10,
    from_zero: bool = False,
    route: str = "auto",
) -> DysonExpansion:
    """Nested path-ordered terms C_1..C_K of W_rho = W (I + sum C_k rho^k)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    paths = [path] if path is not None else []
    if not paths and not from_zero:
        raise ValueError("need a path or a from-zero contour")
    markers = _route_markers(sys, pert, basis, paths, K, False, tol, from_zero, route)
    w_end, c_list, _, branch = markers[-1]
    endpoint = paths[-1].end if paths else basis.basepoint
    return DysonExpansion(K, tuple(c_list), basis.basepoint, endpoint, path, branch)


def evaluate_dyson(basis_value: np.ndarray, expansion: DysonExpansion, rho: complex) -> np.ndarray:
    """W_rho at the endpoint: needs W (continued basis value) at the same point."""
    dim = basis_value.shape[0]
    acc = np.eye(dim, dtype=complex)
    for k, c in enumerate(expansion.terms, start=1):
        acc = acc + c * rho**k
    return np.asarray(basis_value) @ acc


def perturbed_monodromy_first_order(
    m0: np.ndarray, c_at_x: np.ndarray, c_at_looped: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(M0, first-order coefficient): M_rho = M0 + coeff * rho + O(rho^2),
    coeff = (M0 C(loop.x) M0^{-1} - C(x)) M0."""
    m0 = np.asarray(m0, dtype=complex)
    c1 = np.asarray(c_at_x, dtype=complex)
    c2 = np.asarray(c_at_looped, dtype=complex)
    if not (m0.shape == c1.shape == c2.shape) or m0.shape[0] != m0.shape[1]:
        raise ShapeMismatch(f"incompatible shapes {m0.shape}, {c1.shape}, {c2.shape}")
    coeff = (m0 @ c2 @ np.linalg.inv(m0) - c1) @ m0
    return m0, coeff


def default_loop_radius(center: complex, sys: MeromorphicSystem, probe: complex) -> float:
    others = [s for s in sys.singularities if abs(s - center) > 1e-9 * (1 + abs(s))]
    d_other = min((abs(s - center) for s in others), default=math.inf)
    return min(0.5 * d_other, 0.75 * abs(probe - center))


def deformation_delta(
    sys: MeromorphicSystem,
    pert: PerturbationSpec,
    basis: FundamentalMatrix,
    probe: complex,
    loops: Sequence[PathSpec],
    tol: float = 1e-10,
    from_zero: bool = False,
    route: str = "auto",
):
    """delta = M C(kappa.x) M^{-1} - C(x) for the loop sequence kappa
    (traversed in list order) based at the probe.  Returns
    (delta, M_kappa, C_at_probe, plain_at_probe)."""
    pre_paths: list[PathSpec] = []
    if not from_zero and abs(probe - basis.basepoint) > 1e-12:
        pre_paths.append(line_path(basis.basepoint, probe))
    joined = None
    for lp in loops:
        joined = lp if joined is None else joined + lp
    all_paths = pre_paths + [joined]
    want_plain = pert.kind == KIND_LOG
    markers = _route_markers(sys, pert, basis, all_paths, 1, want_plain, tol,
                             from_zero, route)
    # marker layout: [head (series from-zero only)] + one per path
    offset = 1 if from_zero else 0
    if pre_paths:
        w_x, c_x_list, d_x, _ = markers[offset + len(pre_paths) - 1]
        c_x = c_x_list[0]
    elif from_zero:
        w_x, c_x_list, d_x, _ = markers[0]
        c_x = c_x_list[0]
    else:
        w_x = np.asarray(basis.value)
        c_x = np.zeros((basis.dim, basis.dim), dtype=complex)
        d_x = np.zeros((basis.dim, basis.dim), dtype=complex)
    w_loop, c_loop_list, d_loop, branch = markers[-1]
    m = _gauge_matrix(w_x, w_loop)
    delta = m @ c_loop_list[0] @ np.linalg.inv(m) - c_x
    return delta, m, c_x, d_x


def cocycle_jump(
    sys: MeromorphicSystem,
    pert: PerturbationSpec,
    basis: FundamentalMatrix,
    center: complex,
    probe: complex,
    tol: float = 1e-10,
    from_zero: Optional[bool] = None,
    constancy_probes: Optional[Sequence[complex]] = None,
    route: str = "auto",
) -> CocycleJump:
    """Delta_a C at the probe plus a constancy residual over nearby probes.

    For multivalued kinds the correction integrals are anchored at 0 itself
    (the jump laws compare against the from-zero C); for meromorphic kinds
    the anchor is the basis basepoint, which shifts delta only by a
    coboundary."""
    if from_zero is None:
        from_zero = pert.multivalued
    if constancy_probes is None:
        others = [s for s in sys.singularities if abs(s - center) > 1e-9 * (1 + abs(s))]
        d_other = min((abs(s - center) for s in others), default=1.0)
        direction = basis.basepoint - center
        direction = direction / abs(direction) if abs(direction) > 0 else 1.0
        constancy_probes = [center + f * d_other * direction for f in CONSTANCY_FRACTIONS]

    def one(p: complex):
        r = default_loop_radius(center, sys, p)
        loop = loop_around(center, r, p, avoid=sys.singularities)
        d, m, c_x, d_x = deformation_delta(sys, pert, basis, p, [loop], tol,
                                           from_zero, route)
        ref = d_x if pert.kind == KIND_LOG else c_x
        return d, m, ref

    delta, m, reference = one(probe)
    probe_data = [(probe, delta, reference)]
    for p in constancy_probes:
        if abs(p - probe) < 1e-12:
            continue
        d_i, _, ref_i = one(p)
        probe_data.append((p, d_i, ref_i))
    residual = 0.0
    for i in range(len(probe_data)):
        for j in range(i + 1, len(probe_data)):
            residual = max(residual, _maxabs(probe_data[i][1] - probe_data[j][1]))
    return CocycleJump(center, delta, probe, residual, m, reference, tuple(probe_data))


def closed_form_jump(kind: str, lam: Optional[complex], c_at_probe: np.ndarray) -> np.ndarray:
    """Predicted Delta_0 C: (e^{2 pi i lam} - 1) C for the power kind,
    2 pi i C for the log kind (pass the log-free reference integral
    int W^{-1} H W there), and 0 for meromorphic kinds whose C(0) exists."""
    c = np.asarray(c_at_probe, dtype=complex)
    if kind == KIND_POWER:
        return (cmath.exp(2j * math.pi * lam) - 1.0) * c
    if kind == KIND_LOG:
        return 2j * math.pi * c
    if kind == KIND_MEROMORPHIC:
        return np.zeros_like(c)
    raise UnsupportedKind(kind)


def _extract_delta(v):
    if isinstance(v, CocycleJump):
        return v.delta, v.x_probe
    return np.asarray(v, dtype=complex), None


def cocycle_identity_residual(deltas: dict, monodromies: dict, pair) -> float:
    """max-entry norm of delta(a) - delta(ab) + M_a delta(b) M_a^{-1}.

    `deltas` maps loop keys to matrices (or CocycleJump), and must contain
    the composite under the key (a, b); the composite contour traverses b
    first.  All entries must share one basepoint/branch convention."""
    a, b = pair
    da, pa = _extract_delta(deltas[a])
    db, pb = _extract_delta(deltas[b])
    dab, pab = _extract_delta(deltas[(a, b)])
    probes = [p for p in (pa, pb, pab) if p is not None]
    if probes and max(abs(p - probes[0]) for p in probes) > 1e-9:
        raise InconsistentBasepoint("cocycle data computed at different probes")
    ma = np.asarray(monodromies[a], dtype=complex)
    r = da - dab + ma @ db @ np.linalg.inv(ma)
    return _maxabs(r)


# --- JSON ----------------------------------------------------------------------


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(d) -> np.ndarray:
    n = int(d["dim"])
    flat = [complex(p[0], p[1]) for p in d["data"]]
    return np.array(flat, dtype=complex).reshape(n, n)


def _windings_json(branch: Optional[BranchState], start: Optional[BranchState]) -> dict:
    if branch is None or start is None:
        return {}
    out = {}
    for p, _ in branch.args:
        key = f"{p.real:g}{p.imag:+g}j"
        out[key] = (branch.arg(p) - start.arg(p)) / (2 * math.pi)
    return out


def correction_to_json(corr: CorrectionC, tol: float) -> dict:
    start = None
    if corr.branch is not None:
        pts = [p for p, _ in corr.branch.args]
        start = BranchState.principal(corr.path.start if corr.path else corr.basepoint, pts)
    return {
        "matrix": matrix_to_json(corr.value),
        "tol": tol,
        "path_hash": path_hash(corr.path) if corr.path is not None else None,
        "windings": _windings_json(corr.branch, start),
        "from_zero": corr.from_zero,
    }

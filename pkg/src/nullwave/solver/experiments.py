"""Stability, gluing and blow-up experiments built on the Picard solver."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import BlowUpError, GluingError, StructuralError
from ..fields import (Grid, GridField, InitialDatum, datum_l1, l1_over_triangle,
                      rectangle_weights)
from ..geometry import cone_slice, cone_window, triangle
from ..system import contraction_budget, gamma, validate
from .picard import DEFAULT_MAX_ITER, DEFAULT_TOL, picard_solve, quadratic_source

logger = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e6


def riccati_oracle(d, c, lam, x, t):
    """Exact solution of ``u_t + c u_x = lam u**2``: ``phi / (1 - lam t phi)`` at the foot point."""
    phi = d(np.asarray(x, dtype=float) - c * np.asarray(t, dtype=float))
    denom = 1.0 - lam * np.asarray(t, dtype=float) * phi
    if np.any(denom <= 1e-12):
        raise BlowUpError(f"Riccati solution has blown up by t={np.max(t)}")
    out = phi / denom
    return float(out) if np.ndim(out) == 0 else out


def data_support(data):
    lo = min(d.support[0] for d in data)
    hi = max(d.support[1] for d in data)
    return lo, hi


def horizon_grid(J, speeds, horizon, dx, dt, padding=0.0):
    """Rectangle grid covering the propagation cone of ``J`` up to ``horizon``."""
    lo, hi = cone_window(J, speeds, horizon)
    return Grid.covering(lo - padding, hi + padding, horizon, dx, dt)


def slice_l1_profile(samples, grid):
    """Spatial trapezoid L1 norm of every time level, shape ``(nt+1,)``."""
    return np.trapezoid(np.abs(samples), dx=grid.dx, axis=0)


@dataclass
class StabilityReport:
    data_distance: float
    sup_solution_distance: float
    k2_observed: float
    k2_predicted: float | None
    verdicts: tuple = ()
    distance_profile: list = field(default_factory=list)


def stability_experiment(spec, data, data_bar, grid, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                         D=None):
    """Run both data sets on ``grid`` and compare ``sum_i ||u_i - ubar_i||_{L1}`` in time."""
    dist0 = float(sum(datum_l1(_difference(d, db)) for d, db in zip(data, data_bar)))
    u, rep = picard_solve(spec, data, D, grid, tol, max_iter)
    ub, rep_bar = picard_solve(spec, data_bar, D, grid, tol, max_iter)
    verdicts = (rep.verdict, rep_bar.verdict)
    profile = sum(slice_l1_profile(a.samples - b.samples, grid) for a, b in zip(u, ub))
    sup = float(np.max(profile))
    k2_obs = 1.0 if dist0 == 0.0 else sup / dist0
    k2_pred = None
    if validate(spec).null_condition_holds:
        E0 = max(rep.E0, rep_bar.E0)
        lip = 4.0 * gamma(spec) * E0
        k2_pred = 1.0 / (1.0 - lip) if lip < 1.0 else None
    return StabilityReport(dist0, sup, k2_obs, k2_pred, verdicts,
                           [float(v) for v in profile])


def _difference(d, db):
    """Exact piecewise-linear ``d - db`` on the merged breakpoints."""
    xs = np.union1d(d.xs, db.xs)
    return InitialDatum(np.column_stack([xs, d(xs) - db(xs)]), allow_jumps=True)


def _index_range(master, lo, hi):
    j0 = max(0, math.floor((lo - master.x_start) / master.dx + 1e-9))
    j1 = min(master.nx, math.ceil((hi - master.x_start) / master.dx - 1e-9))
    return j0, j1


def _embed(samples, j0, master_shape):
    out = np.zeros(master_shape)
    nx1, nt1 = samples.shape
    out[j0:j0 + nx1, :nt1] = samples
    return out


def _inside_closed(D, X, T, tol=1e-9):
    """Node membership in ``D`` with a small allowance for rounding on the edges."""
    return ((T <= D.t_star + tol) & (X >= D.a + D.c_max * T - tol)
            & (X <= D.b + D.c_min * T + tol))


def _cones_disjoint(partition, speeds, horizon):
    ivs = sorted(partition)
    for left, right in zip(ivs, ivs[1:]):
        if not cone_slice(left, speeds, horizon)[1] < cone_slice(right, speeds, 0.0)[0]:
            return False
        if not cone_slice(left, speeds, 0.0)[1] < cone_slice(right, speeds, horizon)[0]:
            return False
    return True


def glue_solve(spec, partition, data, dx, dt, horizon=None, tol=DEFAULT_TOL,
               max_iter=DEFAULT_MAX_ITER, mismatch_tol=1e-6):
    """Solve on each partition interval and glue against a monolithic solve.

    If the forward cones of the pieces stay disjoint up to ``horizon`` the
    glued solution is the sum of the local solutions and the mismatch is the
    L1 distance to the monolithic solve over the whole window.  Otherwise a
    local solution is trusted only on its own determinacy triangle ``D_h``:
    the glued field takes local values on each ``D_h`` and monolithic values
    elsewhere, and the mismatch is ``max_h sum_i ||u_i^h - u_i||_{L1(D_h)}``.

    Returns
    -------
    fields : list of GridField
        Glued solution on the monolithic grid.
    mismatch : float

    Raises
    ------
    GluingError
        If the mismatch exceeds ``mismatch_tol``; ``location`` is the
        offending partition interval.
    """
    partition = sorted(tuple(float(v) for v in iv) for iv in partition)
    speeds = spec.speeds
    J = data_support(data)
    if any(not hi > lo for lo, hi in partition):
        raise StructuralError("partition intervals must have positive length")
    union = [list(partition[0])]
    for lo, hi in partition[1:]:
        if lo <= union[-1][1]:
            union[-1][1] = max(union[-1][1], hi)
        else:
            union.append([lo, hi])
    for d in data:
        covered = sum(datum_l1(d.restrict(lo, hi)) for lo, hi in union)
        if covered < datum_l1(d) * (1.0 - 1e-12):
            raise StructuralError("partition does not cover the data support")

    if horizon is None:
        D = triangle(J, speeds)
        master = Grid.for_triangle(D, dx, dt)
    else:
        D = None
        master = horizon_grid(J, speeds, horizon, dx, dt)
    mono, _ = picard_solve(spec, data, D, master, tol, max_iter)
    null_mode = validate(spec).null_condition_holds
    disjoint = horizon is not None and _cones_disjoint(partition, speeds, horizon)
    if disjoint:
        glued = [np.zeros(master.shape) for _ in range(spec.p)]
    else:
        glued = [f.samples.copy() for f in mono]
    X, T = np.meshgrid(master.x, master.t, indexing="ij")

    mismatch, worst = 0.0, None
    for lo, hi in partition:
        sub_data = [d.restrict(lo, hi) for d in data]
        mass = sum(datum_l1(d) for d in sub_data)
        if mass == 0.0:
            continue
        if null_mode and not contraction_budget(gamma(spec), mass).admissible:
            logger.warning("piece [%g, %g] exceeds the smallness budget", lo, hi)
        if disjoint:
            j0, j1 = _index_range(master, *cone_window((lo, hi), speeds, horizon))
            local, _ = picard_solve(spec, sub_data, None, master.subgrid(j0, j1), tol, max_iter)
            for i in range(spec.p):
                glued[i] += _embed(local[i].samples, j0, master.shape)
            continue
        Dh = triangle((lo, hi), speeds)
        xp, tp = Dh.apex
        j0, j1 = _index_range(master, min(lo, xp), max(hi, xp))
        nt = min(master.nt, math.ceil(tp / dt - 1e-9))
        local, _ = picard_solve(spec, sub_data, Dh, master.subgrid(j0, j1, nt), tol, max_iter)
        inside = _inside_closed(Dh, X, T)
        err = 0.0
        for i in range(spec.p):
            emb = _embed(local[i].samples, j0, master.shape)
            # nodes just outside D_h legitimately differ; keep them out of boundary cells
            gap = np.where(inside, emb - mono[i].samples, 0.0)
            err += l1_over_triangle(GridField(master, gap), Dh)
            glued[i] = np.where(inside, emb, glued[i])
        if err > mismatch:
            mismatch, worst = err, (lo, hi)

    if disjoint:
        mismatch = float(sum(np.sum(rectangle_weights(master) * np.abs(g - m.samples))
                             for g, m in zip(glued, mono)))
        worst = J
    fields = [GridField(master, g, name=f"u{i + 1}") for i, g in enumerate(glued)]
    if mismatch > mismatch_tol:
        raise GluingError(f"glued solution differs from the monolithic solve by {mismatch:.3g} "
                          f"on {worst}", location=worst)
    return fields, mismatch


@dataclass
class BlowUpReport:
    blew_up: bool
    t_detect: float | None
    growth_curve: list


def blowup_probe(spec, data, horizon, dx, dt, threshold=BLOWUP_THRESHOLD, padding=0.0,
                 record_every=1):
    """March the system along characteristics with Heun's method, without any smallness guard.

    Each step interpolates every component at the foot point ``x - c_i dt``
    and applies the explicit trapezoid (predictor-corrector) rule to the
    quadratic source.  Blow-up is flagged once ``max |u|`` exceeds
    ``threshold`` or stops being finite.
    """
    if len(data) != spec.p:
        raise StructuralError(f"expected {spec.p} initial data, got {len(data)}")
    J = data_support(data)
    grid = horizon_grid(J, spec.speeds, horizon, dx, dt, padding)
    x = grid.x
    A = spec.coupling
    U = np.stack([d(x) for d in data])
    curve = [(0.0, float(np.abs(U).max()))]

    def source(V):
        return quadratic_source(A, V[:, :, None])[:, :, 0]

    def at_feet(V, i):
        foot = x - spec.speeds[i] * dt
        return np.stack([np.interp(foot, x, V[j], left=0.0, right=0.0) for j in range(spec.p)])

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(grid.nt):
            t_next = (n + 1) * dt
            U_new = np.empty_like(U)
            F_foot = np.empty_like(U)
            U_foot = np.empty_like(U)
            for i in range(spec.p):
                Vi = at_feet(U, i)
                U_foot[i] = Vi[i]
                F_foot[i] = source(Vi)[i]
            U_pred = U_foot + dt * F_foot
            F_pred = source(U_pred)
            U_new = U_foot + 0.5 * dt * (F_foot + F_pred)
            U = U_new
            peak = float(np.max(np.abs(U))) if np.all(np.isfinite(U)) else math.inf
            if (n + 1) % record_every == 0 or not peak <= threshold:
                curve.append((t_next, peak))
            if not peak <= threshold:
                return BlowUpReport(True, t_next, curve)
    return BlowUpReport(False, None, curve)

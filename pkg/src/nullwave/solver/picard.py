"""Picard iteration on whole space-time fields, with contraction monitoring.

Iterate ``m`` solves, for every component,

    d_t v_i^m + c_i d_x v_i^m = f_i^m := -sum_jk A_ijk v_j^{m-1} v_k^{m-1},
    v_i^m(x, 0) = phi_i(x),

starting from free transport.  Residual norms are measured on the
interaction triangle when one is given, otherwise on the whole grid
rectangle (finite-horizon mode).
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..exceptions import PreconditionError, StructuralError
from ..fields import GridField, datum_l1, region_weights
from ..system import budget_sequence, contraction_budget, gamma, validate
from .transport import transport_solve

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e6
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 60


@dataclass
class IterationRecord:
    m: int
    alpha: list
    r_measured: float
    diff_triple: float
    ratio: float | None


@dataclass
class PicardReport:
    """Per-iteration residuals, analytic budgets and the final verdict.

    ``verdict`` is ``"converged"``, ``"max_iter"`` or ``"diverged"``.  The
    budget and contraction entries are ``None`` for resonant systems, where
    the analytic constants do not exist.
    """

    iterations: list = field(default_factory=list)
    budget: list | None = None
    verdict: str = "max_iter"
    k1_observed: float = 0.0
    E0: float = 0.0
    epsilons: list = field(default_factory=list)
    gamma: float | None = None
    contraction: object = None
    region: str = "triangle"
    diverged_at: int | None = None
    initial_guess: str = "free"

    @property
    def alpha_final(self):
        return self.iterations[-1].alpha if self.iterations else []

    @property
    def r_final(self):
        return self.iterations[-1].r_measured if self.iterations else 0.0

    def budget_violations(self, slack):
        """Iterations whose measured ``r_m`` exceeds the analytic budget plus ``slack``."""
        if self.budget is None:
            return []
        return [rec.m for rec in self.iterations
                if rec.r_measured > self.budget[rec.m] + slack]

    def max_ratio(self):
        ratios = [rec.ratio for rec in self.iterations[1:] if rec.ratio is not None]
        return max(ratios, default=0.0)

    def to_dict(self):
        out = asdict(self)
        out["contraction"] = None if self.contraction is None else asdict(self.contraction)
        return out


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("NULLWAVE_THREADS", "1") or 1)
    return max(1, threads)


def quadratic_source(coupling, V):
    """``f_i = -sum_jk A_ijk v_j v_k`` for a stack ``V`` of shape ``(p, nx+1, nt+1)``."""
    F = np.zeros_like(V)
    p = V.shape[0]
    for j in range(p):
        for k in range(j, p):
            w = coupling[:, j, k] if j == k else coupling[:, j, k] + coupling[:, k, j]
            if not np.any(w):
                continue
            prod = V[j] * V[k]
            for i in np.flatnonzero(w):
                F[i] -= w[i] * prod
    return F


def _solve_all(speeds, data, F, grid, pool):
    def one(i):
        src = None if F is None else GridField(grid, F[i])
        return transport_solve(speeds[i], data[i], src, grid, name=f"u{i + 1}").samples

    if pool is None:
        return np.stack([one(i) for i in range(len(data))])
    return np.stack(list(pool.map(one, range(len(data)))))


def _first_bad_level(V, F, W, scale, limit):
    """First time level holding a non-finite sample, a sample above
    ``DIVERGENCE_FACTOR * scale``, or where the running source mass passes ``limit``."""
    with np.errstate(over="ignore", invalid="ignore"):
        bad = ~np.isfinite(V) | (np.abs(V) > DIVERGENCE_FACTOR * scale)
        levels = bad.any(axis=(0, 1))
        if F is not None:
            mass = np.cumsum(np.nansum(W * np.abs(F), axis=(0, 1)))
            levels |= ~np.isfinite(mass) | (mass > limit)
    return int(np.argmax(levels)) if levels.any() else None


def picard_solve(spec, data, D, grid, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                 initial_guess="free", threads=None):
    """Run the fixed-point scheme.

    Parameters
    ----------
    spec : SystemSpec
    data : list of InitialDatum
        One datum per component.
    D : TriangleDomain or None
        Region on which residual norms are measured; ``None`` uses the
        whole grid rectangle.
    grid : Grid
    tol : float
        Stop once ``sum_i |||v_i^m - v_i^{m-1}||| <= tol * sum_i eps_i``.
    max_iter : int
    initial_guess : {"free", "zero"}
        Iterate 0: free transport of the data, or identically zero fields.

    Returns
    -------
    fields : list of GridField
    report : PicardReport
    """
    if len(data) != spec.p:
        raise StructuralError(f"expected {spec.p} initial data, got {len(data)}")
    if initial_guess not in ("free", "zero"):
        raise PreconditionError(f"unknown initial guess {initial_guess!r}")
    W = region_weights(grid, D)
    eps = [datum_l1(d) for d in data]
    E0 = float(sum(eps))
    report = PicardReport(E0=E0, epsilons=eps, region="triangle" if D is not None else "rectangle",
                          initial_guess=initial_guess)
    if validate(spec).null_condition_holds:
        report.gamma = gamma(spec)
        report.contraction = contraction_budget(report.gamma, E0)
        report.budget = [0.0]

    speeds = [float(c) for c in spec.speeds]
    scale = max([float(np.abs(d.vs).max()) for d in data] + [1.0])
    n_threads = min(_threads(threads), spec.p)
    pool = ThreadPoolExecutor(max_workers=n_threads) if n_threads > 1 else None
    try:
        if initial_guess == "free":
            V = _solve_all(speeds, data, None, grid, pool)
            data_gap = 0.0
        else:
            V = np.zeros((spec.p,) + grid.shape)
            data_gap = E0
        F_prev = np.zeros_like(V)
        prev_diff = None
        for m in range(1, max_iter + 1):
            F = quadratic_source(spec.coupling, V)
            with np.errstate(over="ignore", invalid="ignore"):
                alpha = [float(np.sum(W * np.abs(F[i]))) for i in range(spec.p)]
                diff = float(sum(np.sum(W * np.abs(F[i] - F_prev[i])) for i in range(spec.p)))
            diff += data_gap
            data_gap = 0.0
            r = float(sum(alpha))
            if diff == 0.0:
                ratio = 0.0
            elif prev_diff and m >= 2:
                ratio = diff / prev_diff
            else:
                ratio = None
            report.iterations.append(IterationRecord(m, alpha, r, diff, ratio))
            if report.budget is not None:
                report.budget = budget_sequence(report.gamma, E0, m)
            if not (math.isfinite(r) and math.isfinite(diff)) or r > DIVERGENCE_FACTOR * max(E0, 1e-300):
                report.verdict = "diverged"
                report.diverged_at = _first_bad_level(V, F, W, scale, DIVERGENCE_FACTOR * E0)
                logger.info("picard diverged at iteration %d (r=%g)", m, r)
                break
            with np.errstate(over="ignore", invalid="ignore"):
                V = _solve_all(speeds, data, F, grid, pool)
            prev_diff = diff
            F_prev = F
            if diff <= tol * E0:
                report.verdict = "converged"
                break
        else:
            report.verdict = "max_iter"
    finally:
        if pool is not None:
            pool.shutdown()

    if report.verdict == "diverged" and report.diverged_at is None:
        report.diverged_at = int(grid.nt)
    report.k1_observed = report.r_final / E0 if E0 > 0 else 0.0
    fields = [GridField(grid, V[i], name=f"u{i + 1}") for i in range(spec.p)]
    return fields, report

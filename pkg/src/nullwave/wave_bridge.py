"""Reduction of the 2x2 null system to a semilinear wave equation.

With ``u1 = w_t - c1 w_x`` and ``u2 = w_t - c2 w_x`` the system

    d_t u1 + c1 d_x u1 = alpha u1 u2,
    d_t u2 + c2 d_x u2 = beta  u1 u2

says ``w_tt - c_i^2 w_xx = (alpha or beta) u1 u2`` for both ``i``, which
is consistent only if ``c1**2 == c2**2`` and ``alpha == beta``.  With
``c1 = -c2 = 1`` this is ``w_tt - w_xx = w_t**2 - w_x**2``.

Only the gradient ``(w_t, w_x)`` is reconstructed; ``w`` itself is fixed
up to a constant and never needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import PreconditionError, StructuralError
from .fields import GridField


@dataclass(frozen=True)
class WaveReduction:
    c1: float
    c2: float
    alpha: float
    beta: float
    compatible: bool
    normalized: bool
    speed_defect: float
    coupling_defect: float


def check_compatibility(c1, c2, alpha, beta):
    if c1 == c2:
        raise PreconditionError("c1 == c2: the change of variables is not invertible")
    compatible = (c1 * c1 == c2 * c2) and (alpha == beta)
    return WaveReduction(c1, c2, alpha, beta, compatible,
                         normalized=compatible and c1 == -c2,
                         speed_defect=abs(c1 * c1 - c2 * c2),
                         coupling_defect=abs(alpha - beta))


def reconstruct_w_gradient(u1, u2, c1, c2):
    """Solve ``u1 = wt - c1 wx``, ``u2 = wt - c2 wx`` pointwise."""
    if c1 == c2:
        raise PreconditionError("c1 == c2: singular reconstruction")
    if u1.grid != u2.grid:
        raise StructuralError("u1 and u2 live on different grids")
    wx = (u1.samples - u2.samples) / (c2 - c1)
    wt = u1.samples + c1 * wx
    return GridField(u1.grid, wt, name="w_t"), GridField(u1.grid, wx, name="w_x")


@dataclass(frozen=True)
class WaveResidual:
    l1_residual: float
    compat_defect: float
    residual: GridField
    defect: GridField


def wave_residual(wt, wx, c1=1.0, c2=None, alpha=1.0):
    """L1 norms of the wave-equation residual and of ``d_t w_x - d_x w_t``.

    The residual is ``d_t wt - c1**2 d_x wx - alpha (wt - c1 wx)(wt - c2 wx)``,
    which for ``c1 = -c2 = 1``, ``alpha = 1`` is ``w_tt - w_xx - (w_t**2 - w_x**2)``.
    Derivatives are centred differences; the outermost ring of nodes is
    dropped and the sums are taken over the interior nodes.
    """
    c2 = -c1 if c2 is None else c2
    g = wt.grid
    if wx.grid != g:
        raise StructuralError("wt and wx live on different grids")
    if g.nx < 2 or g.nt < 2:
        raise StructuralError("grid too small for centred differences")
    T = wt.samples
    Xs = wx.samples
    dt_wt = (T[1:-1, 2:] - T[1:-1, :-2]) / (2 * g.dt)
    dx_wx = (Xs[2:, 1:-1] - Xs[:-2, 1:-1]) / (2 * g.dx)
    dt_wx = (Xs[1:-1, 2:] - Xs[1:-1, :-2]) / (2 * g.dt)
    dx_wt = (T[2:, 1:-1] - T[:-2, 1:-1]) / (2 * g.dx)
    ti, xi = T[1:-1, 1:-1], Xs[1:-1, 1:-1]
    R = dt_wt - c1 * c1 * dx_wx - alpha * (ti - c1 * xi) * (ti - c2 * xi)
    C = dt_wx - dx_wt
    cell = g.dx * g.dt
    pad = lambda a: np.pad(a, 1)
    return WaveResidual(float(np.sum(np.abs(R)) * cell), float(np.sum(np.abs(C)) * cell),
                        GridField(g, pad(R), name="wave_residual"),
                        GridField(g, pad(C), name="compat_defect"))

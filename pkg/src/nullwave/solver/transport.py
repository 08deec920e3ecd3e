"""Exact solution of ``d_t v + c d_x v = f`` along straight characteristics.

    v(x, t) = phi(x - c t) + int_0^t f(x - c (t - s), s) ds

The datum is evaluated exactly at the foot point.  The source integral is a
composite trapezoid rule in ``s`` with step ``dt``; ``f`` is sampled on the
grid time levels and linearly interpolated in ``x``.  When ``c*dt/dx`` is an
integer every sample point is a grid node and the trapezoid sum is
accumulated level by level; otherwise the sum is formed lag by lag.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import CoverageError, StructuralError
from ..fields import GridField

_INTEGER_SHIFT_TOL = 1e-9


def _shift(arr, k):
    """``out[j] = arr[j - k]`` along axis 0, zero where ``j - k`` is off-grid."""
    if k == 0:
        return arr.copy()
    out = np.zeros_like(arr)
    n = arr.shape[0]
    if abs(k) >= n:
        return out
    if k > 0:
        out[k:] = arr[:n - k]
    else:
        out[:n + k] = arr[-k:]
    return out


def _check_datum_coverage(d, grid):
    nz = np.flatnonzero(d.vs != 0)
    if nz.size == 0:
        return
    lo = d.xs[max(nz[0] - 1, 0)]
    hi = d.xs[min(nz[-1] + 1, d.xs.size - 1)]
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    if lo < grid.x_start - tol or hi > grid.x_end + tol:
        raise CoverageError(
            f"datum support [{lo}, {hi}] is not inside the grid window "
            f"[{grid.x_start}, {grid.x_end}]")


def _source_integral_integer(F, k, dt):
    """Trapezoid integrals along characteristics moving ``k`` cells per step."""
    nt = F.shape[1] - 1
    I = np.zeros_like(F)
    half = 0.5 * dt
    for n in range(nt):
        I[:, n + 1] = _shift(I[:, n] + half * F[:, n], k) + half * F[:, n + 1]
    return I


def _source_integral_general(F, shift_per_step, dt):
    """Literal composite trapezoid, one pass per lag ``n - m``."""
    nt = F.shape[1] - 1
    I = np.zeros_like(F)
    for lag in range(nt + 1):
        sigma = shift_per_step * lag
        k = int(np.floor(sigma))
        theta = sigma - k
        src = F[:, :nt + 1 - lag]
        S = (1.0 - theta) * _shift(src, k)
        if theta:
            S += theta * _shift(src, k + 1)
        S *= dt
        S[:, 0] *= 0.5
        if lag == 0:
            S *= 0.5
        I[:, lag:] += S
    I[:, 0] = 0.0
    return I


def transport_solve(c, d, f, grid, name="v"):
    """Solve one transport equation on ``grid``.

    Parameters
    ----------
    c : float
        Speed.
    d : InitialDatum
        Initial value, evaluated exactly at foot points.
    f : GridField or None
        Source on the same grid; ``None`` means free transport.  The source
        is taken to vanish off the grid.
    grid : Grid

    Returns
    -------
    GridField
    """
    _check_datum_coverage(d, grid)
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    V = d(X - c * T)
    if f is not None:
        if f.grid != grid:
            raise StructuralError("source field lives on a different grid")
        shift = c * grid.dt / grid.dx
        k = round(shift)
        if abs(shift - k) <= _INTEGER_SHIFT_TOL:
            V += _source_integral_integer(f.samples, int(k), grid.dt)
        else:
            V += _source_integral_general(f.samples, shift, grid.dt)
    return GridField(grid, V, name=name)

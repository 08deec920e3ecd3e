"""Discrete function spaces and L1 quadratures.

Initial data are continuous piecewise-linear functions with compact support,
so their L1 masses are exact.  Space-time fields live on a uniform
rectangular grid; ``samples[j, n]`` is the value at ``(x0 + j*dx, n*dt)``.
Integrals over the interaction triangle use corner-averaged cells weighted
by the exact area of each cell clipped to the triangle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import shapely

from .exceptions import CoverageError, DomainError, StructuralError

_SNAP = 1e-9


class InitialDatum:
    """Piecewise-linear function of ``x`` given by ``(x, value)`` breakpoints.

    The function is zero outside ``[x_first, x_last]``.  End values must be
    exactly zero unless ``allow_jumps`` is set, which is how the restriction
    of a datum to a sub-interval is represented (a jump to zero at the cut).
    """

    def __init__(self, breakpoints, allow_jumps=False):
        pts = np.asarray(breakpoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise StructuralError("breakpoints must be a list of at least two (x, value) pairs")
        xs, vs = pts[:, 0].copy(), pts[:, 1].copy()
        if not np.all(np.isfinite(pts)):
            raise StructuralError("breakpoints must be finite")
        if np.any(np.diff(xs) <= 0):
            raise StructuralError("breakpoint x coordinates must be strictly increasing")
        if not allow_jumps and (vs[0] != 0.0 or vs[-1] != 0.0):
            raise StructuralError("first and last breakpoint values must be exactly 0")
        xs.setflags(write=False)
        vs.setflags(write=False)
        self.xs = xs
        self.vs = vs
        self.allow_jumps = allow_jumps

    def __repr__(self):
        return f"InitialDatum({self.breakpoints!r})"

    def __eq__(self, other):
        return (isinstance(other, InitialDatum) and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.vs, other.vs))

    __hash__ = None

    @property
    def breakpoints(self):
        return [[float(x), float(v)] for x, v in zip(self.xs, self.vs)]

    @property
    def support(self):
        return float(self.xs[0]), float(self.xs[-1])

    @classmethod
    def hat(cls, a, b, height, peak=None):
        peak = 0.5 * (a + b) if peak is None else peak
        return cls([(a, 0.0), (peak, height), (b, 0.0)])

    @classmethod
    def ramp_indicator(cls, a, b, height, width):
        """Indicator of ``[a, b]`` smoothed by linear ramps of the given width."""
        return cls([(a, 0.0), (a + width, height), (b - width, height), (b, 0.0)])

    @classmethod
    def zero(cls, a=0.0, b=1.0):
        return cls([(a, 0.0), (b, 0.0)])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.allow_jumps:
            # a foot point rounded just past a jump end still belongs to the support
            lo, hi = self.xs[0], self.xs[-1]
            tol = 1e-12 * max(1.0, abs(lo), abs(hi))
            x = np.where((x < lo) & (x >= lo - tol), lo, x)
            x = np.where((x > hi) & (x <= hi + tol), hi, x)
        return np.interp(x, self.xs, self.vs, left=0.0, right=0.0)

    def l1(self):
        return datum_l1(self)

    def scaled(self, factor):
        return InitialDatum(np.column_stack([self.xs, factor * self.vs]), self.allow_jumps)

    def shifted(self, delta):
        return InitialDatum(np.column_stack([self.xs + delta, self.vs]), self.allow_jumps)

    def restrict(self, lo, hi):
        """Restriction to ``[lo, hi]``, with breakpoints inserted at the cut points."""
        xa, xb = self.support
        lo, hi = max(lo, xa), min(hi, xb)
        if not hi > lo:
            return InitialDatum.zero(lo, lo + 1.0) if math.isfinite(lo) else InitialDatum.zero()
        inner = (self.xs > lo) & (self.xs < hi)
        xs = np.concatenate([[lo], self.xs[inner], [hi]])
        return InitialDatum(np.column_stack([xs, self(xs)]), allow_jumps=True)


def eval_datum(d, x):
    return d(x)


def datum_l1(d):
    """Exact ``int |phi| dx``: trapezoids, split at sign changes."""
    h = np.diff(d.xs)
    v0, v1 = d.vs[:-1], d.vs[1:]
    a0, a1 = np.abs(v0), np.abs(v1)
    same = v0 * v1 >= 0
    denom = np.where(same, 1.0, a0 + a1)
    area = np.where(same, 0.5 * (a0 + a1) * h, 0.5 * h * (v0 * v0 + v1 * v1) / denom)
    return float(area.sum())


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[x_start, x_start + nx*dx] x [0, nt*dt]``.

    Node ``j`` sits at ``x0 + (j_offset + j) * dx``; grids cut out of a larger
    one keep its lattice origin ``x0`` so shared nodes have identical
    coordinates.
    """

    x0: float
    dx: float
    nx: int
    dt: float
    nt: int
    t0: float = 0.0
    j_offset: int = 0

    def __post_init__(self):
        if not (self.dx > 0 and self.dt > 0):
            raise StructuralError("dx and dt must be positive")
        if self.nx < 1 or self.nt < 0:
            raise StructuralError("need nx >= 1 and nt >= 0")
        if self.t0 != 0.0:
            raise StructuralError("grids start at t = 0")

    @classmethod
    def covering(cls, x_lo, x_hi, t_end, dx, dt):
        """Smallest grid with ``x0 = x_lo`` reaching ``x_hi`` and ``t_end``."""
        nx = max(1, math.ceil((x_hi - x_lo) / dx - _SNAP))
        nt = max(0, math.ceil(t_end / dt - _SNAP))
        return cls(float(x_lo), float(dx), int(nx), float(dt), int(nt))

    @classmethod
    def for_triangle(cls, D, dx, dt):
        xp, tp = D.apex
        return cls.covering(min(D.a, xp), max(D.b, xp), tp, dx, dt)

    @property
    def x(self):
        return self.x0 + self.dx * np.arange(self.j_offset, self.j_offset + self.nx + 1)

    @property
    def t(self):
        return self.dt * np.arange(self.nt + 1)

    @property
    def x_start(self):
        return self.x0 + self.j_offset * self.dx

    @property
    def x_end(self):
        return self.x0 + (self.j_offset + self.nx) * self.dx

    @property
    def t_end(self):
        return self.nt * self.dt

    @property
    def shape(self):
        return (self.nx + 1, self.nt + 1)

    def covers(self, x_lo, x_hi, t_hi):
        tol = _SNAP * max(1.0, abs(x_lo), abs(x_hi), abs(t_hi))
        return (self.x_start <= x_lo + tol and self.x_end >= x_hi - tol
                and self.t_end >= t_hi - tol)

    def covers_triangle(self, D):
        xp, tp = D.apex
        return self.covers(min(D.a, xp), max(D.b, xp), tp)

    def node_index(self, x):
        """Index of the node at ``x``; raises if ``x`` is not (close to) a node."""
        j = (x - self.x_start) / self.dx
        jr = round(j)
        if abs(j - jr) > 1e-6 or not 0 <= jr <= self.nx:
            raise StructuralError(f"x={x} is not a node of the grid")
        return int(jr)

    def level(self, t):
        """Nearest time level to ``t``."""
        n = round(t / self.dt)
        if t < -0.5 * self.dt or n > self.nt:
            raise DomainError(f"t={t} outside the grid time range [0, {self.t_end}]")
        return int(n)

    def subgrid(self, j0, j1, nt=None):
        """Grid on nodes ``j0..j1`` (inclusive) sharing this grid's node positions."""
        return Grid(self.x0, self.dx, j1 - j0, self.dt, self.nt if nt is None else nt,
                    j_offset=self.j_offset + j0)

    def refined(self, factor=2):
        return Grid(self.x_start, self.dx / factor, self.nx * factor, self.dt / factor,
                    self.nt * factor)


class GridField:
    """Samples of a scalar field on a :class:`Grid`.

    ``diverged_at`` records the first time level holding a non-finite sample,
    or ``None``.
    """

    def __init__(self, grid, samples, name="v"):
        samples = np.array(samples, dtype=float)
        if samples.shape != grid.shape:
            raise StructuralError(f"samples have shape {samples.shape}, grid needs {grid.shape}")
        self.grid = grid
        self.samples = samples
        self.name = name
        bad = ~np.isfinite(samples)
        self.diverged_at = int(np.argmax(bad.any(axis=0))) if bad.any() else None
        samples.setflags(write=False)

    def __repr__(self):
        return f"GridField(name={self.name!r}, grid={self.grid!r})"

    @property
    def diverged(self):
        return self.diverged_at is not None

    @classmethod
    def zeros(cls, grid, name="v"):
        return cls(grid, np.zeros(grid.shape), name)

    @classmethod
    def from_function(cls, grid, func, name="v"):
        X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
        return cls(grid, np.broadcast_to(func(X, T), grid.shape).astype(float), name)

    def with_samples(self, samples, name=None):
        return GridField(self.grid, samples, self.name if name is None else name)

    def __call__(self, x, t):
        """Bilinear interpolation, zero outside the grid."""
        g = self.grid
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        fx = (x - g.x_start) / g.dx
        ft = t / g.dt
        outside = (fx < -_SNAP) | (fx > g.nx + _SNAP) | (ft < -_SNAP) | (ft > g.nt + _SNAP)
        fx = np.clip(fx, 0, g.nx)
        ft = np.clip(ft, 0, g.nt)
        j = np.minimum(np.floor(fx).astype(int), max(g.nx - 1, 0))
        n = np.minimum(np.floor(ft).astype(int), max(g.nt - 1, 0))
        wx = fx - j
        wt = ft - n
        S = self.samples
        n1 = np.minimum(n + 1, g.nt)
        out = ((1 - wx) * (1 - wt) * S[j, n] + wx * (1 - wt) * S[j + 1, n]
               + (1 - wx) * wt * S[j, n1] + wx * wt * S[j + 1, n1])
        out = np.where(outside, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def level(self, n):
        return self.samples[:, n]

    def to_csv(self, path, stride=1):
        """Write ``x, t, value`` rows; the header names the component."""
        g = self.grid
        xs, ts = g.x, g.t
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "t", self.name])
            for n in range(0, g.nt + 1, stride):
                t = ts[n]
                for j in range(0, g.nx + 1, stride):
                    w.writerow([format(xs[j], ".17g"), format(t, ".17g"),
                                format(self.samples[j, n], ".17g")])


@dataclass(frozen=True)
class TripleNorm:
    source_part: float
    data_part: float

    @property
    def total(self):
        return self.source_part + self.data_part


def _cell_areas_in_triangle(grid, D):
    """Area of each grid cell intersected with ``D``, shape ``(nx, nt)``."""
    x = grid.x
    t = grid.t
    X0, T0 = np.meshgrid(x[:-1], t[:-1], indexing="ij")
    X1, T1 = X0 + grid.dx, T0 + grid.dt

    def inside(xx, tt):
        return ((tt >= 0) & (tt <= D.t_star)
                & (xx >= D.a + D.c_max * tt) & (xx <= D.b + D.c_min * tt))

    corners_in = [inside(X0, T0), inside(X1, T0), inside(X0, T1), inside(X1, T1)]
    full = corners_in[0] & corners_in[1] & corners_in[2] & corners_in[3]
    area = np.where(full, grid.dx * grid.dt, 0.0)

    # a cell with every corner beyond the same edge line misses D
    xs = (X0, X1, X0, X1)
    ts = (T0, T0, T1, T1)
    beyond_left = np.logical_and.reduce([x < D.a + D.c_max * t for x, t in zip(xs, ts)])
    beyond_right = np.logical_and.reduce([x > D.b + D.c_min * t for x, t in zip(xs, ts)])
    partial = ~full & ~beyond_left & ~beyond_right & (T0 <= D.t_star) & (T1 >= 0)
    if partial.any():
        tri = shapely.Polygon(D.vertices())
        boxes = shapely.box(X0[partial], T0[partial], X1[partial], T1[partial])
        area[partial] = shapely.area(shapely.intersection(boxes, tri))
    return area


@lru_cache(maxsize=32)
def triangle_weights(grid, D):
    """Node weights ``W`` with ``sum(W * g) ~ int_D g`` (corner-averaged clipped cells)."""
    if not grid.covers_triangle(D):
        raise CoverageError(f"grid {grid} does not cover the triangle {D}")
    area = _cell_areas_in_triangle(grid, D)
    W = np.zeros(grid.shape)
    W[:-1, :-1] += area
    W[1:, :-1] += area
    W[:-1, 1:] += area
    W[1:, 1:] += area
    W *= 0.25
    W.setflags(write=False)
    return W


@lru_cache(maxsize=32)
def rectangle_weights(grid):
    """2-d trapezoid weights over the whole grid rectangle."""
    wx = np.full(grid.nx + 1, grid.dx)
    wx[[0, -1]] *= 0.5
    wt = np.full(grid.nt + 1, grid.dt)
    if grid.nt == 0:
        wt[:] = 0.0
    else:
        wt[[0, -1]] *= 0.5
    W = np.outer(wx, wt)
    W.setflags(write=False)
    return W


def region_weights(grid, region):
    """Weights for ``D`` when ``region`` is a triangle, the whole grid when ``None``."""
    return rectangle_weights(grid) if region is None else triangle_weights(grid, region)


def _samples(v):
    return v.samples if isinstance(v, GridField) else np.asarray(v)


def l1_over_triangle(v, D):
    W = triangle_weights(v.grid, D)
    return float(np.sum(W * np.abs(v.samples)))


def l1_over_region(v, region):
    W = region_weights(v.grid, region)
    return float(np.sum(W * np.abs(_samples(v))))


def triple_norm(f, d, D):
    source = 0.0 if f is None else l1_over_triangle(f, D)
    return TripleNorm(source_part=source, data_part=datum_l1(d))


def product_l1_over_triangle(v, w, D):
    if v.grid != w.grid:
        raise StructuralError("fields live on different grids")
    W = triangle_weights(v.grid, D)
    return float(np.sum(W * np.abs(v.samples * w.samples)))


def l1_time_slice(v, t, window=None):
    """Trapezoid ``int_window |v(x, t)| dx`` at the grid level nearest ``t``."""
    g = v.grid
    n = g.level(t)
    vals = np.abs(v.samples[:, n])
    x = g.x
    if window is None:
        return float(np.trapezoid(vals, x))
    lo, hi = max(window[0], g.x_start), min(window[1], g.x_end)
    if not hi > lo:
        return 0.0
    inner = (x > lo) & (x < hi)
    xs = np.concatenate([[lo], x[inner], [hi]])
    return float(np.trapezoid(np.interp(xs, x, vals), xs))


def characteristic_l1(f, D, c, ny=None):
    """``int_J int_0^{tau_max(y)} |f(y + c s, s)| ds dy`` on characteristic coordinates.

    Time integration uses the grid levels with a partial last panel; the
    ``y`` integration is a trapezoid rule on ``ny`` points.
    """
    g = f.grid
    if not g.covers_triangle(D):
        raise CoverageError(f"grid {g} does not cover the triangle {D}")
    ny = ny or 2 * g.nx + 1
    y = np.linspace(D.a, D.b, ny)
    left = np.where(D.c_max != c, (y - D.a) / (D.c_max - c if D.c_max != c else 1.0), np.inf)
    right = np.where(c != D.c_min, (D.b - y) / (c - D.c_min if c != D.c_min else 1.0), np.inf)
    tau = np.minimum(left, right)
    inner = np.zeros(ny)
    prev = np.abs(f(y, 0.0))
    for n in range(1, g.nt + 1):
        s0, s1 = (n - 1) * g.dt, n * g.dt
        active = tau > s0
        if not active.any():
            break
        cur = np.abs(f(y + c * s1, s1))
        # partial panel up to tau, integrand linear on the panel
        end = np.minimum(tau, s1)
        frac = (end - s0) / g.dt
        v_end = prev + frac * (cur - prev)
        inner += np.where(active, 0.5 * (prev + v_end) * (end - s0), 0.0)
        prev = cur
    return float(np.trapezoid(inner, y))

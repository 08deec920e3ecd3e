"""Characteristic geometry: the interaction triangle and its time windows.

For data supported in ``J = [a, b]`` the interaction triangle is

    D = {(x, t) : x - c_i t in J for every i}
      = {0 <= t <= T*, a + c_max t <= x <= b + c_min t},

with apex time ``T* = (b - a) / (c_max - c_min)``.  ``D`` is closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, PreconditionError, StructuralError


@dataclass(frozen=True)
class TriangleDomain:
    a: float
    b: float
    c_min: float
    c_max: float

    def __post_init__(self):
        if not self.b > self.a:
            raise StructuralError(f"need a < b, got [{self.a}, {self.b}]")
        if not self.c_max > self.c_min:
            raise PreconditionError("degenerate domain: all speeds equal, T* undefined")

    @property
    def t_star(self):
        return (self.b - self.a) / (self.c_max - self.c_min)

    @property
    def apex(self):
        t = self.t_star
        return (self.a + self.c_max * t, t)

    @property
    def area(self):
        return 0.5 * (self.b - self.a) * self.t_star

    def slice(self, t):
        """Spatial section ``[a + c_max t, b + c_min t]`` for ``0 <= t <= T*``."""
        if t < 0 or t > self.t_star:
            raise DomainError(f"t={t} outside [0, T*={self.t_star}]")
        return (self.a + self.c_max * t, self.b + self.c_min * t)

    def vertices(self):
        return [(self.a, 0.0), (self.b, 0.0), self.apex]


@dataclass(frozen=True)
class CharacteristicWindow:
    """``K = [0, tau_max]``: times the ``i``-th characteristic from ``y`` spends in ``D``."""

    tau_max: float
    y: float
    component: int


def triangle(J, speeds):
    a, b = (float(v) for v in J)
    speeds = np.asarray(speeds, dtype=float)
    if speeds.size < 1:
        raise StructuralError("need at least one speed")
    return TriangleDomain(a, b, float(speeds.min()), float(speeds.max()))


def contains(D, x, t):
    """Closed membership test; vectorised over ``x`` and ``t``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    inside = ((t >= 0) & (t <= D.t_star)
              & (x >= D.a + D.c_max * t) & (x <= D.b + D.c_min * t))
    return bool(inside) if inside.ndim == 0 else inside


def k_window(y, i, D, speeds):
    if not D.a <= y <= D.b:
        raise DomainError(f"foot point y={y} outside J=[{D.a}, {D.b}]")
    ci = float(speeds[i])
    left = (y - D.a) / (D.c_max - ci) if D.c_max != ci else math.inf
    right = (D.b - y) / (ci - D.c_min) if ci != D.c_min else math.inf
    return CharacteristicWindow(tau_max=min(left, right), y=float(y), component=int(i))


def cone_slice(J, speeds, t):
    """Interval that contains the support of every component at time ``t``."""
    if t < 0:
        raise DomainError("t must be >= 0")
    a, b = (float(v) for v in J)
    speeds = np.asarray(speeds, dtype=float)
    return (a + float(speeds.min()) * t, b + float(speeds.max()) * t)


def cone_window(J, speeds, horizon):
    """Spatial window containing every cone slice for ``0 <= t <= horizon``."""
    lo0, hi0 = cone_slice(J, speeds, 0.0)
    lo1, hi1 = cone_slice(J, speeds, horizon)
    return (min(lo0, lo1), max(hi0, hi1))

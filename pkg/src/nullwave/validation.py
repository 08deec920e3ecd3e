"""Input checks shared by the estimator wrapper and the CLI."""

from __future__ import annotations

import math
from numbers import Real

import numpy as np

from .exceptions import StructuralError
from .fields import InitialDatum


def check_positive(value, name):
    """Return ``value`` as a finite float > 0 or raise ``StructuralError``."""
    if isinstance(value, bool) or not isinstance(value, Real):
        raise StructuralError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise StructuralError(f"{name} must be finite and > 0, got {value!r}")
    return value


def check_speeds(speeds):
    arr = np.asarray(speeds, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise StructuralError("speeds must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise StructuralError("speeds must be finite")
    return arr


def check_triplets(triplets, p):
    """Validate sparse ``[i, j, k, value]`` entries with 1-based indices."""
    out = []
    for n, entry in enumerate(triplets):
        if len(entry) != 4:
            raise StructuralError(f"coupling[{n}]: expected [i, j, k, value], got {entry!r}")
        *idx, value = entry
        for name, v in zip("ijk", idx):
            if isinstance(v, bool) or int(v) != v or not 1 <= int(v) <= p:
                raise StructuralError(f"coupling[{n}]: index {name}={v!r} outside [1, {p}]")
        if not math.isfinite(float(value)):
            raise StructuralError(f"coupling[{n}]: value must be finite")
        out.append((int(idx[0]), int(idx[1]), int(idx[2]), float(value)))
    return out


def check_datum(d, allow_jumps=False):
    """Coerce a breakpoint list or ``InitialDatum`` into an ``InitialDatum``."""
    if isinstance(d, InitialDatum):
        return d
    arr = np.asarray(d, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise StructuralError("a datum is a list of at least two [x, value] breakpoints")
    return InitialDatum(arr, allow_jumps=allow_jumps)


def check_data(data, p):
    data = [check_datum(d) for d in data]
    if len(data) != p:
        raise StructuralError(f"expected {p} initial data, got {len(data)}")
    return data


def check_points(points):
    """Evaluation points as a float array of shape ``(n, 2)`` holding ``(x, t)``."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.size == 2:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise StructuralError(f"points must have shape (n, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError("points must be finite")
    return arr

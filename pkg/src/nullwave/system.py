"""System description and the analytic constants of the contraction argument.

The system is

    d_t u_i + c_i d_x u_i + sum_{j,k} A_ijk u_j u_k = 0,    i = 0..p-1,

stored as a vector of speeds ``c`` and a dense coupling tensor ``A`` that is
symmetric in its last two indices.  Indices are 0-based in the Python API;
the JSON configuration and reports use 1-based indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import PreconditionError, StructuralError

#: symmetry tolerance accepted when loading sparse triplets
SYMMETRY_TOL = 1e-14


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Speeds ``c_i`` and coupling tensor ``A_ijk`` of a semilinear system.

    Parameters
    ----------
    speeds : array_like, shape (p,)
        Characteristic speeds.
    coupling : array_like, shape (p, p, p)
        Quadratic coupling, ``coupling[i, j, k] = A_ijk``.  Must satisfy
        ``A_ijk == A_ikj`` exactly.
    """

    speeds: np.ndarray
    coupling: np.ndarray
    p: int = field(init=False)

    def __post_init__(self):
        speeds = _readonly(np.atleast_1d(self.speeds))
        coupling = _readonly(self.coupling)
        if speeds.ndim != 1 or speeds.size < 1:
            raise StructuralError("speeds must be a non-empty 1-d sequence")
        p = speeds.size
        if coupling.shape != (p, p, p):
            raise StructuralError(
                f"coupling has shape {coupling.shape}, expected {(p, p, p)}")
        if not np.all(np.isfinite(speeds)):
            raise StructuralError("speeds must be finite")
        if not np.all(np.isfinite(coupling)):
            raise StructuralError("coupling must be finite")
        if not np.array_equal(coupling, coupling.transpose(0, 2, 1)):
            raise StructuralError("coupling must satisfy A_ijk == A_ikj")
        object.__setattr__(self, "speeds", speeds)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_triplets(cls, p, speeds, triplets, one_based=True):
        """Build a spec from sparse ``(i, j, k, value)`` entries.

        Entries not listed are zero.  The assembled tensor must already be
        symmetric in ``(j, k)`` within ``SYMMETRY_TOL``; it is then averaged
        with its transpose.  Asymmetric input is rejected, never repaired.
        """
        p = int(p)
        if p < 1:
            raise StructuralError("p must be >= 1")
        if len(speeds) != p:
            raise StructuralError(f"expected {p} speeds, got {len(speeds)}")
        offset = 1 if one_based else 0
        A = np.zeros((p, p, p))
        for entry in triplets:
            if len(entry) != 4:
                raise StructuralError(f"coupling entry {entry!r} is not [i, j, k, value]")
            i, j, k = (int(e) - offset for e in entry[:3])
            if not all(0 <= n < p for n in (i, j, k)):
                raise StructuralError(
                    f"coupling entry {list(entry)!r} has an index outside [{offset}, {p - 1 + offset}]")
            A[i, j, k] += float(entry[3])
        At = A.transpose(0, 2, 1)
        defect = float(np.max(np.abs(A - At))) if A.size else 0.0
        if defect > SYMMETRY_TOL:
            bad = np.argwhere(np.abs(A - At) > SYMMETRY_TOL)[0] + offset
            raise StructuralError(
                f"coupling is not symmetric in its last two indices "
                f"(defect {defect:.3g} at {tuple(int(b) for b in bad)})")
        return cls(speeds, 0.5 * (A + At))

    def scaled(self, factor):
        return SystemSpec(self.speeds, factor * self.coupling)

    def shifted(self, sigma):
        """Same coupling, every speed moved by ``sigma``."""
        return SystemSpec(self.speeds + sigma, self.coupling)

    def to_triplets(self, one_based=True):
        offset = 1 if one_based else 0
        return [[int(i) + offset, int(j) + offset, int(k) + offset, float(self.coupling[i, j, k])]
                for i, j, k in np.argwhere(self.coupling != 0)]


@dataclass(frozen=True)
class ValidationReport:
    symmetric: bool
    null_condition_holds: bool
    resonant_triples: list
    speed_multiplicities: dict


@dataclass(frozen=True)
class ContractionBudget:
    """Smallness check and fixed points of ``r -> gamma * (E0 + r)**2``.

    ``r_star`` and ``r_max`` are ``None`` when undefined (inadmissible data,
    or ``r_max`` for a decoupled system).  ``lipschitz`` is the constant
    ``4 * gamma * E0`` obtained with the choice ``r = E0``;
    ``lipschitz_at_r_star`` is ``2 * gamma * (E0 + r_star)``.
    """

    gamma: float
    E0: float
    admissible: bool
    r_star: float | None
    r_max: float | None
    lipschitz: float
    lipschitz_at_r_star: float | None


def _speeds_equal(ci, cj, tol):
    return abs(ci - cj) <= tol


def validate(spec, speed_equality_tolerance=0.0):
    """Scan the coupling for resonant triples (nonzero ``A_ijk`` with ``c_j == c_k``)."""
    A = np.asarray(spec.coupling)
    c = np.asarray(spec.speeds)
    p = c.size
    if A.shape != (p, p, p):
        raise StructuralError(f"coupling has shape {A.shape}, expected {(p, p, p)}")
    symmetric = bool(np.array_equal(A, A.transpose(0, 2, 1)))
    resonant = [(int(i), int(j), int(k)) for i, j, k in np.argwhere(A != 0)
                if _speeds_equal(c[j], c[k], speed_equality_tolerance)]

    groups = {}
    for idx, ci in enumerate(c):
        for key in groups:
            if _speeds_equal(ci, key, speed_equality_tolerance):
                groups[key].append(idx)
                break
        else:
            groups[float(ci)] = [idx]
    return ValidationReport(symmetric=symmetric, null_condition_holds=not resonant,
                            resonant_triples=resonant, speed_multiplicities=groups)


def gamma(spec):
    """``max`` over speed-distinct ``(j, k)`` of ``sum_i |A_ijk| / |c_j - c_k|``."""
    report = validate(spec)
    if not report.null_condition_holds:
        raise PreconditionError(
            f"gamma is undefined for resonant couplings {report.resonant_triples}")
    c = spec.speeds
    absA = np.abs(spec.coupling).sum(axis=0)
    best = 0.0
    p = spec.p
    for j in range(p):
        for k in range(p):
            if c[j] != c[k]:
                best = max(best, absA[j, k] / abs(c[j] - c[k]))
    return float(best)


def contraction_budget(gamma, E0):
    if gamma < 0 or E0 < 0:
        raise PreconditionError("gamma and E0 must be non-negative")
    gamma = float(gamma)
    E0 = float(E0)
    lipschitz = 4.0 * gamma * E0
    admissible = lipschitz < 1.0
    if gamma == 0.0:
        return ContractionBudget(gamma, E0, True, 0.0, None, 0.0, 0.0)
    if not admissible:
        return ContractionBudget(gamma, E0, False, None, None, lipschitz, None)
    disc = math.sqrt(1.0 - 4.0 * gamma * E0)
    r_max = (1.0 - 2.0 * gamma * E0 + disc) / (2.0 * gamma)
    # product of the roots is E0**2; avoids cancellation in the small root
    r_star = E0 * E0 / r_max
    return ContractionBudget(gamma, E0, True, r_star, r_max, lipschitz,
                             2.0 * gamma * (E0 + r_star))


def budget_sequence(gamma, E0, m):
    """Analytic majorants ``[r_0, ..., r_m]`` with ``r_0 = 0``."""
    if m < 0:
        raise PreconditionError("m must be >= 0")
    r = [0.0]
    for _ in range(m):
        try:
            r.append(gamma * (E0 + r[-1]) ** 2)
        except OverflowError:
            # inadmissible data: the majorants grow doubly exponentially
            r.append(math.inf)
    return r

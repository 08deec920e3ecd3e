"""Estimator-style front end to the Picard solver.

``TartarSolver`` follows the scikit-learn conventions: constructor
arguments are stored verbatim, ``fit`` does the work and sets trailing
underscore attributes, ``get_params``/``set_params`` come from
``BaseEstimator``.

Examples
--------
>>> from nullwave.estimator import TartarSolver
>>> hat = [[0.0, 0.0], [0.5, 0.25], [1.0, 0.0]]
>>> coupling = [[1, 1, 2, -0.5], [1, 2, 1, -0.5], [2, 1, 2, -0.5], [2, 2, 1, -0.5]]
>>> est = TartarSolver(speeds=(1.0, -1.0), coupling=coupling, dx=1e-2, dt=1e-2)
>>> est.fit([hat, hat]).report_.verdict
'converged'
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import StructuralError
from .fields import Grid
from .geometry import triangle
from .solver.experiments import data_support, horizon_grid
from .solver.picard import DEFAULT_MAX_ITER, DEFAULT_TOL, picard_solve
from .system import SystemSpec
from .validation import check_data, check_points, check_positive, check_speeds, check_triplets


class TartarSolver(BaseEstimator):
    """Solve ``d_t u_i + c_i d_x u_i + sum_jk A_ijk u_j u_k = 0`` for given data.

    Parameters
    ----------
    speeds : sequence of float
    coupling : sequence of [i, j, k, value]
        Sparse coupling entries, 1-based; symmetrized on load.
    dx, dt : float
    horizon : float or None
        ``None`` solves on the interaction triangle of the data support;
        a number solves on a rectangle covering the propagation cone up to
        that time.
    padding : float
        Extra spatial margin for the horizon rectangle.
    tol, max_iter : float, int
        Picard stopping rule.
    initial_guess : {"free", "zero"}

    Attributes
    ----------
    system_ : SystemSpec
    domain_ : TriangleDomain or None
    grid_ : Grid
    fields_ : list of GridField
    report_ : PicardReport
    n_components_ : int
    """

    def __init__(self, speeds=(1.0, -1.0), coupling=(), dx=1e-3, dt=1e-3, horizon=None,
                 padding=0.0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, initial_guess="free"):
        self.speeds = speeds
        self.coupling = coupling
        self.dx = dx
        self.dt = dt
        self.horizon = horizon
        self.padding = padding
        self.tol = tol
        self.max_iter = max_iter
        self.initial_guess = initial_guess

    def fit(self, X, y=None):
        """Run the solver.

        Parameters
        ----------
        X : sequence
            One initial datum per component, each an ``InitialDatum`` or a
            list of ``[x, value]`` breakpoints.
        y : ignored
        """
        speeds = check_speeds(self.speeds)
        p = speeds.size
        spec = SystemSpec.from_triplets(p, speeds, check_triplets(self.coupling, p))
        data = check_data(X, p)
        dx = check_positive(self.dx, "dx")
        dt = check_positive(self.dt, "dt")
        J = data_support(data)
        if self.horizon is None:
            D = triangle(J, speeds)
            grid = Grid.for_triangle(D, dx, dt)
        else:
            D = None
            grid = horizon_grid(J, speeds, check_positive(self.horizon, "horizon"), dx, dt,
                                float(self.padding))
        self.fields_, self.report_ = picard_solve(spec, data, D, grid, self.tol, self.max_iter,
                                                  self.initial_guess)
        self.system_, self.domain_, self.grid_ = spec, D, grid
        self.n_components_ = p
        return self

    def predict(self, X):
        """Evaluate the solution at points ``X`` of shape ``(n, 2)`` holding ``(x, t)``.

        Returns an array of shape ``(n, p)``; points off the grid read as zero.
        """
        check_is_fitted(self, "fields_")
        pts = check_points(X)
        return np.column_stack([f(pts[:, 0], pts[:, 1]) for f in self.fields_])

    def transform(self, X):
        """Alias of :meth:`predict`, so the estimator can sit in a pipeline."""
        return self.predict(X)

    def score(self, X, y):
        """Negative mean absolute error of :meth:`predict` against ``y``."""
        y = np.asarray(y, dtype=float)
        pred = self.predict(X)
        if y.shape != pred.shape:
            raise StructuralError(f"y must have shape {pred.shape}, got {y.shape}")
        return -float(np.mean(np.abs(pred - y)))

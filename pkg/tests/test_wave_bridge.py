import numpy as np
import pytest
from hypothesis import given, strategies as st

from nullwave import (Grid, GridField, InitialDatum, PreconditionError, StructuralError,
                      check_compatibility, picard_solve, reconstruct_w_gradient, triangle,
                      wave_residual)

from conftest import alpha_beta_system


def test_compatibility_examples():
    r = check_compatibility(1, -1, 1, 1)
    assert r.compatible and r.normalized
    assert not check_compatibility(1, -2, 1, 1).compatible
    r = check_compatibility(1, -1, 1, 2)
    assert not r.compatible and r.coupling_defect == 1
    with pytest.raises(PreconditionError):
        check_compatibility(1, 1, 1, 1)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_compatible_implies_equal_magnitudes(c1, c2, a, b):
    if c1 == c2:
        return
    r = check_compatibility(c1, c2, a, b)
    if r.compatible:
        assert abs(c1) == abs(c2)


G = Grid.covering(0.0, 1.0, 0.5, 0.05, 0.05)


def test_reconstruction_examples():
    g = GridField.from_function(G, lambda x, t: np.sin(x + t))
    wt, wx = reconstruct_w_gradient(g, g, 1.0, -1.0)
    assert np.all(wx.samples == 0) and np.array_equal(wt.samples, g.samples)
    neg = g.with_samples(-g.samples)
    wt, wx = reconstruct_w_gradient(g, neg, 1.0, -1.0)
    # u1 - u2 = 2g, c2 - c1 = -2
    assert np.allclose(wx.samples, -g.samples) and np.allclose(wt.samples, 0.0)
    z = GridField.zeros(G)
    wt, wx = reconstruct_w_gradient(z, z, 1.0, -1.0)
    assert not wt.samples.any() and not wx.samples.any()


def test_reconstruction_errors():
    z = GridField.zeros(G)
    with pytest.raises(PreconditionError):
        reconstruct_w_gradient(z, z, 1.0, 1.0)
    with pytest.raises(StructuralError):
        reconstruct_w_gradient(z, GridField.zeros(Grid.covering(0, 1, 0.5, 0.1, 0.1)), 1.0, -1.0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_round_trip(c1, c2, p, q):
    if abs(c1 - c2) < 1e-3:
        return
    wt0 = GridField.from_function(G, lambda x, t: p * np.cos(x - t) + q)
    wx0 = GridField.from_function(G, lambda x, t: q * np.sin(2 * x) * t - p)
    u1 = wt0.with_samples(wt0.samples - c1 * wx0.samples)
    u2 = wt0.with_samples(wt0.samples - c2 * wx0.samples)
    wt, wx = reconstruct_w_gradient(u1, u2, c1, c2)
    scale = 1 + abs(c1) + abs(c2)
    assert np.max(np.abs(wt.samples - wt0.samples)) <= 1e-12 * scale / abs(c1 - c2) * 10
    assert np.max(np.abs(wx.samples - wx0.samples)) <= 1e-12 * scale / abs(c1 - c2) * 10


def test_zero_fields_have_zero_residual():
    z = GridField.zeros(G)
    res = wave_residual(z, z)
    assert res.l1_residual == 0.0 and res.compat_defect == 0.0


def test_residual_grid_checks():
    tiny = Grid(0.0, 0.1, 1, 0.1, 1)
    z = GridField.zeros(tiny)
    with pytest.raises(StructuralError):
        wave_residual(z, z)
    with pytest.raises(StructuralError):
        wave_residual(GridField.zeros(G), GridField.zeros(Grid.covering(0, 1, 0.5, 0.1, 0.1)))


def _exact_gradient(grid):
    """``w = -log(F(x - t) + G(x + t))`` solves ``w_tt - w_xx = w_t^2 - w_x^2``."""
    F = lambda s: 2 + np.sin(s)
    dF = np.cos
    Gf = lambda s: 1 + 0.5 * np.cos(2 * s)
    dG = lambda s: -np.sin(2 * s)
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    S = F(X - T) + Gf(X + T)
    wt = -(-dF(X - T) + dG(X + T)) / S
    wx = -(dF(X - T) + dG(X + T)) / S
    return GridField(grid, wt), GridField(grid, wx)


def test_exact_solution_residual_second_order():
    errs = []
    for h in (0.02, 0.01):
        g = Grid.covering(0.0, 1.0, 1.0, h, h)
        res = wave_residual(*_exact_gradient(g))
        errs.append((res.l1_residual, res.compat_defect))
    assert errs[1][0] / errs[0][0] == pytest.approx(0.25, abs=0.02)
    assert errs[1][1] / errs[0][1] == pytest.approx(0.25, abs=0.02)


def _solver_residual(alpha, beta, dx, dt):
    spec = alpha_beta_system(alpha, beta)
    data = [InitialDatum.hat(0, 1, 0.25)] * 2
    D = triangle((0, 1), (1, -1))
    u, _ = picard_solve(spec, data, D, Grid.for_triangle(D, dx, dt))
    wt, wx = reconstruct_w_gradient(u[0], u[1], 1.0, -1.0)
    return wave_residual(wt, wx, 1.0, -1.0, alpha)


def test_compatible_residual_first_order():
    coarse = _solver_residual(1, 1, 8e-3, 4e-3)
    fine = _solver_residual(1, 1, 4e-3, 2e-3)
    assert 0.4 <= fine.l1_residual / coarse.l1_residual <= 0.7
    assert fine.compat_defect < coarse.compat_defect


def test_incompatible_residual_stays():
    coarse = _solver_residual(1, 2, 8e-3, 4e-3)
    fine = _solver_residual(1, 2, 4e-3, 2e-3)
    assert fine.l1_residual >= 0.5 * coarse.l1_residual

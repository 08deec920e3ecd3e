import numpy as np
import pytest

from nullwave import (Grid, GridField, InitialDatum, PreconditionError, estimate_sweep,
                      indicator_bilinear_example, triangle, verify_bilinear, verify_lemma1,
                      verify_norm_equivalence)
from nullwave.solver.estimates import random_datum, random_source

D01 = triangle((0, 1), (1, -1))


@pytest.fixture(scope="module")
def grid():
    return Grid.for_triangle(D01, 1e-3, 1e-3)


def test_lemma1_free_hat(grid):
    hat = InitialDatum.hat(0, 1, 1.0)
    chk = verify_lemma1(None, hat, 1.0, D01, grid)
    assert chk.rhs == pytest.approx(0.25)
    assert chk.lhs <= 0.25 and chk.holds


def test_lemma1_zero(grid):
    chk = verify_lemma1(None, InitialDatum.zero(), -1.0, D01, grid)
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.holds


def test_bilinear_indicator_example():
    chk = indicator_bilinear_example(1e-3, 1e-3)
    assert chk.lhs == pytest.approx(0.25, abs=1e-2)
    assert chk.rhs == pytest.approx(0.5, abs=1e-2)
    assert chk.holds


def test_bilinear_zero_factor(grid):
    chk = verify_bilinear(None, InitialDatum.zero(), 1.0, None, InitialDatum.hat(0, 1, 1.0), -1.0,
                          D01, grid)
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.holds


def test_bilinear_equal_speeds_rejected(grid):
    hat = InitialDatum.hat(0, 1, 1.0)
    with pytest.raises(PreconditionError):
        verify_bilinear(None, hat, 1.0, None, hat, 1.0, D01, grid)


def test_norm_equivalence_free(grid):
    chk = verify_norm_equivalence(None, InitialDatum.hat(0, 1, 1.0), 1.0, D01, grid)
    assert chk.lhs == 0.0 and chk.rhs == 0.5 and chk.holds


def test_norm_equivalence_unit_source(grid):
    one = GridField.from_function(grid, lambda x, t: np.ones_like(x))
    chk = verify_norm_equivalence(one, InitialDatum.hat(0, 1, 1.0), 1.0, D01, grid)
    assert chk.extra["residual_l1"] == pytest.approx(0.25, abs=1e-6)
    assert chk.extra["triple"] == pytest.approx(0.75, abs=1e-6)
    assert chk.extra["identity_gap"] <= 1e-12


def test_random_generators_are_seeded(grid):
    a = random_datum(np.random.default_rng(5), 0, 1)
    b = random_datum(np.random.default_rng(5), 0, 1)
    assert a == b
    assert a.support[1] - a.support[0] >= 0.2 - 1e-12
    s1 = random_source(np.random.default_rng(5), grid, D01)
    s2 = random_source(np.random.default_rng(5), grid, D01)
    assert np.array_equal(s1.samples, s2.samples)


def test_small_sweep_holds():
    res = estimate_sweep(7, n_bilinear=10, n_lemma=5, dx=4e-3, dt=4e-3)
    assert len(res["bilinear"]) == 10 and len(res["lemma1"]) == 5
    assert all(r["holds"] for r in res["lemma1"])
    assert all(r["holds"] for r in res["norm_equivalence"])
    assert estimate_sweep(7, 10, 5, 4e-3, 4e-3) == res

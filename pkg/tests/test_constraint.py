import numpy as np
import pytest

from kfunc import constraint as cons
from kfunc.errors import DomainError, RangeViolation, ZeroDenominator, ZeroK
from kfunc.grid import Field, Grid, random_positive_field, random_signed_field

import oracles

ALL = cons.builtin_constraints()
IDS = [c.name for c in ALL]


@pytest.mark.parametrize("c", ALL, ids=IDS)
def test_invertibility(c):
    assert cons.invertibility_error(c, Grid(200)) <= 1e-10


def test_non_invertible_stub_is_detected():
    bad = cons.ConstraintSpec("square-all-reals", f=lambda x, r: r * r, f_prime=lambda x, r: 2 * r,
                              f_inv=lambda x, y: np.sqrt(y))
    assert cons.invertibility_error(bad, Grid(50)) > 1e-3


def test_k_value_examples(grid, affine):
    assert cons.k_value(grid.constant(2.0), cons.identity()) == 2.0
    assert cons.k_value(grid.constant(2.0), cons.power(2)) == pytest.approx(4.0, rel=1e-15)
    assert cons.k_value(affine, cons.identity()) == pytest.approx(1.0, abs=1e-12)


def test_k_value_domain_violation_reports_node(grid):
    rho = Field(grid, np.where(np.arange(200) == 17, -1.0, 1.0))
    with pytest.raises(DomainError, match="node 17") as info:
        cons.k_value(rho, cons.power(2))
    assert info.value.node == 17


def test_extend_examples(grid, affine):
    np.testing.assert_allclose(cons.extend(grid.constant(2.0), cons.identity(), 1.0).values, 1.0, rtol=1e-15)
    np.testing.assert_allclose(cons.extend(affine, cons.identity(), 1.0).values, affine.values, atol=1e-12)
    np.testing.assert_allclose(cons.extend(grid.constant(2.0), cons.power(2), 1.0).values, 1.0, rtol=1e-14)


def test_extend_errors(grid, sine):
    with pytest.raises(ZeroDenominator):
        alternating = Field(grid, np.where(np.arange(200) % 2 == 0, 1.0, -1.0))
        cons.extend(alternating, cons.identity(), 1.0)
    with pytest.raises(RangeViolation):
        cons.extend(grid.constant(2.0), cons.power(2), -1.0)
    with pytest.raises(ZeroK):
        cons.extend(grid.constant(2.0), cons.identity(), 0.0)


@pytest.mark.parametrize("c", ALL, ids=IDS)
@pytest.mark.parametrize("seed", range(3))
def test_extension_properties(c, seed):
    grid = Grid(200)
    rng = np.random.default_rng(seed)
    rho = random_positive_field(grid, rng)
    K = cons.k_value(rho, c) * rng.uniform(0.5, 2.0)
    once = cons.extend(rho, c, K)
    assert abs(cons.k_value(once, c) - K) <= 1e-12 * max(1, abs(K))
    np.testing.assert_allclose(cons.extend(once, c, K).values, once.values, atol=1e-12)
    for lam in (0.5, 2.0):
        moved = cons.fiber_scale(rho, c, lam)
        np.testing.assert_allclose(cons.extend(moved, c, K).values, once.values, atol=1e-10)


@pytest.mark.parametrize("c", ALL, ids=IDS)
def test_deformed_path_stays_on_constraint(c):
    grid = Grid(200)
    rng = np.random.default_rng(9)
    rho = random_positive_field(grid, rng)
    K = cons.k_value(rho, c)
    d = random_signed_field(grid, rng, amplitude=0.1)
    for eps in np.linspace(-1, 1, 9):
        path = cons.deformed_path(rho, d, eps, c, K)
        assert abs(cons.k_value(path, c) - K) <= 1e-12 * max(1, abs(K))


def test_deformed_path_examples(grid, affine, sine):
    c = cons.identity()
    np.testing.assert_allclose(cons.deformed_path(affine, sine, 0.0, c, 1.0).values, affine.values, atol=1e-14)
    # a zero-mean direction is exactly conserving for f = rho, so eps = 1 lands on rho + delta
    step = 0.3 * sine
    np.testing.assert_allclose(cons.deformed_path(affine, step, 1.0, c, 1.0).values,
                               (affine + step).values, atol=1e-12)
    one = grid.constant(1.0)
    np.testing.assert_allclose(cons.deformed_path(one, one, 1.0, c, 1.0).values, 1.0, rtol=1e-15)


def test_x_dependent_linear_constraint(grid):
    c = cons.weighted_linear(lambda x: 1.0 + x)
    one = grid.constant(1.0)
    assert cons.k_value(one, c) == pytest.approx(oracles.L_WEIGHTED, abs=1e-12)
    assert c.is_linear
    with pytest.raises(DomainError):
        cons.k_value(one, cons.weighted_linear(lambda x: x - 0.5))


def test_power_requires_positive_exponent():
    with pytest.raises(ValueError):
        cons.power(0)

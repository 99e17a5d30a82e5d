import zlib

import numpy as np
import pytest

from kfunc import constraint as cons
from kfunc import functionals as fn
from kfunc.errors import NotConverged, PathDomainViolation
from kfunc.gateaux import (chain_rule_check, directional, directional_residual, extension_scale, richardson,
                           straight_directional)
from kfunc.grid import Grid, fd_gradient, random_positive_field, random_signed_field
from kfunc.kderiv import project_change

import oracles

CONSTRAINTS = cons.builtin_constraints()
IDS = [c.name for c in CONSTRAINTS]
CATALOG = fn.catalog()


def test_sine_direction_closed_form(affine, sine):
    probe = directional(fn.square(), affine, sine, cons.identity(), 1.0)
    assert probe.converged
    assert probe.value == pytest.approx(oracles.INNER_KDERIV_SINE, abs=1e-4)
    assert directional_residual(fn.square(), affine, sine, cons.identity(), 1.0) <= 1e-4


def test_functions_of_k_are_flat_along_path(rng):
    grid = Grid(200)
    for c in CONSTRAINTS:
        rho = random_positive_field(grid, rng)
        K = cons.k_value(rho, c)
        for b in fn.B_FUNCTIONS.values():
            probe = directional(fn.of_k(*b, c), rho, random_signed_field(grid, rng), c, K)
            assert abs(probe.value) <= 1e-8


def test_zero_direction(affine, grid):
    probe = directional(fn.entropy(), affine, grid.constant(0.0), cons.identity(), 1.0)
    assert probe.value == 0.0
    assert probe.estimates == (0.0, 0.0)


def test_scaling_direction_is_annihilated(affine):
    c = cons.identity()
    probe = directional(fn.entropy(), affine, affine, c, 1.0)
    assert abs(probe.value) <= 1e-8
    assert directional_residual(fn.entropy(), affine, affine, c, 1.0) <= 1e-8


@pytest.mark.parametrize("c", CONSTRAINTS, ids=IDS)
@pytest.mark.parametrize("label", sorted(CATALOG))
def test_directional_identity_across_catalog(c, label):
    grid = Grid(200)
    rng = np.random.default_rng(zlib.crc32(f"{c.name}/{label}".encode()))
    A = CATALOG[label]
    for _ in range(5):
        rho = random_positive_field(grid, rng)
        K = cons.k_value(rho, c)
        d = random_signed_field(grid, rng)
        assert directional_residual(A, rho, d, c, K) <= 1e-5
        assert directional_residual(A, rho, d, c, K, projected=True) <= 1e-5


@pytest.mark.parametrize("c", CONSTRAINTS, ids=IDS)
def test_zero_hom_extension_directional(c, rng):
    grid = Grid(120)
    rho = random_positive_field(grid, rng)
    K = cons.k_value(rho, c)
    A = fn.zero_hom_extension(fn.entropy(), c, K)
    assert directional_residual(A, rho, random_signed_field(grid, rng), c, K) <= 1e-6


def test_linear_constraint_straight_path(rng):
    grid = Grid(200)
    c = cons.weighted_linear(lambda x: 1 + x)
    for A in CATALOG.values():
        rho = random_positive_field(grid, rng)
        K = cons.k_value(rho, c)
        d = project_change(random_signed_field(grid, rng), rho, c, K)
        deformed = directional(A, rho, d, c, K).value
        straight = straight_directional(A, rho, d).value
        assert deformed == pytest.approx(straight, abs=1e-8)


def test_second_order_convergence_in_eps(rng):
    # a strongly curved path so that truncation dominates rounding
    grid = Grid(100)
    c = cons.power(2)
    rho = random_positive_field(grid, rng)
    K = cons.k_value(rho, c)
    d = 5.0 * random_signed_field(grid, rng)
    A = fn.entropy()
    probe = directional(A, rho, d, c, K, eps_schedule=(4e-2, 2e-2, 1e-2), require_convergence=False)
    e = probe.estimates
    ratio = (e[0] - e[1]) / (e[1] - e[2])
    assert ratio == pytest.approx(4.0, rel=0.2)
    # path displacement per eps stays bounded
    assert max(probe.path_ratios) / min(probe.path_ratios) < 1.1


def test_richardson_is_exact_for_quadratic_error():
    D = lambda e: 3.0 + 7.0 * e**2  # noqa: E731
    assert richardson((1e-2, 5e-3), (D(1e-2), D(5e-3))) == pytest.approx(3.0, abs=1e-13)


def test_not_converged_is_flagged(affine, rng):
    grid = affine.grid
    d = 50 * random_signed_field(grid, rng)
    with pytest.raises(NotConverged) as info:
        directional(fn.entropy(), affine, d, cons.identity(), 1.0, eps_schedule=(2e-3, 1e-3), tol=1e-12)
    assert not info.value.probe.converged
    probe = directional(fn.entropy(), affine, d, cons.identity(), 1.0, eps_schedule=(2e-3, 1e-3), tol=1e-12,
                        require_convergence=False)
    assert not probe.converged


def test_path_domain_violation(grid, affine, sine):
    c = cons.power(2)
    K = cons.k_value(affine, c)
    with pytest.raises(PathDomainViolation):
        directional(fn.square(), affine, 1e4 * sine, c, K)


def test_bad_schedule(affine, sine):
    with pytest.raises(ValueError):
        directional(fn.square(), affine, sine, cons.identity(), 1.0, eps_schedule=(1e-3, 1e-2))


# --- chain rule ---------------------------------------------------------------------------

def test_chain_rule_examples(grid, affine):
    c = cons.identity()
    r = chain_rule_check(fn.square(), affine, c, 1.0)
    assert r.residual <= 1e-5
    assert r.mu_shift <= 1e-12
    r = chain_rule_check(fn.square(), grid.constant(2.0), c, 1.0)
    assert r.residual <= 1e-5


def test_extension_scale_is_one_on_constraint_set(rng):
    grid = Grid(50)
    for c in CONSTRAINTS:
        rho = random_positive_field(grid, rng)
        K = cons.k_value(rho, c)
        np.testing.assert_allclose(extension_scale(rho, c, K).values, 1.0, atol=1e-12)


@pytest.mark.parametrize("c", CONSTRAINTS, ids=IDS)
def test_chain_rule_across_catalog(c, rng):
    grid = Grid(100)
    rho = random_positive_field(grid, rng)
    K = cons.k_value(rho, c)
    off = rho * (1 + 0.05 * random_signed_field(grid, rng))
    for A in CATALOG.values():
        for g in (rho, off):
            r = chain_rule_check(A, g, c, K)
            assert r.residual <= 1e-5
            assert r.mu_shift <= 1e-12


def test_extension_gradient_equals_constrained_derivative(affine):
    # gradient of A[extend(rho)] at rho on the set, by finite differences only
    c = cons.identity()
    ext = fn.zero_hom_extension(fn.square(), c, 1.0)
    g = fd_gradient(ext, affine)
    np.testing.assert_allclose(g.values, oracles.constrained_derivative_square_affine(affine.grid.nodes), atol=1e-4)

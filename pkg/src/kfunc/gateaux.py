"""Directional derivatives along constraint-preserving paths.

The straight line ``rho + eps * delta`` leaves the constraint set unless the
constraint is linear, so the path is renormalized with :func:`extend` at
every ``eps``.  Its slope at ``eps = 0`` equals
``inner(k_derivative(grad A), delta)``; this module estimates that slope
numerically and checks the identity, together with the chain rule through
the extension map.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import constraint as cons
from .errors import DomainError, NotConverged, PathDomainViolation
from .functionals import Functional
from .grid import Field, fd_gradient, inner
from .kderiv import WeightChoice, k_derivative, project_change

DEFAULT_EPS = (1e-3, 5e-4)
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class PathProbe:
    eps_schedule: tuple
    estimates: tuple
    value: float
    converged: bool
    tol: float
    # ||path(eps) - rho|| / eps in the weighted 2-norm, one per eps
    path_ratios: tuple = ()

    @property
    def spread(self):
        """Disagreement of the two finest estimates, relative to ``max(|value|, 1)``."""
        if len(self.estimates) < 2:
            return 0.0
        return abs(self.estimates[-1] - self.estimates[-2]) / max(abs(self.value), 1.0)


def richardson(eps_schedule, estimates, order=2):
    """Extrapolate the last two central-difference estimates to ``eps -> 0``."""
    if len(estimates) == 1:
        return estimates[0]
    r = (eps_schedule[-2] / eps_schedule[-1]) ** order
    return (r * estimates[-1] - estimates[-2]) / (r - 1.0)


def _probe(path, A, rho, eps_schedule, tol, require_convergence, what):
    eps_schedule = tuple(float(e) for e in eps_schedule)
    if not eps_schedule or any(e <= 0 for e in eps_schedule):
        raise ValueError(f"eps schedule must be non-empty and positive, got {eps_schedule}")
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError(f"eps schedule must be strictly decreasing, got {eps_schedule}")
    w = rho.grid.weights
    estimates, ratios = [], []
    for eps in eps_schedule:
        try:
            plus, minus = path(eps), path(-eps)
        except DomainError as err:
            raise PathDomainViolation(f"{what} left the domain at eps={eps:g}: {err}", node=err.node) from err
        estimates.append((A(plus) - A(minus)) / (2.0 * eps))
        d = plus.values - rho.values
        ratios.append(float(np.sqrt(np.dot(w, d * d))) / eps)
    value = richardson(eps_schedule, estimates)
    probe = PathProbe(eps_schedule, tuple(estimates), float(value), True, tol, tuple(ratios))
    probe = replace(probe, converged=probe.spread <= tol)
    if require_convergence and not probe.converged:
        raise NotConverged(
            f"NotConverged: estimates {estimates} disagree by {probe.spread:.3g} (tol {tol:g})",
            probe=probe,
        )
    return probe


def directional(A, rho, delta, c, K, eps_schedule=DEFAULT_EPS, tol=DEFAULT_TOL,
                require_convergence=True, membership_tol=cons.MEMBERSHIP_TOL):
    """Slope of ``A`` along the renormalized path ``extend(rho + eps * delta)``."""
    K = cons.check_k(K)
    cons.require_on_constraint(rho, c, K, membership_tol)
    return _probe(lambda e: cons.deformed_path(rho, delta, e, c, K), A, rho,
                  eps_schedule, tol, require_convergence, "deformed path")


def straight_directional(A, rho, delta, eps_schedule=DEFAULT_EPS, tol=DEFAULT_TOL,
                         require_convergence=True):
    """Ordinary Gateaux derivative along ``rho + eps * delta`` (no renormalization)."""
    return _probe(lambda e: rho + e * delta, A, rho, eps_schedule, tol, require_convergence, "straight path")


def directional_residual(A, rho, delta, c, K, projected=False, weight=WeightChoice(),
                         eps_schedule=DEFAULT_EPS, tol=DEFAULT_TOL, require_convergence=False):
    """``|directional slope - inner(k_derivative(grad A), delta)|``.

    Holds for any ``delta`` since the path renormalizes.  With ``projected``
    the direction is first mapped through :func:`project_change`.
    """
    K = cons.check_k(K)
    if projected:
        delta = project_change(delta, rho, c, K, weight)
    probe = directional(A, rho, delta, c, K, eps_schedule, tol, require_convergence)
    kd = k_derivative(A.gradient(rho), rho, c, K)
    return abs(probe.value - inner(kd, delta))


class ChainRuleCheck(NamedTuple):
    residual: float
    mu_shift: float


def extension_scale(g_field, c, K):
    """Node-wise factor relating the gradient of ``A[extend(g)]`` to the constrained derivative.

    ``(K / k_value(g)) * f'(g) / f'(extend(g))``; identically 1 when ``g``
    is already on the constraint set.
    """
    rho0 = cons.extend(g_field, c, K)
    F = cons.k_value(g_field, c)
    return Field(g_field.grid, (K / F) * c.derivative(g_field) / c.derivative(rho0))


def chain_rule_check(A, g_field, c, K, mu=3.7):
    """Differentiate ``g -> A[extend(g)]`` two ways and compare.

    Route one is the finite-difference gradient of the composition.  Route
    two applies the chain rule through the extension map, which reduces to
    ``extension_scale * k_derivative(grad A at extend(g))``.  ``mu_shift``
    is the change of route two when ``grad A`` is replaced by
    ``grad A + mu * f'`` and should vanish to rounding.
    """
    K = cons.check_k(K)
    composed = Functional(lambda g: A(cons.extend(g, c, K)), None, f"{A.label} o extend")
    lhs = fd_gradient(composed, g_field)
    rho0 = cons.extend(g_field, c, K)
    G = A.gradient(rho0)
    scale = extension_scale(g_field, c, K)
    rhs = scale * k_derivative(G, rho0, c, K)
    shifted = scale * k_derivative(G + mu * c.derivative(rho0), rho0, c, K)
    return ChainRuleCheck(
        residual=float(np.max(np.abs(lhs.values - rhs.values))),
        mu_shift=float(np.max(np.abs(shifted.values - rhs.values))),
    )

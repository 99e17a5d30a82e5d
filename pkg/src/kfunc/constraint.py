"""Integral constraints ``sum_i w_i f(x_i, rho_i) = K`` and the extension map.

The extension map rescales ``f(rho)`` so that the constraint holds exactly,
``rho0 = f^-1(K / k_value(rho) * f(rho))``.  It is the identity on the
constraint set and constant along each fiber ``rho -> f^-1(lam * f(rho))``.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConstraintMismatch, DomainError, RangeViolation, ZeroDenominator, ZeroK
from .grid import Field

MEMBERSHIP_TOL = 1e-9


class Interval(NamedTuple):
    """Open interval ``(lo, hi)``; infinite bounds allowed."""

    lo: float = -np.inf
    hi: float = np.inf

    def first_violation(self, values):
        bad = np.flatnonzero(~((values > self.lo) & (values < self.hi)))
        return int(bad[0]) if bad.size else None


REALS = Interval()
POSITIVE = Interval(0.0, np.inf)


@dataclass(frozen=True)
class ConstraintSpec:
    """Constraint function ``f(x, rho)`` together with its derivative and inverse.

    All three callables take node coordinates and values as arrays.
    """

    name: str
    f: Callable
    f_prime: Callable
    f_inv: Callable
    rho_domain: Interval = REALS
    f_range: Interval = REALS
    linear_weight: Callable | None = None
    params: dict = field(default_factory=dict)

    @property
    def is_linear(self):
        return self.linear_weight is not None

    def check_domain(self, rho):
        i = self.rho_domain.first_violation(rho.values)
        if i is not None:
            raise DomainError(
                f"rho_domain violated for constraint {self.name!r} at node {i} "
                f"(rho={rho.values[i]!r}, domain {tuple(self.rho_domain)})",
                node=i,
            )

    def values(self, rho):
        self.check_domain(rho)
        return self.f(rho.grid.nodes, rho.values)

    def derivative(self, rho):
        self.check_domain(rho)
        return self.f_prime(rho.grid.nodes, rho.values)

    def inverse(self, grid, y):
        i = self.f_range.first_violation(y)
        if i is not None:
            raise RangeViolation(
                f"scaled f value {y[i]!r} at node {i} is outside the range "
                f"{tuple(self.f_range)} of constraint {self.name!r}",
                node=i,
            )
        return Field(grid, self.f_inv(grid.nodes, y))


# --- built-in constraints ------------------------------------------------------

def identity():
    """Number constraint ``f = rho``."""
    return ConstraintSpec(
        name="identity",
        f=lambda x, r: np.array(r, dtype=float),
        f_prime=lambda x, r: np.ones_like(r, dtype=float),
        f_inv=lambda x, y: np.array(y, dtype=float),
    )


def power(p):
    """``f = rho**p`` on positive fields."""
    p = float(p)
    if not p > 0:
        raise ValueError(f"power constraint needs p > 0, got {p}")
    return ConstraintSpec(
        name=f"power:{p:g}",
        f=lambda x, r: r**p,
        f_prime=lambda x, r: p * r ** (p - 1.0),
        f_inv=lambda x, y: y ** (1.0 / p),
        rho_domain=POSITIVE,
        f_range=POSITIVE,
        params={"p": p},
    )


def exponential():
    return ConstraintSpec(
        name="exponential",
        f=lambda x, r: np.exp(r),
        f_prime=lambda x, r: np.exp(r),
        f_inv=lambda x, y: np.log(y),
        f_range=POSITIVE,
    )


def weighted_linear(h, label="h"):
    """Linear constraint ``f = h(x) * rho`` with a strictly positive weight ``h``."""

    def hx(x):
        return np.broadcast_to(np.asarray(h(x), dtype=float), np.shape(x))

    def check(x):
        w = hx(x)
        if np.any(w <= 0):
            i = int(np.flatnonzero(w <= 0)[0])
            raise DomainError(f"linear weight h must be positive; h={w[i]!r} at node {i}", node=i)
        return w

    return ConstraintSpec(
        name=f"linear:{label}",
        f=lambda x, r: check(x) * r,
        f_prime=lambda x, r: check(x) * np.ones_like(r),
        f_inv=lambda x, y: y / check(x),
        linear_weight=hx,
    )


def builtin_constraints():
    """One instance of each built-in family, as used by the verification suite."""
    return [
        identity(),
        power(2.0),
        power(0.5),
        exponential(),
        weighted_linear(lambda x: 1.0 + x, label="1+x"),
    ]


# --- operations -----------------------------------------------------------------

def check_k(K):
    K = float(K)
    if K == 0.0 or not np.isfinite(K):
        raise ZeroK(f"ZeroK: constraint target K must be finite and nonzero, got K={K!r}")
    return K


def k_value(rho, c):
    """``sum_i w_i f(x_i, rho_i)``."""
    return float(np.dot(rho.grid.weights, c.values(rho)))


def require_on_constraint(rho, c, K, tol=MEMBERSHIP_TOL):
    kv = k_value(rho, c)
    if abs(kv - K) > tol * max(1.0, abs(K)):
        raise ConstraintMismatch(
            f"field is off the constraint set of {c.name!r}: k_value={kv!r}, K={K!r}, tol={tol:g}"
        )
    return kv


def extend(rho, c, K):
    """Map ``rho`` onto the constraint set by rescaling ``f(rho)``."""
    K = check_k(K)
    fv = c.values(rho)
    total = float(np.dot(rho.grid.weights, fv))
    if total == 0.0:
        raise ZeroDenominator(f"ZeroDenominator: k_value(rho) = 0 for constraint {c.name!r}; cannot rescale")
    return c.inverse(rho.grid, (K / total) * fv)


def fiber_scale(rho, c, lam):
    """``f^-1(lam * f(rho))``: moves along the fiber collapsed by :func:`extend`."""
    return c.inverse(rho.grid, lam * c.values(rho))


def deformed_path(rho, delta, eps, c, K):
    """Point at parameter ``eps`` on the renormalized path through ``rho`` along ``delta``."""
    return extend(rho + eps * delta, c, K)


def invertibility_error(c, grid, samples=64, seed=0):
    """Worst ``|f^-1(f(rho)) - rho|`` over rho sampled in the domain.

    A vanishing ``f'`` at any sample is reported as ``inf``.
    """
    rng = np.random.default_rng(seed)
    lo = max(c.rho_domain.lo, -3.0)
    hi = min(c.rho_domain.hi, 3.0)
    if c.rho_domain.lo > -np.inf and lo == c.rho_domain.lo:
        lo = lo + 0.05 * (hi - lo)
    worst = 0.0
    for _ in range(max(1, samples // grid.n + 1)):
        r = rng.uniform(lo, hi, size=grid.n)
        x = grid.nodes
        back = c.f_inv(x, c.f(x, r))
        worst = max(worst, float(np.max(np.abs(back - r))))
        if np.any(c.f_prime(x, r) == 0):
            return np.inf
    return worst

"""Constrained derivatives on the constraint set ``sum w f(rho) = K``.

A restricted derivative density ``g`` is only determined up to
``g + mu * f'(rho)``.  The operators here remove that freedom by
subtracting ``f'(rho)`` times a weighted average of ``g / f'(rho)``:

* :func:`k_derivative` averages with weight ``f(rho) / K``;
* :func:`u_derivative` averages with any normalized weight ``u``;
* :func:`project_change` is the transpose of :func:`u_derivative` under the
  quadrature inner product and maps changes onto ``sum w f' d = 0``.
"""

from dataclasses import dataclass

import numpy as np

from . import constraint as cons
from .errors import ZeroFPrime, ZeroQIntegral
from .grid import Field


@dataclass(frozen=True)
class WeightChoice:
    """Which normalized weight ``u`` fixes the constant in a constrained derivative.

    ``kind`` is ``"f_of_rho"`` (u = f(rho) / k_value), ``"custom_q"``
    (u = q / sum w q) or ``"point"`` (discrete delta at node ``index``).
    """

    kind: str = "f_of_rho"
    q: Field | None = None
    index: int | None = None

    def __post_init__(self):
        if self.kind not in ("f_of_rho", "custom_q", "point"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "custom_q" and self.q is None:
            raise ValueError("custom_q weight needs a field q")
        if self.kind == "point" and self.index is None:
            raise ValueError("point weight needs a node index")

    @classmethod
    def f_of_rho(cls):
        return cls("f_of_rho")

    @classmethod
    def custom(cls, q):
        return cls("custom_q", q=q)

    @classmethod
    def point(cls, index):
        return cls("point", index=int(index))

    def u(self, rho, c):
        """The weight field, normalized so that ``sum w u = 1``."""
        grid = rho.grid
        if self.kind == "f_of_rho":
            fv = c.values(rho)
            total = float(np.dot(grid.weights, fv))
            if total == 0.0:
                raise ZeroQIntegral(f"ZeroQIntegral: k_value(rho) = 0 for {c.name!r}; f(rho) weight undefined")
            return Field(grid, fv / total)
        if self.kind == "custom_q":
            total = float(np.dot(grid.weights, self.q.values))
            if total == 0.0:
                raise ZeroQIntegral("ZeroQIntegral: weight field q integrates to zero")
            return Field(grid, self.q.values / total)
        i = self._node(grid)
        u = np.zeros(grid.n)
        u[i] = 1.0 / grid.weights[i]
        return Field(grid, u)

    def _node(self, grid):
        i = self.index
        if not -grid.n <= i < grid.n:
            raise IndexError(f"point weight index {i} outside grid of {grid.n} nodes")
        return i % grid.n


def _f_prime(rho, c):
    fp = c.derivative(rho)
    zero = np.flatnonzero(fp == 0.0)
    if zero.size:
        i = int(zero[0])
        raise ZeroFPrime(f"ZeroFPrime: f'(rho) vanishes at node {i} (rho={rho.values[i]!r})", node=i)
    return fp


def multiplier(g, rho, c, K):
    """Weighted average ``(1/K) sum w (f / f') g``.

    At a constrained stationary point ``g = mu f'(rho)`` and this returns ``mu``.
    """
    K = cons.check_k(K)
    fp = _f_prime(rho, c)
    fv = c.values(rho)
    return float(np.dot(rho.grid.weights, fv / fp * g.values)) / K


def k_derivative(g, rho, c, K, tol=cons.MEMBERSHIP_TOL):
    """Unique constrained derivative ``g - f'(rho) * multiplier(g)``.

    ``g`` may be any restricted derivative density at ``rho``; adding
    ``mu * f'(rho)`` to it leaves the result unchanged.
    """
    K = cons.check_k(K)
    cons.require_on_constraint(rho, c, K, tol)
    fp = _f_prime(rho, c)
    mu = multiplier(g, rho, c, K)
    return Field(rho.grid, g.values - fp * mu)


def u_derivative(g, rho, c, w=WeightChoice(), K=None, tol=cons.MEMBERSHIP_TOL):
    """Constrained derivative with the constant fixed by weight ``w``.

    If ``K`` is given, ``rho`` is first checked to lie on the constraint set.
    """
    if K is not None:
        cons.require_on_constraint(rho, c, cons.check_k(K), tol)
    fp = _f_prime(rho, c)
    ratio = g.values / fp
    if w.kind == "point":
        # Subtracting ratio[i0] itself makes the output vanish exactly at i0.
        return Field(rho.grid, fp * (ratio - ratio[w._node(rho.grid)]))
    u = w.u(rho, c).values
    return Field(rho.grid, g.values - fp * float(np.dot(rho.grid.weights, u * ratio)))


def project_change(delta, rho, c, K, w=WeightChoice(), tol=cons.MEMBERSHIP_TOL):
    """Project a change onto ``sum w f'(rho) d = 0``.

    ``d* = d - (u / f') * sum w f' d``; changes that already satisfy the
    linearized constraint are returned unchanged.
    """
    K = cons.check_k(K)
    cons.require_on_constraint(rho, c, K, tol)
    fp = _f_prime(rho, c)
    u = w.u(rho, c).values
    s = float(np.dot(rho.grid.weights, fp * delta.values))
    return Field(rho.grid, delta.values - (u / fp) * s)


def linearized_constraint(delta, rho, c):
    """``sum w f'(rho) d``: first-order change of the constraint along ``d``."""
    return float(np.dot(rho.grid.weights, c.derivative(rho) * delta.values))


def homogeneity_residual(A, rho, c, m, g=None):
    """``sum w (f / f') g - m * A[rho]``; zero for functionals homogeneous of degree ``m`` along ``c``."""
    if g is None:
        g = A.gradient(rho)
    fp = _f_prime(rho, c)
    fv = c.values(rho)
    return float(np.dot(rho.grid.weights, fv / fp * g.values)) - m * A(rho)

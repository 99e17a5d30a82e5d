"""Catalog of test functionals on grid fields.

Every built-in is a quadrature sum, so its analytic gradient is the exact
derivative of the discrete expression and not only a continuum limit.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constraint as cons
from .grid import Field, fd_gradient


@dataclass(frozen=True)
class Functional:
    """A map from fields to reals with an optional analytic gradient.

    ``homogeneity`` is an optional ``(constraint name, degree)`` tag: the
    functional satisfies ``A[f^-1(lam f(rho))] = lam**degree * A[rho]`` for
    that constraint.
    """

    value: Callable[[Field], float]
    analytic_gradient: Callable[[Field], Field] | None = None
    label: str = ""
    homogeneity: tuple | None = None

    def __call__(self, rho):
        return float(self.value(rho))

    @property
    def has_gradient(self):
        return self.analytic_gradient is not None

    def gradient(self, rho):
        """Analytic gradient if attached, otherwise the finite-difference oracle."""
        if self.analytic_gradient is not None:
            return self.analytic_gradient(rho)
        return fd_gradient(self, rho)

    def __add__(self, other):
        grad = None
        if self.has_gradient and other.has_gradient:
            def grad(rho):
                return self.analytic_gradient(rho) + other.analytic_gradient(rho)
        return Functional(
            value=lambda rho: self(rho) + other(rho),
            analytic_gradient=grad,
            label=f"{self.label}+{other.label}",
        )

    def __mul__(self, s):
        s = float(s)
        grad = None
        if self.has_gradient:
            def grad(rho):
                return s * self.analytic_gradient(rho)
        return Functional(lambda rho: s * self(rho), grad, f"{s:g}*{self.label}")

    __rmul__ = __mul__


def local_integral(a, da_drho, label="local", homogeneity=None):
    """``sum_i w_i a(x_i, rho_i)`` with gradient ``da_drho(x_i, rho_i)``."""

    def value(rho):
        return float(np.dot(rho.grid.weights, a(rho.grid.nodes, rho.values)))

    def grad(rho):
        return Field(rho.grid, np.broadcast_to(da_drho(rho.grid.nodes, rho.values), (rho.grid.n,)))

    return Functional(value, grad if da_drho is not None else None, label, homogeneity)


def square():
    return local_integral(lambda x, r: r * r, lambda x, r: 2.0 * r, "square", ("power:2", 1))


def linear(v, label="linear"):
    """``sum w v(x) rho`` for a potential ``v`` given as a callable of ``x``."""
    return local_integral(lambda x, r: v(x) * r, lambda x, r: v(x) + 0.0 * r, label)


def entropy():
    """``sum w rho ln rho`` (positive fields only)."""

    def a(x, r):
        if np.any(r <= 0):
            i = int(np.flatnonzero(r <= 0)[0])
            raise cons.DomainError(f"entropy needs rho > 0; rho={r[i]!r} at node {i}", node=i)
        return r * np.log(r)

    return local_integral(a, lambda x, r: np.log(r) + 1.0, "entropy")


def gradient_square(kappa=1.0):
    """``kappa * sum_i w_i ((rho_{i+1} - rho_i) / h)**2`` with cyclic indexing."""
    kappa = float(kappa)

    def _check(rho):
        if not rho.grid.periodic:
            raise ValueError("gradient_square requires a periodic grid")
        return rho.grid.spacing

    def value(rho):
        h = _check(rho)
        d = (np.roll(rho.values, -1) - rho.values) / h
        return kappa * float(np.dot(rho.grid.weights, d * d))

    def grad(rho):
        h = _check(rho)
        r = rho.values
        lap = (np.roll(r, -1) - 2.0 * r + np.roll(r, 1)) / (h * h)
        return Field(rho.grid, -2.0 * kappa * lap)

    return Functional(value, grad, "gradient_square")


def of_k(b, b_prime, c, label=None):
    """``b(k_value(rho))`` with gradient ``b'(K) f'(rho)``."""

    def value(rho):
        return float(b(cons.k_value(rho, c)))

    def grad(rho):
        return Field(rho.grid, b_prime(cons.k_value(rho, c)) * c.derivative(rho))

    return Functional(value, grad, label or f"b(K[{c.name}])")


def zero_hom_extension(A, c, K):
    """``A[extend(rho)]``; its gradient is left to the finite-difference oracle."""
    K = cons.check_k(K)
    return Functional(lambda rho: A(cons.extend(rho, c, K)), None, f"ext0[{A.label}]", (c.name, 0))


def number_ratio():
    """``sum w rho^2 / (sum w rho)^2``; invariant under ``rho -> lam rho``."""

    def value(rho):
        w = rho.grid.weights
        r = rho.values
        return float(np.dot(w, r * r) / np.dot(w, r) ** 2)

    def grad(rho):
        w = rho.grid.weights
        r = rho.values
        s1 = np.dot(w, r)
        s2 = np.dot(w, r * r)
        return Field(rho.grid, 2.0 * r / s1**2 - 2.0 * s2 / s1**3)

    return Functional(value, grad, "number_ratio", ("identity", 0))


def power2_ratio():
    """``sum w rho^4 / (sum w rho^2)^2``; invariant under ``rho -> sqrt(lam) rho``."""

    def value(rho):
        w = rho.grid.weights
        r2 = rho.values**2
        return float(np.dot(w, r2 * r2) / np.dot(w, r2) ** 2)

    def grad(rho):
        w = rho.grid.weights
        r = rho.values
        r2 = r * r
        s2 = np.dot(w, r2)
        s4 = np.dot(w, r2 * r2)
        return Field(rho.grid, 4.0 * r**3 / s2**2 - 4.0 * s4 * r / s2**3)

    return Functional(value, grad, "power2_ratio", ("power:2", 0))


B_FUNCTIONS = {
    "id": (lambda k: k, lambda k: 1.0),
    "square": (lambda k: k * k, lambda k: 2.0 * k),
    "sin": (np.sin, np.cos),
}


def catalog():
    """Label -> functional for the grid-independent built-ins (positive fields)."""
    v = lambda x: np.sin(2.0 * np.pi * x)  # noqa: E731
    return {
        "square": square(),
        "entropy": entropy(),
        "linear": linear(v),
        "number_ratio": number_ratio(),
        "power2_ratio": power2_ratio(),
        "gradient_square": gradient_square(0.01),
        "gradsq_plus_square": gradient_square(0.01) + square(),
    }


def from_label(label, c=None, kappa=1.0, k=1, b="square"):
    """Build a catalog functional by label, with the few parameters the CLI exposes."""
    if label == "square":
        return square()
    if label == "entropy":
        return entropy()
    if label == "linear":
        return linear(lambda x: np.sin(2.0 * np.pi * k * x), label=f"linear:sin{k}")
    if label == "number_ratio":
        return number_ratio()
    if label == "power2_ratio":
        return power2_ratio()
    if label == "gradient_square":
        return gradient_square(kappa)
    if label == "gradsq_plus_square":
        return gradient_square(kappa) + square()
    if label == "b_of_k":
        if c is None:
            raise ValueError("b_of_k needs a constraint")
        if b not in B_FUNCTIONS:
            raise ValueError(f"unknown b function {b!r}; choose from {sorted(B_FUNCTIONS)}")
        return of_k(*B_FUNCTIONS[b], c, label=f"b_of_k:{b}")
    raise ValueError(f"unknown functional label {label!r}")


LABELS = ("square", "entropy", "linear", "number_ratio", "power2_ratio",
          "gradient_square", "gradsq_plus_square", "b_of_k")

"""Split a gradient into a norm-conserving part and a derivative with respect to the norm.

With ``rho = N n`` (``N = sum w rho``), a gradient ``g`` splits into the
constant ``dA[Nn]/dN = (1/N) sum w rho g`` and the remainder, which is the
constrained derivative for ``f = rho``.  For a weighted norm
``L = sum w h rho`` the constant is multiplied by ``h``.
"""

from dataclasses import dataclass

import numpy as np

from . import constraint as cons
from .errors import ZeroNorm
from .functionals import Functional
from .grid import Field, fd_gradient
from .kderiv import k_derivative


@dataclass(frozen=True)
class ShapeSplit:
    """``g = n_part + h * shape_part``.

    ``norm`` is N (or L), ``shape`` the normalized field n (or l), and ``h``
    the norm weight (``None`` means ``h = 1``).
    """

    n_part: Field
    shape_part: float
    norm: float
    shape: Field
    h: Field | None = None

    @property
    def N(self):
        return self.norm

    def reconstruct(self):
        if self.h is None:
            return self.n_part + self.shape_part
        return self.n_part + self.shape_part * self.h


def _norm(rho, h=None):
    w = rho.grid.weights
    total = float(np.dot(w, rho.values if h is None else h.values * rho.values))
    if total == 0.0:
        raise ZeroNorm("ZeroNorm: the norm of rho vanishes; shape is undefined")
    return total


def shape(rho):
    """``rho / sum w rho``."""
    return rho / _norm(rho)


def shape_split(g, rho):
    N = _norm(rho)
    part = float(np.dot(rho.grid.weights, rho.values * g.values)) / N
    return ShapeSplit(g - part, part, N, rho / N)


def l_split(g, rho, h, L, tol=cons.MEMBERSHIP_TOL):
    """Split with respect to the weighted norm ``L = sum w h rho``."""
    L = cons.check_k(L)
    actual = _norm(rho, h)
    if abs(actual - L) > tol * max(1.0, abs(L)):
        raise cons.ConstraintMismatch(
            f"weighted norm of rho is {actual!r}, expected L={L!r} (tol {tol:g})"
        )
    l_shape = rho / actual
    part = float(np.dot(rho.grid.weights, l_shape.values * g.values))
    return ShapeSplit(g - part * h, part, L, l_shape, h)


def rescaled_shape_crosscheck(A, rho):
    """Compare two routes to the number-conserving derivative.

    Route one rescales: ``B[n] = A[N n]`` is differentiated by finite
    differences and made conserving at unit norm, at ``n = shape(rho)``.
    Route two is ``N`` times the number-conserving part of ``shape_split``.
    Returns the max-norm difference.
    """
    split = shape_split(A.gradient(rho), rho)
    N = split.norm
    B = Functional(lambda n: A(N * n), None, f"{A.label}[N n]")
    n = split.shape
    lhs = k_derivative(fd_gradient(B, n), n, cons.identity(), 1.0)
    return float(np.max(np.abs(lhs.values - N * split.n_part.values)))

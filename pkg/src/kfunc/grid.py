"""One-dimensional grids, sampled fields and quadrature.

A :class:`Grid` carries nodes and quadrature weights; a :class:`Field` is an
immutable array of samples tied to a grid.  All functionals in the package
are quadrature sums over these weights, and the discrete functional
derivative is ``(1/w_i) dA/drho_i``.
"""

import numpy as np

from .errors import GridMismatch

FD_STEP = 1e-5


class Grid:
    """Uniform 1-D grid on ``[0, length]``.

    Periodic grids use midpoint nodes ``(i + 1/2) * length / n`` with uniform
    weights; non-periodic grids use endpoint nodes with trapezoid weights.
    In both cases the weights sum to ``length``.
    """

    def __init__(self, n=200, length=1.0, periodic=True):
        n = int(n)
        length = float(length)
        if n < 2:
            raise ValueError(f"grid size n must be >= 2, got {n}")
        if not (length > 0 and np.isfinite(length)):
            raise ValueError(f"grid length must be positive and finite, got {length}")
        self.n = n
        self.length = length
        self.periodic = bool(periodic)
        if self.periodic:
            self.spacing = length / n
            nodes = (np.arange(n) + 0.5) * self.spacing
            weights = np.full(n, self.spacing)
        else:
            self.spacing = length / (n - 1)
            nodes = np.linspace(0.0, length, n)
            weights = np.full(n, self.spacing)
            weights[0] = weights[-1] = 0.5 * self.spacing
        nodes.setflags(write=False)
        weights.setflags(write=False)
        self.nodes = nodes
        self.weights = weights

    def _key(self):
        return (self.n, self.length, self.periodic)

    def __eq__(self, other):
        return isinstance(other, Grid) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Grid(n={self.n}, length={self.length}, periodic={self.periodic})"

    def field(self, values):
        return Field(self, values)

    def constant(self, c):
        return Field(self, np.full(self.n, float(c)))

    def from_function(self, fn):
        """Sample ``fn(x)`` at the nodes."""
        return Field(self, np.broadcast_to(fn(self.nodes), (self.n,)))


class Field:
    """Real samples on the nodes of a grid.

    Fields are immutable; arithmetic returns new fields and requires both
    operands to live on the same grid.
    """

    __slots__ = ("grid", "values")
    __array_priority__ = 100

    def __init__(self, grid, values):
        v = np.array(values, dtype=float)
        if v.shape != (grid.n,):
            raise ValueError(f"field has shape {v.shape}, grid expects ({grid.n},)")
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            raise ValueError(f"field value at node {bad[0]} is not finite ({v[bad[0]]})")
        v.setflags(write=False)
        self.grid = grid
        self.values = v

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.grid.n

    def __repr__(self):
        return f"Field({self.grid!r}, {np.array2string(self.values, threshold=6)})"

    def _other(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / self._other(other))

    def __neg__(self):
        return Field(self.grid, -self.values)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))


def _check_same_grid(a, b):
    if a.grid is not b.grid and a.grid != b.grid:
        raise GridMismatch(f"fields live on different grids: {a.grid!r} vs {b.grid!r}")


def integrate(field):
    """Quadrature sum ``sum_i w_i v_i``."""
    return float(np.dot(field.grid.weights, field.values))


def inner(a, b):
    """Weighted inner product ``sum_i w_i a_i b_i``."""
    _check_same_grid(a, b)
    return float(np.dot(a.grid.weights, a.values * b.values))


def max_norm_diff(a, b):
    _check_same_grid(a, b)
    return float(np.max(np.abs(a.values - b.values)))


def fd_gradient(A, rho, step=FD_STEP):
    """Central-difference functional derivative of ``A`` at ``rho``.

    ``g_i = (A[rho + d e_i] - A[rho - d e_i]) / (2 d w_i)`` with the node-wise
    step ``d = step * (1 + |rho_i|)``.  Division by ``w_i`` turns the partial
    derivative into a derivative density.
    """
    grid = rho.grid
    base = rho.values
    out = np.empty(grid.n)
    work = base.copy()
    for i in range(grid.n):
        d = step * (1.0 + abs(base[i]))
        work[i] = base[i] + d
        plus = A(Field(grid, work))
        work[i] = base[i] - d
        minus = A(Field(grid, work))
        work[i] = base[i]
        out[i] = (plus - minus) / (2.0 * d * grid.weights[i])
    return Field(grid, out)


# --- field recipes -----------------------------------------------------------

def _wave(grid, k, phase=0.0):
    return np.sin(2.0 * np.pi * k * grid.nodes / grid.length + phase)


def make_field(grid, profile="constant", a=1.0, b=0.0, c=1.0, k=1, seed=0):
    """Build a named initial profile.

    ``constant``: c; ``affine``: a*x + b; ``sine``: a*sin(2 pi k x / L) + b;
    ``random``: seeded positive smooth profile (see :func:`random_positive_field`).
    """
    if profile == "constant":
        return grid.constant(c)
    if profile == "affine":
        return Field(grid, a * grid.nodes + b)
    if profile == "sine":
        return Field(grid, a * _wave(grid, k) + b)
    if profile == "random":
        return random_positive_field(grid, np.random.default_rng(seed))
    raise ValueError(f"unknown field profile {profile!r}")


def random_signed_field(grid, rng, modes=3, amplitude=1.0):
    """Sum of up to ``modes`` sine modes with random wavenumbers and phases."""
    m = int(rng.integers(1, modes + 1))
    ks = rng.integers(1, 6, size=m)
    amps = rng.uniform(-amplitude, amplitude, size=m)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=m)
    values = sum(a * _wave(grid, k, p) for a, k, p in zip(amps, ks, phases))
    return Field(grid, values)


def random_positive_field(grid, rng, modes=3):
    """Smooth positive profile: sine modes plus a constant exceeding their total amplitude."""
    m = int(rng.integers(1, modes + 1))
    ks = rng.integers(1, 6, size=m)
    amps = rng.uniform(0.05, 0.5, size=m)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=m)
    values = sum(a * _wave(grid, k, p) for a, k, p in zip(amps, ks, phases))
    offset = amps.sum() + rng.uniform(0.5, 1.5)
    return Field(grid, values + offset)

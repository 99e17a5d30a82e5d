"""Executable catalogue of the identities the library is built on.

Each :class:`IdentityCase` sweeps built-in constraints, catalog functionals
and seeded random fields, and reports the worst residual against its
tolerance.  ``kfunc verify`` prints the resulting :class:`Report`.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import constraint as cons
from . import functionals as fn
from .decompose import l_split, rescaled_shape_crosscheck, shape, shape_split
from .gateaux import chain_rule_check, directional, directional_residual, straight_directional
from .grid import Field, Grid, fd_gradient, inner, random_positive_field, random_signed_field
from .kderiv import (WeightChoice, homogeneity_residual, k_derivative, linearized_constraint,
                     project_change, u_derivative)


@dataclass
class Context:
    grid: Grid
    constraints: list
    functionals: dict
    seed: int = 0
    samples: int = 5

    def rng(self, salt):
        return np.random.default_rng([self.seed, salt])

    def on_set(self, c, rng):
        """A random positive field and its own constraint value."""
        rho = random_positive_field(self.grid, rng)
        K = cons.k_value(rho, c)
        return cons.extend(rho, c, K), K

    def weights(self, rng):
        q = random_positive_field(self.grid, rng)
        return [WeightChoice.f_of_rho(), WeightChoice.custom(q),
                WeightChoice.point(int(rng.integers(self.grid.n)))]


@dataclass(frozen=True)
class IdentityCase:
    id: str
    title: str
    tol: float
    metric: str
    run: Callable[[Context], float]


@dataclass(frozen=True)
class Row:
    id: str
    title: str
    residual: float
    tol: float
    metric: str
    error: str | None = None

    @property
    def passed(self):
        return self.error is None and self.residual <= self.tol


@dataclass
class Report:
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def format(self):
        lines = [f"{'identity':36s} {'residual':>11s} {'tol':>9s}  result"]
        for r in self.rows:
            status = "PASS" if r.passed else "FAIL"
            res = f"{r.residual:11.3e}" if np.isfinite(r.residual) else f"{'error':>11s}"
            line = f"{r.id:36s} {res} {r.tol:9.1e}  {status}"
            if r.error:
                line += f"  ({r.error})"
            lines.append(line)
        n_pass = sum(r.passed for r in self.rows)
        lines.append(f"{n_pass}/{len(self.rows)} identities pass")
        return "\n".join(lines)


def _maxabs(a, b=None):
    v = a.values if b is None else a.values - b.values
    return float(np.max(np.abs(v)))


# --- individual cases ------------------------------------------------------------

def _invertibility(ctx):
    return max(cons.invertibility_error(c, ctx.grid) for c in ctx.constraints)


def _restricted_ambiguity(ctx):
    # g and g + mu f' give the same first-order change along projected directions
    rng = ctx.rng(15)
    worst = 0.0
    for c in ctx.constraints:
        for _ in range(ctx.samples):
            rho, K = ctx.on_set(c, rng)
            g = random_signed_field(ctx.grid, rng)
            mu = rng.uniform(-10, 10)
            for w in ctx.weights(rng):
                d = project_change(random_signed_field(ctx.grid, rng), rho, c, K, w)
                shifted = g + mu * Field(ctx.grid, c.derivative(rho))
                worst = max(worst, abs(inner(shifted, d) - inner(g, d)))
    return worst


def _ambiguity_cancellation(ctx):
    rng = ctx.rng(18)
    worst = 0.0
    for c in ctx.constraints:
        for _ in range(ctx.samples):
            rho, K = ctx.on_set(c, rng)
            g = random_signed_field(ctx.grid, rng)
            shifted = g + rng.uniform(-10, 10) * Field(ctx.grid, c.derivative(rho))
            worst = max(worst, _maxabs(k_derivative(shifted, rho, c, K), k_derivative(g, rho, c, K)))
            for w in ctx.weights(rng):
                worst = max(worst, _maxabs(u_derivative(shifted, rho, c, w), u_derivative(g, rho, c, w)))
    return worst


def _projection_annihilation(ctx):
    rng = ctx.rng(21)
    worst = 0.0
    for c in ctx.constraints:
        for _ in range(ctx.samples):
            rho, K = ctx.on_set(c, rng)
            for w in ctx.weights(rng):
                d = project_change(random_signed_field(ctx.grid, rng), rho, c, K, w)
                worst = max(worst, abs(linearized_constraint(d, rho, c)))
    return worst


def _weight_normalization(ctx):
    rng = ctx.rng(23)
    worst = 0.0
    for c in ctx.constraints:
        rho, _ = ctx.on_set(c, rng)
        for w in ctx.weights(rng):
            u = w.u(rho, c)
            worst = max(worst, abs(float(np.dot(ctx.grid.weights, u.values)) - 1.0))
    return worst


def _adjoint_duality(ctx):
    rng = ctx.rng(24)
    worst = 0.0
    for c in ctx.constraints:
        for _ in range(ctx.samples):
            rho, K = ctx.on_set(c, rng)
            g = random_signed_field(ctx.grid, rng)
            d = random_signed_field(ctx.grid, rng)
            for w in ctx.weights(rng):
                lhs = inner(g, project_change(d, rho, c, K, w))
                rhs = inner(u_derivative(g, rho, c, w), d)
                worst = max(worst, abs(lhs - rhs))
    return worst


def _equal_derivatives(ctx):
    rng = ctx.rng(27)
    worst = 0.0
    for c in ctx.constraints:
        for name, (b, db) in fn.B_FUNCTIONS.items():
            rho, K = ctx.on_set(c, rng)
            A = ctx.functionals["square"]
            B = A + fn.of_k(b, db, c)
            gA, gB = A.gradient(rho), B.gradient(rho)
            for w in ctx.weights(rng):
                worst = max(worst, _maxabs(u_derivative(gA, rho, c, w), u_derivative(gB, rho, c, w)))
    return worst


def _constraint_functional(ctx):
    rng = ctx.rng(28)
    worst = 0.0
    for c in ctx.constraints:
        for b, db in fn.B_FUNCTIONS.values():
            rho, K = ctx.on_set(c, rng)
            A = fn.of_k(b, db, c)
            worst = max(worst, k_derivative(A.gradient(rho), rho, c, K).max_abs())
            for w in ctx.weights(rng):
                worst = max(worst, u_derivative(A.gradient(rho), rho, c, w).max_abs())
    return worst


def _tagged(ctx, degree=None):
    by_name = {c.name: c for c in ctx.constraints}
    for A in ctx.functionals.values():
        if A.homogeneity is None:
            continue
        cname, m = A.homogeneity
        if cname in by_name and (degree is None or m == degree):
            yield A, by_name[cname], m


def _independent_unconstrained(ctx, cname, salt):
    rng = ctx.rng(salt)
    worst = 0.0
    for A, c, m in _tagged(ctx, degree=0):
        if c.name != cname:
            continue
        for _ in range(ctx.samples):
            rho, K = ctx.on_set(c, rng)
            g = A.gradient(rho)
            worst = max(worst, _maxabs(k_derivative(g, rho, c, K), g))
    return worst


def _k_homogeneity(ctx):
    rng = ctx.rng(33)
    worst = 0.0
    for A, c, m in _tagged(ctx):
        for _ in range(ctx.samples):
            rho, _ = ctx.on_set(c, rng)
            for lam in (0.5, 1.0, 2.0):
                scaled = cons.fiber_scale(rho, c, lam)
                worst = max(worst, abs(A(scaled) - lam**m * A(rho)) / max(1.0, abs(A(rho))))
    return worst


def _homogeneity_euler(ctx):
    rng = ctx.rng(34)
    worst = 0.0
    for A, c, m in _tagged(ctx):
        for _ in range(ctx.samples):
            rho, _ = ctx.on_set(c, rng)
            worst = max(worst, abs(homogeneity_residual(A, rho, c, m)))
    return worst


def _extension_gradient(ctx):
    # gradient of A[extend(.)] at a point of the constraint set is the constrained derivative
    rng = ctx.rng(38)
    worst = 0.0
    for c in ctx.constraints:
        rho, K = ctx.on_set(c, rng)
        for A in ctx.functionals.values():
            ext = fn.zero_hom_extension(A, c, K)
            worst = max(worst, _maxabs(fd_gradient(ext, rho), k_derivative(A.gradient(rho), rho, c, K)))
    return worst


def _extension_idempotence(ctx):
    rng = ctx.rng(40)
    worst = 0.0
    for c in ctx.constraints:
        for _ in range(ctx.samples):
            rho = random_positive_field(ctx.grid, rng)
            K = cons.k_value(rho, c) * rng.uniform(0.5, 2.0)
            once = cons.extend(rho, c, K)
            worst = max(worst, _maxabs(cons.extend(once, c, K), once))
            for lam in (0.5, 2.0):
                worst = max(worst, _maxabs(cons.extend(cons.fiber_scale(rho, c, lam), c, K), once))
    return worst


def _extension_exactness(ctx):
    rng = ctx.rng(41)
    worst = 0.0
    for c in ctx.constraints:
        for _ in range(ctx.samples):
            rho = random_positive_field(ctx.grid, rng)
            K = cons.k_value(rho, c) * rng.uniform(0.5, 2.0)
            worst = max(worst, abs(cons.k_value(cons.extend(rho, c, K), c) - K) / max(1.0, abs(K)))
            d = random_signed_field(ctx.grid, rng, amplitude=0.1)
            for eps in rng.uniform(-1, 1, size=3):
                path = cons.deformed_path(cons.extend(rho, c, K), d, eps, c, K)
                worst = max(worst, abs(cons.k_value(path, c) - K) / max(1.0, abs(K)))
    return worst


def _splits(ctx, salt):
    rng = ctx.rng(salt)
    for _ in range(ctx.samples):
        rho = random_positive_field(ctx.grid, rng)
        yield rho, random_signed_field(ctx.grid, rng)


def _shape_reconstruction(ctx):
    return max(_maxabs(shape_split(g, rho).reconstruct(), g) for rho, g in _splits(ctx, 44))


def _shape_conserving(ctx):
    worst = 0.0
    for rho, g in _splits(ctx, 46):
        s = shape_split(g, rho)
        N = float(np.dot(ctx.grid.weights, rho.values))
        worst = max(worst, abs(s.shape_part - inner(rho, g) / N),
                    _maxabs(s.n_part, k_derivative(g, rho, cons.identity(), N)))
    return worst


def _rescaled_shape(ctx):
    rng = ctx.rng(48)
    worst = rescaled_shape_crosscheck(fn.square(), ctx.grid.from_function(lambda x: 2 * x / ctx.grid.length + 1))
    for name in ("square", "entropy", "number_ratio"):
        worst = max(worst, rescaled_shape_crosscheck(ctx.functionals[name], random_positive_field(ctx.grid, rng)))
    return worst


def _norm_derivative(ctx):
    # the constant part equals a finite difference of A[N n] in N at fixed shape
    rng = ctx.rng(49)
    worst = 0.0
    for name in ("square", "entropy", "linear", "number_ratio"):
        A = ctx.functionals[name]
        rho = random_positive_field(ctx.grid, rng)
        s = shape_split(A.gradient(rho), rho)
        N, n = s.norm, s.shape
        probe = straight_directional(A, N * n, n, eps_schedule=(1e-3, 5e-4), require_convergence=False)
        worst = max(worst, abs(probe.value - s.shape_part))
    return worst


def _l_shape_normalization(ctx):
    rng = ctx.rng(50)
    worst = 0.0
    for _ in range(ctx.samples):
        rho = random_positive_field(ctx.grid, rng)
        h = random_positive_field(ctx.grid, rng)
        L = inner(h, rho)
        s = l_split(random_signed_field(ctx.grid, rng), rho, h, L)
        worst = max(worst, abs(inner(h, s.shape) - 1.0))
    return worst


def _l_shape_reconstruction(ctx):
    rng = ctx.rng(51)
    worst = 0.0
    for _ in range(ctx.samples):
        rho = random_positive_field(ctx.grid, rng)
        h = random_positive_field(ctx.grid, rng)
        g = random_signed_field(ctx.grid, rng)
        L = inner(h, rho)
        s = l_split(g, rho, h, L)
        c = cons.weighted_linear(lambda x, hv=h.values: hv)
        worst = max(worst, _maxabs(s.reconstruct(), g), _maxabs(s.n_part, k_derivative(g, rho, c, L)))
    return worst


def _deformed_gateaux(ctx):
    rng = ctx.rng(57)
    worst = 0.0
    for c in ctx.constraints:
        for A in ctx.functionals.values():
            for _ in range(ctx.samples):
                rho, K = ctx.on_set(c, rng)
                d = random_signed_field(ctx.grid, rng)
                worst = max(worst, directional_residual(A, rho, d, c, K))
    return worst


def _straight_linear(ctx):
    # for linear constraints, conserving straight lines need no deformation
    rng = ctx.rng(10)
    worst = 0.0
    for c in ctx.constraints:
        if not c.is_linear:
            continue
        for A in ctx.functionals.values():
            rho, K = ctx.on_set(c, rng)
            d = project_change(random_signed_field(ctx.grid, rng), rho, c, K)
            deformed = directional(A, rho, d, c, K, require_convergence=False).value
            straight = straight_directional(A, rho, d, require_convergence=False).value
            worst = max(worst, abs(deformed - straight))
    return worst


def _chain_checks(ctx):
    rng = ctx.rng(17)
    for c in ctx.constraints:
        rho, K = ctx.on_set(c, rng)
        off = rho * (1.0 + 0.05 * random_signed_field(ctx.grid, rng))
        for A in ctx.functionals.values():
            yield chain_rule_check(A, rho, c, K)
            yield chain_rule_check(A, off, c, K)


def _chain_rule(ctx):
    return max(r.residual for r in _chain_checks(ctx))


def _chain_rule_mu(ctx):
    return max(r.mu_shift for r in _chain_checks(ctx))


CASES = (
    IdentityCase("constraint-invertibility", "f^-1(f(rho)) = rho on the domain", 1e-10, "max-norm", _invertibility),
    IdentityCase("restricted-ambiguity", "g and g + mu f' agree on conserving changes", 1e-12, "abs", _restricted_ambiguity),
    IdentityCase("ambiguity-cancellation", "constrained derivative ignores g -> g + mu f'", 1e-12, "max-norm", _ambiguity_cancellation),
    IdentityCase("projection-annihilation", "sum w f' P(delta) = 0", 1e-12, "abs", _projection_annihilation),
    IdentityCase("weight-normalization", "sum w u = 1", 1e-12, "abs", _weight_normalization),
    IdentityCase("adjoint-duality", "inner(g, P delta) = inner(P^T g, delta)", 1e-12, "abs", _adjoint_duality),
    IdentityCase("equal-derivatives", "A and A + b(K) share constrained derivatives", 1e-10, "max-norm", _equal_derivatives),
    IdentityCase("constraint-functional-annihilation", "b(K[rho]) has zero constrained derivative", 1e-10, "max-norm", _constraint_functional),
    IdentityCase("scale-invariant-unconstrained", "N-independent A: constrained = plain gradient", 1e-6, "max-norm",
                 lambda ctx: _independent_unconstrained(ctx, "identity", 31)),
    IdentityCase("k-homogeneity", "A[f^-1(lam f)] = lam^m A", 1e-10, "relative", _k_homogeneity),
    IdentityCase("homogeneity-euler", "sum w (f/f') g = m A", 1e-6, "abs", _homogeneity_euler),
    IdentityCase("k-independent-unconstrained", "K-independent A: constrained = plain gradient", 1e-6, "max-norm",
                 lambda ctx: _independent_unconstrained(ctx, "power:2", 35)),
    IdentityCase("extension-gradient", "grad A[extend(.)] = constrained derivative", 1e-5, "max-norm", _extension_gradient),
    IdentityCase("extension-idempotence", "extend is idempotent and fiber-invariant", 1e-10, "max-norm", _extension_idempotence),
    IdentityCase("extension-exactness", "k_value(extend(rho)) = K, also along paths", 1e-12, "relative", _extension_exactness),
    IdentityCase("shape-reconstruction", "g = n_part + shape_part", 1e-12, "max-norm", _shape_reconstruction),
    IdentityCase("shape-conserving-average", "shape_part = inner(rho, g) / N", 1e-12, "max-norm", _shape_conserving),
    IdentityCase("rescaled-shape-route", "N-conserving part via A[N n]", 1e-5, "max-norm", _rescaled_shape),
    IdentityCase("norm-derivative", "shape_part = d A[N n] / dN", 1e-6, "abs", _norm_derivative),
    IdentityCase("l-shape-normalization", "sum w h l = 1", 1e-12, "abs", _l_shape_normalization),
    IdentityCase("l-shape-reconstruction", "g = n_part + h shape_part", 1e-12, "max-norm", _l_shape_reconstruction),
    IdentityCase("linear-straight-path", "linear constraint: deformed = straight slope", 1e-8, "abs", _straight_linear),
    IdentityCase("deformed-gateaux", "path slope = inner(constrained derivative, delta)", 1e-5, "abs", _deformed_gateaux),
    IdentityCase("chain-rule", "grad of A[extend(g)] via the chain rule", 1e-5, "max-norm", _chain_rule),
    IdentityCase("chain-rule-mu-insensitivity", "chain rule ignores g -> g + mu f'", 1e-12, "max-norm", _chain_rule_mu),
)

REQUIRED_IDS = frozenset(c.id for c in CASES)


def default_context(seed=0, grid=None, constraints=None, functionals=None, samples=5):
    return Context(
        grid=grid or Grid(200),
        constraints=list(constraints) if constraints is not None else cons.builtin_constraints(),
        functionals=functionals if functionals is not None else fn.catalog(),
        seed=seed,
        samples=samples,
    )


def run_all(seed=0, ctx=None, cases=CASES, tol_scale=1.0):
    """Run every case; failures and exceptions become report rows, never raise."""
    ctx = ctx or default_context(seed)
    report = Report()
    for case in cases:
        try:
            residual = float(case.run(ctx))
            error = None if np.isfinite(residual) else "non-finite residual"
        except Exception as exc:  # noqa: BLE001 - every failure is a report row
            residual, error = float("inf"), f"{type(exc).__name__}: {exc}"
        report.rows.append(Row(case.id, case.title, residual, case.tol * tol_scale, case.metric, error))
    return report

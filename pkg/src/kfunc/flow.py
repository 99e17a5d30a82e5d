"""Constrained steepest descent with exact renormalization.

Each step moves against the constrained derivative and maps the result back
onto the constraint set with :func:`~kfunc.constraint.extend`.  The descent
direction alone does not conserve the constraint even to first order, so
the renormalization is part of the step, not a cleanup.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import constraint as cons
from .errors import ConstraintMismatch, DomainError, ZeroDenominator
from .kderiv import k_derivative, multiplier

__all__ = ["FlowOptions", "FlowRecord", "FlowStatus", "FlowTrace", "flow_step", "minimize", "multiplier"]


class FlowStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    STEP_UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True)
class FlowOptions:
    eta0: float = 0.1
    shrink: float = 2.0
    grow: float = 1.5
    tol: float = 1e-8
    max_iter: int = 10_000
    eta_min: float = 1e-14
    extend_initial: bool = False
    # steps whose k_value drifts further than this (relative) are rejected
    k_tol: float = 1e-10


@dataclass(frozen=True)
class FlowRecord:
    iteration: int
    energy: float
    k: float
    residual: float
    eta: float


@dataclass
class FlowTrace:
    records: list = field(default_factory=list)
    status: FlowStatus | None = None
    rho: object = None
    mu: float = float("nan")

    @property
    def iterations(self):
        return self.records[-1].iteration if self.records else 0

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def flow_step(rho, A, c, K, eta, g=None):
    """``extend(rho - eta * k_derivative(grad A), c, K)``."""
    if not eta > 0:
        raise ValueError(f"step size eta must be positive, got {eta}")
    if g is None:
        g = A.gradient(rho)
    d = k_derivative(g, rho, c, K)
    return cons.extend(rho - eta * d, c, K)


def minimize(A, rho0, c, K, opts=FlowOptions()):
    """Backtracking constrained descent from ``rho0``.

    The step is halved on an energy increase or a domain/range error and
    grown (capped at ``eta0``) after each accepted step, so recorded energies
    never increase.  Close to a minimizer the energy decrease of a step falls
    below rounding once the residual is around ``sqrt(eps)`` times the
    gradient scale; the search then ends in ``StepUnderflow`` rather than
    ``Converged`` if ``tol`` is tighter than that.  Row 0 of the trace is the
    starting point; every further row is an accepted step.
    """
    K = cons.check_k(K)
    rho = cons.extend(rho0, c, K) if opts.extend_initial else rho0
    trace = FlowTrace()
    eta = opts.eta0

    g = A.gradient(rho)
    d = k_derivative(g, rho, c, K)
    energy = A(rho)
    residual = d.max_abs()
    trace.records.append(FlowRecord(0, energy, cons.k_value(rho, c), residual, 0.0))

    it = 0
    while True:
        if residual <= opts.tol:
            trace.status = FlowStatus.CONVERGED
            break
        if it >= opts.max_iter:
            trace.status = FlowStatus.MAX_ITERS
            break
        try:
            trial = cons.extend(rho - eta * d, c, K)
            cons.require_on_constraint(trial, c, K, opts.k_tol)
            trial_energy = A(trial)
        except (DomainError, ZeroDenominator, ConstraintMismatch, ValueError, FloatingPointError):
            trial, trial_energy = None, np.inf
        if not trial_energy <= energy:
            eta /= opts.shrink
            if eta < opts.eta_min:
                trace.status = FlowStatus.STEP_UNDERFLOW
                break
            continue
        it += 1
        rho, energy = trial, trial_energy
        g = A.gradient(rho)
        d = k_derivative(g, rho, c, K)
        residual = d.max_abs()
        trace.records.append(FlowRecord(it, energy, cons.k_value(rho, c), residual, eta))
        eta = min(eta * opts.grow, opts.eta0)

    trace.rho = rho
    trace.mu = multiplier(g, rho, c, K)
    return trace

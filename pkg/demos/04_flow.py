"""
Descent at fixed particle number
================================

Minimizing ``int rho^2`` with ``int rho = 1`` has the answer ``rho = 1`` with
multiplier 2.  Each step follows the conserving derivative and is then
mapped back onto the constraint set, so the number stays fixed to rounding.

Near the minimum the energy change per step drops below float resolution
well before the residual reaches 1e-8.  The line search then reports
``StepUnderflow``; the field is already accurate to about 1e-8.
"""

import numpy as np

from kfunc import Grid, constraint as cons, functionals as fn
from kfunc.flow import FlowOptions, minimize

grid = Grid(200)
rho0 = grid.from_function(lambda s: s + 0.5)

trace = minimize(fn.square(), rho0, cons.identity(), 1.0)
print(trace.status.value, "after", trace.iterations, "steps")
print("max |rho - 1| =", np.max(np.abs(trace.rho.values - 1)))
print("mu =", trace.mu)
print("number drift  =", np.max(np.abs(trace.column("k") - 1)))
print("energy never rises:", bool(np.all(np.diff(trace.column("energy")) <= 0)))

# a tolerance above the rounding floor ends in Converged
loose = minimize(fn.square(), rho0, cons.identity(), 1.0, FlowOptions(tol=1e-6))
print(loose.status.value, "after", loose.iterations, "steps with tol=1e-6")

try:
    from kfunc.plotting import plot_trace
except ImportError:   # matplotlib is optional
    pass
else:
    plot_trace(trace, "flow_trace.svg")
    print("wrote flow_trace.svg")

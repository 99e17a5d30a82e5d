"""
Directional derivatives along renormalized paths
================================================

A straight perturbation ``rho + eps * delta`` usually breaks the constraint.
Rescaling ``f(rho)`` back onto the constraint set at every ``eps`` gives a
curved path whose slope is the conserving derivative paired with ``delta``,
for any ``delta`` at all.
"""

import numpy as np

from kfunc import Grid, constraint as cons, functionals as fn
from kfunc.gateaux import chain_rule_check, directional
from kfunc.grid import inner
from kfunc.kderiv import k_derivative

grid = Grid(200)
rho = grid.from_function(lambda s: s + 0.5)
delta = grid.from_function(lambda s: np.sin(2 * np.pi * s))
c = cons.identity()
A = fn.square()

probe = directional(A, rho, delta, c, 1.0)
predicted = inner(k_derivative(A.gradient(rho), rho, c, 1.0), delta)
print("finite differences:", probe.estimates)
print("extrapolated slope:", probe.value)
print("inner product     :", predicted, " (-1/pi =", -1 / np.pi, ")")

# the same works for a nonlinear constraint, where the path really bends
c2 = cons.power(2)
K2 = cons.k_value(rho, c2)
bump = grid.from_function(lambda s: np.exp(-40 * (s - 0.3) ** 2))
probe2 = directional(fn.entropy(), rho, bump, c2, K2)
print("int rho^2 conserved, entropy slope:", probe2.value,
      " vs", inner(k_derivative(fn.entropy().gradient(rho), rho, c2, K2), bump))

# differentiating A after extend() reproduces the conserving derivative
check = chain_rule_check(fn.entropy(), rho * 1.1, c2, K2)
print("chain rule residual:", check.residual, " multiplier-shift change:", check.mu_shift)

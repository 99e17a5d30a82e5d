"""
Constrained derivative of a quadratic energy
============================================

The plain gradient of ``A = int rho^2`` is ``2 rho``.  Once the total number
``int rho`` is held fixed, any constant can be added to the gradient without
changing first-order energy changes.  The conserving derivative picks the
representative that integrates to zero against the constraint weight.
"""

import numpy as np

from kfunc import Grid, constraint as cons, functionals as fn
from kfunc.kderiv import WeightChoice, k_derivative, u_derivative

grid = Grid(200)
x = grid.nodes
rho = grid.from_function(lambda s: s + 0.5)   # int rho = 1
c = cons.identity()
A = fn.square()

g = A.gradient(rho)
d = k_derivative(g, rho, c, 1.0)

# 2x - 7/6 in closed form
print("max |d - (2x - 7/6)| =", np.max(np.abs(d.values - (2 * x - 7 / 6))))

# adding mu * f' to the gradient is invisible after the constraint is applied
shifted = k_derivative(g + 5.0, rho, c, 1.0)
print("shift by 5 changes the result by", (shifted - d).max_abs())

# a different weight gives a different, equally valid representative:
# the point weight pins the derivative to zero at one node
pinned = u_derivative(g, rho, c, WeightChoice.point(0))
print("pinned at node 0:", pinned.values[0], " range:", pinned.values.min(), pinned.values.max())

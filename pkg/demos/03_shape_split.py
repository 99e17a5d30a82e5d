"""
Splitting a gradient into shape and size
========================================

Writing ``rho = N n`` with ``N = int rho`` separates how the energy responds
to a change of shape at fixed size from how it responds to a change of size.
The two parts add back up to the plain gradient.
"""

import numpy as np

from kfunc import Grid, functionals as fn
from kfunc.decompose import l_split, rescaled_shape_crosscheck, shape_split
from kfunc.grid import inner

grid = Grid(200)
x = grid.nodes
rho = grid.from_function(lambda s: 2 * s + 1)   # N = 2
A = fn.square()

split = shape_split(A.gradient(rho), rho)
print("N =", split.N, " dA/dN =", split.shape_part)
print("reconstruction error:", (split.reconstruct() - A.gradient(rho)).max_abs())
print("N * shape derivative vs 8x - 14/3:",
      np.max(np.abs(split.N * split.n_part.values - (8 * x - 14 / 3))))
print("rescaling route agrees to", rescaled_shape_crosscheck(A, rho))

# with a weighted size L = int h rho the size part multiplies h
h = grid.from_function(lambda s: 1 + s)
L = inner(h, rho)
ls = l_split(A.gradient(rho), rho, h, L)
print("L =", L, " int h l =", inner(h, ls.shape))

"""Constrained functional derivatives on discretized 1-D fields."""

from .constraint import (ConstraintSpec, deformed_path, exponential, extend, fiber_scale, identity,
                         k_value, power, weighted_linear)
from .decompose import ShapeSplit, l_split, rescaled_shape_crosscheck, shape, shape_split
from .flow import FlowOptions, FlowStatus, FlowTrace, flow_step, minimize
from .functionals import Functional
from .gateaux import PathProbe, chain_rule_check, directional, directional_residual
from .grid import Field, Grid, fd_gradient, inner, integrate
from .kderiv import (WeightChoice, homogeneity_residual, k_derivative, multiplier, project_change,
                     u_derivative)

__version__ = "0.1.0"

"""
Checking every identity at once
===============================

``run_all`` evaluates each identity on random fields for every built-in
constraint and functional and reports the worst residual against its
tolerance.  A custom constraint can be added to the context.
"""

from kfunc import Grid, constraint as cons
from kfunc.verify_suite import default_context, run_all

print(run_all(seed=0).format())

# f = rho^3 is invertible on positive fields, so everything should still hold
ctx = default_context(seed=1, grid=Grid(100), samples=2,
                      constraints=cons.builtin_constraints() + [cons.power(3)])
report = run_all(ctx=ctx)
print("with power:3 added:", "all pass" if report.passed else "FAILURES")

# %% [markdown]
# # Discrete maximal and CMC graphs
#
# Newton's method on a flux-form discretization.  On the flat torus every
# maximal graph into a line is constant; random spacelike data relaxes to its
# mean.  Over a hyperbolic disc with family boundary data the solver
# reproduces the radial profile at second order.

# %%
import tempfile
from pathlib import Path

import numpy as np

from spacelike import CmcFamily, SolveOptions, bernstein_experiment, make_metric, radial_graph, solve_cmc
from spacelike.solver import write_solution_csv

exp = bernstein_experiment(seed=0, grid=64)
print(f"initial sup|Df_h| = {exp.initial_max_gradient:.3f}")
for rec in exp.history:
    print(f"  step {rec.iteration}: residual {rec.residual:.2e}, sup|Df_h| {rec.max_gradient:.2e}, step length {rec.step}")
print("limit value:", exp.limit_value)

# %%
metric = make_metric("poincare_ball", dim=2)
fam = CmcFamily(2, 1.0)
errors = []
for h in (1 / 16, 1 / 32, 1 / 64, 1 / 128):
    sol = solve_cmc(SolveOptions(c=1.0), radial_graph(metric, 2.0, h, fam.value(2.0)), metric)
    errors.append(max(abs(v - fam.value(r)) for v, r in zip(sol.values, sol.nodes())))
    print(f"h = 1/{round(1 / h)}: max error {errors[-1]:.3e}")
print("observed orders:", np.round(np.log2(np.array(errors[:-1]) / np.array(errors[1:])), 3))

# %%
out = Path(tempfile.mkdtemp()) / "radial.csv"
write_solution_csv(sol, out)
print(out.read_text().splitlines()[:3])

# %% [markdown]
# # Pointwise identities for cosh(theta)
#
# Each identity is evaluated two ways: a frame-free derivative of
# u = cosh(theta) and an expansion in the adapted frames.  Reports carry the
# residual, the hypothesis flags and a pass/fail verdict.

# %%
import numpy as np

from spacelike import CORPUS, IDENTITY_TAGS, bernstein_inequality, run_scenario

# %%
sc = CORPUS["torus_periodic_plane_target"]
b = sc.build()
result = run_scenario(b.product, b.graph, [np.array(q) for q in sc.points], sc.name)
for r in result.reports[:5]:
    print(f"{r.name:26s} [{IDENTITY_TAGS[r.name]}] residual {r.residual:.2e} {r.verdict}")
print("scenario passed:", result.passed)

# %% [markdown]
# Lower bound for the Laplacian of ln cosh(theta).  Over flat factors the
# curvature hypotheses hold and the bound follows.  Over hyperbolic space the
# Ricci hypothesis fails, and so does the inequality, even though the
# identity itself is exact.

# %%
for name in ("polynomial_flat_2x1", "cmc_hyperbolic_plane_c1"):
    sc = CORPUS[name]
    b = sc.build()
    r = bernstein_inequality(b.product, b.graph, np.array(sc.points[0]))
    print(name)
    print("  flags            :", r.hypothesis_flags)
    print("  Delta ln u       :", r.lhs)
    print("  delta |B|^2      :", r.checks["delta_B_norm_sq"])
    print("  inequality holds :", r.checks["inequality_holds"])

# %% [markdown]
# # Curvature of the factor metrics
#
# Every factor lives in a single chart.  Christoffel symbols and the Riemann
# tensor come from forward-mode differentiation of the metric function, so a
# new metric only needs its components.

# %%
import numpy as np

from spacelike import eval_curvature, geodesic_ball_measures, make_metric

rng = np.random.default_rng(0)

# %% [markdown]
# Sectional curvature of the Poincare ball and of the stereographic sphere at
# random points and random planes.

# %%
for name in ("poincare_ball", "sphere_stereo"):
    metric = make_metric(name, dim=3)
    ks = []
    for _ in range(5):
        p = rng.uniform(-0.5, 0.5, 3)
        u, v = rng.normal(size=(2, 3))
        ks.append(eval_curvature(metric, p).sectional(u, v))
    print(f"{name:14s} K = {np.round(ks, 12)}")

# %% [markdown]
# Ricci curvature of hyperbolic 3-space is -2 g.

# %%
cd = eval_curvature(make_metric("poincare_ball", dim=3), np.array([0.1, 0.4, -0.2]))
print("Ric + 2g =", np.max(np.abs(cd.ricci + 2 * cd.metric)))

# %% [markdown]
# Geodesic balls: volume and boundary area against the closed forms
# 2 pi (cosh r - 1) and 2 pi sinh r in the hyperbolic plane.

# %%
disc = make_metric("poincare_ball", dim=2)
for r in (0.5, 1.0, 3.0):
    vol, area = geodesic_ball_measures(disc, np.zeros(2), r)
    print(f"r = {r}: V = {vol:.12f} ({2 * np.pi * (np.cosh(r) - 1):.12f}), A = {area:.12f} ({2 * np.pi * np.sinh(r):.12f})")

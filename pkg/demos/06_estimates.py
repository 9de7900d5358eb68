# %% [markdown]
# # Mean curvature bound on geodesic balls
#
# On a ball D with b = sup |grad f| the infimum of |<H, nu>| is at most
# b / sqrt(1 - b^2) * A(dD) / V(D).  The hyperboloid over Euclidean balls and
# the radial family over hyperbolic discs attain equality.

# %%
from spacelike import builtin_graph, cheeger_witness, make_metric, mean_curvature_bound

for name, params in (("hyperboloid", {"m": 2}), ("cmc_family", {"m": 2, "c": 1.0}), ("polynomial", {"m": 2, "n": 1, "seed": 1})):
    b = builtin_graph(name, **params)
    res = mean_curvature_bound(b.product, b.graph, 0.8)
    print(f"{name:12s} inf|<H,nu>| = {res.lhs:.10f} <= {res.rhs:.10f} (slack {res.slack:.2e})")

# %% [markdown]
# The Cheeger witness min A/V over concentric balls: m / r in Euclidean
# space, and sinh r / (cosh r - 1) in the hyperbolic plane.

# %%
for r in (1.0, 2.0, 4.0, 8.0):
    print(f"r = {r}: Euclidean {cheeger_witness(make_metric('euclidean', dim=3), r):.12f}, "
          f"hyperbolic {cheeger_witness(make_metric('poincare_ball', dim=2), min(r, 6.0)):.12f}")

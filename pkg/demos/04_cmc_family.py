# %% [markdown]
# # Radial constant mean curvature graphs over hyperbolic space
#
# The profile f_c(r) solves the radial equation with <H, nu> = c.  Its slope
# stays below sqrt(q / (1 + q)) with q = c^2 / (m - 1)^2 and approaches that
# bound at infinity.

# %%
import numpy as np

from spacelike import CmcFamily, calabi_operator, hypersurface_mean_curvature, verify_family_properties

fam = CmcFamily(2, 1.0)
for r in (0.5, 1.0, 5.0, 20.0):
    print(f"r = {r:5.1f}: f = {fam.value(r):.12f}, |f'|^2 = {fam.slope(r) ** 2:.12f}")
print("bound:", fam.gradient_bound())

# %% [markdown]
# Mean curvature from the second fundamental form and from the divergence
# form of the operator, at random points of the Poincare disc.

# %%
pts = np.random.default_rng(1).uniform(-0.6, 0.6, size=(6, 2))
hnu, _ = hypersurface_mean_curvature(fam.product(), fam.graph_map(), pts)
print("from B         :", hnu)
print("from divergence:", calabi_operator(fam.product(), fam.graph_map(), pts))

# %%
for rep in verify_family_properties(3, 5.0):
    print(f"{rep.name:32s} {rep.verdict}")

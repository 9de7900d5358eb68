# %% [markdown]
# # Induced geometry of a spacelike graph
#
# A map f: S1 -> S2 is spacelike when every singular value of df (measured
# with g1 and g2) is below one.  The singular directions give adapted frames
# for the tangent and normal bundles of the graph in (S1 x S2, g1 - g2).

# %%
import numpy as np

from spacelike import analyze_graph_point, builtin_graph, second_fundamental, structure_equation_residuals

b = builtin_graph("polynomial", m=2, n=2, seed=5, radius=0.6, sigma1="sphere_stereo", sigma2="poincare_ball")
p = np.array([0.2, -0.1])

# %%
frame = analyze_graph_point(b.product, b.graph, p)
print("singular values:", frame.lambdas)
print("cosh(theta)    :", frame.cosh_theta)
print("gbar on tangent frame:\n", np.round(frame.e_tangent.T @ frame.gbar @ frame.e_tangent, 12))
print("gbar on normal frame:\n", np.round(frame.e_normal.T @ frame.gbar @ frame.e_normal, 12))

# %% [markdown]
# The second fundamental form in the adapted frames, and the three
# structure equations checked against the ambient curvature.

# %%
ext = second_fundamental(b.product, b.graph, p)
print("h^alpha_ij =\n", np.round(ext.h, 6))
print("|H| =", ext.H_norm, " |B|^2 =", ext.B_norm_sq)
print("Gauss, Codazzi, Ricci residuals:", tuple(structure_equation_residuals(b.product, b.graph, p)))

# %% [markdown]
# The hyperboloid over Euclidean space is umbilic with mean curvature m.

# %%
hyp = builtin_graph("hyperboloid", m=3)
e = second_fundamental(hyp.product, hyp.graph, np.array([1.0, -0.5, 2.0]))
print("hyperboloid: h =", np.round(e.h[0], 12).tolist(), " <H, nu> =", e.mean_curvature_nu)

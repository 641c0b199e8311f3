# %% [markdown]
# # Three centers: orbifold limit and near-cluster bounds
#
# When n centers coalesce, the metric tends to a model with Ricci
# eigenvalues ζ (radial and fiber) and η (spherical). η stays positive only
# for n ≤ 3.

# %%

from selfdual_ricci import collinear_config
from selfdual_ricci.cluster import bound_grid_minima, cluster_certificate, orbifold_positivity, orbifold_ricci

for n in range(1, 7):
    v = orbifold_positivity(n)
    print(f"n = {n}: {v.verdict:12s} boundary η/ζ = {v.limit_eta_over_zeta:+.3f}  witness r = {v.witness_r}")

# %%
for r in (0.1, 1.0, 5.0):
    print(r, [tuple(round(x, 4) for x in orbifold_ricci(n, r)) for n in (3, 4, 5)])

# %% [markdown]
# Close to a tight collinear cluster the leading part of 6V·Ric is a form
# R̂ whose quadratic forms are bounded below by the coefficient functions
# a_j, b_j ≥ 1 and a_jk, b_jk ≥ 4.

# %%
print(bound_grid_minima(300, 300))

# %%
cert = cluster_certificate(collinear_config([0.1, 0.1]), epsilon=0.05, samples=2000)
print(cert.to_json())

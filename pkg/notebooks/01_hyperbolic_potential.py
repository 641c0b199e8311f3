# %% [markdown]
# # The harmonic potential on hyperbolic space
#
# Points live in the upper half space with metric (dx² + dy² + dz²)/z².
# Each center contributes a Green's function G = (coth r - 1)/2 and the
# potential is V = 1 + Σ G(r_j).

# %%
import math


from selfdual_ricci import Configuration, Gauge, HPoint, dist, dr_covector, potential
from selfdual_ricci.hyperbolic import dgreen, green, sphere_flux

p, q = HPoint(1.0, 0.0, 1.0), HPoint(0.0, 0.0, 1.0)
print("dist", dist(p, q), "vs arccosh(1.5)", math.acosh(1.5))
print("dr at p", dr_covector(p, q))

# %% [markdown]
# The flux of ⋆dG through any geodesic sphere around its center is -2π,
# whatever the radius.

# %%
c = HPoint(0.0, 0.0, 1.0)
for radius in (0.05, 0.5, 2.0, 5.0):
    flux = sphere_flux(lambda x: dgreen(dist(x, c)) * dr_covector(x, c), c, radius)
    print(f"r = {radius:4}: flux + 2π = {flux + 2 * math.pi:+.2e}")

# %% [markdown]
# For two centers V reduces to (coth r1 + coth r2)/2.

# %%
cfg = Configuration(((0, 0, 1), (0, 0, math.e)), Gauge.mean_distance())
x = HPoint(0.4, 0.1, 1.5)
r1, r2 = (dist(x, c) for c in cfg.centers)
print(potential(cfg, x).V, 0.5 / math.tanh(r1) + 0.5 / math.tanh(r2))
print("G at coth r = 2:", green(0.5 * math.log(3)))

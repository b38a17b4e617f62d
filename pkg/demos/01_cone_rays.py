# %% [markdown]
# # Rays from the vertex Dirac
#
# Over a cone, scaling every atom's radius by `s` moves a measure along a
# straight ray out of the vertex Dirac. Distances between two such rays follow
# the planar law of cosines with the ray angle `arccos(1 - W2^2 / 2)`.

# %%
import math

import numpy as np

from wassercone import Circle, Cone
from wassercone.cone import (
    cone_identity_terms,
    direction_angle,
    radial_geodesic,
    radial_second_moment,
    unit_direction,
    vertex_cone_distance,
)
from wassercone.measure import random_measure
from wassercone.transport import wasserstein_distance

rng = np.random.default_rng(0)
cone = Cone(Circle())
mu = random_measure(cone, rng, 5)
nu = random_measure(cone, rng, 4)

# %% [markdown]
# Speed along the ray is the root second moment about the vertex.

# %%
speed = math.sqrt(radial_second_moment(mu))
for s, t in [(0.0, 1.0), (0.25, 0.75), (0.9, 0.1)]:
    w = wasserstein_distance(radial_geodesic(mu, s), radial_geodesic(mu, t))
    print(f"s={s:.2f} t={t:.2f}  W2={w:.12f}  |s-t|*speed={abs(s - t) * speed:.12f}")

# %% [markdown]
# The scaling identity: both sides agree to rounding.

# %%
lhs, rhs = cone_identity_terms(mu, nu, 1.7, 0.4)
print(lhs, rhs, lhs - rhs)

# %% [markdown]
# Normalise both measures to unit distance, then compare the cosine-law
# prediction with a direct transport solve.

# %%
umu, unu = unit_direction(mu), unit_direction(nu)
print("angle between rays:", direction_angle(umu, unu))
for a, b in [(1.0, 1.0), (2.0, 0.5), (0.0, 3.0)]:
    print(a, b, vertex_cone_distance(umu, unu, a, b),
          wasserstein_distance(radial_geodesic(umu, a), radial_geodesic(unu, b)))

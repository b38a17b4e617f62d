# %% [markdown]
# # Branching through the vertex, and splitting off a line
#
# Three points at mutual distance `pi` make a cone with three rays, each pair
# forming a line. A geodesic of measures can enter the vertex along one ray and
# leave along a mixture of the other two.

# %%
from wassercone.cone import branching_geodesic_demo, non_branching_at_vertex, tripod_space

demo = branching_geodesic_demo()
print("W2(start, end):", demo.w2_endpoints)
print("W2(start, mid), W2(mid, end):", demo.w2_start_mid, demo.w2_mid_end)

base = tripod_space()
check = non_branching_at_vertex(base, base.points())
print("non-branching:", check.non_branching, "witness:", [base.labels[p.index] for p in check.witness])

# %% [markdown]
# On a product with a Euclidean factor, a measure splits into its mean and a
# centred part. Translating two centred measures adds `|h - hhat|^2` to `W2^2`.

# %%
import numpy as np

from wassercone import Circle, Euclidean, Product
from wassercone.measure import random_measure
from wassercone.splitting import decompose, splitting_terms

rng = np.random.default_rng(1)
space = Product(Circle(), Euclidean(2))
mu, h = decompose(random_measure(space, rng, 5))
nu, hhat = decompose(random_measure(space, rng, 6))
print("means:", h, hhat)
print(splitting_terms(mu, nu, h, hhat))

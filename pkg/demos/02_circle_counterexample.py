# %% [markdown]
# # Two-atom measures on the circle
#
# Take half the mass at `0` and `pi - 2*theta`, against half at `theta` and `pi`.
# On the circle the optimal pairing moves the atoms by `theta` and `2*theta`,
# so `W2^2 = 5 theta^2 / 2`. After embedding both measures on the unit sphere
# of the cone, the angle between them has cosine `(cos theta + cos 2 theta) / 2`.
# The two quantities agree to leading order but not exactly.

# %%
import math

from wassercone.cone import remark_counterexample, theta_grid

print(f"{'theta':>8} {'W2 circle':>12} {'ray angle':>12} {'difference':>12}")
for theta in theta_grid(19):
    rec = remark_counterexample(theta)
    print(f"{theta:8.4f} {rec.w2_base:12.8f} {rec.angle:12.8f} {rec.signed_difference:+12.3e}")

# %% [markdown]
# Solver output against the closed forms at `theta = pi/6`.

# %%
rec = remark_counterexample(math.pi / 6)
print(rec.w2sq_base, 5 * math.pi**2 / 72)
print(rec.cos_angle_cone, 0.5 * (math.cos(math.pi / 6) + math.cos(math.pi / 3)))

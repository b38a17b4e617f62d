"""Finitely supported probability measures on a :class:`~wassercone.metric.Space`."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm

from .metric import (
    Euclidean,
    EuclideanPoint,
    Product,
    ProductPoint,
    Space,
    SpaceMismatchError,
    space_from_json,
)

WEIGHT_SUM_TOL = 1e-12
MERGE_TOL = 1e-12


class DiscreteMeasure:
    """Probability measure ``sum_i w_i delta_{x_i}``.

    Support points closer than ``merge_tol`` are merged at construction (the
    first occurrence is kept, weights are added), so the support is always
    pairwise distinct.  Weights must be strictly positive and sum to one.
    """

    def __init__(self, space: Space, support: Sequence, weights: Sequence[float] | None = None,
                 merge_tol: float = MERGE_TOL):
        support = list(support)
        if not support:
            raise ValueError("a measure needs a non-empty support")
        if weights is None:
            weights = np.full(len(support), 1.0 / len(support))
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape[0] != len(support):
            raise ValueError(f"{len(support)} support points but {w.shape[0]} weights")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("weights must be finite and strictly positive")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {math.fsum(w)!r}, not 1")
        for x in support:
            space.check(x)

        if len(support) > 1:
            d = space.pairwise(support, support)
            owner = np.full(len(support), -1)
            for i in range(len(support)):
                if owner[i] < 0:
                    close = (d[i] <= merge_tol) & (owner < 0)
                    owner[close] = i
                    owner[i] = i
            keep = np.flatnonzero(owner == np.arange(len(support)))
            if keep.size < len(support):
                merged = np.zeros(len(support))
                np.add.at(merged, owner, w)
                support = [support[i] for i in keep]
                w = merged[keep]

        w.setflags(write=False)
        self.space = space
        self.support = tuple(support)
        self.weights = w

    def __len__(self):
        return len(self.support)

    def __iter__(self):
        return iter(zip(self.support, self.weights))

    def __repr__(self):
        return f"DiscreteMeasure({self.space!r}, size={len(self)})"

    def isclose(self, other: "DiscreteMeasure", atol: float = 1e-12) -> bool:
        """Same space, and supports and weights agree up to ``atol``
        (independently of the order of the support)."""
        if self.space != other.space or len(self) != len(other):
            return False
        d = self.space.pairwise(list(self.support), list(other.support))
        used = np.zeros(len(other), dtype=bool)
        for i in range(len(self)):
            hits = np.flatnonzero((d[i] <= atol) & ~used
                                  & (np.abs(other.weights - self.weights[i]) <= atol))
            if hits.size == 0:
                return False
            used[hits[0]] = True
        return True

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "support": [self.space.point_to_json(x) for x in self.support],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteMeasure":
        if not isinstance(obj, dict) or not {"space", "support", "weights"} <= set(obj):
            raise ValueError("measure JSON needs 'space', 'support' and 'weights'")
        space = space_from_json(obj["space"])
        return cls(space, [space.point_from_json(p) for p in obj["support"]], obj["weights"])


def dirac(space: Space, x) -> DiscreteMeasure:
    return DiscreteMeasure(space, [x], [1.0])


def pushforward(mu: DiscreteMeasure, fn: Callable, target: Space | None = None) -> DiscreteMeasure:
    """Image measure of ``mu`` under ``fn``; coincident images are merged."""
    target = mu.space if target is None else target
    images = [fn(x) for x in mu.support]
    for y in images:
        target.check(y)
    return DiscreteMeasure(target, images, mu.weights)


def second_moment(mu: DiscreteMeasure, base) -> float:
    """``sum_i w_i d(base, x_i)^2``, i.e. ``W_2(delta_base, mu)^2``."""
    mu.space.check(base)
    return float(mu.weights @ mu.space.pairwise_sq([base], list(mu.support))[0])


# -- Euclidean factor access -------------------------------------------------


def euclidean_factor(space: Space) -> Euclidean:
    """The Euclidean factor of ``space``: the space itself, or the right (else
    left) factor of a product."""
    if isinstance(space, Euclidean):
        return space
    if isinstance(space, Product):
        if isinstance(space.right, Euclidean):
            return space.right
        if isinstance(space.left, Euclidean):
            return space.left
    raise SpaceMismatchError(f"{space!r} has no Euclidean factor")


def euclidean_coords(space: Space, xs: Sequence) -> np.ndarray:
    """Coordinates of the Euclidean projections of ``xs`` as an (n, k) array."""
    factor = euclidean_factor(space)
    if space is factor:
        return factor.coords(xs)
    side = "right" if space.right is factor else "left"
    return factor.coords([getattr(x, side) for x in xs])


def replace_euclidean(space: Space, x, coords) -> object:
    """Copy of point ``x`` with its Euclidean component set to ``coords``."""
    factor = euclidean_factor(space)
    new = EuclideanPoint(tuple(coords))
    if space is factor:
        return new
    if space.right is factor:
        return ProductPoint(x.left, new)
    return ProductPoint(new, x.right)


def mean(mu: DiscreteMeasure) -> np.ndarray:
    """Barycentre of the Euclidean projection of ``mu``."""
    return mu.weights @ euclidean_coords(mu.space, mu.support)


# -- construction helpers ----------------------------------------------------


def quantize_normal(n: int) -> DiscreteMeasure:
    """Standard normal quantised to ``n`` equal atoms at the mid-level
    quantiles ``(i - 1/2) / n``."""
    if n < 2:
        raise ValueError("quantize_normal needs n >= 2")
    levels = (np.arange(1, n + 1) - 0.5) / n
    q = norm.ppf(levels)
    # symmetrise so the mean is exactly zero
    q = 0.5 * (q - q[::-1])
    return DiscreteMeasure(Euclidean(1), [EuclideanPoint((v,)) for v in q])


def random_measure(space: Space, rng: np.random.Generator, size: int,
                   uniform: bool = False) -> DiscreteMeasure:
    """Random measure with ``size`` sampled atoms (fewer if samples collide)."""
    pts = space.sample(rng, size)
    if uniform:
        w = np.full(size, 1.0 / size)
    else:
        w = rng.dirichlet(np.ones(size)) + 1e-3
        w /= w.sum()
    return DiscreteMeasure(space, pts, w)

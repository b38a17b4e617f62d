"""Splitting off a Euclidean factor: means, translations and the product
decomposition of the quadratic Wasserstein space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import (
    DiscreteMeasure,
    euclidean_coords,
    euclidean_factor,
    mean,
    pushforward,
    replace_euclidean,
    second_moment,
)
from .metric import Euclidean
from .transport import w2_squared

ZERO_MEAN_TOL = 1e-9
DIAMETER_TOL = 1e-9


def _shift(mu: DiscreteMeasure, h) -> np.ndarray:
    k = euclidean_factor(mu.space).dim
    h = np.asarray(h, dtype=float).ravel()
    if h.shape != (k,):
        raise ValueError(f"shift has dimension {h.size}, Euclidean factor has {k}")
    return h


def translate(mu: DiscreteMeasure, h) -> DiscreteMeasure:
    """Push ``mu`` forward under ``x -> x + h`` on the Euclidean factor."""
    h = _shift(mu, h)
    coords = euclidean_coords(mu.space, mu.support)
    new = {x: replace_euclidean(mu.space, x, c + h) for x, c in zip(mu.support, coords)}
    return pushforward(mu, new.__getitem__, mu.space)


def decompose(mu: DiscreteMeasure) -> tuple[DiscreteMeasure, np.ndarray]:
    """Split ``mu`` into its centred part and its mean."""
    h = mean(mu)
    return translate(mu, -h), h


def _check_centred(mu: DiscreteMeasure, tol: float) -> None:
    m = mean(mu)
    if np.linalg.norm(m) > tol:
        raise ValueError(f"measure is not centred: mean = {m}")


def splitting_terms(mu, nu, h, hhat, tol: float = ZERO_MEAN_TOL) -> tuple[float, float]:
    """``W2(mu + h, nu + hhat)^2`` and ``W2(mu, nu)^2 + |h - hhat|^2`` for
    centred ``mu`` and ``nu``."""
    _check_centred(mu, tol)
    _check_centred(nu, tol)
    h, hhat = _shift(mu, h), _shift(nu, hhat)
    lhs = w2_squared(translate(mu, h), translate(nu, hhat))
    rhs = w2_squared(mu, nu) + float(np.sum((h - hhat) ** 2))
    return lhs, rhs


def splitting_residual(mu, nu, h, hhat, tol: float = ZERO_MEAN_TOL) -> float:
    lhs, rhs = splitting_terms(mu, nu, h, hhat, tol)
    return lhs - rhs


def standardize(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Centre ``mu`` (a measure on Euclidean space) and rescale it to unit
    second moment."""
    if not isinstance(mu.space, Euclidean):
        raise ValueError("standardize needs a measure on Euclidean space")
    centred, _ = decompose(mu)
    r = np.sqrt(second_moment(centred, mu.space.default_point()))
    if r == 0.0:
        raise ValueError("cannot standardize a Dirac measure")
    return DiscreteMeasure(mu.space, [type(x)(x.array / r) for x in centred.support], centred.weights)


@dataclass(frozen=True)
class DiameterCheck:
    w2sq: float
    bound_ok: bool

    @property
    def cos_angle(self) -> float:
        return 1.0 - 0.5 * self.w2sq


def diameter_bound_check(mu, nu, tol: float = ZERO_MEAN_TOL) -> DiameterCheck:
    """Check ``W2(mu, nu)^2 <= 2`` for centred, unit-second-moment measures,
    i.e. an angle of at most pi/2 between the rays through them."""
    for m in (mu, nu):
        if not isinstance(m.space, Euclidean):
            raise ValueError("diameter check needs measures on Euclidean space")
        _check_centred(m, tol)
        s = second_moment(m, m.space.default_point())
        if abs(s - 1.0) > tol:
            raise ValueError(f"second moment is {s!r}, not 1")
    w2sq = w2_squared(mu, nu)
    return DiameterCheck(w2sq, w2sq <= 2.0 + DIAMETER_TOL)

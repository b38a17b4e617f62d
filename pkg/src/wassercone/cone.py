"""Cone structure of the quadratic Wasserstein space over a cone.

For ``X = C(Y)`` with vertex ``o``, the radial maps ``(y, t) -> (y, s t)``
push measures along the unique geodesics leaving ``delta_o``; distances
between such pushforwards obey an exact law of cosines, which is what the
functions here compute and compare against the transport solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .measure import DiscreteMeasure, dirac, pushforward, quantize_normal, second_moment
from .metric import (
    Circle,
    CirclePoint,
    Cone,
    ConePoint,
    Euclidean,
    EuclideanPoint,
    FiniteSpace,
    Space,
    SpaceMismatchError,
    antipodal_set,
)
from .transport import check_dirac_midpoint, w2_squared, wasserstein_distance

UNIT_TOL = 1e-9


def _cone_space(mu: DiscreteMeasure) -> Cone:
    if not isinstance(mu.space, Cone):
        raise SpaceMismatchError(f"expected a measure on a cone, got one on {mu.space!r}")
    return mu.space


def vertex_dirac(space: Cone) -> DiscreteMeasure:
    return dirac(space, space.vertex)


def scale_map(s: float):
    """The radial map ``(y, t) -> (y, s t)``; fixes the vertex."""
    if not s >= 0:
        raise ValueError(f"scale factor must be non-negative, got {s!r}")

    def psi(x):
        if not isinstance(x, ConePoint):
            raise SpaceMismatchError(f"{x!r} is not a cone point")
        return ConePoint(x.base, s * x.radius)

    return psi


def radial_geodesic(mu: DiscreteMeasure, s: float) -> DiscreteMeasure:
    """Point at parameter ``s`` of the ray from the vertex Dirac through ``mu``."""
    space = _cone_space(mu)
    return pushforward(mu, scale_map(s), space)


def radial_second_moment(mu: DiscreteMeasure) -> float:
    """``W_2(delta_vertex, mu)^2``."""
    space = _cone_space(mu)
    return second_moment(mu, space.vertex)


def cone_identity_terms(mu, nu, s: float, t: float) -> tuple[float, float]:
    """Both sides of the scaling identity

    W2(Psi_s mu, Psi_t nu)^2 = s t W2(mu, nu)^2 + (s - t)(s W2(d, mu)^2 - t W2(d, nu)^2)

    where ``d`` is the vertex Dirac.  The left side is solved directly on
    the scaled measures, the right side from the unscaled ones.
    """
    if mu.space != nu.space:
        raise SpaceMismatchError("measures live on different spaces")
    _cone_space(mu)
    lhs = w2_squared(radial_geodesic(mu, s), radial_geodesic(nu, t))
    rhs = s * t * w2_squared(mu, nu) + (s - t) * (s * radial_second_moment(mu)
                                                  - t * radial_second_moment(nu))
    return lhs, rhs


def cone_identity_residual(mu, nu, s: float, t: float) -> float:
    lhs, rhs = cone_identity_terms(mu, nu, s, t)
    return lhs - rhs


def normalized_residual(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def _check_unit(mu: DiscreteMeasure, tol: float) -> None:
    r = math.sqrt(radial_second_moment(mu))
    if abs(r - 1.0) > tol:
        raise ValueError(f"not a unit direction: W2(vertex, mu) = {r!r}")


def direction_angle(mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = UNIT_TOL) -> float:
    """Angle at the vertex Dirac between the rays through unit measures
    ``mu`` and ``nu``: ``arccos(1 - W2(mu, nu)^2 / 2)``."""
    if mu.space != nu.space:
        raise SpaceMismatchError("measures live on different spaces")
    _check_unit(mu, tol)
    _check_unit(nu, tol)
    c = 1.0 - 0.5 * w2_squared(mu, nu)
    return math.acos(min(1.0, max(-1.0, c)))


def vertex_cone_distance(mu, nu, s: float, t: float, tol: float = UNIT_TOL) -> float:
    """Cone distance between ``(ray through mu, s)`` and ``(ray through nu, t)``
    in the tangent cone at the vertex Dirac."""
    if s < 0 or t < 0:
        raise ValueError("radii must be non-negative")
    angle = min(direction_angle(mu, nu, tol), math.pi)
    sq = (s - t) ** 2 + 4.0 * s * t * math.sin(0.5 * angle) ** 2
    return math.sqrt(max(sq, 0.0))


def unit_direction(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Rescale ``mu`` radially so that ``W2(vertex, mu) = 1``."""
    r = math.sqrt(radial_second_moment(mu))
    if r == 0.0:
        raise ValueError("the vertex Dirac has no direction")
    return radial_geodesic(mu, 1.0 / r)


def theta_embed(mu_tilde: DiscreteMeasure) -> DiscreteMeasure:
    """Push a measure on ``Y`` to the unit sphere of ``C(Y)`` via ``y -> (y, 1)``."""
    space = Cone(mu_tilde.space)
    return pushforward(mu_tilde, lambda y: ConePoint(y, 1.0), space)


# ---------------------------------------------------------------------------
# The two-atom counterexample on the circle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleRecord:
    theta: float
    w2sq_base: float
    closed_form_w2sq: float
    cos_angle_cone: float
    closed_form_cos: float
    w2_base: float
    angle: float

    @property
    def signed_difference(self) -> float:
        """``W2 on the circle - angle between the embedded rays``."""
        return self.w2_base - self.angle

    @property
    def direction(self) -> str:
        d = self.signed_difference
        return "w2>angle" if d > 0 else ("w2<angle" if d < 0 else "equal")


def counterexample_measures(theta: float) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """``(1/2)(d_0 + d_{pi - 2 theta})`` and ``(1/2)(d_theta + d_pi)`` on the circle."""
    circle = Circle()
    mu = DiscreteMeasure(circle, [CirclePoint(0.0), CirclePoint(math.pi - 2 * theta)], [0.5, 0.5])
    nu = DiscreteMeasure(circle, [CirclePoint(theta), CirclePoint(math.pi)], [0.5, 0.5])
    return mu, nu


def remark_counterexample(theta: float) -> CounterexampleRecord:
    """Compare ``W2`` on the circle with the angle between the embedded rays.

    Solver values are reported next to the closed forms ``5 theta^2 / 2``
    and ``(cos theta + cos 2 theta) / 2``.
    """
    if not 0.0 < theta < math.pi / 3:
        raise ValueError(f"theta must lie in (0, pi/3), got {theta!r}")
    mu, nu = counterexample_measures(theta)
    w2sq = w2_squared(mu, nu)
    angle = direction_angle(theta_embed(mu), theta_embed(nu))
    return CounterexampleRecord(
        theta=theta,
        w2sq_base=w2sq,
        closed_form_w2sq=2.5 * theta * theta,
        cos_angle_cone=math.cos(angle),
        closed_form_cos=0.5 * (math.cos(theta) + math.cos(2 * theta)),
        w2_base=math.sqrt(w2sq),
        angle=angle,
    )


def theta_grid(spec) -> list[float]:
    """Grid of angles in (0, pi/3).

    An integer ``N`` gives ``k pi / (3 (N + 1))`` for ``k = 1..N`` (``N = 19``
    is the ``k pi / 60`` grid); a sequence is taken as explicit values.
    """
    if isinstance(spec, int):
        if spec < 1:
            raise ValueError("grid size must be >= 1")
        return [k * math.pi / (3 * (spec + 1)) for k in range(1, spec + 1)]
    return [float(v) for v in spec]


# ---------------------------------------------------------------------------
# Branching at the vertex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchingCheck:
    non_branching: bool
    center: object = None
    witness: tuple = ()


def non_branching_at_vertex(base: Space, candidates: Sequence, tol: float = 1e-12) -> BranchingCheck:
    """Whether every candidate has at most one antipode among the candidates.

    On failure the first offending candidate and two of its antipodes are
    returned.
    """
    candidates = list(candidates)
    for xi in candidates:
        anti = antipodal_set(base, xi, candidates, tol)
        if len(anti) > 1:
            return BranchingCheck(False, xi, (anti[0], anti[1]))
    return BranchingCheck(True)


def tripod_space() -> FiniteSpace:
    """Three points at mutual distance pi: the cone over it branches at the vertex."""
    d = np.full((3, 3), math.pi)
    np.fill_diagonal(d, 0.0)
    return FiniteSpace(d, labels=("a", "b", "c"))


@dataclass(frozen=True)
class BranchingDemo:
    w2_endpoints: float
    w2_start_mid: float
    w2_mid_end: float
    start_distances: tuple[float, ...]
    end_distances: tuple[float, ...]
    max_deviation: float
    branching: BranchingCheck

    def ok(self, tol: float = 1e-12) -> bool:
        return (abs(self.w2_endpoints - 2.0) <= tol
                and abs(self.w2_start_mid - 1.0) <= tol and abs(self.w2_mid_end - 1.0) <= tol
                and all(abs(d - 1.0) <= tol for d in self.start_distances + self.end_distances)
                and not self.branching.non_branching)


def branching_geodesic_demo() -> BranchingDemo:
    """A geodesic through the vertex Dirac whose endpoints are not both Dirac.

    On the cone over the tripod, ``delta_(a,1) -> delta_vertex ->
    (delta_(b,1) + delta_(c,1)) / 2`` is a geodesic of length 2; this is
    possible only because ``a`` has two antipodes.
    """
    base = tripod_space()
    cone = Cone(base)
    a, b, c = (base.point(k) for k in "abc")
    mu0 = dirac(cone, ConePoint(a, 1.0))
    mu1 = DiscreteMeasure(cone, [ConePoint(b, 1.0), ConePoint(c, 1.0)], [0.5, 0.5])
    check = check_dirac_midpoint(mu0, cone.vertex, mu1)
    return BranchingDemo(
        w2_endpoints=check["w2_endpoints"],
        w2_start_mid=check["w2_start_mid"],
        w2_mid_end=check["w2_mid_end"],
        start_distances=tuple(check["start_distances"]),
        end_distances=tuple(check["end_distances"]),
        max_deviation=check["max_deviation"],
        branching=non_branching_at_vertex(base, base.points()),
    )


# ---------------------------------------------------------------------------
# Midpoints between Diracs, normal pushforward
# ---------------------------------------------------------------------------


def dirac_midpoint_search(x: float, xbar: float) -> tuple[float, float]:
    """Minimise ``max(W2(delta_y, delta_x), W2(delta_y, delta_xbar))`` over
    one-atom measures on the line.

    Returns the minimising location and the attained value.
    """
    if x == xbar:
        raise ValueError("endpoints must differ")
    line = Euclidean(1)
    dx, dxbar = dirac(line, EuclideanPoint((x,))), dirac(line, EuclideanPoint((xbar,)))

    def worst(y):
        dy = dirac(line, EuclideanPoint((y,)))
        return max(wasserstein_distance(dy, dx), wasserstein_distance(dy, dxbar))

    lo, hi = min(x, xbar), max(x, xbar)
    res = minimize_scalar(worst, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, hi - lo)})
    return float(res.x), float(res.fun)


def normal_ray_pushforward(n: int = 1000, base: Space | None = None, direction=None) -> DiscreteMeasure:
    """Quantised standard normal pushed to a cone by ``t -> (direction, |t|)``.

    Its distance to the vertex Dirac is the standard deviation, so it lies
    on the unit sphere around the vertex Dirac (up to quantisation error)
    without being supported on the unit sphere of the cone.
    """
    base = Circle() if base is None else base
    direction = base.default_point() if direction is None else direction
    cone = Cone(base)
    cone.check(ConePoint(direction, 1.0))
    return pushforward(quantize_normal(n), lambda p: ConePoint(direction, abs(p.coords[0])), cone)

"""Composable metric spaces: finite, circle, Euclidean, cone and product.

Spaces are immutable descriptions; points are small frozen values whose
variant mirrors the space they live in.  Every space evaluates distances
pointwise (:meth:`Space.distance`) and in vectorised form
(:meth:`Space.pairwise`, :meth:`Space.pairwise_sq`), the latter being what
the transport solver consumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class SpaceMismatchError(ValueError):
    """A point (or measure) does not belong to the space it is used with."""


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinitePoint:
    index: int


@dataclass(frozen=True)
class CirclePoint:
    """Point on the unit circle; the angle is canonicalised to [-pi, pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", canonical_angle(self.angle))


@dataclass(frozen=True)
class EuclideanPoint:
    coords: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in np.ravel(self.coords)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True, eq=False)
class ConePoint:
    """Point ``(base, radius)`` of a cone.

    All radius-zero points are the vertex and compare equal whatever their
    base point is.
    """

    base: Any
    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not r >= 0.0:
            raise ValueError(f"cone radius must be non-negative, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def is_vertex(self) -> bool:
        return self.radius == 0.0

    def __eq__(self, other):
        if not isinstance(other, ConePoint):
            return NotImplemented
        if self.is_vertex or other.is_vertex:
            return self.is_vertex and other.is_vertex
        return self.radius == other.radius and self.base == other.base

    def __hash__(self):
        if self.is_vertex:
            return hash(("cone-vertex",))
        return hash((self.base, self.radius))


@dataclass(frozen=True)
class ProductPoint:
    left: Any
    right: Any


Point = FinitePoint | CirclePoint | EuclideanPoint | ConePoint | ProductPoint


def canonical_angle(a: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    a = float(a)
    w = math.fmod(a + math.pi, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    w -= math.pi
    # fmod can land exactly on +pi after the shift for inputs just below -pi
    if w >= math.pi:
        w -= TWO_PI
    return w


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


class Space:
    """Base class.  Subclasses implement ``check``, ``pairwise`` or
    ``pairwise_sq``, ``sample``, ``default_point`` and JSON conversion."""

    def check(self, x) -> None:
        raise NotImplementedError

    def pairwise(self, xs: Sequence, ys: Sequence) -> np.ndarray:
        return np.sqrt(np.maximum(self.pairwise_sq(xs, ys), 0.0))

    def pairwise_sq(self, xs: Sequence, ys: Sequence) -> np.ndarray:
        return self.pairwise(xs, ys) ** 2

    def distance(self, a, b) -> float:
        return float(self.pairwise([a], [b])[0, 0])

    def sample(self, rng: np.random.Generator, n: int) -> list:
        raise NotImplementedError

    def default_point(self):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def point_to_json(self, x):
        raise NotImplementedError

    def point_from_json(self, obj):
        raise NotImplementedError


def _require(cond: bool, space: Space, x) -> None:
    if not cond:
        raise SpaceMismatchError(f"{x!r} is not a point of {space!r}")


class FiniteSpace(Space):
    """Finite metric space given by its distance matrix.

    The matrix is checked for zero diagonal, symmetry and the triangle
    inequality unless ``check=False`` (used when loading user files whose
    defects should be reported rather than raised).
    """

    def __init__(self, dist, labels: Sequence[str] | None = None, *, check: bool = True,
                 tol: float = 1e-12):
        d = np.array(dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise ValueError(f"distance matrix must be square and non-empty, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("distance matrix has non-finite entries")
        d.setflags(write=False)
        self.dist = d
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != d.shape[0]:
            raise ValueError("labels length does not match the matrix size")
        if check:
            report = validate_metric(self, self.points(), tol=tol)
            if not report.ok:
                v = report.violations[0]
                raise ValueError(f"not a metric: {v.kind} violated at {v.indices}")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def points(self) -> list[FinitePoint]:
        return [FinitePoint(i) for i in range(self.n)]

    def point(self, label: str) -> FinitePoint:
        if self.labels is None:
            raise ValueError("space has no labels")
        return FinitePoint(self.labels.index(label))

    def check(self, x) -> None:
        _require(isinstance(x, FinitePoint) and 0 <= x.index < self.n, self, x)

    def _idx(self, xs) -> np.ndarray:
        for x in xs:
            self.check(x)
        return np.fromiter((x.index for x in xs), dtype=np.intp, count=len(xs))

    def pairwise(self, xs, ys):
        return self.dist[np.ix_(self._idx(xs), self._idx(ys))]

    def sample(self, rng, n):
        return [FinitePoint(int(i)) for i in rng.integers(0, self.n, size=n)]

    def default_point(self):
        return FinitePoint(0)

    def __eq__(self, other):
        return (isinstance(other, FiniteSpace) and other.dist.shape == self.dist.shape
                and bool(np.array_equal(other.dist, self.dist)))

    def __hash__(self):
        return hash(("finite", self.dist.tobytes()))

    def __repr__(self):
        return f"FiniteSpace(n={self.n})"

    def to_json(self):
        out = {"type": "finite", "dist": self.dist.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    def point_to_json(self, x):
        self.check(x)
        return x.index

    def point_from_json(self, obj):
        if isinstance(obj, str) and self.labels is not None:
            return self.point(obj)
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise SpaceMismatchError(f"finite point must be an integer index, got {obj!r}")
        x = FinitePoint(obj)
        self.check(x)
        return x


@dataclass(frozen=True)
class Circle(Space):
    """Unit circle with the arc-length metric; distances lie in [0, pi]."""

    def check(self, x):
        _require(isinstance(x, CirclePoint), self, x)

    def _angles(self, xs):
        for x in xs:
            self.check(x)
        return np.fromiter((x.angle for x in xs), dtype=float, count=len(xs))

    def pairwise(self, xs, ys):
        delta = np.abs(self._angles(xs)[:, None] - self._angles(ys)[None, :])
        return np.minimum(delta, TWO_PI - delta)

    def sample(self, rng, n):
        return [CirclePoint(a) for a in rng.uniform(-math.pi, math.pi, size=n)]

    def default_point(self):
        return CirclePoint(0.0)

    def to_json(self):
        return {"type": "circle"}

    def point_to_json(self, x):
        self.check(x)
        return x.angle

    def point_from_json(self, obj):
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise SpaceMismatchError(f"circle point must be a number, got {obj!r}")
        return CirclePoint(obj)


@dataclass(frozen=True)
class Euclidean(Space):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("Euclidean dimension must be >= 1")

    def check(self, x):
        _require(isinstance(x, EuclideanPoint) and len(x.coords) == self.dim, self, x)

    def coords(self, xs) -> np.ndarray:
        for x in xs:
            self.check(x)
        return np.array([x.coords for x in xs], dtype=float).reshape(len(xs), self.dim)

    def pairwise_sq(self, xs, ys):
        diff = self.coords(xs)[:, None, :] - self.coords(ys)[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    def sample(self, rng, n):
        return [EuclideanPoint(v) for v in rng.standard_normal((n, self.dim))]

    def default_point(self):
        return EuclideanPoint((0.0,) * self.dim)

    def to_json(self):
        return {"type": "euclidean", "dim": self.dim}

    def point_to_json(self, x):
        self.check(x)
        return list(x.coords)

    def point_from_json(self, obj):
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            obj = [obj]
        if not isinstance(obj, list):
            raise SpaceMismatchError(f"euclidean point must be a list of numbers, got {obj!r}")
        x = EuclideanPoint(tuple(obj))
        self.check(x)
        return x


@dataclass(frozen=True)
class Cone(Space):
    """Euclidean cone over ``base``.

    d((a, s), (b, t))^2 = s^2 + t^2 - 2 s t cos(min(d_base(a, b), pi)),
    evaluated as (s - t)^2 + 4 s t sin^2(phi / 2) to avoid cancellation for
    nearby points.
    """

    base: Space
    sample_radius: float = field(default=2.0, compare=False)

    def check(self, x):
        _require(isinstance(x, ConePoint), self, x)
        if not x.is_vertex:
            self.base.check(x.base)

    @property
    def vertex(self) -> ConePoint:
        return ConePoint(self.base.default_point(), 0.0)

    def point(self, base, radius: float) -> ConePoint:
        x = ConePoint(base, radius)
        self.check(x)
        return x

    def _split(self, xs):
        for x in xs:
            self.check(x)
        fallback = self.base.default_point()
        bases = [fallback if x.is_vertex else x.base for x in xs]
        radii = np.fromiter((x.radius for x in xs), dtype=float, count=len(xs))
        return bases, radii

    def pairwise_sq(self, xs, ys):
        bx, rx = self._split(xs)
        by, ry = self._split(ys)
        phi = np.minimum(self.base.pairwise(bx, by), math.pi)
        half = np.sin(0.5 * phi)
        s, t = rx[:, None], ry[None, :]
        return (s - t) ** 2 + 4.0 * s * t * half * half

    def sample(self, rng, n):
        bases = self.base.sample(rng, n)
        radii = rng.uniform(0.0, self.sample_radius, size=n)
        return [ConePoint(b, r) for b, r in zip(bases, radii)]

    def default_point(self):
        return self.vertex

    def to_json(self):
        return {"type": "cone", "base": self.base.to_json()}

    def point_to_json(self, x):
        self.check(x)
        base = self.base.default_point() if x.is_vertex else x.base
        return {"base": self.base.point_to_json(base), "radius": x.radius}

    def point_from_json(self, obj):
        if not isinstance(obj, dict) or "radius" not in obj:
            raise SpaceMismatchError(f"cone point must be {{'base', 'radius'}}, got {obj!r}")
        r = obj["radius"]
        if r == 0 and obj.get("base") is None:
            return self.vertex
        return self.point(self.base.point_from_json(obj["base"]), r)


@dataclass(frozen=True)
class Product(Space):
    """l2 product: d^2 = d_left^2 + d_right^2."""

    left: Space
    right: Space

    def check(self, x):
        _require(isinstance(x, ProductPoint), self, x)
        self.left.check(x.left)
        self.right.check(x.right)

    def pairwise_sq(self, xs, ys):
        for x in list(xs) + list(ys):
            _require(isinstance(x, ProductPoint), self, x)
        return (self.left.pairwise_sq([x.left for x in xs], [y.left for y in ys])
                + self.right.pairwise_sq([x.right for x in xs], [y.right for y in ys]))

    def sample(self, rng, n):
        return [ProductPoint(a, b) for a, b in zip(self.left.sample(rng, n), self.right.sample(rng, n))]

    def default_point(self):
        return ProductPoint(self.left.default_point(), self.right.default_point())

    def to_json(self):
        return {"type": "product", "left": self.left.to_json(), "right": self.right.to_json()}

    def point_to_json(self, x):
        self.check(x)
        return {"left": self.left.point_to_json(x.left), "right": self.right.point_to_json(x.right)}

    def point_from_json(self, obj):
        if not isinstance(obj, dict) or set(obj) != {"left", "right"}:
            raise SpaceMismatchError(f"product point must be {{'left', 'right'}}, got {obj!r}")
        return ProductPoint(self.left.point_from_json(obj["left"]), self.right.point_from_json(obj["right"]))


def space_from_json(obj, *, check: bool = True) -> Space:
    """Build a space from its JSON description.

    ``check=False`` skips the metric-axiom check on finite matrices.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError(f"space description must be an object with a 'type', got {obj!r}")
    kind = obj["type"]
    if kind == "finite":
        return FiniteSpace(obj["dist"], obj.get("labels"), check=check)
    if kind == "circle":
        return Circle()
    if kind == "euclidean":
        return Euclidean(int(obj["dim"]))
    if kind == "cone":
        return Cone(space_from_json(obj["base"], check=check))
    if kind == "product":
        return Product(space_from_json(obj["left"], check=check), space_from_json(obj["right"], check=check))
    raise ValueError(f"unknown space type {kind!r}")


def distance(space: Space, a, b) -> float:
    """Distance between two points of ``space``."""
    return space.distance(a, b)


def random_finite_space(rng: np.random.Generator, n: int, scale: float = 2.0) -> FiniteSpace:
    """Finite metric from ``n`` random points in the plane.

    With the default scale some distances exceed pi, so cones over the
    result exercise the min(., pi) cap.
    """
    pts = rng.uniform(-scale, scale, size=(n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return FiniteSpace(d)


# ---------------------------------------------------------------------------
# Metric validation and angles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # "nonnegativity" | "identity" | "symmetry" | "triangle"
    indices: tuple[int, ...]
    points: tuple
    amount: float


@dataclass(frozen=True)
class MetricReport:
    n_points: int
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self, space: Space | None = None) -> dict:
        def pt(x):
            if space is None:
                return repr(x)
            try:
                return space.point_to_json(x)
            except SpaceMismatchError:
                return repr(x)

        return {
            "ok": self.ok,
            "n_points": self.n_points,
            "violations": [
                {"kind": v.kind, "indices": list(v.indices), "points": [pt(x) for x in v.points],
                 "amount": v.amount}
                for v in self.violations
            ],
        }


def validate_metric(space: Space, sample: Sequence, tol: float = 1e-12,
                    max_violations: int = 100) -> MetricReport:
    """Check the metric axioms on every pair and triple of ``sample``.

    Violations are returned in the report, never raised.  At most
    ``max_violations`` triangle violations are listed.
    """
    sample = list(sample)
    if not sample:
        raise ValueError("sample must be non-empty")
    d = space.pairwise(sample, sample)
    n = len(sample)
    found: list[Violation] = []

    def add(kind, idx, amount):
        found.append(Violation(kind, tuple(int(i) for i in idx),
                               tuple(sample[int(i)] for i in idx), float(amount)))

    for i, j in zip(*np.nonzero(d < -tol)):
        add("nonnegativity", (i, j), -d[i, j])
    for i in range(n):
        if abs(d[i, i]) > tol:
            add("identity", (i, i), abs(d[i, i]))
        for j in range(i + 1, n):
            if d[i, j] <= tol and d[j, i] <= tol and sample[i] != sample[j]:
                add("identity", (i, j), max(d[i, j], d[j, i]))
            if abs(d[i, j] - d[j, i]) > tol:
                add("symmetry", (i, j), abs(d[i, j] - d[j, i]))

    # excess[i, j, k] = d(i, k) - d(i, j) - d(j, k)
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    bad = np.argwhere(excess > tol)
    for i, j, k in bad[:max_violations]:
        add("triangle", (i, j, k), excess[i, j, k])
    return MetricReport(n, tuple(found))


def comparison_angle(space: Space, x, y, z) -> float:
    """Angle at ``y`` of the Euclidean triangle with the side lengths of
    ``(x, y, z)``."""
    dxy = space.distance(x, y)
    dyz = space.distance(y, z)
    dzx = space.distance(z, x)
    if dxy == 0.0 or dyz == 0.0:
        raise ValueError("comparison angle needs x != y and z != y")
    c = (dxy * dxy + dyz * dyz - dzx * dzx) / (2.0 * dxy * dyz)
    return math.acos(min(1.0, max(-1.0, c)))


def antipodal_set(base: Space, xi, candidates: Sequence, tol: float = 1e-12) -> list:
    """Candidates at base distance >= pi from ``xi``."""
    candidates = list(candidates)
    if not candidates:
        return []
    d = base.pairwise([xi], candidates)[0]
    return [c for c, dc in zip(candidates, d) if dc >= math.pi - tol]


import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wassercone.metric import (
    Circle,
    CirclePoint,
    Cone,
    ConePoint,
    Euclidean,
    EuclideanPoint,
    FinitePoint,
    FiniteSpace,
    Product,
    ProductPoint,
    SpaceMismatchError,
    antipodal_set,
    canonical_angle,
    comparison_angle,
    distance,
    random_finite_space,
    space_from_json,
    validate_metric,
)

CONE_CIRCLE = Cone(Circle())


def two_point(d):
    return FiniteSpace([[0.0, d], [d, 0.0]])


class TestDistance:
    @pytest.mark.parametrize("theta", [0.0, 1.0, -2.5, math.pi / 2])
    def test_vertex_points_coincide(self, theta):
        assert distance(CONE_CIRCLE, ConePoint(CirclePoint(0.0), 0.0), ConePoint(CirclePoint(theta), 0.0)) == 0.0

    def test_right_angle(self):
        d = distance(CONE_CIRCLE, ConePoint(CirclePoint(0.0), 1.0), ConePoint(CirclePoint(math.pi / 2), 1.0))
        assert d == pytest.approx(math.sqrt(2.0), abs=1e-15)

    def test_base_distance_capped_at_pi(self):
        cone = Cone(two_point(1.5 * math.pi))
        d = distance(cone, ConePoint(FinitePoint(0), 1.0), ConePoint(FinitePoint(1), 2.0))
        assert d == pytest.approx(3.0, abs=1e-15)

    def test_circle_arc_metric(self):
        c = Circle()
        assert distance(c, CirclePoint(3.0), CirclePoint(-3.0)) == pytest.approx(2 * math.pi - 6.0)
        assert distance(c, CirclePoint(0.0), CirclePoint(math.pi)) == pytest.approx(math.pi)

    @pytest.mark.parametrize("a", [math.pi, -math.pi, 3 * math.pi, 7.0, -7.0, 0.0])
    def test_canonical_angle_range(self, a):
        w = canonical_angle(a)
        assert -math.pi <= w < math.pi
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-12)

    def test_euclidean(self):
        assert distance(Euclidean(2), EuclideanPoint((0, 0)), EuclideanPoint((3, 4))) == 5.0

    def test_product_squares_add(self):
        sp = Product(Circle(), Euclidean(1))
        d = distance(sp, ProductPoint(CirclePoint(0.0), EuclideanPoint((0,))),
                     ProductPoint(CirclePoint(1.0), EuclideanPoint((2,))))
        assert d == pytest.approx(math.sqrt(5.0))

    @pytest.mark.parametrize("space,point", [
        (Circle(), EuclideanPoint((0.0,))),
        (Euclidean(2), EuclideanPoint((0.0,))),
        (CONE_CIRCLE, CirclePoint(0.0)),
        (two_point(1.0), FinitePoint(5)),
        (Product(Circle(), Circle()), CirclePoint(0.0)),
    ])
    def test_variant_mismatch(self, space, point):
        with pytest.raises(SpaceMismatchError):
            space.distance(point, point)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            ConePoint(CirclePoint(0.0), -1.0)

    def test_vertex_equality_and_hash(self):
        a = ConePoint(CirclePoint(0.3), 0.0)
        b = ConePoint(CirclePoint(-2.0), 0.0)
        assert a == b and hash(a) == hash(b)
        assert ConePoint(CirclePoint(0.3), 1.0) != ConePoint(CirclePoint(-2.0), 1.0)


class TestFiniteSpace:
    def test_rejects_non_metric(self):
        with pytest.raises(ValueError, match="triangle"):
            FiniteSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
        with pytest.raises(ValueError, match="symmetry"):
            FiniteSpace([[0, 1], [2, 0]])

    def test_labels(self):
        sp = FiniteSpace([[0, 1], [1, 0]], labels=["a", "b"])
        assert sp.point("b") == FinitePoint(1)


class TestValidateMetric:
    def test_valid_finite(self):
        sp = random_finite_space(np.random.default_rng(0), 6)
        assert validate_metric(sp, sp.points()).violations == ()

    def test_triangle_violation_reported(self):
        sp = FiniteSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]], check=False)
        report = validate_metric(sp, sp.points())
        assert not report.ok
        tri = [v for v in report.violations if v.kind == "triangle"]
        assert {v.indices for v in tri} == {(0, 1, 2), (2, 1, 0)}
        assert tri[0].amount == pytest.approx(3.0)

    def test_asymmetry_reported(self):
        sp = FiniteSpace([[0, 1], [2, 0]], check=False)
        kinds = {v.kind for v in validate_metric(sp, sp.points()).violations}
        assert "symmetry" in kinds

    def test_identity_violation(self):
        sp = FiniteSpace([[0, 0], [0, 0]], check=False)
        kinds = {v.kind for v in validate_metric(sp, sp.points()).violations}
        assert kinds == {"identity"}

    def test_cone_over_circle_sample(self):
        rng = np.random.default_rng(1)
        report = validate_metric(CONE_CIRCLE, CONE_CIRCLE.sample(rng, 50))
        assert report.ok

    def test_empty_sample(self):
        with pytest.raises(ValueError):
            validate_metric(Circle(), [])


class TestComparisonAngle:
    def test_equilateral(self):
        pts = [EuclideanPoint((0, 0)), EuclideanPoint((1, 0)), EuclideanPoint((0.5, math.sqrt(3) / 2))]
        assert comparison_angle(Euclidean(2), *pts) == pytest.approx(math.pi / 3, abs=1e-12)

    def test_collinear(self):
        pts = [EuclideanPoint((-1,)), EuclideanPoint((0,)), EuclideanPoint((2,))]
        assert comparison_angle(Euclidean(1), *pts) == pytest.approx(math.pi, abs=1e-7)

    def test_right_angle_from_side_lengths(self):
        r2 = math.sqrt(2.0)
        sp = FiniteSpace([[0, 1, r2], [1, 0, 1], [r2, 1, 0]])
        # (1 + 1 - 2) / 2 = 0
        assert comparison_angle(sp, FinitePoint(0), FinitePoint(1), FinitePoint(2)) == pytest.approx(math.pi / 2)

    def test_coincident_points(self):
        x = EuclideanPoint((0.0,))
        with pytest.raises(ValueError):
            comparison_angle(Euclidean(1), x, x, EuclideanPoint((1.0,)))


class TestAntipodalSet:
    def test_circle(self):
        got = antipodal_set(Circle(), CirclePoint(0.0), [CirclePoint(math.pi / 2), CirclePoint(math.pi)])
        assert got == [CirclePoint(math.pi)]

    def test_tripod(self):
        d = np.full((3, 3), math.pi)
        np.fill_diagonal(d, 0)
        sp = FiniteSpace(d)
        assert antipodal_set(sp, FinitePoint(0), sp.points()) == [FinitePoint(1), FinitePoint(2)]

    def test_small_diameter(self):
        sp = random_finite_space(np.random.default_rng(3), 5, scale=0.5)
        assert antipodal_set(sp, FinitePoint(0), sp.points()) == []


class TestJson:
    @pytest.mark.parametrize("space", [
        Circle(), Euclidean(3), CONE_CIRCLE, Product(Cone(two_point(2.0)), Euclidean(2)),
        FiniteSpace([[0, 1], [1, 0]], labels=["a", "b"]),
    ])
    def test_round_trip(self, space):
        back = space_from_json(space.to_json())
        assert back == space
        for x in space.sample(np.random.default_rng(0), 5):
            y = back.point_from_json(space.point_to_json(x))
            assert space.distance(x, y) == 0.0

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            space_from_json({"type": "sphere"})


# -- properties on composed spaces --------------------------------------------

def _spaces(seed):
    rng = np.random.default_rng(seed)
    fin = random_finite_space(rng, 5)
    return [Circle(), Euclidean(3), fin, Cone(Circle()), Cone(fin), Cone(Cone(Circle())),
            Product(Circle(), Euclidean(2)), Product(Cone(fin), Cone(Circle())),
            Cone(Product(Circle(), Circle()))]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), which=st.integers(0, 8))
def test_symmetry_and_triangle(seed, which):
    space = _spaces(seed)[which]
    rng = np.random.default_rng(seed)
    pts = space.sample(rng, 3)
    d = space.pairwise(pts, pts)
    assert np.allclose(d, d.T, atol=1e-12, rtol=0)
    assert validate_metric(space, pts, tol=1e-12).ok


@given(a=st.floats(-10, 10), b=st.floats(-10, 10), s=st.floats(0, 5))
def test_unit_radius_cone_formula(a, b, s):
    x, y = ConePoint(CirclePoint(a), 1.0), ConePoint(CirclePoint(b), 1.0)
    phi = min(Circle().distance(CirclePoint(a), CirclePoint(b)), math.pi)
    assert CONE_CIRCLE.distance(x, y) == pytest.approx(math.sqrt(2 - 2 * math.cos(phi)), rel=1e-13, abs=1e-7)
    # vertex identification
    assert CONE_CIRCLE.distance(ConePoint(CirclePoint(a), 0.0), ConePoint(CirclePoint(b), 0.0)) == 0.0
    assert CONE_CIRCLE.distance(ConePoint(CirclePoint(a), 0.0), ConePoint(CirclePoint(b), s)) == pytest.approx(s)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_product_squares_add_property(seed):
    rng = np.random.default_rng(seed)
    left, right = Cone(Circle()), Euclidean(2)
    sp = Product(left, right)
    p, q = sp.sample(rng, 2)
    expected = left.distance(p.left, q.left) ** 2 + right.distance(p.right, q.right) ** 2
    assert sp.distance(p, q) ** 2 == pytest.approx(expected, rel=1e-12, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_comparison_angle_in_range(seed):
    space = Cone(Circle())
    x, y, z = space.sample(np.random.default_rng(seed), 3)
    dxy, dyz, dzx = space.distance(x, y), space.distance(y, z), space.distance(z, x)
    ang = comparison_angle(space, x, y, z)
    assert 0.0 <= ang <= math.pi
    raw = (dxy**2 + dyz**2 - dzx**2) / (2 * dxy * dyz)
    assert -1 - 1e-12 <= raw <= 1 + 1e-12

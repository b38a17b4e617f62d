import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wassercone.cone import branching_geodesic_demo
from wassercone.measure import DiscreteMeasure, dirac, random_measure
from wassercone.metric import (
    Circle,
    CirclePoint,
    Cone,
    ConePoint,
    Euclidean,
    EuclideanPoint,
    SpaceMismatchError,
)
from wassercone.transport import (
    brute_force_plan,
    check_dirac_midpoint,
    optimal_plan,
    solve_transport,
    wasserstein_distance,
)

R1 = Euclidean(1)


def line(points, weights=None):
    return DiscreteMeasure(R1, [EuclideanPoint((p,)) for p in points], weights)


class TestOptimalPlan:
    def test_same_dirac(self):
        mu = dirac(R1, EuclideanPoint((1.0,)))
        plan = optimal_plan(mu, mu)
        assert plan.coupling.tolist() == [[1.0]] and plan.cost == 0.0

    def test_dirac_source_gives_product_plan(self):
        mu = dirac(R1, EuclideanPoint((0.0,)))
        nu = line([1, 2, 4], [0.2, 0.3, 0.5])
        plan = optimal_plan(mu, nu)
        assert np.array_equal(plan.coupling, np.outer(mu.weights, nu.weights))

    def test_uniform_two_by_two_identity(self):
        # permutations: identity costs 0, swap costs (4 + 4) / 2
        mu = line([0, 2])
        plan = optimal_plan(mu, mu)
        assert plan.cost == 0.0
        assert np.allclose(plan.coupling, np.diag([0.5, 0.5]))

    def test_spaces_differ(self):
        with pytest.raises(SpaceMismatchError):
            optimal_plan(line([0]), dirac(Circle(), CirclePoint(0.0)))

    def test_bad_exponent(self):
        with pytest.raises(ValueError):
            optimal_plan(line([0]), line([1]), p=0.5)

    def test_plan_json(self):
        plan = optimal_plan(line([0, 1]), line([3]))
        out = plan.to_json()
        assert out["coupling"] == [[0.5], [0.5]]
        assert out["distance"] == pytest.approx(plan.distance)

    def test_degenerate_instance(self):
        # equal marginals everywhere -> many degenerate pivots
        rng = np.random.default_rng(0)
        n = 8
        c = rng.integers(0, 3, size=(n, n)).astype(float)
        x = solve_transport(np.full(n, 1 / n), np.full(n, 1 / n), c)
        best = min(sum(c[i, p[i]] for i in range(n)) for p in permutations(range(n))) / n
        assert np.sum(x * c) == pytest.approx(best, abs=1e-14)


class TestWassersteinDistance:
    def test_self_distance(self):
        mu = random_measure(Cone(Circle()), np.random.default_rng(4), 6)
        assert wasserstein_distance(mu, mu) == 0.0

    def test_half_point_mass(self):
        assert wasserstein_distance(line([0, 1]), line([0])) == pytest.approx(math.sqrt(0.5), abs=1e-15)

    def test_circle_two_atoms(self):
        theta = math.pi / 6
        c = Circle()
        mu = DiscreteMeasure(c, [CirclePoint(0.0), CirclePoint(math.pi - 2 * theta)], [0.5, 0.5])
        nu = DiscreteMeasure(c, [CirclePoint(theta), CirclePoint(math.pi)], [0.5, 0.5])
        # two permutation plans
        straight = 0.5 * (theta**2 + (2 * theta) ** 2)
        crossed = 0.5 * (math.pi**2 + (math.pi - 3 * theta) ** 2)
        expected = min(straight, crossed)
        assert expected == pytest.approx(0.685389, abs=1e-6)
        assert wasserstein_distance(mu, nu) ** 2 == pytest.approx(expected, rel=1e-13)

    def test_w1_line_matches_cdf_formula(self):
        from scipy.stats import wasserstein_distance as w1
        rng = np.random.default_rng(5)
        a, b = rng.normal(size=6), rng.normal(size=4)
        wa, wb = rng.dirichlet(np.ones(6)), rng.dirichlet(np.ones(4))
        got = wasserstein_distance(line(a, wa), line(b, wb), p=1)
        assert got == pytest.approx(w1(a, b, wa, wb), rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_dirac_embedding_isometric(self, seed):
        space = Cone(Circle())
        x, y = space.sample(np.random.default_rng(seed), 2)
        got = wasserstein_distance(dirac(space, x), dirac(space, y))
        assert got == pytest.approx(space.distance(x, y), rel=1e-15, abs=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        space = [Cone(Circle()), Euclidean(2), Circle()][seed % 3]
        a, b, c = (random_measure(space, rng, int(rng.integers(1, 7))) for _ in range(3))
        assert wasserstein_distance(a, c) <= wasserstein_distance(a, b) + wasserstein_distance(b, c) + 1e-9

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_symmetry_and_feasibility(self, seed):
        rng = np.random.default_rng(seed)
        space = Cone(Circle())
        a, b = (random_measure(space, rng, int(rng.integers(1, 9))) for _ in range(2))
        ab, ba = optimal_plan(a, b), optimal_plan(b, a)
        assert ab.is_feasible(1e-10) and ba.is_feasible(1e-10)
        assert ab.cost == pytest.approx(ba.cost, rel=1e-12, abs=1e-15)


class TestBruteForce:
    def test_single_row(self):
        mu = line([0])
        nu = line([1, 2, 3], [0.2, 0.3, 0.5])
        assert np.array_equal(brute_force_plan(mu, nu).coupling, np.outer([1.0], nu.weights))

    def test_uniform_three_by_three(self):
        rng = np.random.default_rng(7)
        space = Euclidean(2)
        mu, nu = (random_measure(space, rng, 3, uniform=True) for _ in range(2))
        c = space.pairwise_sq(list(mu.support), list(nu.support))
        expected = min(sum(c[i, p[i]] for i in range(3)) / 3 for p in permutations(range(3)))
        assert brute_force_plan(mu, nu).cost == pytest.approx(expected, rel=1e-15)
        assert optimal_plan(mu, nu).cost == pytest.approx(expected, rel=1e-12)

    def test_counterexample_pairing(self):
        theta = 0.4
        c = Circle()
        mu = DiscreteMeasure(c, [CirclePoint(0.0), CirclePoint(math.pi - 2 * theta)], [0.5, 0.5])
        nu = DiscreteMeasure(c, [CirclePoint(theta), CirclePoint(math.pi)], [0.5, 0.5])
        plan = brute_force_plan(mu, nu)
        assert np.allclose(plan.coupling, np.diag([0.5, 0.5]))

    def test_too_large(self):
        rng = np.random.default_rng(0)
        mu = random_measure(R1, rng, 9)
        with pytest.raises(ValueError):
            brute_force_plan(mu, random_measure(R1, rng, 9))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), m=st.integers(1, 6))
    def test_matches_solver(self, seed, n, m):
        rng = np.random.default_rng(seed)
        space = [Cone(Circle()), Euclidean(2)][seed % 2]
        mu = random_measure(space, rng, n, uniform=bool(seed % 3))
        nu = random_measure(space, rng, m, uniform=bool(seed % 3))
        if len(mu) * len(nu) > 36 and not bool(seed % 3):
            return
        a, b = optimal_plan(mu, nu), brute_force_plan(mu, nu)
        assert b.is_feasible(1e-12)
        assert a.cost == pytest.approx(b.cost, rel=1e-12, abs=1e-300)


class TestDiracMidpoint:
    def test_line_geodesic(self):
        out = check_dirac_midpoint(line([-1]), EuclideanPoint((0.0,)), line([1]))
        assert out["is_geodesic"] and out["ok"]

    def test_cone_antipodes(self):
        cone = Cone(Circle())
        mu0 = dirac(cone, ConePoint(CirclePoint(0.5), 2.0))
        mu1 = dirac(cone, ConePoint(CirclePoint(0.5 + math.pi), 2.0))
        out = check_dirac_midpoint(mu0, cone.vertex, mu1)
        assert out["is_geodesic"] and out["max_deviation"] <= 1e-9

    def test_branching_geodesic(self):
        demo = branching_geodesic_demo()
        assert demo.max_deviation <= 1e-9

    def test_not_a_geodesic(self):
        out = check_dirac_midpoint(line([-1, 1]), EuclideanPoint((0.0,)), line([2]))
        assert not out["is_geodesic"]

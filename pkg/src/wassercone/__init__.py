"""Exact quadratic Wasserstein distances over composable metric spaces, with
numerical checks of the cone and splitting structure of Wasserstein space."""

from .measure import DiscreteMeasure, dirac, mean, pushforward, quantize_normal, second_moment
from .metric import (
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
    comparison_angle,
    distance,
    validate_metric,
)
from .transport import TransportPlan, brute_force_plan, optimal_plan, wasserstein_distance

__version__ = "0.1.0"

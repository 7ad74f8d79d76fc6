from geometry.chart import ChartPoint, angular_grid, random_chart_points
from geometry.frame import FramePoint, frame_at, frame_components
from geometry.loader import load_metric, metric_from_document
from geometry.metrics import (
    MetricSpec,
    conformal_product,
    hyperbolic_metric,
    metric_deviation,
    schwarzschild_ads,
)
from geometry.potentials import StaticPotentialBasis

__all__ = [
    "ChartPoint",
    "FramePoint",
    "MetricSpec",
    "StaticPotentialBasis",
    "angular_grid",
    "conformal_product",
    "frame_at",
    "frame_components",
    "hyperbolic_metric",
    "load_metric",
    "metric_deviation",
    "metric_from_document",
    "random_chart_points",
    "schwarzschild_ads",
]

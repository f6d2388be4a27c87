from voltext.explain.attribution import (
    SHAPLEY_EXACT_CAP,
    AttributionVector,
    Method,
    Quadrature,
    QuadratureSpec,
    integrated_gradients,
    shapley_exact,
    shapley_sampled,
)
from voltext.explain.report import increase_decrease_counts, token_report, track_token

__all__ = [
    "SHAPLEY_EXACT_CAP",
    "AttributionVector",
    "Method",
    "Quadrature",
    "QuadratureSpec",
    "increase_decrease_counts",
    "integrated_gradients",
    "shapley_exact",
    "shapley_sampled",
    "token_report",
    "track_token",
]

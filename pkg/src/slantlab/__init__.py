"""Numerical verification of slant-type submanifolds of locally product Riemannian manifolds."""

__version__ = "0.1.0"

from .ambient import AmbientManifold, MetricModel, ProductStructure, flat, space_form_product  # noqa: E402
from .immersion import ImmersionChart  # noqa: E402
from .slant import classify, slant_spectrum, split_operators  # noqa: E402
from .theorems import CHECK_IDS, RunOptions, Tolerances  # noqa: E402

__all__ = [
    "AmbientManifold",
    "CHECK_IDS",
    "ImmersionChart",
    "MetricModel",
    "ProductStructure",
    "RunOptions",
    "Tolerances",
    "classify",
    "flat",
    "slant_spectrum",
    "space_form_product",
    "split_operators",
]

"""Junta approximation of composed Boolean functions.

Exact desk-scale tools for biased Fourier analysis, multivariate noise
stability, optimal junta search, composition bounds and tester boosting.
"""

from .boolfn import (
    Distribution,
    ProbFunction,
    ProductDist,
    TruthTable,
    load,
    make_named,
    uniform_dist,
)
from .composition import ComposedInstance, best_partition, canonical_h, sandwich_check
from .fourier import BiasedSpectrum, biased_spectrum
from .junta import advantage_curve, optimal_junta
from .stability import stab_fourier, stab_sampled

__version__ = "0.1.0"

__all__ = [
    "BiasedSpectrum",
    "ComposedInstance",
    "Distribution",
    "ProbFunction",
    "ProductDist",
    "TruthTable",
    "advantage_curve",
    "best_partition",
    "biased_spectrum",
    "canonical_h",
    "load",
    "make_named",
    "optimal_junta",
    "sandwich_check",
    "stab_fourier",
    "stab_sampled",
    "uniform_dist",
]

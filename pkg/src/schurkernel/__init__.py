"""Correlation kernels of the Schur process with a fixed final partition."""

from .symcore import Alphabet, Partition, RationalSeries, complete_homogeneous, skew_schur
from .process import CorrelationPoint, ProcessSpec, TruncationBound, brute_force_correlation

__all__ = [
    "Alphabet",
    "Partition",
    "RationalSeries",
    "complete_homogeneous",
    "skew_schur",
    "CorrelationPoint",
    "ProcessSpec",
    "TruncationBound",
    "brute_force_correlation",
]

__version__ = "0.1.0"

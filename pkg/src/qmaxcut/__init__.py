"""Spin-S Quantum Max-Cut: exact values, SDP relaxations, coherent-state rounding and ratio functions."""

from .graph import InstanceError, WeightedGraph, generate, load_instance, parse_instance, total_weight
from .spin import SpinValue, as_spin

__version__ = "0.1.0"

__all__ = [
    "InstanceError",
    "SpinValue",
    "WeightedGraph",
    "__version__",
    "as_spin",
    "generate",
    "load_instance",
    "parse_instance",
    "total_weight",
]

"""Entropy generating functions for lifetime distributions and a kernel-based
goodness-of-fit test for the Pareto Type-I model."""

from .distributions import DistributionSpec, Family, Sample
from .egf import EGFQuery, EGFValue, egf, egf_residual, wegf, wregf
from .gof import GofConfig, GofReport, alpha_moment, bootstrap_test, delta_functional, delta_stat
from .kde import KdeConfig, KernelSpec

__version__ = "0.1.0"

__all__ = [
    "DistributionSpec",
    "Family",
    "Sample",
    "EGFQuery",
    "EGFValue",
    "egf",
    "egf_residual",
    "wegf",
    "wregf",
    "GofConfig",
    "GofReport",
    "alpha_moment",
    "bootstrap_test",
    "delta_functional",
    "delta_stat",
    "KdeConfig",
    "KernelSpec",
]

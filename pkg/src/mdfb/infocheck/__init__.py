"""Numerical checks of mutual-information identities and limits."""

from .awgn import (
    AwgnTestChannel,
    GaussianSource,
    MixtureSource,
    NodeSource,
    additive_rdf_slope,
    awgn_source,
    binary_source,
    immse_check,
    laplacian_source,
    oversampling_identity,
    uniform_source,
)
from .channels import Eps1Family, eps1_ratio
from .conditional import CondPair, conditional_immse, mmse_linearity_condition
from .discrete import DiscreteJoint, VncFamily, mi_discrete, random_vnc_family, vnc_scaling
from .highrate import conditional_rdf, gaussian_worst_bound, mixture_rate_loss
from .suite import run_suite

__all__ = [
    "AwgnTestChannel", "CondPair", "DiscreteJoint", "Eps1Family", "GaussianSource", "MixtureSource",
    "NodeSource", "VncFamily", "additive_rdf_slope", "awgn_source", "binary_source", "conditional_immse",
    "conditional_rdf", "eps1_ratio", "gaussian_worst_bound", "immse_check", "laplacian_source",
    "mi_discrete", "mixture_rate_loss", "mmse_linearity_condition", "oversampling_identity",
    "random_vnc_family", "run_suite", "uniform_source", "vnc_scaling",
]

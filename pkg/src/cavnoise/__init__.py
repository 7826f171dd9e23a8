"""Input-output models of cavities with unwanted absorption and scattering noise."""

__version__ = "0.1.0"

from .dynamics import (
    cavity_commutator,
    extraction_efficiency,
    impulse_response,
    output_commutator_kernel,
    simulate,
)
from .geometry import gram_matrix, model_gram, reduce_basis, rotate_basis, xi_decompose
from .model import (
    CavityCoefficients,
    ConstraintReport,
    RadiativePort,
    constraint_residuals,
    ideal_cavity,
    inequality_slacks,
    is_physical,
    make_cavity_coefficients,
)
from .schemes import BeamSplitterParams, SchemeSpec, build_network, compose
from .network import ScatteringNetwork, eliminate_network

__all__ = [
    "BeamSplitterParams",
    "CavityCoefficients",
    "ConstraintReport",
    "RadiativePort",
    "ScatteringNetwork",
    "SchemeSpec",
    "build_network",
    "cavity_commutator",
    "compose",
    "constraint_residuals",
    "eliminate_network",
    "extraction_efficiency",
    "gram_matrix",
    "ideal_cavity",
    "impulse_response",
    "inequality_slacks",
    "is_physical",
    "make_cavity_coefficients",
    "model_gram",
    "output_commutator_kernel",
    "reduce_basis",
    "rotate_basis",
    "simulate",
    "xi_decompose",
]

"""Numerical toolkit for finite-dimensional quantum compact metric spaces.

Evaluates Lip-norms built from Dirac-type operators, computes the
Monge-Kantorovich metric and related Hausdorff / bridge / dilation
quantities, and drives desk-scale experiments through the ``qmetric`` CLI.
"""

from ._kernels import backend_name
from .convex import (
    BallSpec,
    SolverConfig,
    brute_force_oracle,
    max_convex_over_ball,
    max_linear_over_ball,
    min_distance_to_ball,
)
from .core import (
    AlgebraSpec,
    DensityState,
    HermitianBasis,
    HermitianMatrix,
    UnitaryMap,
    central_normalize,
    maximally_mixed,
    operator_norm,
    pure_state,
    random_hermitian,
    random_state,
    random_unitary,
    spectral_spread,
    state_eval,
)
from .lipnorms import (
    Conformal,
    Curved,
    DiracCommutator,
    LeibnizF,
    LipNorm,
    Perturbed,
    Scaled,
    ScaledLeibnizF,
    domain_norm,
    eval_lipnorm,
    gamma_matrices,
    kernel_check,
    quasi_leibniz_defect,
)
from .metrics import (
    BridgeSpec,
    Embedding,
    MetricReport,
    MKEngine,
    best_equivalence_constant,
    bridge_height,
    bridge_length,
    bridge_reach,
    dilation,
    hauslip,
    lipschitz_distance,
    mk_diameter,
    mk_distance,
    mk_length,
    propinquity_upper_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraSpec",
    "BallSpec",
    "BridgeSpec",
    "Conformal",
    "Curved",
    "DensityState",
    "DiracCommutator",
    "Embedding",
    "HermitianBasis",
    "HermitianMatrix",
    "LeibnizF",
    "LipNorm",
    "MetricReport",
    "MKEngine",
    "Perturbed",
    "Scaled",
    "ScaledLeibnizF",
    "SolverConfig",
    "UnitaryMap",
    "backend_name",
    "best_equivalence_constant",
    "bridge_height",
    "bridge_length",
    "bridge_reach",
    "brute_force_oracle",
    "central_normalize",
    "dilation",
    "domain_norm",
    "eval_lipnorm",
    "gamma_matrices",
    "hauslip",
    "kernel_check",
    "lipschitz_distance",
    "max_convex_over_ball",
    "max_linear_over_ball",
    "maximally_mixed",
    "min_distance_to_ball",
    "mk_diameter",
    "mk_distance",
    "mk_length",
    "operator_norm",
    "propinquity_upper_bound",
    "pure_state",
    "quasi_leibniz_defect",
    "random_hermitian",
    "random_state",
    "random_unitary",
    "spectral_spread",
    "state_eval",
]

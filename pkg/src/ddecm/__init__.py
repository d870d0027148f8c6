"""Center-manifold reduction of scalar one-delay differential equations at
Hopf points, including the degenerate third-order coefficient w21 via a
regularized limit formula, cross-validated by a perturbation oracle.
"""

from .chareq import (
    HopfPoint,
    LinearPart,
    char_value,
    count_roots_rect,
    find_critical_frequency,
    find_hopf_parameter,
    verify_hopf,
)
from .cmcore import (
    ModelSpec,
    SecondOrder,
    ThirdOrder,
    degeneracy_report,
    second_order,
    third_order,
    third_order_rhs,
    w21_at_minus_r,
    w21_at_zero,
    w21_profile,
)
from .ddesim import SimConfig, Trajectory, integrate_dde, integrate_reduced, measure_frequency
from .errors import CenterManifoldError, ModelFileError
from .exppoly import ExpMonomial, ExpPoly
from .perturb import (
    PerturbedCoeffs,
    PerturbedProblem,
    extrapolate_w21,
    h_decomposition,
    make_perturbed,
    perturbed_coeffs,
    solve_perturbed_w21,
)
from .reduction import (
    AnalysisReport,
    ReducedEquation,
    analyze_model,
    assemble_reduced,
    lyapunov_l1,
    sweep_l1_zeros,
)
from .spectral import EigenData, bilinear, build_eigendata, project_coordinates

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CenterManifoldError",
    "EigenData",
    "ExpMonomial",
    "ExpPoly",
    "HopfPoint",
    "LinearPart",
    "ModelFileError",
    "ModelSpec",
    "PerturbedCoeffs",
    "PerturbedProblem",
    "ReducedEquation",
    "SecondOrder",
    "SimConfig",
    "ThirdOrder",
    "Trajectory",
    "analyze_model",
    "assemble_reduced",
    "bilinear",
    "build_eigendata",
    "char_value",
    "count_roots_rect",
    "degeneracy_report",
    "extrapolate_w21",
    "find_critical_frequency",
    "find_hopf_parameter",
    "h_decomposition",
    "integrate_dde",
    "integrate_reduced",
    "lyapunov_l1",
    "make_perturbed",
    "measure_frequency",
    "perturbed_coeffs",
    "project_coordinates",
    "second_order",
    "solve_perturbed_w21",
    "sweep_l1_zeros",
    "third_order",
    "third_order_rhs",
    "verify_hopf",
    "w21_at_minus_r",
    "w21_at_zero",
    "w21_profile",
]

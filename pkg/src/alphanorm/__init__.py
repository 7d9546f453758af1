"""Alpha-norms, numerical radii, and certified block-matrix norm bounds."""

from .blocks import (
    BlockMatrix,
    SymbolFunctionPair,
    assemble,
    block_from_json,
    block_matrix,
    block_to_json,
    build_R_diag,
    build_R_est6,
    build_R_est7,
    build_S,
    build_Ttilde_diag,
    build_Ttilde_est6,
    build_Ttilde_est7,
    split,
)
from .bounds import (
    BoundReport,
    bound_est6,
    bound_est7,
    bound_est8,
    bound_est9,
    combined_norm,
    corollary_opnorm_bound,
    corollary_w_bound,
    diag_block_bounds,
    exact_nilpotent_alpha_norm,
    inequality_holds,
    minimize_over_alpha,
)
from .errors import (
    AlphaNormError,
    ConvergenceError,
    MatrixFormatError,
    ParameterError,
    PositivityError,
    ShapeError,
)
from .harness import (
    CheckRecord,
    EnsembleSpec,
    SuiteReport,
    default_specs,
    derive_seed,
    generate,
    proposition21_suite,
    run_suite,
)
from .linalg import (
    HermitianEig,
    hermitian_eig,
    hermitian_parts,
    lambda_max,
    matrix_abs,
    matrix_from_json,
    matrix_to_json,
    singular_values,
    spectral_apply,
    svd,
)
from .norms import (
    AlphaNormResult,
    alpha_norm,
    alpha_norm_sample,
    numerical_radius,
    operator_norm,
    spectral_radius,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaNormError",
    "AlphaNormResult",
    "BlockMatrix",
    "BoundReport",
    "CheckRecord",
    "ConvergenceError",
    "EnsembleSpec",
    "HermitianEig",
    "MatrixFormatError",
    "ParameterError",
    "PositivityError",
    "ShapeError",
    "SuiteReport",
    "SymbolFunctionPair",
    "alpha_norm",
    "alpha_norm_sample",
    "assemble",
    "block_from_json",
    "block_matrix",
    "block_to_json",
    "bound_est6",
    "bound_est7",
    "bound_est8",
    "bound_est9",
    "build_R_diag",
    "build_R_est6",
    "build_R_est7",
    "build_S",
    "build_Ttilde_diag",
    "build_Ttilde_est6",
    "build_Ttilde_est7",
    "combined_norm",
    "corollary_opnorm_bound",
    "corollary_w_bound",
    "default_specs",
    "derive_seed",
    "diag_block_bounds",
    "exact_nilpotent_alpha_norm",
    "generate",
    "hermitian_eig",
    "hermitian_parts",
    "inequality_holds",
    "lambda_max",
    "matrix_abs",
    "matrix_from_json",
    "matrix_to_json",
    "minimize_over_alpha",
    "numerical_radius",
    "operator_norm",
    "proposition21_suite",
    "run_suite",
    "singular_values",
    "spectral_apply",
    "spectral_radius",
    "split",
    "svd",
]

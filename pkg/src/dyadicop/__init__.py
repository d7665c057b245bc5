"""dyadicop: matrix-valued dyadic harmonic analysis at desk scale.

Step functions on [0,1) with N x N matrix values, the martingale calculus
on them, paraproduct / Haar-multiplier operators with norm estimation,
operator-valued BMO and Hardy norm scales, min-trace majorant SDPs for
noncommutative maximal norms, and the Hilbert-matrix sharpness
constructions, plus a reproducible experiment harness.
"""

from .core import (
    DyadicMatrixFunction,
    HaarExpansion,
    conditional_expectation,
    constant_function,
    haar_decompose,
    haar_reconstruct,
    martingale_difference,
    pointwise_product,
    rademacher,
    refine,
    square_function,
    zero_function,
)
from .linalg import (
    HermitianSpectrum,
    hermitian_eig,
    lp_function_norm,
    modulus,
    psd_dominates,
    schatten_norm,
    trace_pairing,
)
from .operators import (
    OperatorHandle,
    haar_multiplier,
    haar_multiplier_apply,
    matricize,
    operator_norm_2,
    operator_norm_p_lower,
    paraproduct,
    paraproduct_adjoint,
    paraproduct_adjoint_apply,
    paraproduct_apply,
)
from .norms import (
    NormReport,
    bg_pairing_check,
    bmo_interval_norm,
    bmo_m_norm,
    bmo_norm,
    doob_check,
    h1_max_norm,
)
from .majorant import (
    MajorantCertificate,
    MajorantProblem,
    MajorantSolverError,
    dual_h1ncm_lower,
    max_norm_l1_positive,
    max_norm_l1_selfadjoint,
    min_trace_majorant,
    ncm_hardy_norm,
)
from .constructions import (
    CornerProjection,
    corner_projection,
    gk_family,
    hilbert_matrix,
    sharpness_function,
    triangle_projection,
)
from .jsonio import load_function, save_function

__version__ = "0.1.0"

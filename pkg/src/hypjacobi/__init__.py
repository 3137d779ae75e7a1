"""hypjacobi: continued fractions, complex Jacobi matrices and zero
location for ratios of Gauss hypergeometric functions.

The pipeline in one breath: the ratio F(a,b,c;z)/F(a,b+1,c+1;z) has a
regular C-fraction whose even part, after two changes of variable, is the
J-fraction of a complex Jacobi matrix J with J - J_0 trace class.  The
associated m-function B(a,b,c;z) is meromorphic off the band [-2, 2]; its
poles are the eigenvalues of J, which the Moebius map w = -4/(z-2) turns
into zeros of F(a,b+1,c+1;w) in the cut plane.  For real parameters the
finitely many negative b_j^2 grade eps_0 B into a generalized Nevanlinna
class N_kappa, modeled by a G-symmetric tridiagonal matrix H.
"""

from .cfrac import (
    CFValue,
    CoeffStream,
    JacobiCoeffs,
    approximant,
    c_coeff,
    cf_ratio_eval,
    jacobi_coeffs,
    moment_oracle,
    offdiag_roots,
)
from .classify import (
    KappaCertificate,
    Quadrature,
    SignSignature,
    build_H,
    h_m_function,
    kappa_certificate,
    negative_squares,
    quadrature,
    schur_reconstruct,
    schur_step,
    sign_signature,
    stieltjes_check,
)
from .errors import (
    CNonpositiveInteger,
    DegenerateRatio,
    DegenerateSamples,
    DenominatorZero,
    EigensolverFailure,
    HypJacobiError,
    NearPole,
    NearSingular,
    NoConvergence,
    NotRealParams,
    NotStieltjes,
    NumericsError,
    OnBand,
    OnCut,
    OutsideDisk,
    ParameterError,
    PoleOfApproximant,
    ScanExhausted,
    ShiftInvalid,
    Terminating,
)
from .hyp import (
    HypParams,
    SeriesValue,
    contiguous_residual,
    hyp2f1_series,
    ratio_series,
    validate_params,
)
from .spectral import (
    LiebThirring,
    SpectralResult,
    TruncatedJacobi,
    b_function,
    band_distance,
    band_to_cut,
    build_truncated,
    cut_to_band,
    discrete_spectrum,
    hyp_zeros,
    lieb_thirring_check,
    m_function,
    termination_index,
    trace_norm_bound,
)

__version__ = "0.1.0"

__all__ = [
    "CFValue",
    "CNonpositiveInteger",
    "CoeffStream",
    "DegenerateRatio",
    "DegenerateSamples",
    "DenominatorZero",
    "EigensolverFailure",
    "HypJacobiError",
    "HypParams",
    "JacobiCoeffs",
    "KappaCertificate",
    "LiebThirring",
    "NearPole",
    "NearSingular",
    "NoConvergence",
    "NotRealParams",
    "NotStieltjes",
    "NumericsError",
    "OnBand",
    "OnCut",
    "OutsideDisk",
    "ParameterError",
    "PoleOfApproximant",
    "Quadrature",
    "ScanExhausted",
    "SeriesValue",
    "ShiftInvalid",
    "SignSignature",
    "SpectralResult",
    "Terminating",
    "TruncatedJacobi",
    "approximant",
    "b_function",
    "band_distance",
    "band_to_cut",
    "build_H",
    "build_truncated",
    "c_coeff",
    "cf_ratio_eval",
    "contiguous_residual",
    "cut_to_band",
    "discrete_spectrum",
    "h_m_function",
    "hyp2f1_series",
    "hyp_zeros",
    "jacobi_coeffs",
    "kappa_certificate",
    "lieb_thirring_check",
    "m_function",
    "moment_oracle",
    "negative_squares",
    "offdiag_roots",
    "quadrature",
    "ratio_series",
    "schur_reconstruct",
    "schur_step",
    "sign_signature",
    "stieltjes_check",
    "termination_index",
    "trace_norm_bound",
    "validate_params",
]

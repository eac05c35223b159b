"""Exact coefficients of powers of the Borwein product (q;q)_inf / (q^p;q^p)_inf,
their Rademacher-type asymptotics, and checks of related q-series identities."""

from .asymptotics import (
    EstimateReport,
    bessel_I1,
    check_mth1_inequality,
    estimate,
    estimate_range,
    lemma_e_bound,
    mth1_quantities,
    predicted_sign,
    rademacher_main,
    theorem_mth_error_bound,
)
from .identities import (
    BivariateSeries,
    Dissection,
    conjecture1_check,
    cubic_theta_check,
    dissect,
    divisibility_check,
    interleave,
    sign_pattern_check,
    theorem_main_residual,
    theta_dissection_residual,
    two_squares_check,
    vanishing_classes,
)
from .modular import (
    PhaseAngle,
    TransformContext,
    dedekind_sum,
    kloosterman_A,
    verify_modular_transform,
)
from .series import (
    EtaLikeProduct,
    TruncatedSeries,
    borwein_coeffs,
    expand_product,
    partition_numbers,
    series_inv,
    series_mul,
    series_pow,
)

__version__ = "0.1.0"

__all__ = [
    "BivariateSeries",
    "Dissection",
    "EstimateReport",
    "EtaLikeProduct",
    "PhaseAngle",
    "TransformContext",
    "TruncatedSeries",
    "bessel_I1",
    "borwein_coeffs",
    "check_mth1_inequality",
    "conjecture1_check",
    "cubic_theta_check",
    "dedekind_sum",
    "dissect",
    "divisibility_check",
    "estimate",
    "estimate_range",
    "expand_product",
    "interleave",
    "kloosterman_A",
    "lemma_e_bound",
    "mth1_quantities",
    "partition_numbers",
    "predicted_sign",
    "rademacher_main",
    "series_inv",
    "series_mul",
    "series_pow",
    "sign_pattern_check",
    "theorem_main_residual",
    "theorem_mth_error_bound",
    "theta_dissection_residual",
    "two_squares_check",
    "vanishing_classes",
    "verify_modular_transform",
]

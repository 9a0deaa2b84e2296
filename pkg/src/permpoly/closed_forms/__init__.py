"""Closed-form expectations, group integrals and asymptotic profiles used as oracles."""

from .asymptotics import (
    DENSITY_KINDS,
    PHI_KINDS,
    AsymptoticProfile,
    asymptotic_phi,
    density_oracle,
    finite_phi,
    gue_psi,
)
from .circular import (
    fk_mc,
    fk_rank_one,
    log_char_two_point_cue_diag,
    log_two_point_cue_diag,
    log_two_point_ginibre_diag,
    two_point_cue,
    two_point_ginibre,
)
from .gaussian import (
    char_two_point_gue,
    char_two_point_gue_cd,
    dyson_kernel_ratio,
    gaussian_normalization,
    mean_char_poly_gue,
    mean_perm_poly_coefficients,
    mean_perm_poly_general,
    mean_perm_poly_goe,
    mean_perm_poly_gue,
    semicircle,
    two_point_goe,
    two_point_gue,
)
from .group_integrals import (
    complete_symmetric,
    complete_symmetric_all,
    divided_difference_sum,
    hciz_full,
    hciz_mc,
    hciz_rank_one,
    identity_check_symfun1,
)

__all__ = [name for name in dir() if not name.startswith("_")]

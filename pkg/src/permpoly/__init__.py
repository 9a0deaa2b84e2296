"""Permanents, permanental polynomials and their random-matrix statistics.

Exact permanent kernels, ensemble samplers, closed-form expectations used as
oracles, Monte-Carlo estimators, and permanental-root density estimation.
"""

from ._sampling import BLOCK_SIZE, MCEstimate, z_score
from .ensembles import (
    EnsembleSpec,
    Potential,
    sample,
    sample_cue,
    sample_ginibre,
    sample_goe,
    sample_gue,
    sample_unitary_invariant,
)
from .errors import (
    AliasingError,
    ConditioningError,
    ConvergenceError,
    DomainError,
    PermPolyError,
    SizeError,
    UsageError,
)
from .montecarlo import (
    MCPoly,
    duality_check,
    maingau_rhs,
    mc_char_two_point,
    mc_mean_perm_poly,
    mc_two_point,
)
from .orthopoly import (
    RecurrenceCoeffs,
    hermite_monic,
    monic_ops_from_potential,
    quadrature,
)
from .perm_core import (
    per_contour,
    per_gaussian_estimate,
    per_glynn,
    per_naive,
    per_ryser,
    perm_poly,
)
from .roots import (
    DensityHistogram,
    GridSpec,
    RootCloud,
    conjecture_report,
    density_histogram,
    marginal,
    poly_roots,
    root_cloud,
)

__version__ = "0.1.0"

"""High-precision evaluation and verification of binomial-sum identities.

The package evaluates classical polylogarithms, iterated-integral letter
words (generalized polylogarithms), nested multiple-polylogarithm series,
binomial/harmonic series families, and their contour / half-line integral
representations, all at configurable precision.  A bundled catalog records
the identities tying these objects to closed forms over a registry of exact
constants; a verification harness checks every catalog entry from at least
two independent directions, and a PSLQ-based hunter rediscovers the rational
coefficients of the closed forms.
"""

from .precision import PrecisionContext, DEFAULT_CONTEXT
from .errors import (
    CmzvError, UnknownConstant, PrecisionExhausted, OnBranchCut, DomainError,
    DivergentWord, InvalidWord, ShapeError, DivergentSpec, AngleOutOfRange,
    QuadratureNonConvergent, SingularOnPath, SchemaError, PrecisionTooLow,
    NoRelationFound,
)
from .polylog import li, li_jump, li_real, PolylogQuery
from .constants import resolve_constant, registry
from .closedform import ClosedForm, eval_closed_form
from .words import (
    Letter, Word, WordCombination, word, shuffle, scale, hoelder_reflect,
    fibrate_li_family, level_membership, gpl_to_mpl, mpl_to_gpl, gpl_eval,
    eval_combination,
)
from .mpl import mpl_series
from .series import (
    SeriesSpec, WeightTerm, harmonic, binom_stream, eval_series,
    eval_generating_function_check, eval_parametric_log_identity,
    eval_known_sum_check, eval_symmetry_check, h_term, hbar_factor,
)
from .quadrature import IntegralSpec, eval_integral, beta_moment
from .catalog import (
    IdentityRecord, SpaceTag, VerificationReport, load_catalog, verify,
    verify_all, summarize, perturb_closed_form,
)
from .hunter import RelationProblem, pslq, hunt_reduction, BASIS_PRESETS

__version__ = "0.1.0"

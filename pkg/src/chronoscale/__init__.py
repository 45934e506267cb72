"""chronoscale: numerical delta calculus and inequality verification on
bounded time scales (hybrid discrete/continuous domains)."""

__version__ = "0.1.0"

from .calculus import (
    DeltaResult,
    IntegralResult,
    MonotonicityReport,
    ResidualReport,
    chain_rule_derivative,
    compose_sigma,
    default_grid,
    delta_derivative,
    delta_integral,
    derivative_map,
    fundamental_theorem_check,
    parts_check,
    product_quotient_check,
    second_delta_derivative,
    sigma_delta,
    substitution_check,
    verify_nondecreasing,
)
from .errors import (
    BadIntervalError,
    BadSubstitutionError,
    ChronoscaleError,
    EmptyScaleError,
    EvalDomainError,
    NoConvergenceError,
    NotDifferentiableError,
    NotInScaleError,
    OutsideKappaDomainError,
    ParseError,
    QuotientUndefinedError,
    ScaleSpecError,
    TabulationGapError,
)
from .expr import diff, parse, to_text
from .functions import ScaleFunction
from .inequalities import (
    BoundsPair,
    ExponentPair,
    HypothesisReport,
    InequalityVerdict,
    WitnessReport,
    akkouchi_witness,
    check_akkouchi_ts,
    check_bounded_ratio,
    check_holder,
    check_pm_bound,
    check_power_bounded,
    check_qi,
    check_ratio_holder,
    check_yin_qi_strict,
    yin_qi_witness,
)
from .kernel import BACKEND as KERNEL_BACKEND
from .scales import (
    PointClass,
    Segment,
    TimeScale,
    canonicalize,
    geometric,
    interval,
    lattice,
    load_scale_file,
    scale_from_obj,
)
from .search import (
    CampaignReport,
    GenConfig,
    gen_admissible,
    gen_scale,
    replay_instance,
    run_campaign,
    serialize_instance,
)

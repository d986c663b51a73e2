"""cackit: a workbench for conflict-avoiding codes.

Construct the known optimal single- and multichannel code families,
verify their difference-disjointness invariants, evaluate every
closed-form upper bound, certify optimality, compute exact maxima by
exhaustive search, and simulate the hard multiple-access guarantee.
"""

from .ring import (
    CrtSystem,
    ExceptionalityReport,
    KneserReport,
    LayerView,
    ResidueSet,
    SubgroupDescriptor,
    crt_combine,
    crt_decode,
    crt_encode,
    diff_set,
    divisors,
    is_exceptional_pair,
    is_exceptional_pattern,
    is_exceptional_set,
    is_prime,
    kneser_check,
    layer_of,
    legendre,
    lift_layers,
    prime_factorization,
    quadratic_residues,
    signed_diff,
    stabilizer,
    subgroup_of_order,
    sumset,
    tau,
)
from .single import (
    ConstructionError,
    CoverageReport,
    QrReport,
    SingleCode,
    SingleCodeword,
    VerificationReport,
    construct_lifted_code,
    construct_lifted_mixed,
    construct_qr_code,
    coverage_report,
    make_equidiff,
    optimality_condition_w1,
    qr_conditions,
    verify_cac,
)
from .multi import (
    DifferenceArray,
    MultiCode,
    MultiCodeword,
    MultiVerificationReport,
    construct_m_channel,
    construct_two_channel,
    difference_array,
    embed_single,
    verify_amoppts,
    verify_mccac,
    verify_mixed_weight_mccac,
)
from .bounds import (
    BoundReport,
    Certificate,
    all_bounds,
    certify,
    conjectured_ratio,
    ub_amoppts_general,
    ub_amoppts_small_channels,
    ub_general,
    ub_m_channel_tau,
    ub_single,
    ub_small_channels,
    ub_two_channel,
)
from .search import (
    EquidiffSearchResult,
    ExceptionalRecord,
    SearchOptions,
    SearchResult,
    enumerate_exceptional,
    max_amoppts,
    max_cac,
    max_mccac,
    search_equidiff,
)
from .simulate import (
    Activation,
    BudgetExceeded,
    CampaignReport,
    FrameOutcome,
    GuaranteeResult,
    exhaustive_guarantee,
    random_campaign,
    simulate_frame,
)
from .codefile import load_code, multi_to_single, save_code

__version__ = "0.1.0"

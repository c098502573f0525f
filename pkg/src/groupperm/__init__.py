"""Randomization inference for randomized group formation experiments.

Exact, design-justified permutation tests for peer effects, conditional
tests for pairwise exposure contrasts, Hodges-Lehmann estimation by test
inversion, and brute-force enumeration oracles for desk-scale validation.
"""

from .designs import (
    CRDesign,
    SRDesign,
    cr_from_observed,
    sample_cr,
    sample_sr,
    sr_from_observed,
    support_size,
)
from .errors import GroupPermError, GuardError, InputError
from .estimation import (
    ConfidenceInterval,
    ShiftGrid,
    confidence_interval,
    hl_estimate,
    invert_ci,
    shift_test,
    weak_null_ci,
)
from .inference import (
    ExperimentData,
    NullSpec,
    TestResult,
    TestStatisticSpec,
    diff_in_means,
    mc_pvalue,
    shift_pvalue_curve,
    studentized_stat,
    test_pairwise,
    test_sharp,
)
from .model import (
    AttributeVector,
    ExposureVector,
    FocalSet,
    GroupAssignment,
    GroupLabelAssignment,
    OutcomeVector,
    coarsen_exposure,
    exposure_of,
    focal_set,
    labels_to_assignment,
    subgroup_restrict,
)
from .oracle import (
    ExactDistribution,
    enumerate_assignments,
    exact_conditional_distribution,
    exact_exposure_distribution,
    exact_pvalue,
    feasibility_check,
    rejection_sample_conditional,
)
from .symmetry import (
    Permutation,
    StabilizerStrata,
    apply_permutation,
    joint_strata,
    orbit_stabilizer_counts,
    sample_stabilizer_permutation,
    stabilizer_strata,
    verify_equivariance,
)

__version__ = "0.1.0"

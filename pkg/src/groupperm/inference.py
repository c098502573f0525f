"""Test statistics and Monte Carlo randomization tests.

Two procedures are exposed.  ``test_sharp`` tests the global null of no
effect whatsoever by permuting the observed exposure vector within strata
of the attribute (or of a user-declared finer stratification).  For a
pairwise null comparing two exposures, naive permutation is invalid:
exposures must stay compatible with the group structure.  ``test_pairwise``
therefore conditions on the observed focal set, the units whose exposure
lies in the tested pair, and permutes only their exposures within joint
(stratum, focal-membership) strata.  That conditional resampling matches
the exact conditional law of the exposure under stratified designs, which
is what makes the p-values valid.

Replicate statistics are computed with a vectorized engine; the scalar
statistic functions below are the reference definitions and are the ones
the exact-enumeration oracle uses, keeping the two routes independent.
All computations use fixed summation order, so results are reproducible
bit for bit given the seed.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .designs import CRDesign, SRDesign, cr_from_observed, sr_from_observed
from .errors import InputError
from .model import (
    AttributeVector,
    ExposureValue,
    ExposureVector,
    FocalSet,
    GroupLabelAssignment,
    OutcomeVector,
    coarsen_exposure,
    exposure_label,
    exposure_of,
    focal_set,
    labels_to_assignment,
    subgroup_restrict,
)

DIRECTION_GREATER = "greater"
DIRECTION_TWO_SIDED = "two_sided"

ESTIMATOR_VALID = "valid"
ESTIMATOR_UNBIASED = "unbiased"


@dataclass(frozen=True)
class ExperimentData:
    """One experiment: attributes, group labels, outcomes, exposure choice.

    ``covariates`` holds optional named per-unit columns used by the
    stratified and residual-adjusted statistics and by covariate-stratified
    permutation.
    """

    attributes: AttributeVector
    labels: GroupLabelAssignment
    outcomes: OutcomeVector
    exposure_kind: str = "count"
    coarsen_map: Mapping[ExposureValue, ExposureValue] | None = None
    covariates: Mapping[str, tuple] | None = None

    def __post_init__(self):
        n = self.attributes.n_units
        if self.labels.n_units != n or self.outcomes.n_units != n:
            raise InputError("attributes, labels, and outcomes must have equal lengths")
        if self.covariates:
            for name, col in self.covariates.items():
                if len(col) != n:
                    raise InputError(f"covariate {name!r} has wrong length")

    @property
    def n_units(self) -> int:
        return self.attributes.n_units

    def observed_exposures(self) -> ExposureVector:
        base_kind = "multiset" if self.coarsen_map is not None else self.exposure_kind
        exposures = exposure_of(
            labels_to_assignment(self.labels), self.attributes, base_kind
        )
        if self.coarsen_map is not None:
            exposures = coarsen_exposure(exposures, self.coarsen_map)
        return exposures

    def covariate(self, name: str) -> tuple:
        if not self.covariates or name not in self.covariates:
            raise InputError(f"unknown covariate column {name!r}")
        return self.covariates[name]


@dataclass(frozen=True)
class TestStatisticSpec:
    """Which statistic to resample and which tail to count.

    ``stratified_diff`` needs ``strata_column``; ``residual_adjusted``
    needs ``covariate_columns`` naming numeric regressors.
    """

    kind: str = "diff_in_means"
    direction: str = DIRECTION_TWO_SIDED
    strata_column: str | None = None
    covariate_columns: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("diff_in_means", "studentized", "stratified_diff", "residual_adjusted"):
            raise InputError(f"unknown statistic kind {self.kind!r}")
        if self.direction not in (DIRECTION_GREATER, DIRECTION_TWO_SIDED):
            raise InputError(f"unknown direction {self.direction!r}")
        if self.kind == "stratified_diff" and not self.strata_column:
            raise InputError("stratified_diff needs a strata column")
        if self.kind == "residual_adjusted" and not self.covariate_columns:
            raise InputError("residual_adjusted needs covariate columns")


@dataclass(frozen=True)
class NullSpec:
    """A testable null: global sharp, or a pairwise exposure contrast.

    ``shift`` extends the pairwise null to a constant nonzero effect,
    ``subgroup`` restricts it to units with one attribute level.
    """

    kind: str
    c1: ExposureValue = None
    c2: ExposureValue = None
    subgroup: int | None = None
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in ("sharp", "pairwise"):
            raise InputError(f"unknown null kind {self.kind!r}")


@dataclass(frozen=True)
class TestResult:
    """Outcome of one randomization test, with full provenance."""

    statistic_obs: float
    p_value: float
    null_draws: tuple[float, ...]
    replicates: int
    estimator: str
    direction: str
    seed: int | None
    focal_counts: dict = field(default_factory=dict)


# --------------------------------------------------------------------- #
# Scalar statistics (reference definitions; also used by the oracle)
# --------------------------------------------------------------------- #


def diff_in_means(
    exposures: ExposureVector,
    outcomes: OutcomeVector,
    focal: FocalSet,
    c1: ExposureValue,
    c2: ExposureValue,
) -> float:
    """Mean outcome of focal units exposed to ``c1`` minus those at ``c2``."""
    arm1 = [
        outcomes.values[i]
        for i in focal.indices()
        if exposures.values[i] == c1
    ]
    arm2 = [
        outcomes.values[i]
        for i in focal.indices()
        if exposures.values[i] == c2
    ]
    if not arm1 or not arm2:
        raise InputError("empty exposure arm")
    return sum(arm1) / len(arm1) - sum(arm2) / len(arm2)


def _cell_mean_var(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var


def studentized_stat(
    exposures: ExposureVector,
    outcomes: OutcomeVector,
    attributes: AttributeVector,
    focal: FocalSet,
    c1: ExposureValue,
    c2: ExposureValue,
) -> float:
    """Attribute-weighted contrast divided by its estimated standard error.

    Within each attribute level present among focal units, the two focal
    arms contribute a mean difference weighted by the level's share of the
    whole sample, and sample variances (denominator n-1) accumulate into
    the variance estimate.  Every contributing cell needs at least two
    units; the statistic targets the average contrast, so the resulting
    test remains asymptotically valid when effects are heterogeneous.
    """
    n_total = attributes.n_units
    numerator = 0.0
    denominator = 0.0
    for level in sorted(set(attributes.levels)):
        arm1 = [
            outcomes.values[i]
            for i in focal.indices()
            if attributes.values[i] == level and exposures.values[i] == c1
        ]
        arm2 = [
            outcomes.values[i]
            for i in focal.indices()
            if attributes.values[i] == level and exposures.values[i] == c2
        ]
        if not arm1 and not arm2:
            continue
        if len(arm1) < 2 or len(arm2) < 2:
            raise InputError(f"degenerate stratum cell for attribute {level!r}")
        share = attributes.count(level) / n_total
        m1, v1 = _cell_mean_var(arm1)
        m2, v2 = _cell_mean_var(arm2)
        numerator += share * (m1 - m2)
        denominator += share**2 * (v1 / len(arm1) + v2 / len(arm2))
    if denominator <= 0.0:
        raise InputError("zero denominator")
    return numerator / math.sqrt(denominator)


def _stratified_diff(
    exposures: ExposureVector,
    outcomes: OutcomeVector,
    strata_values: Sequence,
    focal: FocalSet,
    c1: ExposureValue,
    c2: ExposureValue,
) -> float:
    """Weighted within-stratum contrast, weights = focal units per stratum.

    Strata missing either arm are dropped and the weights renormalized over
    the remaining ones.
    """
    cells: dict = {}
    for i in focal.indices():
        cells.setdefault(strata_values[i], ([], []))
        w = exposures.values[i]
        if w == c1:
            cells[strata_values[i]][0].append(outcomes.values[i])
        elif w == c2:
            cells[strata_values[i]][1].append(outcomes.values[i])
    total = 0.0
    weight_sum = 0.0
    for key in sorted(cells, key=repr):
        arm1, arm2 = cells[key]
        if not arm1 or not arm2:
            continue
        weight = len(arm1) + len(arm2)
        total += weight * (sum(arm1) / len(arm1) - sum(arm2) / len(arm2))
        weight_sum += weight
    if weight_sum == 0.0:
        raise InputError("empty exposure arm in every stratum")
    return total / weight_sum


def _fit_residuals(data: ExperimentData, focal: FocalSet, columns: tuple[str, ...]) -> tuple[float, ...]:
    """OLS of outcomes on named covariates, fit once on the focal units.

    Returns residuals for every unit so that replicate arms outside the
    observed focal set still have adjusted outcomes to read.
    """
    x_all = np.column_stack(
        [np.ones(data.n_units)]
        + [np.asarray(data.covariate(name), dtype=float) for name in columns]
    )
    idx = list(focal.indices())
    y = np.asarray(data.outcomes.values)
    beta, *_ = np.linalg.lstsq(x_all[idx], y[idx], rcond=None)
    return tuple(float(r) for r in y - x_all @ beta)


def prepare_scalar_statistic(
    spec: TestStatisticSpec,
    data: ExperimentData,
    focal: FocalSet,
    c1: ExposureValue,
    c2: ExposureValue,
):
    """Bind a statistic spec to observed data, returning ``f(w_values, y_values)``.

    Any one-time fitting (residual adjustment) happens here, on the
    observed focal data, so the returned callable is a pure function of the
    candidate exposure vector and (possibly imputed) outcomes.
    """
    if spec.kind == "residual_adjusted":
        fitted = np.asarray(data.outcomes.values) - np.asarray(
            _fit_residuals(data, focal, spec.covariate_columns)
        )

        def stat(w_values, y_values):
            residuals = OutcomeVector(
                tuple(float(y) - f for y, f in zip(y_values, fitted))
            )
            exposures = ExposureVector(tuple(w_values), data.exposure_kind if data.coarsen_map is None else "coarsened")
            return diff_in_means(exposures, residuals, focal, c1, c2)

        return stat

    if spec.kind == "stratified_diff":
        strata_values = data.covariate(spec.strata_column)

        def stat(w_values, y_values):
            exposures = ExposureVector(tuple(w_values), data.exposure_kind if data.coarsen_map is None else "coarsened")
            return _stratified_diff(
                exposures, OutcomeVector(tuple(float(y) for y in y_values)),
                strata_values, focal, c1, c2,
            )

        return stat

    if spec.kind == "studentized":

        def stat(w_values, y_values):
            exposures = ExposureVector(tuple(w_values), data.exposure_kind if data.coarsen_map is None else "coarsened")
            return studentized_stat(
                exposures, OutcomeVector(tuple(float(y) for y in y_values)),
                data.attributes, focal, c1, c2,
            )

        return stat

    def stat(w_values, y_values):
        exposures = ExposureVector(tuple(w_values), data.exposure_kind if data.coarsen_map is None else "coarsened")
        return diff_in_means(
            exposures, OutcomeVector(tuple(float(y) for y in y_values)), focal, c1, c2
        )

    return stat


# --------------------------------------------------------------------- #
# Monte Carlo p-values
# --------------------------------------------------------------------- #


def mc_pvalue(
    t_obs: float,
    draws: Sequence[float],
    estimator: str = ESTIMATOR_VALID,
    direction: str = DIRECTION_GREATER,
) -> float:
    """p-value estimate from replicate draws of the null statistic.

    The ``valid`` form ``(1 + #{T_l >= T_obs}) / (L + 1)`` is exact at any
    finite number of replicates; ``unbiased`` is the plain proportion.
    Two-sided direction takes absolute values first.  Ties count via exact
    floating-point ``>=`` with no tolerance.
    """
    if len(draws) == 0:
        raise InputError("no replicate draws")
    if direction == DIRECTION_TWO_SIDED:
        t_obs = abs(t_obs)
        count = sum(1 for d in draws if abs(d) >= t_obs)
    else:
        count = sum(1 for d in draws if d >= t_obs)
    if estimator == ESTIMATOR_UNBIASED:
        return count / len(draws)
    if estimator == ESTIMATOR_VALID:
        return (1 + count) / (len(draws) + 1)
    raise InputError(f"unknown p-value estimator {estimator!r}")


def _coerce_rng(rng) -> tuple[np.random.Generator, int | None]:
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng)), int(rng)
    if isinstance(rng, np.random.Generator):
        return rng, None
    if rng is None:
        return np.random.default_rng(), None
    raise InputError("rng must be a seed, a numpy Generator, or None")


def _check_design(design, data: ExperimentData) -> None:
    """The observed labels must actually satisfy the declared design."""
    if design is None:
        return
    if isinstance(design, SRDesign):
        observed = sr_from_observed(data.labels, data.attributes)
        if dict(observed.counts) != dict(design.counts):
            raise InputError("observed assignment violates the declared stratified design")
    elif isinstance(design, CRDesign):
        if cr_from_observed(data.labels).group_sizes != design.group_sizes:
            raise InputError("observed group sizes violate the declared design")
    else:
        raise InputError(f"unknown design type {type(design).__name__}")


def _strata_positions(strata_values: Sequence, positions: Sequence[int]) -> list[np.ndarray]:
    """Group the given positions by stratum value, in first-appearance order."""
    groups: dict = {}
    for pos in positions:
        groups.setdefault(strata_values[pos], []).append(pos)
    return [np.asarray(g, dtype=np.intp) for g in groups.values()]


def _permutation_index_matrix(
    strata: list[np.ndarray], n: int, replicates: int, rng: np.random.Generator
) -> np.ndarray:
    """Row ``l`` maps position ``j`` to the source index whose value it takes.

    Positions outside every stratum keep their own value.  Each row is an
    independent uniform within-strata permutation.
    """
    index = np.tile(np.arange(n, dtype=np.intp), (replicates, 1))
    for positions in strata:
        if len(positions) < 2:
            continue
        order = np.argsort(rng.random((replicates, len(positions))), axis=1)
        index[:, positions] = positions[order]
    return index


class _ArmStatEngine:
    """Vectorized replicate statistics from boolean arm-membership matrices.

    Operates on the focal (or full) unit axis: given per-replicate masks of
    which units sit in each arm, evaluates the chosen statistic for every
    replicate at once.  This is an independent implementation from the
    scalar reference functions; the test suite cross-checks the two.
    """

    def __init__(
        self,
        spec: TestStatisticSpec,
        y: np.ndarray,
        y_offset: np.ndarray,
        attr_codes: np.ndarray,
        attr_shares: dict,
        strata_codes: np.ndarray | None,
    ):
        self.spec = spec
        self.y = y
        self.y_offset = y_offset
        self.attr_codes = attr_codes
        self.attr_shares = attr_shares
        self.strata_codes = strata_codes

    def evaluate(self, arm1: np.ndarray, arm2: np.ndarray, y_matrix: np.ndarray | None = None) -> np.ndarray:
        if y_matrix is None:
            y = self.y[None, :]
        else:
            y = y_matrix - self.y_offset[None, :]
        if self.spec.kind in ("diff_in_means", "residual_adjusted"):
            return self._diff(arm1, arm2, y)
        if self.spec.kind == "studentized":
            return self._studentized(arm1, arm2, y)
        return self._stratified(arm1, arm2, y)

    @staticmethod
    def _masked_mean(mask: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = mask.sum(axis=1)
        if np.any(n == 0):
            raise InputError("empty exposure arm")
        return (y * mask).sum(axis=1) / n, n

    def _diff(self, arm1, arm2, y):
        m1, _ = self._masked_mean(arm1, y)
        m2, _ = self._masked_mean(arm2, y)
        return m1 - m2

    def _studentized(self, arm1, arm2, y):
        numerator = 0.0
        denominator = 0.0
        for level, share in self.attr_shares.items():
            in_level = self.attr_codes == level
            a1 = arm1 & in_level[None, :]
            a2 = arm2 & in_level[None, :]
            n1 = a1.sum(axis=1)
            n2 = a2.sum(axis=1)
            if not n1.any() and not n2.any():
                continue
            if np.any(n1 < 2) or np.any(n2 < 2):
                raise InputError(f"degenerate stratum cell for attribute {level!r}")
            m1 = (y * a1).sum(axis=1) / n1
            m2 = (y * a2).sum(axis=1) / n2
            v1 = ((y * y) * a1).sum(axis=1) - n1 * m1 * m1
            v2 = ((y * y) * a2).sum(axis=1) - n2 * m2 * m2
            numerator = numerator + share * (m1 - m2)
            denominator = denominator + share**2 * (
                v1 / (n1 - 1) / n1 + v2 / (n2 - 1) / n2
            )
        denominator = np.asarray(denominator, dtype=float)
        if denominator.ndim == 0 or np.any(denominator <= 0.0):
            raise InputError("zero denominator")
        return numerator / np.sqrt(denominator)

    def _stratified(self, arm1, arm2, y):
        total = None
        weight_sum = None
        for code in np.unique(self.strata_codes):
            in_region = self.strata_codes == code
            a1 = arm1 & in_region[None, :]
            a2 = arm2 & in_region[None, :]
            n1 = a1.sum(axis=1)
            n2 = a2.sum(axis=1)
            usable = (n1 > 0) & (n2 > 0)
            m1 = np.divide((y * a1).sum(axis=1), n1, out=np.zeros(len(n1)), where=usable)
            m2 = np.divide((y * a2).sum(axis=1), n2, out=np.zeros(len(n2)), where=usable)
            weight = np.where(usable, n1 + n2, 0)
            term = weight * (m1 - m2)
            total = term if total is None else total + term
            weight_sum = weight if weight_sum is None else weight_sum + weight
        if weight_sum is None or np.any(weight_sum == 0):
            raise InputError("empty exposure arm in every stratum")
        return total / weight_sum


def _stratify_values(data: ExperimentData, stratify_on: Sequence | None) -> Sequence:
    if stratify_on is None:
        return data.attributes.values
    if len(stratify_on) != data.n_units:
        raise InputError("stratification vector has the wrong length")
    return tuple(stratify_on)


def _engine_for(
    spec: TestStatisticSpec,
    data: ExperimentData,
    focal: FocalSet,
    positions: np.ndarray,
) -> _ArmStatEngine:
    y_raw = np.asarray(data.outcomes.values)
    if spec.kind == "residual_adjusted":
        residuals = np.asarray(_fit_residuals(data, focal, spec.covariate_columns))
        offset = y_raw - residuals
        y_all = residuals
    else:
        offset = np.zeros_like(y_raw)
        y_all = y_raw
    attr_all = np.asarray(data.attributes.values)
    shares = {
        level: data.attributes.count(level) / data.n_units
        for level in sorted(set(data.attributes.levels))
    }
    strata_codes = None
    if spec.kind == "stratified_diff":
        column = data.covariate(spec.strata_column)
        uniques = {v: i for i, v in enumerate(dict.fromkeys(column))}
        strata_codes = np.asarray([uniques[v] for v in column])[positions]
    return _ArmStatEngine(
        spec, y_all[positions], offset[positions], attr_all[positions], shares, strata_codes
    )


def _resolve_sharp_pair(exposures: ExposureVector, c1, c2):
    if c1 is not None and c2 is not None:
        return c1, c2
    observed = exposures.distinct_values()
    if len(observed) != 2:
        raise InputError(
            "the sharp test needs an explicit exposure pair when more than "
            "two exposure values occur"
        )
    try:
        lo, hi = sorted(observed)
    except TypeError:
        lo, hi = sorted(observed, key=repr)
    return hi, lo


def test_sharp(
    data: ExperimentData,
    design: SRDesign | CRDesign | None,
    stat: TestStatisticSpec,
    replicates: int,
    rng,
    c1: ExposureValue = None,
    c2: ExposureValue = None,
    stratify_on: Sequence | None = None,
    estimator: str = ESTIMATOR_VALID,
) -> TestResult:
    """Randomization test of the global null of no effect whatsoever.

    Replicate exposure vectors are within-strata permutations of the
    observed one; under a stratified design those are exact draws from the
    exposure distribution.  Completely randomized designs are analyzed
    conditional on the observed per-(attribute, group) counts, which this
    resampling realizes automatically.
    """
    generator, seed = _coerce_rng(rng)
    _check_design(design, data)
    exposures = data.observed_exposures()
    c1, c2 = _resolve_sharp_pair(exposures, c1, c2)

    strata_values = _stratify_values(data, stratify_on)
    n = data.n_units
    positions = np.arange(n, dtype=np.intp)
    strata = _strata_positions(strata_values, range(n))

    all_units = FocalSet((True,) * n, (c1, c2))
    scalar = prepare_scalar_statistic(stat, data, all_units, c1, c2)
    t_obs = scalar(exposures.values, data.outcomes.values)

    codes_map = {v: i for i, v in enumerate(exposures.distinct_values())}
    w_codes = np.asarray([codes_map[w] for w in exposures.values])
    if c1 not in codes_map or c2 not in codes_map:
        raise InputError("empty exposure arm")
    index = _permutation_index_matrix(strata, n, replicates, generator)
    permuted = w_codes[index]
    engine = _engine_for(stat, data, all_units, positions)
    draws = engine.evaluate(permuted == codes_map[c1], permuted == codes_map[c2])

    p = mc_pvalue(t_obs, draws, estimator, stat.direction)
    counts = {
        exposure_label(c1): int(np.sum(w_codes == codes_map[c1])),
        exposure_label(c2): int(np.sum(w_codes == codes_map[c2])),
    }
    return TestResult(
        statistic_obs=float(t_obs),
        p_value=float(p),
        null_draws=tuple(float(d) for d in draws),
        replicates=replicates,
        estimator=estimator,
        direction=stat.direction,
        seed=seed,
        focal_counts=counts,
    )


def _pairwise_setup(
    data: ExperimentData,
    c1: ExposureValue,
    c2: ExposureValue,
    subgroup: int | None,
    stratify_on: Sequence | None,
):
    exposures = data.observed_exposures()
    focal = focal_set(exposures, c1, c2)
    if subgroup is not None:
        focal = subgroup_restrict(focal, data.attributes, subgroup)
    strata_values = _stratify_values(data, stratify_on)
    positions = np.asarray(focal.indices(), dtype=np.intp)
    # permutations act within joint (stratum, focal) cells; restricted to
    # the focal positions that is a grouping by stratum value
    strata = _strata_positions(strata_values, focal.indices())
    local = {int(p): j for j, p in enumerate(positions)}
    strata_local = [np.asarray([local[int(p)] for p in s], dtype=np.intp) for s in strata]
    return exposures, focal, positions, strata_local


def test_pairwise(
    data: ExperimentData,
    design: SRDesign | CRDesign | None,
    c1: ExposureValue,
    c2: ExposureValue,
    stat: TestStatisticSpec,
    replicates: int,
    rng,
    subgroup: int | None = None,
    stratify_on: Sequence | None = None,
    estimator: str = ESTIMATOR_VALID,
) -> TestResult:
    """Conditional randomization test of equality between two exposures.

    The observed focal set is the conditioning event and is held fixed:
    replicates shuffle the focal units' observed exposures within strata,
    which leaves the non-focal exposures untouched and never manufactures
    an exposure vector the design could not have produced.
    """
    generator, seed = _coerce_rng(rng)
    _check_design(design, data)
    exposures, focal, positions, strata_local = _pairwise_setup(
        data, c1, c2, subgroup, stratify_on
    )

    scalar = prepare_scalar_statistic(stat, data, focal, c1, c2)
    t_obs = scalar(exposures.values, data.outcomes.values)

    obs_arm1 = np.asarray([exposures.values[i] == c1 for i in focal.indices()])
    n_focal = len(positions)
    index = _permutation_index_matrix(strata_local, n_focal, replicates, generator)
    arm1 = obs_arm1[index]
    engine = _engine_for(stat, data, focal, positions)
    draws = engine.evaluate(arm1, ~arm1)

    p = mc_pvalue(t_obs, draws, estimator, stat.direction)
    counts = {
        exposure_label(c1): int(obs_arm1.sum()),
        exposure_label(c2): int(len(obs_arm1) - obs_arm1.sum()),
    }
    return TestResult(
        statistic_obs=float(t_obs),
        p_value=float(p),
        null_draws=tuple(float(d) for d in draws),
        replicates=replicates,
        estimator=estimator,
        direction=stat.direction,
        seed=seed,
        focal_counts=counts,
    )


def shift_pvalue_curve(
    data: ExperimentData,
    design: SRDesign | CRDesign | None,
    c1: ExposureValue,
    c2: ExposureValue,
    shifts: Sequence[float],
    stat: TestStatisticSpec,
    replicates: int,
    rng,
    subgroup: int | None = None,
    stratify_on: Sequence | None = None,
    estimator: str = ESTIMATOR_VALID,
) -> list[tuple[float, float]]:
    """p-values of the constant-shift null over a grid of shift values.

    Under the null that the contrast equals ``c``, subtracting ``c`` from
    the outcomes of ``c1``-exposed focal units removes the hypothesized
    effect, and the adjusted outcomes of the counterfactual exposure draws
    coincide with the adjusted observed ones.  Both the observed statistic
    and the replicate statistics are therefore computed on the adjusted
    outcomes, which keeps two-sided comparisons centered.  One permutation
    set is drawn and shared across the whole grid (common random numbers),
    so the curve has no Monte Carlo jitter between neighboring shifts, and
    a zero shift reproduces the pairwise test exactly.
    """
    generator, _ = _coerce_rng(rng)
    _check_design(design, data)
    exposures, focal, positions, strata_local = _pairwise_setup(
        data, c1, c2, subgroup, stratify_on
    )

    scalar = prepare_scalar_statistic(stat, data, focal, c1, c2)

    obs_arm1 = np.asarray([exposures.values[i] == c1 for i in focal.indices()])
    n_focal = len(positions)
    index = _permutation_index_matrix(strata_local, n_focal, replicates, generator)
    arm1 = obs_arm1[index]
    arm2 = ~arm1
    engine = _engine_for(stat, data, focal, positions)

    y_all = list(data.outcomes.values)
    y_focal = np.asarray(data.outcomes.values)[positions]
    obs_arm1_f = obs_arm1.astype(float)
    curve = []
    for c in shifts:
        c = float(c)
        adjusted_all = list(y_all)
        for j, i in enumerate(focal.indices()):
            if obs_arm1[j]:
                adjusted_all[i] = y_all[i] - c
        t_obs = scalar(exposures.values, adjusted_all)
        y_row = (y_focal - c * obs_arm1_f)[None, :]
        draws = engine.evaluate(arm1, arm2, y_matrix=y_row)
        curve.append((c, float(mc_pvalue(t_obs, draws, estimator, stat.direction))))
    return curve

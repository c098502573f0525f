"""Ground-truth machinery for desk-scale validation.

Everything in this module is exhaustive and exact: supports are enumerated
completely, probabilities are big-integer fractions, and p-values come from
summing over the enumeration rather than from sampling.  It exists to check
the fast permutation machinery, so it deliberately shares none of that
machinery's shortcuts; enumeration guards are hard errors, never silent
truncation.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .designs import (
    CRDesign,
    SRDesign,
    sample_cr_matrix,
    sample_sr_matrix,
    sr_from_observed,
    support_size,
)
from .errors import GuardError, InputError
from .inference import (
    ExperimentData,
    NullSpec,
    TestStatisticSpec,
    prepare_scalar_statistic,
)
from .model import (
    AttributeVector,
    ExposureValue,
    ExposureVector,
    FocalSet,
    GroupLabelAssignment,
    OutcomeVector,
    coarsen_exposure,
    exposure_of,
    focal_set,
    labels_to_assignment,
    subgroup_restrict,
)

DEFAULT_GUARD = 10**6
DEFAULT_ATTEMPT_CAP = 10**7


@dataclass(frozen=True)
class ExactDistribution:
    """A distribution over canonical exposure vectors with exact probabilities."""

    atoms: tuple[tuple[tuple, Fraction], ...]

    def __post_init__(self):
        total = sum((p for _, p in self.atoms), Fraction(0))
        if total != 1:
            raise InputError(f"probabilities sum to {total}, not 1")
        if any(p <= 0 for _, p in self.atoms):
            raise InputError("atoms must have positive probability")

    @classmethod
    def from_mapping(cls, probs: Mapping[tuple, Fraction]) -> "ExactDistribution":
        return cls(tuple(sorted(probs.items(), key=lambda kv: repr(kv[0]))))

    def support(self) -> set[tuple]:
        return {w for w, _ in self.atoms}

    def prob(self, w: tuple) -> Fraction:
        for atom, p in self.atoms:
            if atom == w:
                return p
        return Fraction(0)

    def is_uniform(self) -> bool:
        probs = {p for _, p in self.atoms}
        return len(probs) == 1

    def restrict(self, keep) -> "ExactDistribution":
        """Condition on a predicate over exposure vectors, renormalizing."""
        kept = {w: p for w, p in self.atoms if keep(w)}
        total = sum(kept.values(), Fraction(0))
        if total == 0:
            raise InputError("conditioning event has probability zero")
        return ExactDistribution.from_mapping({w: p / total for w, p in kept.items()})


def _multiset_permutations(values: Sequence[int]):
    """Yield the distinct orderings of a multiset of small integers."""
    counts: dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    keys = sorted(counts)
    out = [0] * len(values)

    def rec(pos: int):
        if pos == len(out):
            yield tuple(out)
            return
        for k in keys:
            if counts[k] > 0:
                counts[k] -= 1
                out[pos] = k
                yield from rec(pos + 1)
                counts[k] += 1

    yield from rec(0)


def enumerate_assignments(
    design: SRDesign | CRDesign, guard: int = DEFAULT_GUARD
) -> list[GroupLabelAssignment]:
    """The complete, duplicate-free support of a design's label vectors."""
    size = support_size(design)
    if size > guard:
        raise GuardError(f"support has {size} label vectors, guard is {guard}")
    if isinstance(design, CRDesign):
        template = [k for k, s in enumerate(design.group_sizes, start=1) for _ in range(s)]
        return [
            GroupLabelAssignment(labels, design.n_groups)
            for labels in _multiset_permutations(template)
        ]
    if not isinstance(design, SRDesign):
        raise InputError(f"unknown design type {type(design).__name__}")
    n = design.n_units
    per_stratum: list[tuple[tuple[int, ...], list[tuple[int, ...]]]] = []
    for level, row in design.counts:
        positions = design.stratum_indices(level)
        if not positions:
            continue
        template = [k for k, s in enumerate(row, start=1) for _ in range(s)]
        per_stratum.append((positions, list(_multiset_permutations(template))))
    out: list[GroupLabelAssignment] = []

    def rec(idx: int, labels: list[int]):
        if idx == len(per_stratum):
            out.append(GroupLabelAssignment(tuple(labels), design.n_groups))
            return
        positions, arrangements = per_stratum[idx]
        for arrangement in arrangements:
            for pos, lab in zip(positions, arrangement):
                labels[pos] = lab
            rec(idx + 1, labels)

    rec(0, [0] * n)
    return out


def _exposures_for(
    labels: GroupLabelAssignment,
    attributes: AttributeVector,
    kind: str,
    coarsen_map: Mapping | None,
) -> ExposureVector:
    base_kind = "multiset" if coarsen_map is not None else kind
    exposures = exposure_of(labels_to_assignment(labels), attributes, base_kind)
    if coarsen_map is not None:
        exposures = coarsen_exposure(exposures, coarsen_map)
    return exposures


def exact_exposure_distribution(
    design: SRDesign | CRDesign,
    attributes: AttributeVector,
    kind: str = "count",
    coarsen_map: Mapping | None = None,
    guard: int = DEFAULT_GUARD,
) -> ExactDistribution:
    """Pushforward of the uniform label distribution through the exposure map."""
    if attributes.n_units != design.n_units:
        raise InputError("attribute vector does not match the design size")
    support = enumerate_assignments(design, guard)
    weight = Fraction(1, len(support))
    probs: dict[tuple, Fraction] = {}
    for labels in support:
        w = _exposures_for(labels, attributes, kind, coarsen_map).values
        probs[w] = probs.get(w, Fraction(0)) + weight
    return ExactDistribution.from_mapping(probs)


def _focal_flags(
    w: tuple,
    attributes: AttributeVector,
    c1: ExposureValue,
    c2: ExposureValue,
    subgroup: int | None,
) -> tuple[bool, ...]:
    flags = tuple(v in (c1, c2) for v in w)
    if subgroup is not None:
        flags = tuple(
            f and a == subgroup for f, a in zip(flags, attributes.values)
        )
    return flags


def exact_conditional_distribution(
    design: SRDesign | CRDesign,
    attributes: AttributeVector,
    c1: ExposureValue,
    c2: ExposureValue,
    focal: FocalSet,
    kind: str = "count",
    subgroup: int | None = None,
    coarsen_map: Mapping | None = None,
    guard: int = DEFAULT_GUARD,
) -> ExactDistribution:
    """Exposure distribution conditioned on realizing the given focal set."""
    marginal = exact_exposure_distribution(design, attributes, kind, coarsen_map, guard)
    target = focal.member_flags
    try:
        return marginal.restrict(
            lambda w: _focal_flags(w, attributes, c1, c2, subgroup) == target
        )
    except InputError as exc:
        raise InputError("the requested focal set is unreachable under this design") from exc


def feasibility_check(
    candidate: ExposureVector,
    design: SRDesign | CRDesign,
    attributes: AttributeVector,
    coarsen_map: Mapping | None = None,
    guard: int = DEFAULT_GUARD,
) -> bool:
    """Whether any label vector in the design's support induces ``candidate``.

    This is the check a naive permutation test implicitly skips: shuffled
    exposure vectors can be incompatible with every possible grouping.
    """
    support = enumerate_assignments(design, guard)
    target = candidate.values
    for labels in support:
        if _exposures_for(labels, attributes, candidate.kind, coarsen_map).values == target:
            return True
    return False


def _count_exposure_rows(labels_matrix: np.ndarray, attr: np.ndarray, n_groups: int) -> np.ndarray:
    """Count-kind exposures for a batch of label rows: groupmates with code 1."""
    onehot = labels_matrix[:, :, None] == np.arange(1, n_groups + 1)[None, None, :]
    group_totals = (onehot * attr[None, :, None]).sum(axis=1)
    own_group = np.take_along_axis(group_totals, labels_matrix - 1, axis=1)
    return own_group - attr[None, :]


def rejection_sample_conditional(
    design: SRDesign | CRDesign,
    attributes: AttributeVector,
    c1: ExposureValue,
    c2: ExposureValue,
    focal: FocalSet,
    rng: np.random.Generator,
    kind: str = "count",
    subgroup: int | None = None,
    coarsen_map: Mapping | None = None,
    attempt_cap: int = DEFAULT_ATTEMPT_CAP,
    batch: int = 4096,
) -> tuple[ExposureVector, int]:
    """One exact draw from the conditional exposure distribution, by rejection.

    Unconditional draws are taken from the design and discarded until one
    realizes the conditioning focal set.  Returns the accepted exposure
    vector and the number of attempts consumed (acceptance included), which
    is the quantity that blows up as the number of groups grows.
    """
    target = np.asarray(focal.member_flags)
    attr = np.asarray(attributes.values)
    fast_path = kind == "count" and coarsen_map is None and subgroup is None
    attempts = 0
    while attempts < attempt_cap:
        size = min(batch, attempt_cap - attempts)
        if isinstance(design, SRDesign):
            labels_matrix = sample_sr_matrix(design, rng, size)
        elif isinstance(design, CRDesign):
            labels_matrix = sample_cr_matrix(design, rng, size)
        else:
            raise InputError(f"unknown design type {type(design).__name__}")
        if fast_path:
            w_matrix = _count_exposure_rows(labels_matrix, attr, design.n_groups)
            flags = (w_matrix == c1) | (w_matrix == c2)
            hits = np.flatnonzero((flags == target[None, :]).all(axis=1))
            if hits.size:
                attempts += int(hits[0]) + 1
                row = w_matrix[hits[0]]
                return ExposureVector(tuple(int(v) for v in row), "count"), attempts
            attempts += size
        else:
            for row in labels_matrix:
                attempts += 1
                labels = GroupLabelAssignment(tuple(int(k) for k in row), design.n_groups)
                exposures = _exposures_for(labels, attributes, kind, coarsen_map)
                flags = _focal_flags(exposures.values, attributes, c1, c2, subgroup)
                if flags == focal.member_flags:
                    return exposures, attempts
    raise GuardError(f"no acceptance within {attempt_cap} attempts")


def _direction_ge(t: float, t_obs: float, direction: str) -> bool:
    if direction == "two_sided":
        return abs(t) >= abs(t_obs)
    return t >= t_obs


def exact_pvalue(
    data: ExperimentData,
    design: SRDesign | CRDesign,
    null: NullSpec,
    stat: TestStatisticSpec,
    guard: int = DEFAULT_GUARD,
) -> Fraction:
    """Exact randomization p-value by complete enumeration.

    For the sharp null the statistic is summed over the unconditional
    exposure distribution; for a pairwise null, over the distribution
    conditioned on the observed focal set, with constant-shift outcomes
    imputed when the null carries a shift.  Completely randomized designs
    are conditioned on the observed per-(attribute, group) counts first.
    """
    if isinstance(design, CRDesign):
        if cr_sizes_mismatch(design, data.labels):
            raise InputError("observed group sizes violate the declared design")
        design = sr_from_observed(data.labels, data.attributes)
    w_obs = data.observed_exposures()

    if null.kind == "sharp":
        if null.c1 is None or null.c2 is None:
            raise InputError("the sharp-null statistic needs an exposure pair")
        everyone = FocalSet((True,) * data.n_units, (null.c1, null.c2))
        statistic = prepare_scalar_statistic(stat, data, everyone, null.c1, null.c2)
        t_obs = statistic(w_obs.values, data.outcomes.values)
        dist = exact_exposure_distribution(
            design, data.attributes, data.exposure_kind, data.coarsen_map, guard
        )
        total = Fraction(0)
        for w, p in dist.atoms:
            if _direction_ge(statistic(w, data.outcomes.values), t_obs, stat.direction):
                total += p
        return total

    focal = focal_set(w_obs, null.c1, null.c2)
    if null.subgroup is not None:
        focal = subgroup_restrict(focal, data.attributes, null.subgroup)
    statistic = prepare_scalar_statistic(stat, data, focal, null.c1, null.c2)
    # shift nulls are tested on adjusted outcomes with the hypothesized
    # effect removed; the adjusted vector is shared by the observed and
    # every counterfactual exposure, keeping two-sided comparisons centered
    shift = float(null.shift)
    y_adj = [
        yv - shift if focal.member_flags[i] and w_obs.values[i] == null.c1 else yv
        for i, yv in enumerate(data.outcomes.values)
    ]
    t_obs = statistic(w_obs.values, y_adj)
    dist = exact_conditional_distribution(
        design,
        data.attributes,
        null.c1,
        null.c2,
        focal,
        data.exposure_kind,
        null.subgroup,
        data.coarsen_map,
        guard,
    )
    total = Fraction(0)
    for w, p in dist.atoms:
        if _direction_ge(statistic(w, y_adj), t_obs, stat.direction):
            total += p
    return total


def cr_sizes_mismatch(design: CRDesign, labels: GroupLabelAssignment) -> bool:
    return labels.group_sizes() != design.group_sizes

"""Data model for randomized group formation experiments.

Units are indexed ``0..N-1``.  Each unit carries a discrete attribute code;
a group-label assignment places every unit in one of ``K`` labeled groups;
the induced treatment of a unit is the set of its groupmates.  A unit's
*exposure* summarizes the attributes of those groupmates, either as the
multiset of their attribute codes, as the count of code-1 groupmates (for a
binary attribute), or as a user-declared coarsening of the multiset.

Everything here is a pure function on immutable values, so all operations
are safe to call concurrently.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass

from .errors import InputError

# Exposure values are ints (count kind), sorted tuples of attribute codes
# (multiset kind), or arbitrary hashable labels (coarsened kind).
ExposureValue = Hashable

KIND_MULTISET = "multiset"
KIND_COUNT = "count"
KIND_COARSENED = "coarsened"


@dataclass(frozen=True)
class AttributeVector:
    """Per-unit attribute codes drawn from an explicitly declared alphabet.

    The alphabet is declared rather than inferred so that levels with zero
    observed units remain representable.
    """

    values: tuple[int, ...]
    levels: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise InputError("need at least two units")
        if len(set(self.levels)) != len(self.levels):
            raise InputError("attribute alphabet contains duplicates")
        alphabet = set(self.levels)
        for i, a in enumerate(self.values):
            if a not in alphabet:
                raise InputError(f"attribute code {a!r} of unit {i} not in declared alphabet")

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "AttributeVector":
        vals = tuple(int(v) for v in values)
        return cls(vals, tuple(sorted(set(vals))))

    @property
    def n_units(self) -> int:
        return len(self.values)

    @property
    def is_binary(self) -> bool:
        return set(self.levels) <= {0, 1}

    def count(self, level: int) -> int:
        return sum(1 for a in self.values if a == level)


@dataclass(frozen=True)
class GroupLabelAssignment:
    """Group labels in ``1..n_groups``, one per unit.

    Groups of size zero are legal; ``n_groups`` is part of the value so that
    empty groups survive round trips through samplers and designs.
    """

    labels: tuple[int, ...]
    n_groups: int

    def __post_init__(self):
        if self.n_groups < 1:
            raise InputError("need at least one group")
        for i, k in enumerate(self.labels):
            if not 1 <= k <= self.n_groups:
                raise InputError(f"group label {k} of unit {i} outside 1..{self.n_groups}")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "GroupLabelAssignment":
        vals = tuple(int(v) for v in labels)
        return cls(vals, max(vals))

    @property
    def n_units(self) -> int:
        return len(self.labels)

    def group_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.n_groups
        for k in self.labels:
            sizes[k - 1] += 1
        return tuple(sizes)


@dataclass(frozen=True)
class GroupAssignment:
    """Neighbor sets: entry ``i`` holds the units sharing unit ``i``'s group.

    The co-membership relation must be an equivalence partition: irreflexive
    neighbor sets, symmetric, and consistent (all members of a group see the
    same group).
    """

    neighbor_sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        n = len(self.neighbor_sets)
        for i, z in enumerate(self.neighbor_sets):
            if i in z:
                raise InputError(f"unit {i} is its own neighbor")
            for j in z:
                if not 0 <= j < n:
                    raise InputError(f"neighbor {j} of unit {i} out of range")
                if z | {i} != self.neighbor_sets[j] | {j}:
                    raise InputError(f"units {i} and {j} disagree about their group")

    @property
    def n_units(self) -> int:
        return len(self.neighbor_sets)


@dataclass(frozen=True)
class ExposureVector:
    """Per-unit exposures of one kind: multiset, count, or coarsened label."""

    values: tuple[ExposureValue, ...]
    kind: str

    def __post_init__(self):
        if self.kind not in (KIND_MULTISET, KIND_COUNT, KIND_COARSENED):
            raise InputError(f"unknown exposure kind {self.kind!r}")
        if self.kind == KIND_COUNT and not all(isinstance(w, int) for w in self.values):
            raise InputError("count exposures must be integers")
        if self.kind == KIND_MULTISET:
            for i, w in enumerate(self.values):
                if not isinstance(w, tuple) or tuple(sorted(w)) != w:
                    raise InputError(f"multiset exposure of unit {i} is not a sorted tuple")

    @property
    def n_units(self) -> int:
        return len(self.values)

    def distinct_values(self) -> list[ExposureValue]:
        """Observed exposure alphabet, ordered by first appearance."""
        seen: list[ExposureValue] = []
        for w in self.values:
            if w not in seen:
                seen.append(w)
        return seen


@dataclass(frozen=True)
class FocalSet:
    """Units whose observed exposure lies in a two-element exposure pair."""

    member_flags: tuple[bool, ...]
    exposure_pair: tuple[ExposureValue, ExposureValue]

    @property
    def n_units(self) -> int:
        return len(self.member_flags)

    @property
    def size(self) -> int:
        return sum(self.member_flags)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.member_flags) if f)


@dataclass(frozen=True)
class OutcomeVector:
    """Observed real outcomes, one per unit.  Missing values are rejected."""

    values: tuple[float, ...]

    def __post_init__(self):
        for i, y in enumerate(self.values):
            if not math.isfinite(y):
                raise InputError(f"outcome of unit {i} is not a finite number")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "OutcomeVector":
        return cls(tuple(float(v) for v in values))

    @property
    def n_units(self) -> int:
        return len(self.values)


def exposure_label(value: ExposureValue) -> str:
    """Stable printable form of an exposure value, used in reports and maps.

    Multisets render as comma-joined sorted codes, so ``(0, 0, 1)`` becomes
    ``"0,0,1"``; counts and coarsened labels render as themselves.
    """
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def parse_exposure_value(text: str, kind: str) -> ExposureValue:
    """Inverse of :func:`exposure_label` for the given exposure kind."""
    if kind == KIND_COUNT:
        try:
            return int(text)
        except ValueError as exc:
            raise InputError(f"count exposure {text!r} is not an integer") from exc
    if kind == KIND_MULTISET:
        if text == "":
            return ()
        try:
            return tuple(sorted(int(part) for part in text.split(",")))
        except ValueError as exc:
            raise InputError(f"multiset exposure {text!r} is not a comma-joined code list") from exc
    return text


def labels_to_assignment(assignment: GroupLabelAssignment) -> GroupAssignment:
    """Turn group labels into neighbor sets.

    Unit ``i``'s neighbor set is every other unit with the same label, so
    singleton groups yield empty sets.
    """
    members: dict[int, list[int]] = {}
    for i, k in enumerate(assignment.labels):
        members.setdefault(k, []).append(i)
    sets = tuple(
        frozenset(members[k]) - {i} for i, k in enumerate(assignment.labels)
    )
    return GroupAssignment(sets)


def exposure_of(
    groups: GroupAssignment, attributes: AttributeVector, kind: str = KIND_MULTISET
) -> ExposureVector:
    """Compute per-unit exposures from neighbor sets and attributes.

    ``multiset`` yields the sorted tuple of neighbor attribute codes;
    ``count`` yields the number of code-1 neighbors and requires a binary
    attribute.
    """
    if groups.n_units != attributes.n_units:
        raise InputError("assignment and attribute lengths differ")
    if kind == KIND_MULTISET:
        values: tuple[ExposureValue, ...] = tuple(
            tuple(sorted(attributes.values[j] for j in z)) for z in groups.neighbor_sets
        )
    elif kind == KIND_COUNT:
        if not attributes.is_binary:
            raise InputError("count exposure requires binary attribute")
        values = tuple(
            sum(attributes.values[j] for j in z) for z in groups.neighbor_sets
        )
    else:
        raise InputError(f"cannot compute exposures of kind {kind!r} directly")
    return ExposureVector(values, kind)


def coarsen_exposure(
    exposures: ExposureVector, mapping: Mapping[ExposureValue, ExposureValue]
) -> ExposureVector:
    """Relabel each exposure through ``mapping``; the result is coarsened.

    The mapping must cover every observed exposure value.
    """
    out = []
    for i, w in enumerate(exposures.values):
        if w not in mapping:
            raise InputError(f"coarsening map undefined for exposure {w!r} (unit {i})")
        out.append(mapping[w])
    return ExposureVector(tuple(out), KIND_COARSENED)


def focal_set(
    exposures: ExposureVector, c1: ExposureValue, c2: ExposureValue
) -> FocalSet:
    """Units whose exposure is ``c1`` or ``c2``; errors when there are none."""
    if c1 == c2:
        raise InputError("focal exposures must differ")
    flags = tuple(w in (c1, c2) for w in exposures.values)
    if not any(flags):
        raise InputError("no focal units")
    return FocalSet(flags, (c1, c2))


def subgroup_restrict(
    focal: FocalSet, attributes: AttributeVector, level: int
) -> FocalSet:
    """Intersect a focal set with the units having a given attribute level."""
    if focal.n_units != attributes.n_units:
        raise InputError("focal set and attribute lengths differ")
    if level not in attributes.levels:
        raise InputError(f"attribute level {level!r} not in declared alphabet")
    flags = tuple(
        f and a == level for f, a in zip(focal.member_flags, attributes.values)
    )
    if not any(flags):
        raise InputError(f"no focal units with attribute {level!r}")
    return FocalSet(flags, focal.exposure_pair)

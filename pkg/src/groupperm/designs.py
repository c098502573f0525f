"""Stratified and completely randomized group formation designs.

A design fixes counting constraints on group labels and samples uniformly
from the label vectors satisfying them.  The stratified design fixes, for
every attribute level and group, how many units of that level the group
receives; the completely randomized design fixes only the group sizes.

Samplers permute a fixed label template, so a draw costs one shuffle per
stratum.  The template lists group 1 ``n[0]`` times, then group 2, and so
on; the choice is immaterial by symmetry and fixed for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import AttributeVector, GroupLabelAssignment


@dataclass(frozen=True)
class SRDesign:
    """Stratified randomized design: fixed per-(attribute, group) counts.

    ``counts`` maps each attribute level to its per-group allocation; row
    sums must match the stratum sizes of ``attribute``.  Zero columns are
    legal, so groups that happen to receive nothing still count toward K.
    """

    attribute: AttributeVector
    counts: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        by_level = dict(self.counts)
        if set(by_level) != set(self.attribute.levels):
            raise InputError("design must give counts for every declared attribute level")
        widths = {len(row) for row in by_level.values()}
        if len(widths) != 1:
            raise InputError("count rows must share the number of groups")
        for level, row in by_level.items():
            if any(c < 0 for c in row):
                raise InputError("counts must be nonnegative")
            if sum(row) != self.attribute.count(level):
                raise InputError(
                    f"counts for attribute {level!r} sum to {sum(row)}, "
                    f"but {self.attribute.count(level)} units have that attribute"
                )

    @classmethod
    def from_rows(
        cls, attribute: AttributeVector, rows: dict[int, tuple[int, ...]]
    ) -> "SRDesign":
        return cls(attribute, tuple(sorted((int(a), tuple(r)) for a, r in rows.items())))

    @property
    def n_groups(self) -> int:
        return len(self.counts[0][1])

    @property
    def n_units(self) -> int:
        return self.attribute.n_units

    def row(self, level: int) -> tuple[int, ...]:
        return dict(self.counts)[level]

    def stratum_indices(self, level: int) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.attribute.values) if a == level)


@dataclass(frozen=True)
class CRDesign:
    """Completely randomized design: fixed group sizes only."""

    group_sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.group_sizes:
            raise InputError("need at least one group")
        if any(s < 0 for s in self.group_sizes):
            raise InputError("group sizes must be nonnegative")
        if sum(self.group_sizes) < 2:
            raise InputError("need at least two units")

    @property
    def n_groups(self) -> int:
        return len(self.group_sizes)

    @property
    def n_units(self) -> int:
        return sum(self.group_sizes)


def sr_from_observed(labels: GroupLabelAssignment, attribute: AttributeVector) -> SRDesign:
    """Tally an observed assignment into the stratified design it realizes.

    This is how a completely randomized experiment gets analyzed: condition
    on the observed per-(attribute, group) counts and proceed as if the
    design had fixed them.
    """
    if labels.n_units != attribute.n_units:
        raise InputError("labels and attributes have different lengths")
    rows = {
        level: [0] * labels.n_groups for level in attribute.levels
    }
    for a, k in zip(attribute.values, labels.labels):
        rows[a][k - 1] += 1
    return SRDesign.from_rows(attribute, {a: tuple(r) for a, r in rows.items()})


def cr_from_observed(labels: GroupLabelAssignment) -> CRDesign:
    """Read off the group sizes of an observed assignment."""
    return CRDesign(labels.group_sizes())


def _template(row: tuple[int, ...]) -> np.ndarray:
    return np.repeat(np.arange(1, len(row) + 1), row)


def sample_sr_matrix(design: SRDesign, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` label vectors from the stratified design as an array.

    Each stratum's template is permuted independently per draw; rows are
    uniform over the design's support.
    """
    out = np.empty((size, design.n_units), dtype=np.int64)
    for level, row in design.counts:
        idx = np.asarray(design.stratum_indices(level))
        if len(idx) == 0:
            continue
        template = _template(row)
        # argsort of iid uniforms = uniform permutation, vectorized over rows
        order = np.argsort(rng.random((size, len(idx))), axis=1)
        out[:, idx] = template[order]
    return out


def sample_cr_matrix(design: CRDesign, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` label vectors from the completely randomized design."""
    template = _template(design.group_sizes)
    order = np.argsort(rng.random((size, design.n_units)), axis=1)
    return template[order].astype(np.int64)


def sample_sr(design: SRDesign, rng: np.random.Generator) -> GroupLabelAssignment:
    """One uniform draw from the stratified design's support."""
    row = sample_sr_matrix(design, rng, 1)[0]
    return GroupLabelAssignment(tuple(int(k) for k in row), design.n_groups)


def sample_cr(design: CRDesign, rng: np.random.Generator) -> GroupLabelAssignment:
    """One uniform draw from the completely randomized design's support."""
    row = sample_cr_matrix(design, rng, 1)[0]
    return GroupLabelAssignment(tuple(int(k) for k in row), design.n_groups)


def sample(design: SRDesign | CRDesign, rng: np.random.Generator) -> GroupLabelAssignment:
    """Dispatch to the sampler matching the design type."""
    if isinstance(design, SRDesign):
        return sample_sr(design, rng)
    if isinstance(design, CRDesign):
        return sample_cr(design, rng)
    raise InputError(f"unknown design type {type(design).__name__}")


def _multinomial(n: int, parts) -> int:
    count = math.factorial(n)
    for p in parts:
        count //= math.factorial(p)
    return count


def support_size(design: SRDesign | CRDesign) -> int:
    """Exact number of label vectors satisfying the design's constraints.

    Computed with integer arithmetic; realistic designs overflow floats
    (156 units in 39 groups is around 10^180 vectors).
    """
    if isinstance(design, SRDesign):
        total = 1
        for level, row in design.counts:
            total *= _multinomial(sum(row), row)
        return total
    if isinstance(design, CRDesign):
        return _multinomial(design.n_units, design.group_sizes)
    raise InputError(f"unknown design type {type(design).__name__}")

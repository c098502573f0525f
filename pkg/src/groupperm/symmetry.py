"""Permutations of unit indices and stabilizer subgroups of vectors.

The stabilizer of a length-N vector under coordinate permutation factors
into independent symmetric groups, one per stratum of equal-valued
positions.  That factorization is all the group theory this package needs:
uniform sampling from a stabilizer is a per-stratum shuffle, and orbits are
products of per-stratum arrangements.  Enumeration-backed helpers for orbit
and stabilizer counting live here too; they are deliberately brute force
and guarded, since their job is to check the fast path.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Hashable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import GuardError, InputError


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``0..N-1`` stored as a forward map ``i -> forward[i]``."""

    forward: tuple[int, ...]

    def __post_init__(self):
        n = len(self.forward)
        if sorted(self.forward) != list(range(n)):
            raise InputError("forward map is not a bijection on 0..N-1")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.forward)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.forward):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Return self applied after other: ``(self * other)(i) = self(other(i))``."""
        if self.n != other.n:
            raise InputError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.forward[j] for j in other.forward))


def apply_permutation(perm: Permutation, x: Sequence) -> tuple:
    """Permute vector entries: position ``perm(i)`` receives ``x[i]``.

    Equivalently the result at ``i`` is ``x[perm^{-1}(i)]``, so permutations
    in the stabilizer of ``x`` leave it unchanged.
    """
    if perm.n != len(x):
        raise InputError("permutation and vector lengths differ")
    out = [None] * perm.n
    for i, j in enumerate(perm.forward):
        out[j] = x[i]
    return tuple(out)


@dataclass(frozen=True)
class StabilizerStrata:
    """Partition of ``0..N-1`` by equal values of a stabilized vector.

    The within-strata permutations are exactly the stabilizer subgroup of
    that vector in the full symmetric group.
    """

    strata: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        count = 0
        for s in self.strata:
            seen.update(s)
            count += len(s)
        if count != len(seen) or seen != set(range(count)):
            raise InputError("strata must be disjoint and cover 0..N-1")

    @property
    def n_units(self) -> int:
        return sum(len(s) for s in self.strata)

    def group_order(self) -> int:
        """Number of within-strata permutations (product of factorials)."""
        order = 1
        for s in self.strata:
            order *= math.factorial(len(s))
        return order


def stabilizer_strata(values: Sequence[Hashable]) -> StabilizerStrata:
    """Strata of positions sharing a value, ordered by first appearance."""
    groups: dict[Hashable, list[int]] = {}
    for i, v in enumerate(values):
        groups.setdefault(v, []).append(i)
    return StabilizerStrata(tuple(tuple(g) for g in groups.values()))


def joint_strata(values_a: Sequence[Hashable], values_b: Sequence[Hashable]) -> StabilizerStrata:
    """Strata of the paired vector ``(a_i, b_i)``.

    Permutations within these strata fix both vectors at once; with an
    attribute vector and focal-membership flags this is the subgroup that a
    conditional test permutes within.
    """
    if len(values_a) != len(values_b):
        raise InputError("vectors have different lengths")
    return stabilizer_strata(list(zip(values_a, values_b)))


def focal_joint_strata(attributes, focal) -> StabilizerStrata:
    """Joint strata of an attribute vector and a focal set's member flags."""
    return joint_strata(attributes.values, focal.member_flags)


def sample_stabilizer_permutation(
    strata: StabilizerStrata, rng: np.random.Generator
) -> Permutation:
    """Uniform draw from the within-strata permutation group.

    Independent uniform shuffles per stratum compose to a uniform draw from
    the product group.
    """
    forward = np.arange(strata.n_units)
    for s in strata.strata:
        idx = np.asarray(s)
        forward[idx] = idx[rng.permutation(len(idx))]
    return Permutation(tuple(int(j) for j in forward))


def enumerate_stabilizer(strata: StabilizerStrata, guard: int = 10**6):
    """Yield every within-strata permutation; errors if there are > guard."""
    order = strata.group_order()
    if order > guard:
        raise GuardError(f"stabilizer has {order} elements, guard is {guard}")
    per_stratum = [list(itertools.permutations(s)) for s in strata.strata]
    for combo in itertools.product(*per_stratum):
        forward = [0] * strata.n_units
        for s, perm in zip(strata.strata, combo):
            for src, dst in zip(s, perm):
                forward[src] = dst
        yield Permutation(tuple(forward))


def orbit_of(strata: StabilizerStrata, x: Sequence[Hashable], guard: int = 10**6) -> set[tuple]:
    """All distinct images of ``x`` under within-strata permutations.

    Built directly as the product of per-stratum arrangements of the value
    multisets, which is far smaller than the group itself.
    """
    if strata.n_units != len(x):
        raise InputError("strata and vector lengths differ")
    size = 1
    for s in strata.strata:
        size *= _arrangement_count([x[i] for i in s])
    if size > guard:
        raise GuardError(f"orbit has {size} elements, guard is {guard}")
    per_stratum = [
        sorted(set(itertools.permutations([x[i] for i in s]))) for s in strata.strata
    ]
    orbit: set[tuple] = set()
    for combo in itertools.product(*per_stratum):
        vec = list(x)
        for s, arrangement in zip(strata.strata, combo):
            for pos, val in zip(s, arrangement):
                vec[pos] = val
        orbit.add(tuple(vec))
    return orbit


def _arrangement_count(values: list) -> int:
    """Distinct orderings of a multiset: ``len! / prod(multiplicity!)``."""
    count = math.factorial(len(values))
    for v in set(values):
        count //= math.factorial(sum(1 for u in values if u == v))
    return count


def orbit_stabilizer_counts(
    strata: StabilizerStrata, x: Sequence[Hashable], guard: int = 10**6
) -> tuple[int, int]:
    """Exhaustively counted (orbit size, stabilizer size) of ``x``.

    Enumerates the whole within-strata group, so the returned sizes are an
    independent check of the orbit-stabilizer identity
    ``|group| = orbit * stabilizer``.
    """
    orbit: set[tuple] = set()
    stab = 0
    x = tuple(x)
    for perm in enumerate_stabilizer(strata, guard=guard):
        image = apply_permutation(perm, x)
        orbit.add(image)
        if image == x:
            stab += 1
    return len(orbit), stab


def verify_equivariance(design, attributes, kind: str, trials: int, rng: np.random.Generator) -> bool:
    """Check that exposure computation commutes with attribute-preserving permutations.

    Samples label vectors from the design and permutations from the
    stabilizer of the attribute vector, and verifies that permuting labels
    first and computing exposures equals computing exposures first and
    permuting them.
    """
    from . import designs as designs_mod
    from .model import GroupLabelAssignment, exposure_of, labels_to_assignment

    strata = stabilizer_strata(attributes.values)

    def exposures_from(labels: GroupLabelAssignment):
        return exposure_of(labels_to_assignment(labels), attributes, kind)

    for _ in range(trials):
        labels = designs_mod.sample(design, rng)
        perm = sample_stabilizer_permutation(strata, rng)
        permuted_labels = GroupLabelAssignment(
            apply_permutation(perm, labels.labels), labels.n_groups
        )
        lhs = exposures_from(permuted_labels).values
        rhs = apply_permutation(perm, exposures_from(labels).values)
        if lhs != rhs:
            return False
    return True

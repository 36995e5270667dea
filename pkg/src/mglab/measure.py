"""Finite sample spaces, sigma-algebras as partitions, and exact measures.

On a finite outcome set every sigma-algebra is generated by a unique
partition into atoms, and every member set is a union of atoms.  This module
works with that partition representation throughout: generating a
sigma-algebra means computing the atom partition, membership means "is a
union of atoms", and enumeration walks the 2**k unions when that is small
enough to be sane.

Probabilities are ``fractions.Fraction`` end to end, so additivity checks
are exact equalities rather than tolerance games.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .numeric import as_exact

# Enumeration guard: 2**20 subsets is the most enumerate_sets will
# materialize unless the caller raises the limit explicitly.
DEFAULT_ENUMERATION_LIMIT = 2 ** 20


class SizeLimitError(ValueError):
    """Raised when an exact enumeration would exceed the configured limit.

    The message always names the limit and points at the Monte Carlo engine,
    which is the supported fallback for instances too large to enumerate.
    """


@dataclass(frozen=True)
class SampleSpace:
    """A finite set of outcomes, identified by index.

    Parameters
    ----------
    outcome_labels:
        Distinct, human-readable names.  Position in this tuple is the
        outcome's index, and every other object in the package refers to
        outcomes by that index.
    """

    outcome_labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.outcome_labels)
        object.__setattr__(self, "outcome_labels", labels)
        if len(labels) == 0:
            raise ValueError("a sample space needs at least one outcome")
        if any(not isinstance(lab, str) for lab in labels):
            raise TypeError("outcome labels must be strings")
        if len(set(labels)) != len(labels):
            raise ValueError("outcome labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.outcome_labels)

    def universe(self) -> "EventSet":
        return EventSet(tuple(range(self.size)))

    def label_of(self, index: int) -> str:
        return self.outcome_labels[index]


@dataclass(frozen=True)
class EventSet:
    """A subset of outcomes, stored as sorted distinct indices."""

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(self.members))
        if any(not isinstance(m, int) or isinstance(m, bool) or m < 0 for m in members):
            raise ValueError("event members must be non-negative outcome indices")
        for prev, cur in zip(members, members[1:]):
            if prev == cur:
                raise ValueError(f"duplicate outcome index {cur} in event")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, index: int) -> bool:
        return index in self.member_set

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def union(self, other: "EventSet") -> "EventSet":
        return EventSet(tuple(self.member_set | other.member_set))

    def intersection(self, other: "EventSet") -> "EventSet":
        return EventSet(tuple(self.member_set & other.member_set))

    def complement(self, space: SampleSpace) -> "EventSet":
        if self.members and self.members[-1] >= space.size:
            raise ValueError("event refers to outcomes outside the space")
        return EventSet(tuple(i for i in range(space.size) if i not in self.member_set))

    def is_subset_of(self, other: "EventSet") -> bool:
        return self.member_set <= other.member_set

    def validate_against(self, space: SampleSpace) -> None:
        if self.members and self.members[-1] >= space.size:
            raise ValueError(
                f"outcome index {self.members[-1]} out of range for a space of size {space.size}"
            )


EMPTY_EVENT = EventSet(())


@dataclass(frozen=True)
class SigmaAlgebra:
    """A sigma-algebra on a finite space, held as its atom partition.

    Parameters
    ----------
    space:
        The underlying sample space.
    atoms:
        Non-empty, pairwise disjoint events covering the space.  They are
        stored sorted by smallest member, so two descriptions of the same
        sigma-algebra compare equal.

    The member sets of the sigma-algebra are exactly the 2**k unions of
    atoms; use :func:`enumerate_sets` to list them and :func:`contains` to
    test one without listing them all.
    """

    space: SampleSpace
    atoms: tuple[EventSet, ...]

    def __post_init__(self):
        atoms = tuple(sorted(self.atoms, key=lambda a: a.members[0] if a.members else -1))
        object.__setattr__(self, "atoms", atoms)
        seen = [False] * self.space.size
        for atom in atoms:
            if len(atom) == 0:
                raise ValueError("atoms must be non-empty")
            for i in atom.members:
                if i >= self.space.size:
                    raise ValueError(f"atom refers to outcome {i} outside the space")
                if seen[i]:
                    raise ValueError(f"outcome {i} appears in two atoms; atoms must be disjoint")
                seen[i] = True
        if not all(seen):
            missing = seen.index(False)
            raise ValueError(f"atoms do not cover the space: outcome {missing} is unassigned")

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @cached_property
    def atom_index_of(self) -> tuple[int, ...]:
        """For each outcome index, the position of the atom containing it."""
        table = [0] * self.space.size
        for pos, atom in enumerate(self.atoms):
            for i in atom.members:
                table[i] = pos
        return tuple(table)

    def atom_containing(self, outcome: int) -> EventSet:
        if not 0 <= outcome < self.space.size:
            raise ValueError(f"outcome index {outcome} out of range")
        return self.atoms[self.atom_index_of[outcome]]

    def refines(self, coarser: "SigmaAlgebra") -> bool:
        """True when every atom of ``coarser`` is a union of atoms of ``self``.

        Equivalently, ``coarser`` is a sub-sigma-algebra of ``self``.
        """
        if self.space != coarser.space:
            return False
        coarse_of = coarser.atom_index_of
        for atom in self.atoms:
            first = coarse_of[atom.members[0]]
            if any(coarse_of[i] != first for i in atom.members[1:]):
                return False
        return True


def trivial_sigma_algebra(space: SampleSpace) -> SigmaAlgebra:
    return SigmaAlgebra(space, (space.universe(),))


def discrete_sigma_algebra(space: SampleSpace) -> SigmaAlgebra:
    return SigmaAlgebra(space, tuple(EventSet((i,)) for i in range(space.size)))


def generate_sigma_algebra(space: SampleSpace, generators: Sequence[EventSet]) -> SigmaAlgebra:
    """Smallest sigma-algebra on ``space`` containing every generator.

    Two outcomes land in the same atom exactly when no generator separates
    them, so the atoms are the fibers of the membership signature
    ``outcome -> (outcome in G_1, ..., outcome in G_m)``.  That is a single
    pass over outcomes, linear in ``size * len(generators)``, with no
    closure iteration.  With no generators at all the result is the trivial
    sigma-algebra ``{empty, everything}``.
    """
    for g in generators:
        g.validate_against(space)
    signature_groups: dict[tuple[bool, ...], list[int]] = {}
    member_sets = [g.member_set for g in generators]
    for i in range(space.size):
        sig = tuple(i in ms for ms in member_sets)
        signature_groups.setdefault(sig, []).append(i)
    atoms = tuple(EventSet(tuple(group)) for group in signature_groups.values())
    return SigmaAlgebra(space, atoms)


def enumerate_sets(
    sigma: SigmaAlgebra, limit: int | None = DEFAULT_ENUMERATION_LIMIT
) -> list[EventSet]:
    """All member sets of ``sigma``, i.e. all unions of its atoms.

    Sets come out in mask order over the sorted atoms, starting with the
    empty set and ending with the whole space; the count is exactly
    ``2 ** sigma.atom_count``.  If that exceeds ``limit`` a
    :class:`SizeLimitError` is raised instead of thrashing memory; pass
    ``limit=None`` to insist.
    """
    k = sigma.atom_count
    if limit is not None and 2 ** k > limit:
        raise SizeLimitError(
            f"sigma-algebra has 2**{k} = {2 ** k} member sets, over the enumeration "
            f"limit of {limit}; raise the limit or use the Monte Carlo engine for "
            "estimates on spaces this large"
        )
    members: list[EventSet] = []
    atom_members = [a.members for a in sigma.atoms]
    for mask in range(2 ** k):
        chosen: list[int] = []
        for bit in range(k):
            if mask >> bit & 1:
                chosen.extend(atom_members[bit])
        members.append(EventSet(tuple(chosen)))
    return members


def contains(sigma: SigmaAlgebra, event: EventSet) -> bool:
    """Membership test: does ``event`` belong to ``sigma``?

    True exactly when the event splits no atom, checked atom by atom in
    linear time.  The event must live on the same space.
    """
    event.validate_against(sigma.space)
    ms = event.member_set
    for atom in sigma.atoms:
        inside = sum(1 for i in atom.members if i in ms)
        if inside != 0 and inside != len(atom):
            return False
    return True


def check_sigma_axioms(space: SampleSpace, sets: Iterable[EventSet]) -> tuple[bool, str | None]:
    """Verify the sigma-algebra axioms for an explicit collection of sets.

    Checks that the collection contains the empty set and the whole space
    and is closed under complement and pairwise union (countable union
    collapses to finite union here, and finite union to pairwise).  Returns
    ``(True, None)`` or ``(False, reason)`` naming the first offender.
    Duplicates in the input are harmless.
    """
    universe = frozenset(range(space.size))
    family: set[frozenset[int]] = set()
    for ev in sets:
        ev.validate_against(space)
        family.add(ev.member_set)
    if frozenset() not in family:
        return False, "the empty set is missing"
    if universe not in family:
        return False, "the whole space is missing"
    for s in family:
        if universe - s not in family:
            return False, f"complement of {sorted(s)} is missing"
    for s in family:
        for t in family:
            if s | t not in family:
                return False, f"union of {sorted(s)} and {sorted(t)} is missing"
    return True, None


@dataclass(frozen=True)
class ProbabilityMeasure:
    """Exact probability weights on the outcomes of a finite space.

    Parameters
    ----------
    space:
        The sample space being weighted.
    weights:
        One rational per outcome; entries may be ints, Fractions, or strings
        like ``"1/6"``, and are stored as Fractions.  They must be
        non-negative and sum to exactly 1.  Zero weights are allowed: null
        outcomes are a feature, not an error.
    """

    space: SampleSpace
    weights: tuple[Fraction, ...] = field()

    def __post_init__(self):
        weights = tuple(Fraction(as_exact(w)) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.space.size:
            raise ValueError(
                f"got {len(weights)} weights for a space of {self.space.size} outcomes"
            )
        for i, w in enumerate(weights):
            if w < 0:
                raise ValueError(f"weight of outcome {i} is negative: {w}")
        total = sum(weights)
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")

    def weight_of(self, outcome: int) -> Fraction:
        return self.weights[outcome]

    def __call__(self, event: EventSet) -> Fraction:
        return measure_of(self, event)


def uniform_measure(space: SampleSpace) -> ProbabilityMeasure:
    n = space.size
    return ProbabilityMeasure(space, tuple(Fraction(1, n) for _ in range(n)))


def measure_of(measure: ProbabilityMeasure, event: EventSet) -> Fraction:
    """P(event), as an exact Fraction."""
    event.validate_against(measure.space)
    w = measure.weights
    return sum((w[i] for i in event.members), start=Fraction(0))


def is_probability(space: SampleSpace, weights: Sequence) -> tuple[bool, str | None]:
    """Check whether a weight vector defines a probability measure on ``space``.

    The weight list must match the space's size (anything else is a usage
    error and raises).  Returns ``(False, reason)`` for a negative entry or
    a total different from 1, with the reason naming the offender exactly.
    """
    if len(weights) != space.size:
        raise ValueError(
            f"got {len(weights)} weights for a space of {space.size} outcomes"
        )
    exact = [Fraction(as_exact(w)) for w in weights]
    for i, w in enumerate(exact):
        if w < 0:
            return False, f"weight of outcome {i} ({space.label_of(i)}) is negative: {w}"
    total = sum(exact)
    if total != 1:
        return False, f"weights sum to {total}, not 1"
    return True, None

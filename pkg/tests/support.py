"""Shared fixtures: an independent closure oracle and seeded random builders.

The oracle computes generated sigma-algebras by brute-force closure under
complement and pairwise union, deliberately ignoring the package's
signature-partition algorithm so the two can disagree.  The random builders
construct measures, filtrations, martingales, predictable sequences, and
stopping times forward from their definitions, which makes every generated
instance satisfy its defining property by construction rather than by
filtering.
"""
from __future__ import annotations

import random
from fractions import Fraction

from mglab import (
    AdaptedProcess,
    EventSet,
    Filtration,
    PredictableSequence,
    ProbabilityMeasure,
    RandomVariable,
    SampleSpace,
    SigmaAlgebra,
    StoppingTime,
)


def closure_oracle(n_outcomes: int, generators) -> frozenset[frozenset[int]]:
    """All sets of the sigma-algebra generated by `generators`, by fixpoint.

    Runs in time exponential in the result size, which is fine for the
    test sizes (n_outcomes <= 8).
    """
    universe = frozenset(range(n_outcomes))
    sets = {frozenset(), universe}
    sets.update(frozenset(g) for g in generators)
    changed = True
    while changed:
        changed = False
        current = list(sets)
        for s in current:
            comp = universe - s
            if comp not in sets:
                sets.add(comp)
                changed = True
        current = list(sets)
        for i, s in enumerate(current):
            for t in current[i + 1:]:
                u = s | t
                if u not in sets:
                    sets.add(u)
                    changed = True
    return frozenset(sets)


def atoms_from_sets(n_outcomes: int, sets) -> frozenset[frozenset[int]]:
    """Minimal nonempty sets of a finite sigma-algebra, via membership signatures."""
    atoms: dict[tuple[bool, ...], set[int]] = {}
    ordered = sorted(sets, key=lambda s: (len(s), sorted(s)))
    for i in range(n_outcomes):
        sig = tuple(i in s for s in ordered)
        atoms.setdefault(sig, set()).add(i)
    return frozenset(frozenset(a) for a in atoms.values())


def rand_space(rng: random.Random, max_size: int = 8) -> SampleSpace:
    n = rng.randint(1, max_size)
    return SampleSpace([f"w{i}" for i in range(n)])


def rand_measure(
    rng: random.Random, space: SampleSpace, allow_zero: bool = True
) -> ProbabilityMeasure:
    n = space.size
    weights = [rng.randint(1, 9) for _ in range(n)]
    if allow_zero and n > 1 and rng.random() < 0.4:
        for i in rng.sample(range(n), rng.randint(1, n - 1)):
            weights[i] = 0
        if sum(weights) == 0:
            weights[rng.randrange(n)] = 1
    total = sum(weights)
    return ProbabilityMeasure(space, [Fraction(w, total) for w in weights])


def rand_partition(rng: random.Random, space: SampleSpace) -> SigmaAlgebra:
    n = space.size
    k = rng.randint(1, n)
    assignment = [rng.randrange(k) for i in range(n)]
    for j, i in enumerate(rng.sample(range(n), k)):
        assignment[i] = j
    blocks: dict[int, list[int]] = {}
    for i, g in enumerate(assignment):
        blocks.setdefault(g, []).append(i)
    return SigmaAlgebra(space, [EventSet(b) for b in blocks.values()])


def refine_partition(rng: random.Random, sigma: SigmaAlgebra) -> SigmaAlgebra:
    """Split a random selection of atoms, leaving the rest intact."""
    new_atoms: list[EventSet] = []
    for atom in sigma.atoms:
        members = list(atom.members)
        if len(members) > 1 and rng.random() < 0.6:
            cut = rng.randint(1, len(members) - 1)
            picked = set(rng.sample(members, cut))
            new_atoms.append(EventSet(sorted(picked)))
            new_atoms.append(EventSet(sorted(set(members) - picked)))
        else:
            new_atoms.append(atom)
    return SigmaAlgebra(sigma.space, new_atoms)


def rand_filtration(
    rng: random.Random, space: SampleSpace, horizon: int
) -> Filtration:
    stages = [SigmaAlgebra(space, [EventSet(range(space.size))])]
    for _ in range(horizon):
        stages.append(refine_partition(rng, stages[-1]))
    return Filtration(space, stages)


def rand_fraction(rng: random.Random, lo: int = -4, hi: int = 4) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice([1, 1, 2, 3, 4]))


def rand_sigma_variable(
    rng: random.Random, sigma: SigmaAlgebra
) -> RandomVariable:
    """A variable measurable for `sigma`: constant on each atom."""
    values: list[Fraction | int] = [0] * sigma.space.size
    for atom in sigma.atoms:
        v = rand_fraction(rng)
        for i in atom.members:
            values[i] = v
    return RandomVariable(sigma.space, values)


def rand_variable(rng: random.Random, space: SampleSpace) -> RandomVariable:
    return RandomVariable(space, [rand_fraction(rng) for _ in range(space.size)])


def _balanced_stage(
    rng: random.Random,
    prev: RandomVariable,
    coarse: SigmaAlgebra,
    fine: SigmaAlgebra,
    P: ProbabilityMeasure,
    drift_sign: int,
) -> tuple[RandomVariable, Fraction]:
    """Next stage values with E[next | coarse atom] = prev + drift on that atom.

    drift_sign 0 builds a martingale step, -1 a supermartingale step, +1 a
    submartingale step.  The drift magnitude is random and sometimes zero, so
    super/sub instances exercise the boundary case.  On each coarse atom all
    children but the heaviest get free values; the heaviest child's value is
    solved exactly so the conditional mean lands on the target.  Atoms of
    zero probability get free values everywhere.
    """
    space = P.space
    values: list[Fraction | int] = [0] * space.size
    total_drift = Fraction(0)
    for atom in coarse.atoms:
        children = [c for c in fine.atoms if c.member_set <= atom.member_set]
        child_mass = {
            c: sum((P.weights[i] for i in c.members), start=Fraction(0))
            for c in children
        }
        atom_mass = sum(child_mass.values(), start=Fraction(0))
        target = Fraction(prev.values[atom.members[0]])
        if drift_sign and rng.random() < 0.7:
            target += drift_sign * abs(rand_fraction(rng))
        if atom_mass == 0:
            for c in children:
                v = rand_fraction(rng)
                for i in c.members:
                    values[i] = v
            continue
        total_drift += (target - Fraction(prev.values[atom.members[0]])) * atom_mass
        heaviest = max(children, key=lambda c: (child_mass[c], c.members))
        acc = Fraction(0)
        for c in children:
            if c is heaviest:
                continue
            v = rand_fraction(rng)
            acc += child_mass[c] * v
            for i in c.members:
                values[i] = v
        solved = (target * atom_mass - acc) / child_mass[heaviest]
        for i in heaviest.members:
            values[i] = solved
    return RandomVariable(space, values), total_drift


def rand_martingale(
    rng: random.Random, filtration: Filtration, P: ProbabilityMeasure
) -> AdaptedProcess:
    x0 = rand_fraction(rng)
    values = [RandomVariable(filtration.space, [x0] * filtration.space.size)]
    for n in range(1, filtration.horizon + 1):
        rv, _ = _balanced_stage(
            rng, values[-1], filtration.stage(n - 1), filtration.stage(n), P, 0
        )
        values.append(rv)
    return AdaptedProcess(filtration, values)


def rand_supermartingale(
    rng: random.Random, filtration: Filtration, P: ProbabilityMeasure
) -> AdaptedProcess:
    x0 = rand_fraction(rng)
    values = [RandomVariable(filtration.space, [x0] * filtration.space.size)]
    for n in range(1, filtration.horizon + 1):
        rv, _ = _balanced_stage(
            rng, values[-1], filtration.stage(n - 1), filtration.stage(n), P, -1
        )
        values.append(rv)
    return AdaptedProcess(filtration, values)


def rand_predictable(
    rng: random.Random,
    filtration: Filtration,
    bound: int = 3,
    nonnegative: bool = False,
) -> PredictableSequence:
    lo = 0 if nonnegative else -bound
    seq = []
    for n in range(1, filtration.horizon + 1):
        sigma = filtration.stage(n - 1)
        values: list[Fraction | int] = [0] * filtration.space.size
        for atom in sigma.atoms:
            v = Fraction(rng.randint(lo, bound))
            for i in atom.members:
                values[i] = v
        seq.append(RandomVariable(filtration.space, values))
    return PredictableSequence(filtration, seq)


def rand_stopping_time(
    rng: random.Random, filtration: Filtration, bounded: bool = True
) -> StoppingTime:
    """Built forward: each stage-n atom not yet stopped may stop now."""
    n_out = filtration.space.size
    times: list[int | None] = [None] * n_out
    for n in range(filtration.horizon + 1):
        for atom in filtration.stage(n).atoms:
            if times[atom.members[0]] is not None:
                continue
            if rng.random() < 0.35:
                for i in atom.members:
                    times[i] = n
    if bounded:
        times = [filtration.horizon if t is None else t for t in times]
    return StoppingTime(filtration, times)

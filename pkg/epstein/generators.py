"""Seeded generators for formulas, substitutions, valuations and models.

Every function takes an explicit ``numpy.random.Generator`` so results are
reproducible from a seed; :func:`enumerate_formulas` is fully deterministic.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np

from .semantics import (
    CofiniteRelation,
    EmptyRelation,
    FiniteRelation,
    FullRelation,
    Model,
    OverrideRelation,
    Relation,
    TowerRelation,
    Valuation,
    pairs_of,
)
from .syntax import (
    Bin,
    Connective,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    sort_key,
    subformulas,
    vars_of,
)

__all__ = [
    "make_rng",
    "random_formula",
    "random_substitution",
    "random_valuation",
    "random_finite_relation",
    "random_relation",
    "random_model",
    "close_pairs",
    "enumerate_formulas",
]

DEFAULT_LETTERS = (1, 2, 3)
ALL_CONNECTIVES = tuple(Connective)


def make_rng(seed: Optional[int] = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_formula(
    rng: np.random.Generator,
    depth: int,
    letters: Sequence[int] = DEFAULT_LETTERS,
    connectives: Sequence[Connective] = ALL_CONNECTIVES,
    leaf_probability: float = 0.25,
) -> Formula:
    if depth <= 0 or rng.random() < leaf_probability:
        return Letter(int(letters[int(rng.integers(len(letters)))]))
    choice = int(rng.integers(len(connectives) + 1))
    if choice == len(connectives):
        return Neg(random_formula(rng, depth - 1, letters, connectives, leaf_probability))
    left = random_formula(rng, depth - 1, letters, connectives, leaf_probability)
    right = random_formula(rng, depth - 1, letters, connectives, leaf_probability)
    return Bin(connectives[choice], left, right)


def random_substitution(
    rng: np.random.Generator,
    domain: Sequence[int],
    depth: int,
    letters: Sequence[int] = DEFAULT_LETTERS,
) -> Dict[int, Formula]:
    return {index: random_formula(rng, depth, letters) for index in domain}


def random_valuation(rng: np.random.Generator, letters: Sequence[int] = DEFAULT_LETTERS) -> Valuation:
    default = bool(rng.integers(2))
    values = {int(index): bool(rng.integers(2)) for index in letters}
    return Valuation.of(default, values)


def random_finite_relation(
    rng: np.random.Generator,
    formulas: Sequence[Formula],
    density: float = 0.5,
) -> FiniteRelation:
    pool = _pair_pool(formulas)
    chosen = [pair for pair in pool if rng.random() < density]
    return FiniteRelation(frozenset(chosen))


def random_relation(
    rng: np.random.Generator,
    formulas: Sequence[Formula],
    density: float = 0.5,
) -> Relation:
    """A relation of a randomly chosen representation, biased to the pairs of ``formulas``."""

    pool = _pair_pool(formulas)
    kind = int(rng.integers(6))
    if kind == 0:
        return FullRelation()
    if kind == 1:
        return EmptyRelation()
    if kind == 2:
        return CofiniteRelation(frozenset(pair for pair in pool if rng.random() < density))
    if kind == 3:
        indices = frozenset(int(k) for k in rng.integers(1, 4, size=2))
        return TowerRelation(indices)
    base = random_finite_relation(rng, formulas, density)
    if kind == 4:
        return base
    add = frozenset(pair for pair in pool if rng.random() < density / 2)
    remove = frozenset(pair for pair in pool if pair not in add and rng.random() < density / 2)
    return OverrideRelation(base, add, remove)


def random_model(
    rng: np.random.Generator,
    formulas: Sequence[Formula] = (),
    density: float = 0.5,
    letters: Sequence[int] = DEFAULT_LETTERS,
    any_representation: bool = False,
) -> Model:
    mentioned = sorted(set(letters).union(*(vars_of(phi) for phi in formulas)) if formulas else set(letters))
    valuation = random_valuation(rng, mentioned)
    if any_representation:
        relation = random_relation(rng, formulas, density)
    else:
        relation = random_finite_relation(rng, formulas, density)
    return Model(valuation, relation)


def _pair_pool(formulas: Sequence[Formula]) -> List[FormulaPair]:
    nodes: Dict[Formula, None] = {}
    for phi in formulas:
        for node in subformulas(phi):
            nodes.setdefault(node, None)
    ordered = sorted(nodes, key=sort_key)
    return [FormulaPair(first, second) for first in ordered for second in ordered]


def close_pairs(pairs, condition: str) -> FiniteRelation:
    """Smallest finite superset closed under symmetry, the n-condition, or both."""

    closed = set(pairs_of(pairs))
    changed = True
    while changed:
        changed = False
        for first, second in list(closed):
            extra = []
            if condition in ("symmetry", "both"):
                extra.append(FormulaPair(second, first))
            if condition in ("n-condition", "both") and isinstance(first, Neg):
                extra.append(FormulaPair(first.operand, second))
            for pair in extra:
                if pair not in closed:
                    closed.add(pair)
                    changed = True
    return FiniteRelation(frozenset(closed))


def enumerate_formulas(
    letters: Sequence[int],
    max_size: Optional[int] = None,
    connectives: Sequence[Connective] = ALL_CONNECTIVES,
) -> Iterator[Formula]:
    """All formulas over ``letters`` ordered by size, then structure.

    Unbounded when ``max_size`` is ``None``; layers are built lazily.
    """

    layers: Dict[int, List[Formula]] = {1: [Letter(index) for index in sorted(set(letters))]}
    yield from layers[1]
    current = 2
    while max_size is None or current <= max_size:
        layer: List[Formula] = [Neg(phi) for phi in layers[current - 1]]
        for connective in connectives:
            for left_size in range(1, current - 1):
                right_size = current - 1 - left_size
                for left in layers[left_size]:
                    for right in layers[right_size]:
                        layer.append(Bin(connective, left, right))
        layer.sort(key=sort_key)
        layers[current] = layer
        yield from layer
        current += 1

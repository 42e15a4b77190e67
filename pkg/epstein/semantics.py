"""Valuations, relation representations, models and the truth-condition evaluator."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

from .config import get_settings
from .errors import CapacityError, PreconditionError
from .syntax import (
    Bin,
    Connective,
    Const,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    pair_sort_key,
    vars_of,
)

__all__ = [
    "Valuation",
    "FiniteRelation",
    "CofiniteRelation",
    "FullRelation",
    "EmptyRelation",
    "TowerRelation",
    "OverrideRelation",
    "Relation",
    "Model",
    "TOWER_VARIANTS",
    "pairs_of",
    "rel_contains",
    "finite_support",
    "normalize_relation",
    "mentioned_pairs",
    "sorted_pairs",
    "relation_core",
    "evaluate",
    "models_all",
    "relation_validates",
    "theory_sample",
]

logger = logging.getLogger(__name__)

PairSet = FrozenSet[FormulaPair]


def pairs_of(items: Iterable[Tuple[Formula, Formula]]) -> PairSet:
    return frozenset(FormulaPair(first, second) for first, second in items)


@dataclass(frozen=True, slots=True)
class Valuation:
    """Total valuation: ``default`` everywhere except the listed letters."""

    default: bool = False
    exceptions: FrozenSet[int] = frozenset()

    @classmethod
    def of(cls, default: bool = False, values: Optional[Mapping[int, bool]] = None) -> "Valuation":
        flipped = frozenset(index for index, bit in (values or {}).items() if bool(bit) != bool(default))
        return cls(bool(default), flipped)

    @classmethod
    def constant(cls, bit: bool) -> "Valuation":
        return cls(bool(bit), frozenset())

    def value(self, index: int) -> bool:
        return (not self.default) if index in self.exceptions else self.default

    def with_values(self, values: Mapping[int, bool]) -> "Valuation":
        merged = {index: self.value(index) for index in self.exceptions}
        merged.update(values)
        return Valuation.of(self.default, merged)

    def true_letters(self) -> FrozenSet[int]:
        """Letters set to 1 when the default is 0; the exceptions otherwise."""
        return self.exceptions


@dataclass(frozen=True, slots=True)
class FiniteRelation:
    pairs: PairSet = frozenset()

    def __contains__(self, pair: Tuple[Formula, Formula]) -> bool:
        return pair in self.pairs


@dataclass(frozen=True, slots=True)
class CofiniteRelation:
    excluded: PairSet = frozenset()

    def __contains__(self, pair: Tuple[Formula, Formula]) -> bool:
        return pair not in self.excluded


@dataclass(frozen=True, slots=True)
class FullRelation:
    def __contains__(self, pair: Tuple[Formula, Formula]) -> bool:
        return True


@dataclass(frozen=True, slots=True)
class EmptyRelation:
    def __contains__(self, pair: Tuple[Formula, Formula]) -> bool:
        return False


TOWER_VARIANTS = ("r0t", "superset-closure")


@dataclass(frozen=True, slots=True)
class TowerRelation:
    """Pairs ``<phi, phi^k>`` for ``k`` in ``indices``.

    Both variants answer membership for the least relation; the family of its
    supersets is sampled by the witnesses that need it.
    """

    indices: FrozenSet[int]
    variant: str = "r0t"

    def __post_init__(self) -> None:
        if not self.indices or min(self.indices) < 1:
            raise PreconditionError("tower indices must be a nonempty set of naturals >= 1")
        if self.variant not in TOWER_VARIANTS:
            raise PreconditionError(f"unknown tower variant {self.variant!r}")

    def __contains__(self, pair: Tuple[Formula, Formula]) -> bool:
        first, second = pair
        height = 0
        node = second
        while True:
            if node == first:
                return height in self.indices
            if isinstance(node, Bin) and node.connective is Connective.IMP and node.left == first:
                node = node.right
                height += 1
                continue
            return False


@dataclass(frozen=True, slots=True)
class OverrideRelation:
    base: "Relation"
    add: PairSet = frozenset()
    remove: PairSet = frozenset()

    def __post_init__(self) -> None:
        if self.add & self.remove:
            raise PreconditionError("override add and remove sets must be disjoint")

    def __contains__(self, pair: Tuple[Formula, Formula]) -> bool:
        if pair in self.add:
            return True
        return pair not in self.remove and pair in self.base


Relation = Union[FiniteRelation, CofiniteRelation, FullRelation, EmptyRelation, TowerRelation, OverrideRelation]


@dataclass(frozen=True, slots=True)
class Model:
    valuation: Valuation = field(default_factory=Valuation)
    relation: Relation = field(default_factory=EmptyRelation)


def rel_contains(relation: Relation, first: Formula, second: Formula) -> bool:
    return FormulaPair(first, second) in relation


def finite_support(relation: Relation) -> Optional[Tuple[bool, PairSet]]:
    """Describe ``relation`` as ``(cofinite, exceptions)`` when possible.

    ``(False, E)`` means the relation is exactly ``E``; ``(True, E)`` means it
    is everything except ``E``.  Tower patterns have no such description.
    """

    if isinstance(relation, FiniteRelation):
        return False, relation.pairs
    if isinstance(relation, EmptyRelation):
        return False, frozenset()
    if isinstance(relation, CofiniteRelation):
        return True, relation.excluded
    if isinstance(relation, FullRelation):
        return True, frozenset()
    if isinstance(relation, OverrideRelation):
        inner = finite_support(relation.base)
        if inner is None:
            return None
        cofinite, exceptions = inner
        if cofinite:
            return True, (exceptions - relation.add) | relation.remove
        return False, (exceptions | relation.add) - relation.remove
    return None


def normalize_relation(relation: Relation) -> Relation:
    support = finite_support(relation)
    if support is None:
        return relation
    cofinite, exceptions = support
    if cofinite:
        return CofiniteRelation(exceptions) if exceptions else FullRelation()
    return FiniteRelation(exceptions) if exceptions else EmptyRelation()


def relation_core(relation: Relation) -> Relation:
    while isinstance(relation, OverrideRelation):
        relation = relation.base
    return relation


def mentioned_pairs(relation: Relation) -> PairSet:
    """Pairs named by the override layers wrapped around the core relation."""

    found: set = set()
    while isinstance(relation, OverrideRelation):
        found |= relation.add | relation.remove
        relation = relation.base
    return frozenset(found)


def sorted_pairs(pairs: Iterable[FormulaPair]):
    return sorted(pairs, key=pair_sort_key)


def _evaluate(phi: Formula, value: Callable[[int], bool], relation: Relation) -> bool:
    if isinstance(phi, Letter):
        return value(phi.index)
    if isinstance(phi, Neg):
        return not _evaluate(phi.operand, value, relation)
    if isinstance(phi, Const):
        return phi.value
    connective = phi.connective
    left = _evaluate(phi.left, value, relation)
    if connective is Connective.AND:
        return left and _evaluate(phi.right, value, relation)
    if connective is Connective.OR:
        return left or _evaluate(phi.right, value, relation)
    right = _evaluate(phi.right, value, relation)
    if connective is Connective.IMP:
        return (not left) or right
    if connective is Connective.IFF:
        return left == right
    if connective is Connective.REL_IMP:
        return ((not left) or right) and FormulaPair(phi.left, phi.right) in relation
    return left and right and FormulaPair(phi.left, phi.right) in relation


def evaluate(model: Model, phi: Formula) -> bool:
    return _evaluate(phi, model.valuation.value, model.relation)


def models_all(model: Model, formulas: Iterable[Formula]) -> bool:
    return all(evaluate(model, phi) for phi in formulas)


def relation_validates(relation: Relation, phi: Formula) -> bool:
    """Decide ``R |= phi`` by enumerating valuations of the letters of ``phi``."""

    letters = sorted(vars_of(phi))
    bound = get_settings().max_validation_vars
    if len(letters) > bound:
        raise CapacityError(f"{len(letters)} letters exceed the validation bound of {bound}")
    for bits in itertools.product((False, True), repeat=len(letters)):
        assignment: Dict[int, bool] = dict(zip(letters, bits))
        if not _evaluate(phi, lambda index: assignment.get(index, False), relation):
            return False
    return True


def theory_sample(model: Model, formulas: Iterable[Formula]) -> Tuple[bool, ...]:
    return tuple(evaluate(model, phi) for phi in formulas)

"""Omega sets, S-set membership and sampling, and undefinability counterexamples.

Two models share a theory exactly when they share a valuation and their
relations differ only on pairs whose material implication fails.  Membership
is answered three-valued: when the relations differ on infinitely many pairs
the answer is ``unknown`` rather than a guess.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .config import get_settings
from .errors import ConditionError, PreconditionError
from .generators import enumerate_formulas, make_rng
from .proofsys import ConditionStatus, condition_check
from .semantics import (
    Model,
    OverrideRelation,
    Relation,
    Valuation,
    evaluate,
    finite_support,
    mentioned_pairs,
    normalize_relation,
    relation_core,
    sorted_pairs,
)
from .syntax import (
    BOTTOM,
    Formula,
    FormulaPair,
    Letter,
    format_formula,
    implies,
    neg_tower,
    rel_imp,
    size,
)
from .translation import (
    Assignment,
    CplFormula,
    PairAtom,
    assignment_of,
    atoms,
    cpl_evaluate,
    model_from_assignment,
    sat,
)

__all__ = [
    "Membership",
    "MembershipVerdict",
    "CounterexampleRecord",
    "CONDITIONS",
    "in_omega",
    "omega_pairs",
    "enumerate_omega",
    "relation_difference",
    "sset_member",
    "sset_from_theory",
    "distinguishing_formula",
    "toggle",
    "sample_equivalents",
    "rmin_contains",
    "rmax_contains",
    "falsify_sset_invariance",
    "undefinability_counterexample",
]

logger = logging.getLogger(__name__)

CONDITIONS = ("symmetry", "n-condition", "both")


class Membership(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class MembershipVerdict:
    status: Membership
    reason: str = ""

    @property
    def is_yes(self) -> bool:
        return self.status is Membership.YES


@dataclass(frozen=True)
class CounterexampleRecord:
    condition: str
    base: Relation
    modified: Relation
    toggled_pair: FormulaPair
    violation_witness: FormulaPair
    membership_checks: Tuple[Tuple[Valuation, MembershipVerdict], ...] = field(default_factory=tuple)

    @property
    def verified(self) -> bool:
        return all(verdict.is_yes for _, verdict in self.membership_checks)


def in_omega(model: Model, first: Formula, second: Formula) -> bool:
    return not evaluate(model, implies(first, second))


@lru_cache(maxsize=8)
def _scan_layers(letters: Tuple[int, ...], max_size: int) -> Dict[int, Tuple[Formula, ...]]:
    layers: Dict[int, List[Formula]] = {}
    for phi in enumerate_formulas(letters, max_size):
        layers.setdefault(size(phi), []).append(phi)
    return {width: tuple(items) for width, items in layers.items()}


def omega_pairs(model: Model) -> Iterator[FormulaPair]:
    """Deterministic, unbounded stream of Omega pairs of ``model``.

    Pairs over the configured small alphabet come first, ordered by combined
    size; the ``<!^2n T, F>`` family follows and never runs dry.
    """

    settings = get_settings()
    scan = settings.omega_scan_size
    layers = _scan_layers(tuple(settings.omega_letters), scan - 1)
    for total in range(2, scan + 1):
        for first_size in range(1, total):
            for first in layers.get(first_size, ()):
                for second in layers.get(total - first_size, ()):
                    if in_omega(model, first, second):
                        yield FormulaPair(first, second)
    for n in itertools.count():
        yield FormulaPair(neg_tower(2 * n), BOTTOM)


def enumerate_omega(model: Model, count: int) -> List[FormulaPair]:
    return list(itertools.islice(omega_pairs(model), max(count, 0)))


def relation_difference(left: Relation, right: Relation) -> Optional[FrozenSet[FormulaPair]]:
    """The symmetric difference when it is finite and can be computed, else ``None``."""

    left_support = finite_support(left)
    right_support = finite_support(right)
    if left_support is not None and right_support is not None:
        if left_support[0] != right_support[0]:
            return None
        return left_support[1] ^ right_support[1]
    if relation_core(left) == relation_core(right):
        touched = mentioned_pairs(left) | mentioned_pairs(right)
        return frozenset(pair for pair in touched if (pair in left) != (pair in right))
    return None


def _first_differing_letter(left: Valuation, right: Valuation) -> Optional[int]:
    candidates = sorted(left.exceptions | right.exceptions)
    if left.default != right.default:
        spare = max(candidates, default=-1) + 1
        candidates = sorted(set(range(spare + 1)) | set(candidates))
    for index in candidates:
        if left.value(index) != right.value(index):
            return index
    return None


def sset_member(model: Model, other: Model) -> MembershipVerdict:
    letter_index = _first_differing_letter(model.valuation, other.valuation)
    if letter_index is not None:
        return MembershipVerdict(Membership.NO, f"valuations differ at letter {letter_index}")
    difference = relation_difference(model.relation, other.relation)
    if difference is None:
        return MembershipVerdict(
            Membership.UNKNOWN, "relations differ on a set that is not finitely representable"
        )
    for pair in sorted_pairs(difference):
        if not in_omega(model, *pair):
            return MembershipVerdict(Membership.NO, f"relations differ outside Omega at {pair}")
    return MembershipVerdict(Membership.YES)


def sset_from_theory(model: Model, other: Model) -> MembershipVerdict:
    """Membership through ``rmin <= R' <= rmax`` on the pairs where the relations differ."""

    if _first_differing_letter(model.valuation, other.valuation) is not None:
        return MembershipVerdict(Membership.NO, "valuations differ")
    difference = relation_difference(model.relation, other.relation)
    if difference is None:
        return MembershipVerdict(Membership.UNKNOWN, "difference not finitely representable")
    for pair in sorted_pairs(difference):
        inside = pair in other.relation
        if rmin_contains(model, *pair) and not inside:
            return MembershipVerdict(Membership.NO, f"{pair} is in rmin but missing")
        if inside and not rmax_contains(model, *pair):
            return MembershipVerdict(Membership.NO, f"{pair} is present but outside rmax")
    return MembershipVerdict(Membership.YES)


def distinguishing_formula(model: Model, other: Model) -> Optional[Formula]:
    """A formula true in exactly one of the two models, when one can be named."""

    letter_index = _first_differing_letter(model.valuation, other.valuation)
    if letter_index is not None:
        return Letter(letter_index)
    difference = relation_difference(model.relation, other.relation)
    if difference is None:
        return None
    for pair in sorted_pairs(difference):
        if not in_omega(model, *pair):
            return rel_imp(pair.first, pair.second)
    return None


def toggle(model: Model, pairs: Iterable[FormulaPair]) -> Model:
    chosen = frozenset(pairs)
    add = frozenset(pair for pair in chosen if pair not in model.relation)
    remove = chosen - add
    relation = normalize_relation(OverrideRelation(model.relation, add, remove))
    return Model(model.valuation, relation)


def sample_equivalents(model: Model, k: int, seed: int = 0) -> List[Model]:
    """``k`` pairwise distinct members of the S-set of ``model``."""

    if k <= 0:
        return []
    width = math.ceil(math.log2(k)) + 1
    pairs = enumerate_omega(model, width)
    rng = make_rng(seed)
    masks = rng.choice(2**width - 1, size=k, replace=False) + 1
    samples = []
    for mask in masks:
        chosen = [pairs[bit] for bit in range(width) if int(mask) >> bit & 1]
        samples.append(toggle(model, chosen))
    return samples


def rmin_contains(model: Model, first: Formula, second: Formula) -> bool:
    return evaluate(model, rel_imp(first, second))


def rmax_contains(model: Model, first: Formula, second: Formula) -> bool:
    return evaluate(model, rel_imp(first, second)) or not evaluate(model, implies(first, second))


def _random_assignment(rng, atom_list: Sequence) -> Assignment:
    return Assignment({atom: bool(rng.integers(2)) for atom in atom_list})


def falsify_sset_invariance(
    formula: CplFormula,
    model_samples: int,
    toggle_bound: Optional[int] = None,
    seed: int = 0,
) -> Optional[Tuple[Model, Model]]:
    """Search for ``M |= A`` and an S-set neighbour ``N`` with ``N |/= A``.

    Neighbours toggle Omega pairs that are pair atoms of ``A``: singles first,
    then all of them, then random subsets, at most ``toggle_bound`` per model.
    Toggling any other pair leaves every atom of ``A`` unchanged.  Returning
    ``None`` is evidence of invariance, not a proof.
    """

    bound = get_settings().fuzz_toggle_bound if toggle_bound is None else toggle_bound
    rng = make_rng(seed)
    atom_list = atoms(formula)
    pair_atoms = [atom for atom in atom_list if isinstance(atom, PairAtom)]

    for sample in range(model_samples):
        if sample == 0:
            base = sat(formula)
            if base is None:
                return None
        else:
            base = _random_assignment(rng, atom_list)
            if not cpl_evaluate(base, formula):
                continue
        model = model_from_assignment(base)
        togglable = [atom.pair for atom in pair_atoms if in_omega(model, *atom.pair)]
        if not togglable:
            continue

        subsets: List[Tuple[FormulaPair, ...]] = [(pair,) for pair in togglable]
        if len(togglable) > 1:
            subsets.append(tuple(togglable))
            for _ in range(max(bound - len(subsets), 0)):
                picks = tuple(pair for pair in togglable if rng.random() < 0.5)
                if picks:
                    subsets.append(picks)

        for chosen in subsets[:bound]:
            neighbour = toggle(model, chosen)
            if not cpl_evaluate(assignment_of(neighbour, atom_list), formula):
                logger.info("Invariance counterexample after %d model samples", sample + 1)
                return model, neighbour
    return None


def _violation_candidates(condition: str) -> Iterator[FormulaPair]:
    for n in itertools.count():
        if condition == "n-condition":
            # <!x, F> with x false, so the pair lies in Omega and needs <x, F>.
            yield FormulaPair(neg_tower(2 * n + 2), BOTTOM)
        else:
            yield FormulaPair(neg_tower(2 * n), BOTTOM)


def undefinability_counterexample(condition: str, base: Relation, attempts: int = 64) -> CounterexampleRecord:
    """Add one Omega pair to a condition-satisfying relation so that it breaks the condition.

    The modified relation yields S-set equivalent models for every valuation,
    so no set of formulas can single out the relations meeting the condition.
    """

    if condition not in CONDITIONS:
        raise PreconditionError(f"unknown condition {condition!r}")
    required = ("symmetry", "n-condition") if condition == "both" else (condition,)
    for name in required:
        verdict = condition_check(base, name)
        if verdict.status is ConditionStatus.UNKNOWN:
            raise ConditionError(f"{name} cannot be decided on this relation representation")
        if verdict.status is ConditionStatus.FAILS:
            raise ConditionError(f"base relation violates {name}: missing {verdict.witness}")

    violated = "n-condition" if condition == "n-condition" else "symmetry"
    for pair in itertools.islice(_violation_candidates(violated), attempts):
        if pair in base:
            continue
        modified = normalize_relation(OverrideRelation(base, frozenset({pair}), frozenset()))
        verdict = condition_check(modified, violated)
        if verdict.status is not ConditionStatus.FAILS or verdict.witness is None:
            continue
        checks = []
        for valuation in (Valuation.constant(False), Valuation.constant(True), Valuation.of(False, {1: True})):
            checks.append((valuation, sset_member(Model(valuation, base), Model(valuation, modified))))
        logger.info(
            "Undefinability witness for %s: added <%s, %s>",
            condition,
            format_formula(pair.first),
            format_formula(pair.second),
        )
        return CounterexampleRecord(condition, base, modified, pair, verdict.witness, tuple(checks))
    raise ConditionError(f"no violating Omega pair found within {attempts} attempts")

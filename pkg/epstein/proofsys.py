"""Hilbert systems over F: schema registry, proof checking, bounded Lindenbaum
extension, canonical models and the two relation conditions.

Systems::

    F    A1, A2
    FS   F + s
    FN   F + n1, n2
    FSN  F + s, n1, n2, sn, ns

A ``Custom`` system is F plus a finite list of user axioms, each closed
under substitution when checked.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .config import get_settings
from .errors import CapacityError, PreconditionError, ProofFormatError, UniverseError
from .generators import close_pairs, make_rng, random_substitution, random_valuation
from .semantics import FiniteRelation, Model, Relation, Valuation, evaluate, finite_support, sorted_pairs
from .syntax import (
    Bin,
    Connective,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    format_formula,
    implies,
    match_schema,
    neg,
    parse,
    rel_imp,
    sort_key,
    subformulas,
    substitute,
    vars_of,
)
from .translation import Assignment, cpl_evaluate, is_cpl_instance, sat_all, translate

__all__ = [
    "ConditionStatus",
    "ConditionVerdict",
    "condition_check",
    "AxiomSchema",
    "SCHEMAS",
    "SYSTEM_SCHEMAS",
    "ProofSystem",
    "proof_system",
    "system_from_payload",
    "Premise",
    "Schema",
    "Cpl",
    "LambdaAxiom",
    "MP",
    "Justification",
    "ProofLine",
    "Proof",
    "LineVerdict",
    "ProofVerdict",
    "is_axiom_instance",
    "check_proof",
    "SYSTEM_CONDITION",
    "sample_soundness",
    "universe_closure",
    "schema_instances",
    "BoundedMcs",
    "bounded_lindenbaum",
    "CANONICAL_MODES",
    "canonical_model",
    "canonical_adequacy",
]

logger = logging.getLogger(__name__)


# Relation conditions ---------------------------------------------------------------

class ConditionStatus(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ConditionVerdict:
    status: ConditionStatus
    witness: Optional[FormulaPair] = None
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status is ConditionStatus.HOLDS


CONDITION_NAMES = ("symmetry", "n-condition")


def _required_pair(pair: FormulaPair, condition: str) -> Optional[FormulaPair]:
    """The pair whose presence ``pair`` demands, if any."""
    if condition == "symmetry":
        return FormulaPair(pair.second, pair.first)
    if isinstance(pair.first, Neg):
        return FormulaPair(pair.first.operand, pair.second)
    return None


def condition_check(relation: Relation, condition: str) -> ConditionVerdict:
    """Decide symmetry or the n-condition where the representation allows it.

    A failing verdict carries the missing pair. Tower patterns give ``unknown``.
    """

    if condition not in CONDITION_NAMES:
        raise PreconditionError(f"unknown condition {condition!r}")
    support = finite_support(relation)
    if support is None:
        return ConditionVerdict(ConditionStatus.UNKNOWN, reason="relation has no finite description")
    cofinite, exceptions = support
    if not cofinite:
        for pair in sorted_pairs(exceptions):
            needed = _required_pair(pair, condition)
            if needed is not None and needed not in exceptions:
                return ConditionVerdict(ConditionStatus.FAILS, needed, f"{pair} present, {needed} missing")
        return ConditionVerdict(ConditionStatus.HOLDS)

    # Everything outside the excluded pairs is present, so only an excluded pair
    # can be missing; it is demanded by its mirror or by its negated variant.
    for missing in sorted_pairs(exceptions):
        if condition == "symmetry":
            demanding: Optional[FormulaPair] = FormulaPair(missing.second, missing.first)
        else:
            demanding = FormulaPair(neg(missing.first), missing.second)
        if demanding not in exceptions:
            return ConditionVerdict(ConditionStatus.FAILS, missing, f"{demanding} present, {missing} missing")
    return ConditionVerdict(ConditionStatus.HOLDS)


# Schemas and systems ---------------------------------------------------------------

@dataclass(frozen=True)
class AxiomSchema:
    name: str
    pattern: Formula

    def __str__(self) -> str:
        return f"{self.name}: {format_formula(self.pattern)}"


SCHEMAS: Dict[str, AxiomSchema] = {
    name: AxiomSchema(name, parse(text))
    for name, text in (
        ("A1", "(p ~> q) -> (p -> q)"),
        ("A2", "(p ^ q) <-> ((p ~> q) & (p & q))"),
        ("s", "(p ~> q) -> ((q ~> p) | !(q -> p))"),
        ("n1", "(!p ~> q) -> ((p ~> q) | !(p -> q))"),
        ("n2", "((!!p ~> q) & !(!p -> q)) -> (p ~> q)"),
        ("sn", "(!(p -> q) & (!p ~> q)) -> (q ~> p)"),
        ("ns", "(!(!p -> q) & (q ~> !p)) -> (p ~> q)"),
    )
}

SYSTEM_SCHEMAS: Dict[str, Tuple[str, ...]] = {
    "F": ("A1", "A2"),
    "FS": ("A1", "A2", "s"),
    "FN": ("A1", "A2", "n1", "n2"),
    "FSN": ("A1", "A2", "s", "n1", "n2", "sn", "ns"),
    "Custom": ("A1", "A2"),
}


@dataclass(frozen=True)
class ProofSystem:
    name: str
    schemas: Tuple[AxiomSchema, ...]
    extra: Tuple[Formula, ...] = ()

    @property
    def schema_names(self) -> Tuple[str, ...]:
        return tuple(schema.name for schema in self.schemas)

    @property
    def symmetric(self) -> bool:
        return "s" in self.schema_names

    @property
    def negative(self) -> bool:
        return "n1" in self.schema_names

    def schema(self, name: str) -> Optional[AxiomSchema]:
        for schema in self.schemas:
            if schema.name == name:
                return schema
        return None


def proof_system(name: str = "F", custom_axioms: Sequence[Formula] = ()) -> ProofSystem:
    if name not in SYSTEM_SCHEMAS:
        raise PreconditionError(f"unknown proof system {name!r}; expected one of {sorted(SYSTEM_SCHEMAS)}")
    if custom_axioms and name == "F":
        name = "Custom"
    schemas = tuple(SCHEMAS[schema_name] for schema_name in SYSTEM_SCHEMAS[name])
    return ProofSystem(name, schemas, tuple(custom_axioms))


def system_from_payload(value: Union[str, Mapping[str, Sequence[str]]]) -> ProofSystem:
    """Read the ``system`` field of a proof payload: a name or ``{"custom_axioms": [...]}``."""

    if isinstance(value, str):
        return proof_system(value)
    if isinstance(value, Mapping) and "custom_axioms" in value:
        axioms = value["custom_axioms"]
        if isinstance(axioms, str) or not isinstance(axioms, Sequence):
            raise ProofFormatError("custom_axioms must be a list of formula strings")
        return proof_system("Custom", [parse(text) for text in axioms])
    raise ProofFormatError(f"unrecognised system field: {value!r}")


# Proofs ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Premise:
    index: int


@dataclass(frozen=True)
class Schema:
    name: str


@dataclass(frozen=True)
class Cpl:
    pass


@dataclass(frozen=True)
class LambdaAxiom:
    index: int


@dataclass(frozen=True)
class MP:
    imp: int
    ant: int


Justification = Union[Premise, Schema, Cpl, LambdaAxiom, MP]


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Proof:
    premises: Tuple[Formula, ...] = ()
    lines: Tuple[ProofLine, ...] = ()

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.lines[-1].formula if self.lines else None


@dataclass(frozen=True)
class LineVerdict:
    index: int
    ok: bool
    reason: str = ""


@dataclass(frozen=True)
class ProofVerdict:
    lines: Tuple[LineVerdict, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)

    @property
    def errors(self) -> List[LineVerdict]:
        return [line for line in self.lines if not line.ok]


def is_axiom_instance(system: ProofSystem, phi: Formula) -> Optional[Tuple[str, Dict[int, Formula]]]:
    """First schema of ``system`` (registry order) with ``phi`` as an instance."""

    for schema in system.schemas:
        bindings = match_schema(schema.pattern, phi)
        if bindings is not None:
            return schema.name, bindings
    return None


def _index_error(proof: Proof, system: ProofSystem, index: int) -> Optional[str]:
    just = proof.lines[index].justification
    if isinstance(just, Premise) and not 0 <= just.index < len(proof.premises):
        return f"premise index {just.index} out of range ({len(proof.premises)} premises)"
    if isinstance(just, LambdaAxiom) and not 0 <= just.index < len(system.extra):
        return f"lambda axiom index {just.index} out of range ({len(system.extra)} axioms)"
    if isinstance(just, MP):
        for label, ref in (("imp", just.imp), ("ant", just.ant)):
            if not 0 <= ref < index:
                return f"mp {label} index {ref} does not point to an earlier line"
    return None


def _check_line(system: ProofSystem, proof: Proof, index: int) -> LineVerdict:
    line = proof.lines[index]
    phi = line.formula
    just = line.justification
    if isinstance(just, Premise):
        if proof.premises[just.index] == phi:
            return LineVerdict(index, True)
        return LineVerdict(index, False, f"formula differs from premise {just.index}")
    if isinstance(just, Schema):
        schema = system.schema(just.name)
        if schema is None:
            return LineVerdict(index, False, f"schema {just.name} is not part of system {system.name}")
        if match_schema(schema.pattern, phi) is None:
            return LineVerdict(index, False, f"not an instance of schema {just.name}")
        return LineVerdict(index, True)
    if isinstance(just, Cpl):
        if is_cpl_instance(phi):
            return LineVerdict(index, True)
        return LineVerdict(index, False, "skeleton is not a classical tautology")
    if isinstance(just, LambdaAxiom):
        if match_schema(system.extra[just.index], phi) is None:
            return LineVerdict(index, False, f"not an instance of lambda axiom {just.index}")
        return LineVerdict(index, True)
    major = proof.lines[just.imp].formula
    minor = proof.lines[just.ant].formula
    if major == implies(minor, phi):
        return LineVerdict(index, True)
    return LineVerdict(index, False, f"line {just.imp} is not line {just.ant} -> this line")


def check_proof(system: ProofSystem, proof: Proof, jobs: int = 1) -> ProofVerdict:
    """Verify every line; index errors are found first, in a sequential pass."""

    verdicts: Dict[int, LineVerdict] = {}
    pending: List[int] = []
    for index in range(len(proof.lines)):
        problem = _index_error(proof, system, index)
        if problem is None:
            pending.append(index)
        else:
            verdicts[index] = LineVerdict(index, False, problem)

    if jobs > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            checked = list(pool.map(lambda i: _check_line(system, proof, i), pending))
    else:
        checked = [_check_line(system, proof, index) for index in pending]
    for verdict in checked:
        verdicts[verdict.index] = verdict

    result = ProofVerdict(tuple(verdicts[index] for index in range(len(proof.lines))))
    logger.info(
        "Checked %d-line proof in %s: %s",
        len(proof.lines),
        system.name,
        "ok" if result.ok else f"{len(result.errors)} error(s)",
    )
    return result


# Soundness sampling ----------------------------------------------------------------

SYSTEM_CONDITION: Dict[str, str] = {"FS": "symmetry", "FN": "n-condition", "FSN": "both"}


def _related_pairs(phi: Formula) -> List[FormulaPair]:
    return [
        FormulaPair(node.left, node.right)
        for node in subformulas(phi)
        if isinstance(node, Bin) and node.connective in (Connective.REL_IMP, Connective.REL_CONJ)
    ]


def sample_soundness(
    system: ProofSystem,
    relations: int = 200,
    instances: int = 20,
    valuations: int = 4,
    seed: int = 0,
) -> List[Tuple[Formula, Model]]:
    """Schema instances falsified in a model whose relation meets the system's condition.

    Each relation is drawn from the relatedness pairs of its own batch of
    instances, then closed under the condition, so antecedents are often true.
    An empty result is evidence of soundness on the sample.
    """

    condition = SYSTEM_CONDITION.get(system.name)
    rng = make_rng(seed)
    failures: List[Tuple[Formula, Model]] = []
    for _ in range(relations):
        batch = [
            substitute(random_substitution(rng, (1, 2), int(rng.integers(3))), schema.pattern)
            for _ in range(instances)
            for schema in system.schemas
        ]
        pool = {pair for phi in batch for pair in _related_pairs(phi)}
        chosen = [pair for pair in sorted_pairs(pool) if rng.random() < 0.5]
        relation = close_pairs(chosen, condition) if condition else FiniteRelation(frozenset(chosen))
        for _ in range(valuations):
            model = Model(random_valuation(rng), relation)
            failures.extend((phi, model) for phi in batch if not evaluate(model, phi))
    logger.info(
        "Soundness sample for %s: %d relations, %d failures",
        system.name,
        relations,
        len(failures),
    )
    return failures


# Bounded Lindenbaum ----------------------------------------------------------------

def universe_closure(formulas: Iterable[Formula], system: Optional[ProofSystem] = None) -> FrozenSet[Formula]:
    """Close under subformulas and the relatedness additions, then add single negations.

    Every ``a ^ b`` brings ``a ~> b``.  With ``s`` every ``a ~> b`` brings
    ``b ~> a``; with ``n1`` every ``!a ~> b`` brings ``a ~> b``.
    """

    symmetric = system is not None and system.symmetric
    negative = system is not None and system.negative
    bound = get_settings().lindenbaum_max_universe
    closed: set = set()
    pending: List[Formula] = list(formulas)
    while pending:
        for node in subformulas(pending.pop()):
            if node in closed:
                continue
            closed.add(node)
            if not isinstance(node, Bin):
                continue
            if node.connective is Connective.REL_CONJ:
                pending.append(rel_imp(node.left, node.right))
            elif node.connective is Connective.REL_IMP:
                if symmetric:
                    pending.append(rel_imp(node.right, node.left))
                if negative and isinstance(node.left, Neg):
                    pending.append(rel_imp(node.left.operand, node.right))
        if len(closed) > bound:
            raise CapacityError(f"universe exceeds {bound} formulas before negation")
    universe = set(closed)
    universe.update(neg(phi) for phi in closed)
    return frozenset(universe)


def _full_bindings(pattern: Formula, universe: Iterable[Formula]) -> Iterable[Dict[int, Formula]]:
    letters = vars_of(pattern)
    if isinstance(pattern, Letter):
        for phi in universe:
            yield {pattern.index: phi}
        return
    anchors = [node for node in subformulas(pattern) if not isinstance(node, Letter) and vars_of(node) == letters]
    for anchor in anchors:
        for phi in universe:
            bindings = match_schema(anchor, phi)
            if bindings is not None:
                yield bindings


def schema_instances(system: ProofSystem, universe: Iterable[Formula]) -> List[Formula]:
    """Axiom instances anchored in ``universe``.

    A schema is instantiated by matching any of its subpatterns that mention
    every schema letter against a universe member.
    """

    members = sorted(set(universe), key=sort_key)
    patterns = [schema.pattern for schema in system.schemas] + list(system.extra)
    found: Dict[Formula, None] = {}
    for pattern in patterns:
        for bindings in _full_bindings(pattern, members):
            found.setdefault(substitute(bindings, pattern), None)
    return sorted(found, key=sort_key)


@dataclass(frozen=True)
class BoundedMcs:
    universe: FrozenSet[Formula]
    members: FrozenSet[Formula]
    system: str = "F"


def _check_closed(universe: FrozenSet[Formula]) -> None:
    for phi in universe:
        for node in subformulas(phi, proper=True):
            if node not in universe:
                raise UniverseError(
                    f"universe is not closed under subformulas: {format_formula(node)} "
                    f"(from {format_formula(phi)}) is missing"
                )


def bounded_lindenbaum(
    system: ProofSystem,
    sigma: Iterable[Formula],
    universe: Optional[Iterable[Formula]] = None,
) -> Optional[BoundedMcs]:
    """Greedily extend ``sigma`` to a maximal bounded-consistent subset of ``universe``.

    Consistency means the translations of the working set together with the
    schema instances anchored in the universe are satisfiable. Returns
    ``None`` when ``sigma`` itself fails that test.
    """

    start = list(dict.fromkeys(sigma))
    closed = universe_closure(start, system) if universe is None else frozenset(universe)
    _check_closed(closed)
    outside = [phi for phi in start if phi not in closed]
    if outside:
        raise UniverseError(f"{format_formula(outside[0])} is not in the universe")

    instances = schema_instances(system, closed)
    working = [translate(phi) for phi in instances] + [translate(phi) for phi in start]
    model: Optional[Assignment] = sat_all(working)
    if model is None:
        logger.info("Lindenbaum: starting set is inconsistent in %s", system.name)
        return None

    members = set(start)

    def decided(phi: Formula) -> bool:
        return phi in members or neg(phi) in members or (isinstance(phi, Neg) and phi.operand in members)

    for phi in sorted(closed, key=sort_key):
        if decided(phi):
            continue
        candidate = translate(phi)
        if not cpl_evaluate(model, candidate):
            trial = sat_all(working + [candidate])
            if trial is None:
                if neg(phi) in closed:
                    members.add(neg(phi))
                    working.append(translate(neg(phi)))
                    logger.debug("Lindenbaum: rejected %s", format_formula(phi))
                continue
            model = trial
        members.add(phi)
        working.append(candidate)
        logger.debug("Lindenbaum: added %s", format_formula(phi))

    logger.info(
        "Lindenbaum in %s: %d of %d universe formulas, %d axiom instances",
        system.name,
        len(members),
        len(closed),
        len(instances),
    )
    return BoundedMcs(closed, frozenset(members), system.name)


CANONICAL_MODES = ("plain", "S", "N", "SN")


def canonical_model(mcs: BoundedMcs, mode: str = "plain") -> Model:
    if mode not in CANONICAL_MODES:
        raise PreconditionError(f"unknown canonical mode {mode!r}")
    letters = {phi.index: True for phi in mcs.members if isinstance(phi, Letter)}
    pairs = set()
    for phi in mcs.members:
        if not (isinstance(phi, Bin) and phi.connective is Connective.REL_IMP):
            continue
        pairs.add(FormulaPair(phi.left, phi.right))
        if mode in ("S", "SN"):
            pairs.add(FormulaPair(phi.right, phi.left))
        if mode in ("N", "SN") and isinstance(phi.left, Neg):
            pairs.add(FormulaPair(phi.left.operand, phi.right))
    return Model(Valuation.of(False, letters), FiniteRelation(frozenset(pairs)))


def canonical_adequacy(mcs: BoundedMcs, mode: str = "plain") -> List[Formula]:
    """Universe formulas whose truth in the canonical model disagrees with membership."""

    model = canonical_model(mcs, mode)
    mismatches = [
        phi for phi in sorted(mcs.universe, key=sort_key) if evaluate(model, phi) != (phi in mcs.members)
    ]
    if mismatches:
        logger.warning("Canonical model (%s) disagrees on %d universe formulas", mode, len(mismatches))
    return mismatches

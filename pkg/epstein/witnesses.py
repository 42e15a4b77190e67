"""Executable witnesses for the completeness, incompleteness and inexpressibility results.

Each witness builds the models or relations its argument needs, runs the
checks that carry the argument (critical substitutions by hand, the rest
sampled from a seed) and returns a :class:`WitnessReport`.  A report records
the parameters it was run with, so :func:`verify_report` can re-run it.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import get_settings
from .errors import CapacityError, PreconditionError
from .generators import make_rng, random_formula, random_substitution
from .semantics import (
    CofiniteRelation,
    EmptyRelation,
    FiniteRelation,
    Model,
    OverrideRelation,
    Relation,
    TowerRelation,
    Valuation,
    evaluate,
    relation_validates,
)
from .sset import undefinability_counterexample
from .syntax import (
    BOTTOM,
    TOP,
    Bin,
    Connective,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    format_formula,
    imp_tower,
    implies,
    k_formula,
    lambda_formula,
    lambda_tower,
    rel_imp,
    substitute,
)

__all__ = [
    "WitnessCheck",
    "WitnessReport",
    "ALPHA",
    "alpha_forces_pp",
    "alpha_nonderivability_model",
    "alpha_incompleteness",
    "kt_separation",
    "kt_completeness",
    "lambda_incompleteness",
    "lambda_separation",
    "inexpressibility_sweep",
    "undefinability_report",
    "WITNESSES",
    "run_witness",
    "run_witnesses",
    "verify_report",
]

logger = logging.getLogger(__name__)

P = Letter(1)
Q = Letter(2)
R = Letter(3)
PP = rel_imp(P, P)
ALPHA = implies(P, rel_imp(Q, P))
ALL_TRUE = Valuation.constant(True)
ALL_FALSE = Valuation.constant(False)
P_TRUE = Valuation.of(False, {1: True})
WITHOUT_PP = CofiniteRelation(frozenset({FormulaPair(P, P)}))


@dataclass(frozen=True)
class WitnessCheck:
    description: str
    samples: int
    passed: bool


@dataclass(frozen=True)
class WitnessReport:
    lemma: str
    params: Dict[str, Any] = field(default_factory=dict)
    objects: Dict[str, Any] = field(default_factory=dict)
    checks: Tuple[WitnessCheck, ...] = ()

    @property
    def verdict(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)


def _report(lemma: str, params: Dict[str, Any], objects: Dict[str, Any], checks: List[WitnessCheck]) -> WitnessReport:
    report = WitnessReport(lemma, params, objects, tuple(checks))
    logger.info(
        "%s: %d/%d checks passed, verdict %s",
        lemma,
        sum(check.passed for check in checks),
        len(checks),
        "pass" if report.verdict else "fail",
    )
    return report


def _positive_set(values: Iterable[int], label: str) -> Tuple[int, ...]:
    items = tuple(sorted({int(value) for value in values}))
    if not items:
        raise PreconditionError(f"{label} must be a nonempty set")
    if items[0] < 1:
        raise PreconditionError(f"{label} must contain naturals >= 1")
    return items


def _substitutions(sample: int, seed: int, critical: Sequence[Mapping[int, Formula]] = ()) -> List[Mapping[int, Formula]]:
    """The critical substitutions first, then ``sample`` random ones over p and q."""

    rng = make_rng(seed)
    depth = get_settings().witness_substitution_depth
    sampled = [random_substitution(rng, (1, 2), int(rng.integers(depth + 1))) for _ in range(sample)]
    return [{}, *critical, *sampled]


# The single incomplete logic F alpha ------------------------------------------------

def alpha_forces_pp(relation: Relation, sample: int = 100, seed: int = 0) -> WitnessReport:
    """Every relation validating all instances of ``alpha`` validates ``p ~> p``."""

    params = {"relation": relation, "sample": sample, "seed": seed}
    critical = implies(P, PP)
    if FormulaPair(P, P) not in relation:
        holds = evaluate(Model(ALL_TRUE, relation), critical)
        checks = [
            WitnessCheck("relation lacks <p, p>", 1, True),
            WitnessCheck("all-true valuation falsifies the instance p -> (p ~> p)", 1, not holds),
        ]
        objects = {"instance": critical, "valuation": ALL_TRUE, "substitution": {2: P}}
        return _report("alpha_forces_pp", params, objects, checks)

    instances = [substitute(sigma, ALPHA) for sigma in _substitutions(sample, seed, [{2: P}])]
    failing = [phi for phi in instances if not relation_validates(relation, phi)]
    validates_pp = relation_validates(relation, PP)
    checks = [
        WitnessCheck("relation validates p ~> p", 1, validates_pp),
        WitnessCheck("relation validates every sampled alpha instance", len(instances), not failing),
    ]
    objects: Dict[str, Any] = {"failing_instances": len(failing)}
    if failing:
        objects["first_failing_instance"] = failing[0]
    return _report("alpha_forces_pp", params, objects, checks)


def alpha_nonderivability_model(sample: int = 100, seed: int = 0) -> WitnessReport:
    """``<v = 0, everything but <p, p>>`` satisfies every instance of ``alpha`` but not ``p ~> p``."""

    model = Model(ALL_FALSE, WITHOUT_PP)
    instances = [substitute(sigma, ALPHA) for sigma in _substitutions(sample, seed, [{2: P}])]
    checks = [
        WitnessCheck("model falsifies p ~> p", 1, not evaluate(model, PP)),
        WitnessCheck("model satisfies p -> (p ~> p)", 1, evaluate(model, implies(P, PP))),
        WitnessCheck("model satisfies q -> (r ~> q)", 1, evaluate(model, implies(Q, rel_imp(R, Q)))),
        WitnessCheck(
            "model satisfies sampled alpha instances",
            len(instances),
            all(evaluate(model, phi) for phi in instances),
        ),
    ]
    params = {"sample": sample, "seed": seed}
    return _report("alpha_nonderivability_model", params, {"model": model}, checks)


def alpha_incompleteness(sample: int = 100, seed: int = 0) -> WitnessReport:
    forcing = alpha_forces_pp(WITHOUT_PP, sample, seed)
    model = alpha_nonderivability_model(sample, seed)
    checks = list(forcing.checks) + list(model.checks)
    objects = {"model": model.objects["model"], "instance": forcing.objects["instance"]}
    return _report("alpha_incompleteness", {"sample": sample, "seed": seed}, objects, checks)


# The K family ----------------------------------------------------------------------

def _split(first: Tuple[int, ...], second: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    """The least index in exactly one set, with the set it is missing from."""

    difference = sorted(set(first) ^ set(second))
    if not difference:
        raise PreconditionError("the two index sets must differ")
    n = difference[0]
    return n, (second if n in first else first)


def kt_separation(t: Iterable[int], v: Iterable[int], sample: int = 50, seed: int = 0) -> WitnessReport:
    """A cofinite model separating the K-logics of two different index sets."""

    first = _positive_set(t, "T")
    second = _positive_set(v, "V")
    n, other = _split(first, second)
    separator = k_formula(n)
    relation = CofiniteRelation(frozenset({FormulaPair(P, imp_tower(P, n))}))
    instances = [
        substitute(sigma, k_formula(k)) for k in other for sigma in _substitutions(sample, seed)
    ]
    checks = [
        WitnessCheck(
            f"model falsifies {format_formula(separator)} under v = 0 and v = 1",
            2,
            not evaluate(Model(ALL_FALSE, relation), separator) and not evaluate(Model(ALL_TRUE, relation), separator),
        ),
        WitnessCheck(
            f"relation validates sampled instances of p ~> p^k for k in {list(other)}",
            len(instances),
            all(relation_validates(relation, phi) for phi in instances),
        ),
    ]
    params = {"t": list(first), "v": list(second), "sample": sample, "seed": seed}
    objects = {"separator": separator, "relation": relation, "index": n}
    return _report("kt_separation", params, objects, checks)


def _random_supersets(base: Relation, count: int, seed: int) -> List[Relation]:
    rng = make_rng(seed)
    supersets: List[Relation] = []
    for _ in range(count):
        extra = {
            FormulaPair(random_formula(rng, 2), random_formula(rng, 2)) for _ in range(int(rng.integers(1, 6)))
        }
        supersets.append(OverrideRelation(base, frozenset(extra), frozenset()))
    return supersets


def kt_completeness(t: Iterable[int], sample: int = 50, seed: int = 0) -> WitnessReport:
    """The least tower relation and its supersets validate the K-logic of ``t``."""

    indices = _positive_set(t, "T")
    least = TowerRelation(frozenset(indices))
    relations: List[Relation] = [least, *_random_supersets(least, 3, seed)]
    instances = [substitute(sigma, k_formula(k)) for k in indices for sigma in _substitutions(sample, seed)]
    outside = next(k for k in range(1, max(indices) + 2) if k not in indices)
    checks = [
        WitnessCheck(
            "least relation and sampled supersets validate sampled instances",
            len(instances) * len(relations),
            all(relation_validates(relation, phi) for relation in relations for phi in instances),
        ),
        WitnessCheck(
            f"least relation does not validate {format_formula(k_formula(outside))}",
            1,
            not relation_validates(least, k_formula(outside)),
        ),
    ]
    params = {"t": list(indices), "sample": sample, "seed": seed}
    return _report("kt_completeness", params, {"relation": least}, checks)


# The Lambda family -----------------------------------------------------------------

def lambda_incompleteness(s: Iterable[int], sample: int = 100, seed: int = 0) -> WitnessReport:
    """Instances of ``q ~> p^n`` force ``p ~> p`` but do not derive it."""

    indices = _positive_set(s, "S")
    critical = {2: P}
    forcing_ok = True
    for n in indices:
        instance = substitute(critical, lambda_formula(n))
        for relation in (WITHOUT_PP, EmptyRelation()):
            forcing_ok &= not evaluate(Model(P_TRUE, relation), instance)

    model = Model(ALL_FALSE, WITHOUT_PP)
    instances = [
        substitute(sigma, lambda_formula(n)) for n in indices for sigma in _substitutions(sample, seed, [critical])
    ]
    checks = [
        WitnessCheck(
            "q := p instances fail under v(p) = 1 without <p, p>",
            2 * len(indices),
            forcing_ok,
        ),
        WitnessCheck("model falsifies p ~> p", 1, not evaluate(model, PP)),
        WitnessCheck(
            "model satisfies sampled instances of q ~> p^n",
            len(instances),
            all(evaluate(model, phi) for phi in instances),
        ),
    ]
    params = {"s": list(indices), "sample": sample, "seed": seed}
    return _report("lambda_incompleteness", params, {"model": model}, checks)


def lambda_separation(first: Iterable[int], second: Iterable[int], sample: int = 50, seed: int = 0) -> WitnessReport:
    """A model separating the Lambda-logics of two different index sets, in either order."""

    left = _positive_set(first, "P")
    right = _positive_set(second, "T")
    k, other = _split(left, right)
    separator = lambda_formula(k)
    model = Model(ALL_FALSE, CofiniteRelation(frozenset({FormulaPair(Q, lambda_tower(P, Q, k))})))
    instances = [
        substitute(sigma, lambda_formula(n))
        for n in other
        for sigma in _substitutions(sample, seed, [{2: P}, {1: lambda_tower(P, Q, k)}])
    ]
    checks = [
        WitnessCheck(f"model falsifies {format_formula(separator)}", 1, not evaluate(model, separator)),
        WitnessCheck(
            f"model satisfies sampled instances of q ~> p^n for n in {list(other)}",
            len(instances),
            all(evaluate(model, phi) for phi in instances),
        ),
    ]
    params = {"first": list(left), "second": list(right), "sample": sample, "seed": seed}
    objects = {"separator": separator, "model": model, "index": k}
    return _report("lambda_separation", params, objects, checks)


# Inexpressibility ------------------------------------------------------------------

_VALUATIONS = [(bit_p, bit_q) for bit_p in (False, True) for bit_q in (False, True)]
_HALF = (1 << len(_VALUATIONS)) - 1
_ROWS = 2 * len(_VALUATIONS)


def _leaf_bits(phi: Formula) -> int:
    bits = 0
    for relation_row, relation in enumerate((FiniteRelation(frozenset({FormulaPair(TOP, BOTTOM)})), EmptyRelation())):
        for row, (bit_p, bit_q) in enumerate(_VALUATIONS):
            model = Model(Valuation.of(False, {1: bit_p, 2: bit_q}), relation)
            if evaluate(model, phi):
                bits |= 1 << (relation_row * len(_VALUATIONS) + row)
    return bits


def _combine_bits(connective: Connective, left: int, right: int, related_in_r0: bool) -> int:
    full = (1 << _ROWS) - 1
    if connective is Connective.AND:
        return left & right
    if connective is Connective.OR:
        return left | right
    if connective is Connective.IMP:
        return (~left | right) & full
    if connective is Connective.IFF:
        return ~(left ^ right) & full
    membership = _HALF if related_in_r0 else 0
    if connective is Connective.REL_IMP:
        return (~left | right) & full & membership
    return left & right & membership


def _kind(phi: Formula) -> Optional[str]:
    if phi == TOP:
        return "top"
    if phi == BOTTOM:
        return "bottom"
    return None


def _expresses(bits: int) -> bool:
    """Validated by the one-pair relation but not by the empty one."""
    return bits & _HALF == _HALF and (bits >> len(_VALUATIONS)) & _HALF != _HALF


def _explicit_layers(leaves: Sequence[Formula], bound: int) -> List[List[Formula]]:
    layers: List[List[Formula]] = [list(leaves)]
    for count in range(1, bound + 1):
        layer: List[Formula] = [Neg(phi) for phi in layers[count - 1]]
        for connective in Connective:
            for left_count in range(count):
                for left in layers[left_count]:
                    for right in layers[count - 1 - left_count]:
                        layer.append(Bin(connective, left, right))
        layers.append(layer)
    return layers


def inexpressibility_sweep(size_bound: int) -> WitnessReport:
    """No formula over p, q (with T and F) holds in exactly the relations containing ``<T, F>``.

    Formulas are grouped by their truth table over both relations plus
    whether they are literally ``T`` or ``F``, which is all that relatedness
    can observe here.  Small bounds are also enumerated formula by formula.
    """

    settings = get_settings()
    if size_bound > settings.inexpressibility_max_bound:
        raise CapacityError(
            f"size bound {size_bound} exceeds the configured maximum {settings.inexpressibility_max_bound}"
        )
    leaves = [P, Q, TOP, BOTTOM]
    classes: List[Dict[Tuple[int, Optional[str]], Formula]] = [{}]
    for leaf in leaves:
        classes[0].setdefault((_leaf_bits(leaf), _kind(leaf)), leaf)
    for count in range(1, size_bound + 1):
        layer: Dict[Tuple[int, Optional[str]], Formula] = {}
        for (bits, kind), phi in classes[count - 1].items():
            layer.setdefault((~bits & ((1 << _ROWS) - 1), "bottom" if kind == "top" else None), Neg(phi))
        for connective in Connective:
            for left_count in range(count):
                for (left_bits, left_kind), left in classes[left_count].items():
                    for (right_bits, right_kind), right in classes[count - 1 - left_count].items():
                        related = left_kind == "top" and right_kind == "bottom"
                        bits = _combine_bits(connective, left_bits, right_bits, related)
                        layer.setdefault((bits, None), Bin(connective, left, right))
        classes.append(layer)

    survivors = [phi for layer in classes for (bits, _), phi in layer.items() if _expresses(bits)]
    explicit_bound = min(size_bound, settings.explicit_sweep_bound)
    one_pair = FiniteRelation(frozenset({FormulaPair(TOP, BOTTOM)}))
    explicit = [phi for layer in _explicit_layers(leaves, explicit_bound) for phi in layer]
    explicit_survivors = [
        phi
        for phi in explicit
        if relation_validates(one_pair, phi) and not relation_validates(EmptyRelation(), phi)
    ]
    top_to_bottom = rel_imp(TOP, BOTTOM)
    checks = [
        WitnessCheck(
            f"no class of formulas with at most {size_bound} connectives expresses <T, F> membership",
            sum(len(layer) for layer in classes),
            not survivors,
        ),
        WitnessCheck(
            f"explicit enumeration up to {explicit_bound} connectives finds no expressing formula",
            len(explicit),
            not explicit_survivors,
        ),
        WitnessCheck(
            "T ~> F is not validated by the one-pair relation",
            1,
            not relation_validates(one_pair, top_to_bottom),
        ),
    ]
    objects: Dict[str, Any] = {"relation": one_pair, "survivors": survivors + explicit_survivors}
    return _report("inexpressibility_sweep", {"size_bound": size_bound}, objects, checks)


def undefinability_report(condition: str, base: Optional[Relation] = None) -> WitnessReport:
    """The undefinability counterexample for a condition, packaged as a report."""

    record = undefinability_counterexample(condition, EmptyRelation() if base is None else base)
    checks = [
        WitnessCheck(f"modified relation violates {condition}", 1, record.violation_witness is not None),
        WitnessCheck(
            "base and modified relations give S-set equivalent models",
            len(record.membership_checks),
            record.verified,
        ),
    ]
    objects = {
        "base": record.base,
        "modified": record.modified,
        "toggled_pair": record.toggled_pair,
        "violation_witness": record.violation_witness,
    }
    params = {"condition": condition} if base is None else {"condition": condition, "base": base}
    return _report("undefinability", params, objects, checks)


# Registry --------------------------------------------------------------------------

WITNESSES: Dict[str, Callable[..., WitnessReport]] = {
    "alpha_forces_pp": alpha_forces_pp,
    "alpha_nonderivability_model": alpha_nonderivability_model,
    "alpha_incompleteness": alpha_incompleteness,
    "kt_separation": kt_separation,
    "kt_completeness": kt_completeness,
    "lambda_incompleteness": lambda_incompleteness,
    "lambda_separation": lambda_separation,
    "inexpressibility_sweep": inexpressibility_sweep,
    "undefinability": undefinability_report,
}


def run_witness(lemma: str, params: Mapping[str, Any]) -> WitnessReport:
    runner = WITNESSES.get(lemma)
    if runner is None:
        raise PreconditionError(f"unknown witness {lemma!r}")
    return runner(**params)


def run_witnesses(requests: Sequence[Tuple[str, Mapping[str, Any]]], jobs: int = 1) -> List[WitnessReport]:
    """Run independent witnesses, optionally in threads; results keep request order."""

    if jobs > 1 and len(requests) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda request: run_witness(*request), requests))
    return [run_witness(lemma, params) for lemma, params in requests]


def verify_report(report: WitnessReport) -> bool:
    """Re-run a report from its parameters and compare every check outcome."""

    fresh = run_witness(report.lemma, report.params)
    same = [(check.description, check.passed) for check in fresh.checks] == [
        (check.description, check.passed) for check in report.checks
    ]
    if not same:
        logger.warning("Report for %s did not reproduce", report.lemma)
    return same and fresh.verdict == report.verdict

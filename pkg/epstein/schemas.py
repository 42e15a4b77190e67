"""JSON payloads for models, proofs, reports and results.

Payload shapes are validated with pydantic; the ``*_from_payload`` and
``*_to_payload`` helpers convert between payloads and domain values.  Formulas
travel as strings in the ASCII grammar.
"""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, Field, root_validator, validator

from .errors import ProofFormatError
from .interpolation import InterpolationResult, Pair, TraceStep
from .proofsys import (
    MP,
    SCHEMAS,
    BoundedMcs,
    Cpl,
    Justification,
    LambdaAxiom,
    Premise,
    Proof,
    ProofLine,
    ProofSystem,
    ProofVerdict,
    Schema,
    system_from_payload,
)
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
    sorted_pairs,
)
from .sset import CounterexampleRecord, MembershipVerdict
from .syntax import (
    Bin,
    Const,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    format_formula,
    letter_name,
    pair_sort_key,
    parse,
    sort_key,
)
from .witnesses import WitnessCheck, WitnessReport

__all__ = [
    "ValuationPayload",
    "RelationPayload",
    "ModelPayload",
    "JustificationPayload",
    "ProofLinePayload",
    "ProofPayload",
    "WitnessCheckPayload",
    "WitnessReportPayload",
    "McsPayload",
    "formula_from_text",
    "valuation_from_payload",
    "valuation_to_payload",
    "relation_from_payload",
    "relation_to_payload",
    "model_from_payload",
    "model_to_payload",
    "proof_from_payload",
    "proof_to_payload",
    "proof_verdict_to_payload",
    "membership_to_payload",
    "counterexample_to_payload",
    "pair_to_payload",
    "interpolation_to_payload",
    "report_to_payload",
    "report_from_payload",
    "mcs_to_payload",
    "mcs_from_payload",
    "object_to_payload",
]

LetterRef = Union[int, str]
TextPair = Tuple[str, str]


def _letter_index(value: LetterRef) -> int:
    if isinstance(value, int):
        if value < 0:
            raise ValueError("letter indices are natural numbers")
        return value
    phi = parse(value)
    if not isinstance(phi, Letter):
        raise ValueError(f"{value!r} is not a propositional letter")
    return phi.index


class ValuationPayload(BaseModel):
    default: int = Field(0, ge=0, le=1)
    true: List[LetterRef] = Field(default_factory=list)
    false: List[LetterRef] = Field(default_factory=list)

    class Config:
        extra = "forbid"

    @validator("true", "false", each_item=True)
    def _valid_letter(cls, value: LetterRef) -> LetterRef:
        _letter_index(value)
        return value

    @root_validator(skip_on_failure=True)
    def _no_overlap(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        true = {_letter_index(item) for item in values.get("true", [])}
        false = {_letter_index(item) for item in values.get("false", [])}
        if true & false:
            raise ValueError(f"letters listed as both true and false: {sorted(true & false)}")
        return values


RelationKind = Literal["finite", "cofinite", "full", "empty", "tower", "override"]


class RelationPayload(BaseModel):
    kind: RelationKind
    pairs: Optional[List[TextPair]] = None
    excluded: Optional[List[TextPair]] = None
    indices: Optional[List[int]] = None
    variant: Optional[Literal["r0t", "superset-closure"]] = None
    base: Optional["RelationPayload"] = None
    add: Optional[List[TextPair]] = None
    remove: Optional[List[TextPair]] = None

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def _fields_for_kind(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        kind = values.get("kind")
        if kind == "tower" and not values.get("indices"):
            raise ValueError("tower relations need a nonempty 'indices' list")
        if kind == "override" and values.get("base") is None:
            raise ValueError("override relations need a 'base' relation")
        return values


RelationPayload.update_forward_refs()


class ModelPayload(BaseModel):
    valuation: ValuationPayload = Field(default_factory=ValuationPayload)
    relation: RelationPayload = Field(default_factory=lambda: RelationPayload(kind="empty"))

    class Config:
        extra = "forbid"


class JustificationPayload(BaseModel):
    type: Literal["schema", "cpl", "premise", "lambda", "mp"]
    name: Optional[str] = None
    index: Optional[int] = None
    imp: Optional[int] = None
    ant: Optional[int] = None

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def _fields_for_type(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        kind = values.get("type")
        if kind == "schema" and not values.get("name"):
            raise ValueError("schema justification needs 'name'")
        if kind in ("premise", "lambda") and values.get("index") is None:
            raise ValueError(f"{kind} justification needs 'index'")
        if kind == "mp" and (values.get("imp") is None or values.get("ant") is None):
            raise ValueError("mp justification needs 'imp' and 'ant'")
        return values


class ProofLinePayload(BaseModel):
    formula: str
    just: JustificationPayload


class ProofPayload(BaseModel):
    system: Union[str, Dict[str, List[str]]] = "F"
    premises: List[str] = Field(default_factory=list)
    lines: List[ProofLinePayload] = Field(default_factory=list)


class WitnessCheckPayload(BaseModel):
    desc: str
    n: int = Field(..., ge=0)
    passed: bool = Field(..., alias="pass")

    class Config:
        allow_population_by_field_name = True


class WitnessReportPayload(BaseModel):
    lemma: str
    params: Dict[str, Any] = Field(default_factory=dict)
    objects: Dict[str, Any] = Field(default_factory=dict)
    checks: List[WitnessCheckPayload] = Field(default_factory=list)
    verdict: bool


class McsPayload(BaseModel):
    system: str = "F"
    universe: List[str]
    members: List[str]

    @root_validator(skip_on_failure=True)
    def _members_in_universe(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        outside = set(values.get("members", [])) - set(values.get("universe", []))
        if outside:
            raise ValueError(f"members outside the universe: {sorted(outside)}")
        return values


# Formulas and models ---------------------------------------------------------------

def formula_from_text(text: str) -> Formula:
    return parse(text)


def _formula_list(formulas) -> List[str]:
    return [format_formula(phi) for phi in sorted(formulas, key=sort_key)]


def _pairs_from(items: Optional[List[TextPair]]) -> frozenset:
    return frozenset(FormulaPair(parse(first), parse(second)) for first, second in items or [])


def _pairs_to(pairs) -> List[List[str]]:
    return [[format_formula(first), format_formula(second)] for first, second in sorted_pairs(pairs)]


def valuation_from_payload(payload: Union[ValuationPayload, Mapping[str, Any]]) -> Valuation:
    data = payload if isinstance(payload, ValuationPayload) else ValuationPayload.parse_obj(payload)
    values = {_letter_index(item): True for item in data.true}
    values.update({_letter_index(item): False for item in data.false})
    return Valuation.of(bool(data.default), values)


def valuation_to_payload(valuation: Valuation) -> Dict[str, Any]:
    flipped = [letter_name(index) for index in sorted(valuation.exceptions)]
    if valuation.default:
        return {"default": 1, "false": flipped}
    return {"default": 0, "true": flipped}


def relation_from_payload(payload: Union[RelationPayload, Mapping[str, Any]]) -> Relation:
    data = payload if isinstance(payload, RelationPayload) else RelationPayload.parse_obj(payload)
    if data.kind == "finite":
        return FiniteRelation(_pairs_from(data.pairs))
    if data.kind == "cofinite":
        return CofiniteRelation(_pairs_from(data.excluded))
    if data.kind == "full":
        return FullRelation()
    if data.kind == "empty":
        return EmptyRelation()
    if data.kind == "tower":
        return TowerRelation(frozenset(data.indices or []), data.variant or "r0t")
    return OverrideRelation(relation_from_payload(data.base), _pairs_from(data.add), _pairs_from(data.remove))


def relation_to_payload(relation: Relation) -> Dict[str, Any]:
    if isinstance(relation, FiniteRelation):
        return {"kind": "finite", "pairs": _pairs_to(relation.pairs)}
    if isinstance(relation, CofiniteRelation):
        return {"kind": "cofinite", "excluded": _pairs_to(relation.excluded)}
    if isinstance(relation, FullRelation):
        return {"kind": "full"}
    if isinstance(relation, EmptyRelation):
        return {"kind": "empty"}
    if isinstance(relation, TowerRelation):
        return {"kind": "tower", "indices": sorted(relation.indices), "variant": relation.variant}
    return {
        "kind": "override",
        "base": relation_to_payload(relation.base),
        "add": _pairs_to(relation.add),
        "remove": _pairs_to(relation.remove),
    }


def model_from_payload(payload: Union[ModelPayload, Mapping[str, Any]]) -> Model:
    data = payload if isinstance(payload, ModelPayload) else ModelPayload.parse_obj(payload)
    return Model(valuation_from_payload(data.valuation), relation_from_payload(data.relation))


def model_to_payload(model: Model) -> Dict[str, Any]:
    return {"valuation": valuation_to_payload(model.valuation), "relation": relation_to_payload(model.relation)}


# Proofs ----------------------------------------------------------------------------

def _justification_from(data: JustificationPayload) -> Justification:
    if data.type == "schema":
        if data.name not in SCHEMAS:
            raise ProofFormatError(f"unknown schema {data.name!r}; expected one of {sorted(SCHEMAS)}")
        return Schema(data.name)
    if data.type == "cpl":
        return Cpl()
    if data.type == "premise":
        return Premise(data.index)
    if data.type == "lambda":
        return LambdaAxiom(data.index)
    return MP(data.imp, data.ant)


def _justification_to(just: Justification) -> Dict[str, Any]:
    if isinstance(just, Schema):
        return {"type": "schema", "name": just.name}
    if isinstance(just, Cpl):
        return {"type": "cpl"}
    if isinstance(just, Premise):
        return {"type": "premise", "index": just.index}
    if isinstance(just, LambdaAxiom):
        return {"type": "lambda", "index": just.index}
    return {"type": "mp", "imp": just.imp, "ant": just.ant}


def proof_from_payload(payload: Union[ProofPayload, Mapping[str, Any]]) -> Tuple[ProofSystem, Proof]:
    data = payload if isinstance(payload, ProofPayload) else ProofPayload.parse_obj(payload)
    system = system_from_payload(data.system)
    premises = tuple(parse(text) for text in data.premises)
    lines = tuple(ProofLine(parse(line.formula), _justification_from(line.just)) for line in data.lines)
    return system, Proof(premises, lines)


def proof_to_payload(system: ProofSystem, proof: Proof) -> Dict[str, Any]:
    if system.name == "Custom":
        system_field: Union[str, Dict[str, List[str]]] = {
            "custom_axioms": [format_formula(phi) for phi in system.extra]
        }
    else:
        system_field = system.name
    return {
        "system": system_field,
        "premises": [format_formula(phi) for phi in proof.premises],
        "lines": [
            {"formula": format_formula(line.formula), "just": _justification_to(line.justification)}
            for line in proof.lines
        ],
    }


def proof_verdict_to_payload(verdict: ProofVerdict) -> Dict[str, Any]:
    return {
        "ok": verdict.ok,
        "lines": [
            {"line": line.index, "ok": line.ok, **({"reason": line.reason} if line.reason else {})}
            for line in verdict.lines
        ],
    }


# Results ---------------------------------------------------------------------------

def membership_to_payload(verdict: MembershipVerdict) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"verdict": verdict.status.value}
    if verdict.reason:
        payload["reason"] = verdict.reason
    return payload


def counterexample_to_payload(record: CounterexampleRecord) -> Dict[str, Any]:
    return {
        "condition": record.condition,
        "base": relation_to_payload(record.base),
        "modified": relation_to_payload(record.modified),
        "toggled_pair": [format_formula(phi) for phi in record.toggled_pair],
        "violation_witness": [format_formula(phi) for phi in record.violation_witness],
        "membership_checks": [
            {"valuation": valuation_to_payload(valuation), "verdict": verdict.status.value}
            for valuation, verdict in record.membership_checks
        ],
        "verified": record.verified,
    }


def pair_to_payload(pair: Pair) -> Dict[str, List[str]]:
    return {"gamma": _formula_list(pair.gamma), "sigma": _formula_list(pair.sigma)}


def _trace_step(step: TraceStep) -> Dict[str, Any]:
    return {"pair": pair_to_payload(step.pair), "branch": step.branch, "separator_found": step.separator_found}


def interpolation_to_payload(result: InterpolationResult) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "interpolant": format_formula(result.interpolant),
        "checks": {"left": result.left_check, "right": result.right_check, "vars": result.var_check},
        "trace": [_trace_step(step) for step in result.trace],
    }
    if result.deviation:
        payload["deviation"] = result.deviation
    return payload


_RELATION_TYPES = (FiniteRelation, CofiniteRelation, FullRelation, EmptyRelation, TowerRelation, OverrideRelation)
_FORMULA_TYPES = (Letter, Neg, Bin, Const)


def object_to_payload(value: Any) -> Any:
    """JSON-ready rendering of the values witnesses record."""

    if isinstance(value, Model):
        return model_to_payload(value)
    if isinstance(value, _RELATION_TYPES):
        return relation_to_payload(value)
    if isinstance(value, Valuation):
        return valuation_to_payload(value)
    if isinstance(value, _FORMULA_TYPES):
        return format_formula(value)
    if isinstance(value, FormulaPair):
        return [format_formula(value.first), format_formula(value.second)]
    if isinstance(value, Mapping):
        return {
            (letter_name(key) if isinstance(key, int) else str(key)): object_to_payload(item)
            for key, item in value.items()
        }
    if isinstance(value, (set, frozenset)):
        return [object_to_payload(item) for item in sorted(value, key=_unordered_key)]
    if isinstance(value, (list, tuple)):
        return [object_to_payload(item) for item in value]
    return value


def _unordered_key(item: Any) -> tuple:
    if isinstance(item, FormulaPair):
        return (0, pair_sort_key(item))
    if isinstance(item, _FORMULA_TYPES):
        return (1, sort_key(item))
    return (2, repr(item))


_RELATION_PARAMS = ("relation", "base")


def report_to_payload(report: WitnessReport) -> Dict[str, Any]:
    return {
        "lemma": report.lemma,
        "params": object_to_payload(report.params),
        "objects": object_to_payload(report.objects),
        "checks": [
            {"desc": check.description, "n": check.samples, "pass": check.passed} for check in report.checks
        ],
        "verdict": report.verdict,
    }


def report_from_payload(payload: Union[WitnessReportPayload, Mapping[str, Any]]) -> WitnessReport:
    """Rebuild a report; relation parameters are decoded so the report can be re-run."""

    data = payload if isinstance(payload, WitnessReportPayload) else WitnessReportPayload.parse_obj(payload)
    params = dict(data.params)
    for key in _RELATION_PARAMS:
        if isinstance(params.get(key), Mapping):
            params[key] = relation_from_payload(params[key])
    checks = tuple(WitnessCheck(check.desc, check.n, check.passed) for check in data.checks)
    return WitnessReport(data.lemma, params, dict(data.objects), checks)


def mcs_to_payload(mcs: BoundedMcs) -> Dict[str, Any]:
    return {"system": mcs.system, "universe": _formula_list(mcs.universe), "members": _formula_list(mcs.members)}


def mcs_from_payload(payload: Union[McsPayload, Mapping[str, Any]]) -> BoundedMcs:
    data = payload if isinstance(payload, McsPayload) else McsPayload.parse_obj(payload)
    universe = frozenset(parse(text) for text in data.universe)
    members = frozenset(parse(text) for text in data.members)
    return BoundedMcs(universe, members, data.system)

import json
import os
import sys

import pytest
from pydantic import ValidationError

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.errors import FormulaSyntaxError
from epstein.proofsys import Cpl, Proof, ProofLine, bounded_lindenbaum, check_proof, proof_system
from epstein.schemas import (
    ModelPayload,
    McsPayload,
    counterexample_to_payload,
    mcs_from_payload,
    mcs_to_payload,
    model_from_payload,
    model_to_payload,
    object_to_payload,
    proof_from_payload,
    proof_to_payload,
    proof_verdict_to_payload,
    relation_from_payload,
    relation_to_payload,
    report_from_payload,
    report_to_payload,
    valuation_from_payload,
    valuation_to_payload,
)
from epstein.semantics import (
    CofiniteRelation,
    EmptyRelation,
    FiniteRelation,
    OverrideRelation,
    TowerRelation,
    Valuation,
    pairs_of,
)
from epstein.sset import undefinability_counterexample
from epstein.syntax import FormulaPair, Letter, parse
from epstein.witnesses import kt_separation, verify_report

P, Q = Letter(1), Letter(2)


def test_valuation_payload_accepts_names_and_indices():
    valuation = valuation_from_payload({"default": 0, "true": ["p", 4, "p7"]})
    assert valuation.value(1) and valuation.value(4) and valuation.value(7)
    assert not valuation.value(2)
    assert valuation_to_payload(valuation) == {"default": 0, "true": ["p", "s", "p7"]}


def test_valuation_payload_with_true_default():
    payload = valuation_to_payload(Valuation.of(True, {2: False}))
    assert payload == {"default": 1, "false": ["q"]}
    assert valuation_from_payload(payload) == Valuation.of(True, {2: False})


def test_valuation_payload_rejects_overlap_and_non_letters():
    with pytest.raises(ValidationError):
        valuation_from_payload({"true": ["p"], "false": [1]})
    with pytest.raises(ValidationError):
        valuation_from_payload({"true": ["p & q"]})
    with pytest.raises(ValidationError):
        valuation_from_payload({"default": 2})


def test_relation_payload_kinds():
    finite = relation_from_payload({"kind": "finite", "pairs": [["p", "q"], ["q", "p"]]})
    assert finite == FiniteRelation(pairs_of([(P, Q), (Q, P)]))
    assert relation_to_payload(finite) == {"kind": "finite", "pairs": [["p", "q"], ["q", "p"]]}
    tower = relation_from_payload({"kind": "tower", "indices": [2, 1]})
    assert tower == TowerRelation(frozenset({1, 2}))
    assert relation_to_payload(tower) == {"kind": "tower", "indices": [1, 2], "variant": "r0t"}


def test_override_payload_nests_a_base():
    payload = {
        "kind": "override",
        "base": {"kind": "cofinite", "excluded": [["p", "p"]]},
        "add": [["p", "p"]],
        "remove": [["T", "F"]],
    }
    relation = relation_from_payload(payload)
    assert isinstance(relation, OverrideRelation)
    assert relation.base == CofiniteRelation(pairs_of([(P, P)]))
    assert FormulaPair(P, P) in relation
    assert relation_from_payload(relation_to_payload(relation)) == relation


def test_relation_payload_requires_kind_fields():
    with pytest.raises(ValidationError):
        relation_from_payload({"kind": "tower"})
    with pytest.raises(ValidationError):
        relation_from_payload({"kind": "override"})
    with pytest.raises(ValidationError):
        relation_from_payload({"kind": "transitive"})


def test_relation_payload_reports_formula_errors():
    with pytest.raises(FormulaSyntaxError):
        relation_from_payload({"kind": "finite", "pairs": [["p ~>", "q"]]})


def test_model_payload_defaults_and_files(test_data_dir):
    assert ModelPayload().relation.kind == "empty"
    with open(os.path.join(test_data_dir, "true_p_toggled.json"), "r", encoding="utf-8") as f:
        model = model_from_payload(json.load(f))
    assert model.valuation.value(1)
    assert FormulaPair(P, Q) in model.relation
    assert model_from_payload(model_to_payload(model)) == model


def test_proof_payload_round_trip_keeps_custom_axioms():
    system = proof_system("F", [parse("q ~> (p -> (q ~> p))")])
    proof = Proof(lines=(ProofLine(parse("p | !p"), Cpl()),))
    payload = proof_to_payload(system, proof)
    assert payload["system"] == {"custom_axioms": ["q ~> (p -> (q ~> p))"]}
    assert proof_from_payload(payload) == (system, proof)


def test_proof_verdict_payload_lists_reasons():
    proof = Proof(lines=(ProofLine(parse("p | !p"), Cpl()), ProofLine(P, Cpl())))
    payload = proof_verdict_to_payload(check_proof(proof_system("F"), proof))
    assert payload["ok"] is False
    assert payload["lines"][0] == {"line": 0, "ok": True}
    assert "tautology" in payload["lines"][1]["reason"]


def test_counterexample_payload():
    payload = counterexample_to_payload(undefinability_counterexample("symmetry", EmptyRelation()))
    assert payload["toggled_pair"] == ["p0 | !p0", "!(p0 | !p0)"]
    assert payload["violation_witness"] == ["!(p0 | !p0)", "p0 | !p0"]
    assert payload["verified"] is True
    assert len(payload["membership_checks"]) == 3


def test_object_payload_is_sorted_and_named():
    value = {"pairs": frozenset({FormulaPair(Q, P), FormulaPair(P, Q)}), 2: P, "n": 3}
    payload = object_to_payload(value)
    assert payload == {"pairs": [["p", "q"], ["q", "p"]], "q": "p", "n": 3}


def test_report_payload_reruns():
    report = kt_separation([1], [2], sample=3)
    payload = json.loads(json.dumps(report_to_payload(report)))
    assert payload["verdict"] is True
    assert payload["checks"][0]["pass"] is True
    rebuilt = report_from_payload(payload)
    assert rebuilt.params == report.params
    assert verify_report(rebuilt)


def test_mcs_payload():
    mcs = bounded_lindenbaum(proof_system("F"), [parse("p ~> q")])
    payload = mcs_to_payload(mcs)
    assert mcs_from_payload(payload) == mcs
    with pytest.raises(ValidationError):
        McsPayload(universe=["p"], members=["q"])

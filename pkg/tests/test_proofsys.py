import json
import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.errors import PreconditionError, ProofFormatError, UniverseError
from epstein.generators import make_rng, random_formula
from epstein.proofsys import (
    MP,
    Cpl,
    ConditionStatus,
    Premise,
    Proof,
    ProofLine,
    Schema,
    bounded_lindenbaum,
    canonical_adequacy,
    canonical_model,
    check_proof,
    condition_check,
    is_axiom_instance,
    proof_system,
    sample_soundness,
    schema_instances,
    universe_closure,
)
from epstein.schemas import proof_from_payload
from epstein.semantics import CofiniteRelation, EmptyRelation, FiniteRelation, TowerRelation, pairs_of
from epstein.syntax import FormulaPair, Letter, neg, parse, rel_imp

P, Q = Letter(1), Letter(2)
PROOF_PATH = os.path.join(ROOT, "data", "proofs", "rel_conj_implies_imp.json")


def load_payload():
    with open(PROOF_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def mutated(lines_index, **changes):
    payload = load_payload()
    payload["lines"][lines_index].update(changes)
    return proof_from_payload(payload)


def test_five_line_proof_is_accepted():
    system, proof = proof_from_payload(load_payload())
    verdict = check_proof(system, proof)
    assert verdict.ok
    assert proof.conclusion == parse("(p ^ q) -> (p -> q)")


def test_parallel_check_matches_sequential():
    system, proof = proof_from_payload(load_payload())
    assert check_proof(system, proof, jobs=3) == check_proof(system, proof)


def test_wrong_mp_index_is_rejected():
    system, proof = mutated(4, just={"type": "mp", "imp": 3, "ant": 0})
    verdict = check_proof(system, proof)
    assert not verdict.ok
    assert [line.index for line in verdict.errors] == [4]


def test_wrong_schema_name_is_rejected():
    system, proof = mutated(0, just={"type": "schema", "name": "A1"})
    verdict = check_proof(system, proof)
    assert [line.index for line in verdict.errors] == [0]
    assert "A1" in verdict.errors[0].reason


def test_corrupted_formula_is_rejected():
    system, proof = mutated(4, formula="(p ^ q) -> (q -> p)")
    assert not check_proof(system, proof).ok


def test_premise_index_out_of_range_is_rejected():
    system, proof = mutated(1, just={"type": "premise", "index": 0})
    verdict = check_proof(system, proof)
    assert verdict.errors[0].index == 1
    assert "out of range" in verdict.errors[0].reason


def test_cpl_on_non_tautology_is_rejected():
    system, proof = mutated(1, just={"type": "cpl"})
    verdict = check_proof(system, proof)
    assert [line.index for line in verdict.errors] == [1]


def test_unknown_schema_name_is_a_format_error():
    with pytest.raises(ProofFormatError):
        mutated(0, just={"type": "schema", "name": "K"})


def test_schema_outside_system_is_a_line_error():
    phi = parse("(p ~> q) -> ((q ~> p) | !(q -> p))")
    proof = Proof(lines=(ProofLine(phi, Schema("s")),))
    assert not check_proof(proof_system("F"), proof).ok
    assert check_proof(proof_system("FS"), proof).ok


def test_premises_and_modus_ponens():
    proof = Proof(
        premises=(P, parse("p -> q")),
        lines=(ProofLine(P, Premise(0)), ProofLine(parse("p -> q"), Premise(1)), ProofLine(Q, MP(1, 0))),
    )
    assert check_proof(proof_system("F"), proof).ok


def test_mp_must_point_backwards():
    proof = Proof(lines=(ProofLine(parse("p | !p"), Cpl()), ProofLine(P, MP(1, 0))))
    verdict = check_proof(proof_system("F"), proof)
    assert "earlier line" in verdict.errors[0].reason


def test_lambda_axiom_system():
    system = proof_system("F", [parse("q ~> (p -> (q ~> p))")])
    assert system.name == "Custom"
    assert is_axiom_instance(system, parse("(r ~> s) -> (r -> s)"))[0] == "A1"
    with pytest.raises(PreconditionError):
        proof_system("K")


def test_condition_check_on_finite_relations():
    symmetric = FiniteRelation(pairs_of([(P, Q), (Q, P)]))
    assert condition_check(symmetric, "symmetry").holds
    lopsided = condition_check(FiniteRelation(pairs_of([(P, Q)])), "symmetry")
    assert lopsided.status is ConditionStatus.FAILS
    assert lopsided.witness == FormulaPair(Q, P)
    negative = condition_check(FiniteRelation(pairs_of([(neg(P), Q)])), "n-condition")
    assert negative.witness == FormulaPair(P, Q)


def test_condition_check_on_cofinite_relations():
    assert condition_check(CofiniteRelation(pairs_of([(P, Q), (Q, P)])), "symmetry").holds
    verdict = condition_check(CofiniteRelation(pairs_of([(P, Q)])), "symmetry")
    assert verdict.witness == FormulaPair(P, Q)
    assert condition_check(CofiniteRelation(pairs_of([(P, Q)])), "n-condition").status is ConditionStatus.FAILS


def test_condition_check_unknown_for_towers():
    assert condition_check(TowerRelation(frozenset({1})), "symmetry").status is ConditionStatus.UNKNOWN
    assert condition_check(EmptyRelation(), "n-condition").holds


def test_universe_closure_adds_relatedness_companions():
    universe = universe_closure([parse("!p ^ q")], proof_system("FSN"))
    for text in ("!p ~> q", "q ~> !p", "p ~> q", "q ~> p", "!(p ~> q)"):
        assert parse(text) in universe
    plain = universe_closure([parse("p ^ q")])
    assert parse("p ~> q") in plain
    assert parse("q ~> p") not in plain


def test_schema_instances_are_anchored_in_the_universe():
    universe = universe_closure([parse("p ~> q")])
    instances = schema_instances(proof_system("F"), universe)
    assert parse("(p ~> q) -> (p -> q)") in instances


def test_lindenbaum_and_canonical_model_agree():
    system = proof_system("F")
    mcs = bounded_lindenbaum(system, [parse("p ~> q"), neg(Q)])
    assert mcs is not None
    assert parse("p ~> q") in mcs.members
    assert neg(P) in mcs.members
    assert canonical_adequacy(mcs) == []
    assert FormulaPair(P, Q) in canonical_model(mcs).relation


def test_lindenbaum_detects_inconsistency():
    assert bounded_lindenbaum(proof_system("F"), [P, neg(P)]) is None
    assert bounded_lindenbaum(proof_system("F"), [parse("p ~> q"), P, neg(Q)]) is None


def test_symmetric_canonical_model():
    system = proof_system("FS")
    mcs = bounded_lindenbaum(system, [parse("p ~> q"), Q])
    assert mcs is not None
    model = canonical_model(mcs, "S")
    assert condition_check(model.relation, "symmetry").holds
    assert canonical_adequacy(mcs, "S") == []


def test_negative_canonical_model():
    system = proof_system("FN")
    mcs = bounded_lindenbaum(system, [parse("!p ~> q")])
    assert mcs is not None
    model = canonical_model(mcs, "N")
    assert condition_check(model.relation, "n-condition").holds
    assert canonical_adequacy(mcs, "N") == []


@pytest.mark.parametrize(
    "name, mode, conditions",
    [
        ("FS", "S", ("symmetry",)),
        ("FN", "N", ("n-condition",)),
        ("FSN", "SN", ("symmetry", "n-condition")),
    ],
)
def test_canonical_model_meets_system_condition(name, mode, conditions):
    system = proof_system(name)
    rng = make_rng(5)
    starts = [[parse("!p ~> q"), parse("q ~> !r")]] + [[random_formula(rng, 2)] for _ in range(6)]
    built = 0
    for sigma in starts:
        mcs = bounded_lindenbaum(system, sigma)
        if mcs is None:
            continue
        built += 1
        assert canonical_adequacy(mcs, mode) == []
        relation = canonical_model(mcs, mode).relation
        for condition in conditions:
            assert condition_check(relation, condition).holds, (condition, sigma)
    assert built > 0


def test_lindenbaum_rejects_open_universes():
    with pytest.raises(UniverseError):
        bounded_lindenbaum(proof_system("F"), [P], universe=[parse("p ~> q")])
    with pytest.raises(UniverseError):
        bounded_lindenbaum(proof_system("F"), [Q], universe=[P, neg(P)])


def test_canonical_mode_is_checked():
    mcs = bounded_lindenbaum(proof_system("F"), [rel_imp(P, P)])
    with pytest.raises(PreconditionError):
        canonical_model(mcs, "T")


@pytest.mark.parametrize("name", ["F", "FS", "FN", "FSN"])
def test_sampled_instances_hold_under_the_system_condition(name):
    assert sample_soundness(proof_system(name), relations=20, instances=5, valuations=2, seed=7) == []

import os
import sys

import pytest
import yaml
from hypothesis import given, settings

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.errors import PreconditionError
from epstein.interpolation import (
    Pair,
    find_separator,
    interpolate,
    model_from_pair,
    realisable,
    rel_imp_interpolation_check,
    rel_imp_noninterpolation_demo,
    saturate,
    separates,
)
from epstein.semantics import CofiniteRelation, EmptyRelation, evaluate, models_all
from epstein.syntax import FormulaPair, Letter, neg, parse, rel_conj, rel_imp, vars_of
from epstein.translation import f_valid
from strategies import formulas

P, Q, R = Letter(1), Letter(2), Letter(3)
CORPUS_PATH = os.path.join(ROOT, "data", "interpolation_corpus.yaml")


def corpus():
    with open(CORPUS_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def test_relatedness_conjunction_interpolant():
    result = interpolate(parse("p ^ q"), parse("p | s"), 3)
    assert result is not None
    assert result.ok
    assert vars_of(result.interpolant) <= {1}
    assert [step.branch for step in result.trace] == ["root"]


def test_detachment_interpolant_uses_shared_letters():
    result = interpolate(parse("(p ~> q) & p"), parse("q | r"), 3)
    assert result.ok
    assert vars_of(result.interpolant) <= {2}


CORPUS = corpus()


@pytest.mark.parametrize("entry", CORPUS["entries"], ids=lambda entry: entry["name"])
def test_corpus_entries_interpolate(entry):
    result = interpolate(parse(entry["left"]), parse(entry["right"]), CORPUS["depth"])
    assert result is not None
    assert result.left_check and result.right_check and result.var_check


def test_invalid_implication_is_a_precondition_error():
    with pytest.raises(PreconditionError):
        interpolate(P, Q, 2)


def test_constant_interpolant_records_deviation():
    result = interpolate(parse("p & !p"), Q, 2)
    assert result.ok
    assert vars_of(result.interpolant) == frozenset()
    assert "constants" in result.deviation


def test_realisable_pairs():
    assert realisable(Pair.of([P], [P])) is None
    model = realisable(Pair.of([P], [Q]))
    assert model is not None
    assert evaluate(model, P) and not evaluate(model, Q)


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_unrealisable_right_side_means_valid(phi):
    assert (realisable(Pair.of([], [phi])) is None) == f_valid(phi)


def test_separates_checks_both_sides_and_letters():
    t = Pair.of([parse("p & q")], [parse("p | r")])
    assert separates(P, t)
    assert not separates(Q, t)
    assert not separates(parse("p & q"), t)


def test_find_separator():
    t = Pair.of([parse("p & q")], [parse("p | r")])
    chi = find_separator(t, 1)
    assert chi is not None
    assert separates(chi, t)
    assert find_separator(Pair.of([P], [Q]), 2) is None


def test_saturation_trace_covers_proper_subformulas():
    t, trace = saturate(parse("p ^ q"), parse("p | s"), 2)
    assert len(trace) == 4
    assert {step.branch for step in trace} <= {"gamma", "gamma-negated", "sigma", "sigma-negated"}
    assert parse("p ^ q") in t.gamma
    assert parse("p | s") in t.sigma


def test_positive_model_reading():
    t = Pair.of([P, rel_imp(P, Q)], [neg(Q)])
    model = model_from_pair(t)
    assert FormulaPair(P, Q) in model.relation
    assert models_all(model, [P, Q, rel_imp(P, Q)])


def test_complementary_model_reading():
    pq_imp, pq_conj = rel_imp(P, Q), rel_conj(P, Q)
    t = Pair.of([pq_imp, neg(pq_imp)], [pq_conj, neg(pq_conj)])
    model = model_from_pair(t, "complementary")
    assert model.relation == CofiniteRelation(frozenset({FormulaPair(P, Q)}))
    with pytest.raises(PreconditionError):
        model_from_pair(t, "negative")


def test_rel_imp_fragment_has_no_theorems():
    model = rel_imp_noninterpolation_demo(samples=10, seed=2)
    assert isinstance(model.relation, EmptyRelation)
    assert not evaluate(model, rel_imp(R, R))
    check = rel_imp_interpolation_check(P, P)
    assert check.holds_vacuously

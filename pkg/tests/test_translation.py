import os
import sys

from hypothesis import given, settings
from hypothesis import strategies as st

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.generators import make_rng, random_formula, random_model
from epstein.semantics import evaluate
from epstein.syntax import Letter, implies, parse
from epstein.translation import (
    CplAtom,
    LetterAtom,
    PairAtom,
    assignment_of,
    atoms,
    cpl_evaluate,
    cpl_not,
    f_consequence,
    f_countermodel,
    f_valid,
    format_cpl,
    is_cpl_instance,
    model_from_assignment,
    sat,
    sat_all,
    skeleton,
    translate,
)
from strategies import formulas, models_for

P, Q = Letter(1), Letter(2)


def test_translation_of_relatedness_implication():
    translated = translate(parse("p ~> q"))
    assert format_cpl(translated) == "(p -> q) & a<p, q>"
    assert atoms(translated) == (LetterAtom(1), LetterAtom(2), PairAtom(P, Q))


def test_translation_of_relatedness_conjunction():
    assert format_cpl(translate(parse("p ^ q"))) == "(p & q) & a<p, q>"


def test_axioms_are_valid():
    assert f_valid(parse("(p ~> q) -> (p -> q)"))
    assert f_valid(parse("(p ^ q) <-> ((p ~> q) & (p & q))"))


def test_self_relatedness_is_not_valid():
    countermodel = f_countermodel(parse("p ~> p"))
    assert countermodel is not None
    assert not evaluate(countermodel, parse("p ~> p"))


def test_countermodel_is_absent_for_theorems():
    assert f_countermodel(parse("(p ^ q) -> (p -> q)")) is None


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_countermodels_reverify(phi):
    countermodel = f_countermodel(phi)
    if countermodel is None:
        assert f_valid(phi)
    else:
        assert not evaluate(countermodel, phi)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_evaluation_agrees_with_translation(data):
    phi = data.draw(formulas)
    model = data.draw(models_for(phi))
    translated = translate(phi)
    assert evaluate(model, phi) == cpl_evaluate(assignment_of(model, atoms(translated)), translated)


def test_seeded_translation_agreement():
    rng = make_rng(0)
    for _ in range(200):
        phi = random_formula(rng, 5)
        model = random_model(rng, [phi], any_representation=True)
        translated = translate(phi)
        assert evaluate(model, phi) == cpl_evaluate(assignment_of(model, atoms(translated)), translated)


def test_consequence():
    assert f_consequence([parse("p ~> q"), parse("p")], Q)
    assert not f_consequence([parse("p -> q")], parse("p ~> q"))
    assert f_consequence([], parse("p | !p"))


def test_sat_all_and_model_extraction():
    formulas_ = [translate(parse("p ~> q")), cpl_not(CplAtom(LetterAtom(1)))]
    assignment = sat_all(formulas_)
    assert assignment is not None
    model = model_from_assignment(assignment)
    assert evaluate(model, parse("p ~> q"))
    assert not evaluate(model, P)


def test_unsatisfiable_set():
    atom = CplAtom(LetterAtom(1))
    assert sat_all([atom, cpl_not(atom)]) is None
    assert sat(atom) is not None


def test_skeleton_treats_relatedness_subformulas_as_atoms():
    assert is_cpl_instance(parse("(p ~> q) | !(p ~> q)"))
    assert is_cpl_instance(parse("(p ^ q) -> (p ^ q)"))
    assert not is_cpl_instance(parse("(p ~> q) -> (p -> q)"))
    assert format_cpl(skeleton(parse("(p ~> q) & r"))) == "[p ~> q] & [r]"


def test_cpl_instances_are_valid():
    for text in ("(p ~> q) | !(p ~> q)", "((p ^ q) -> r) -> (!r -> !(p ^ q))"):
        assert f_valid(parse(text))


def test_material_implication_is_not_relatedness():
    assert not f_valid(implies(parse("p -> q"), parse("p ~> q")))

import os
import sys

import pytest
from hypothesis import given, settings

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.errors import FormulaSyntaxError
from epstein.syntax import (
    BOTTOM,
    TOP,
    Bin,
    Connective,
    Const,
    Letter,
    Neg,
    compose_substitutions,
    conj,
    connective_count,
    disj,
    expand_constants,
    format_formula,
    has_constants,
    implies,
    k_formula,
    lambda_formula,
    lambda_tower,
    match_schema,
    neg,
    neg_tower,
    parse,
    rel_conj,
    rel_imp,
    size,
    sort_key,
    subformulas,
    substitute,
    vars_of,
)
from strategies import formulas, substitutions

P, Q, R = Letter(1), Letter(2), Letter(3)


def test_parse_relatedness_implication():
    assert parse("p ~> q") == Bin(Connective.REL_IMP, P, Q)


def test_parse_precedence_negation_binds_tightest():
    assert parse("!p & q") == conj(neg(P), Q)


def test_conjunction_and_relatedness_conjunction_share_a_tier():
    assert parse("!p & q ^ r") == rel_conj(conj(neg(P), Q), R)
    assert parse("p ^ q & r") == conj(rel_conj(P, Q), R)


def test_implications_are_right_associative():
    assert parse("p -> q -> r") == implies(P, implies(Q, R))
    assert parse("p ~> q -> r") == rel_imp(P, implies(Q, R))


def test_iff_is_loosest():
    assert parse("p -> q <-> r") == Bin(Connective.IFF, implies(P, Q), R)


def test_numbered_letters_and_aliases():
    assert parse("p0") == Letter(0)
    assert parse("p1") == parse("p")
    assert parse("t") == Letter(5)
    assert parse("p12") == Letter(12)


def test_constant_sugar():
    assert parse("T") == TOP
    assert parse("F") == BOTTOM
    assert TOP == disj(Letter(0), neg(Letter(0)))


def test_parse_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as excinfo:
        parse("p & & q")
    assert excinfo.value.position == 4
    assert "position 4" in str(excinfo.value)


def test_parse_error_at_end_of_input():
    with pytest.raises(FormulaSyntaxError) as excinfo:
        parse("p ->")
    assert excinfo.value.position == len("p ->")


def test_syntax_error_is_a_value_error():
    with pytest.raises(ValueError):
        parse("p ~>> q")


def test_print_minimal_parentheses():
    assert format_formula(parse("(p ^ q) -> (p | s)")) == "p ^ q -> p | s"
    assert format_formula(parse("(p -> q) -> r")) == "(p -> q) -> r"
    assert format_formula(parse("!(p & q)")) == "!(p & q)"


def test_print_parenthesises_mixed_implication_chains():
    phi = rel_imp(P, implies(Q, R))
    assert format_formula(phi) == "p ~> (q -> r)"
    assert parse(format_formula(phi)) == phi


def test_print_constants():
    assert format_formula(conj(Const(True), Const(False))) == "T & F"


@settings(max_examples=200)
@given(formulas)
def test_print_then_parse_is_identity(phi):
    assert parse(format_formula(phi)) == phi


def test_substitute_replaces_letters_simultaneously():
    phi = parse("p ~> q")
    assert substitute({1: Q, 2: P}, phi) == parse("q ~> p")


def test_substitute_leaves_constants():
    assert substitute({0: P}, Const(True)) == Const(True)


@settings(max_examples=100)
@given(formulas, substitutions, substitutions)
def test_composition_matches_sequential_substitution(phi, sigma, tau):
    assert substitute(compose_substitutions(sigma, tau), phi) == substitute(sigma, substitute(tau, phi))


def test_match_schema_finds_bindings():
    schema = parse("(p ~> q) -> (p -> q)")
    target = parse("(r & s ~> !p) -> (r & s -> !p)")
    assert match_schema(schema, target) == {1: parse("r & s"), 2: parse("!p")}


def test_match_schema_rejects_inconsistent_bindings():
    schema = parse("(p ~> q) -> (p -> q)")
    assert match_schema(schema, parse("(r ~> s) -> (s -> r)")) is None


def test_match_schema_requires_same_connective():
    assert match_schema(parse("p ~> q"), parse("p -> q")) is None


@settings(max_examples=100)
@given(formulas, substitutions)
def test_match_recovers_substitution_instances(phi, sigma):
    instance = substitute(sigma, phi)
    found = match_schema(phi, instance)
    assert found is not None
    assert substitute(found, phi) == instance


def test_vars_and_subformulas():
    phi = parse("(p ~> q) & p")
    assert vars_of(phi) == frozenset({1, 2})
    assert subformulas(phi) == [P, Q, rel_imp(P, Q), phi]
    assert subformulas(phi, proper=True) == [P, Q, rel_imp(P, Q)]


def test_tower_builders():
    assert k_formula(2) == parse("p ~> (p -> (p -> p))")
    assert lambda_tower(P, Q, 0) == parse("q ~> p")
    assert lambda_formula(1) == parse("q ~> (p -> (q ~> p))")
    assert neg_tower(2) == Neg(Neg(TOP))


def test_size_and_connective_count():
    phi = parse("!p & (q ~> p)")
    assert size(phi) == 6
    assert connective_count(phi) == 3


def test_sort_key_orders_by_size_first():
    ordered = sorted([parse("p & q"), Q, parse("!p"), P], key=sort_key)
    assert ordered[:2] == [P, Q]
    assert size(ordered[2]) == 2


def test_expand_constants():
    phi = conj(P, Const(False))
    assert has_constants(phi)
    expanded = expand_constants(phi)
    assert expanded == conj(P, BOTTOM)
    assert not has_constants(expanded)

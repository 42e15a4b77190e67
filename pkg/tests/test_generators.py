import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.generators import (
    close_pairs,
    enumerate_formulas,
    make_rng,
    random_formula,
    random_model,
    random_relation,
    random_substitution,
)
from epstein.proofsys import condition_check
from epstein.semantics import FiniteRelation, pairs_of
from epstein.syntax import Letter, neg, size, vars_of

P, Q = Letter(1), Letter(2)


def test_seeded_generation_is_reproducible():
    first = [random_formula(make_rng(5), 4) for _ in range(3)]
    second = [random_formula(make_rng(5), 4) for _ in range(3)]
    assert first == second


def test_random_formula_respects_letters():
    rng = make_rng(0)
    for _ in range(50):
        assert vars_of(random_formula(rng, 4, letters=(2,))) <= {2}


def test_random_substitution_domain():
    sigma = random_substitution(make_rng(1), (1, 2), 2)
    assert set(sigma) == {1, 2}


def test_random_models_and_relations():
    phi = random_formula(make_rng(2), 3, letters=(7,))
    model = random_model(make_rng(2), [phi])
    assert isinstance(model.relation, FiniteRelation)
    kinds = {type(random_relation(make_rng(seed), [phi])).__name__ for seed in range(200)}
    assert "TowerRelation" in kinds and "OverrideRelation" in kinds


def test_enumeration_is_ordered_by_size():
    formulas = list(enumerate_formulas((1,), 3))
    sizes = [size(phi) for phi in formulas]
    assert sizes == sorted(sizes)
    assert formulas[0] == P
    assert len(set(formulas)) == len(formulas)
    # sizes 1, 2 and 3: p, !p, !!p and one binary formula per connective
    assert len(formulas) == 3 + 6


def test_close_pairs():
    symmetric = close_pairs(pairs_of([(P, Q)]), "symmetry")
    assert condition_check(symmetric, "symmetry").holds
    both = close_pairs(pairs_of([(neg(neg(P)), Q)]), "both")
    assert condition_check(both, "symmetry").holds
    assert condition_check(both, "n-condition").holds
    assert len(both.pairs) == 6

import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from epstein.errors import CapacityError, PreconditionError
from epstein.semantics import FiniteRelation, FullRelation, evaluate, pairs_of
from epstein.syntax import k_formula, parse
from epstein.witnesses import (
    WITHOUT_PP,
    alpha_forces_pp,
    alpha_incompleteness,
    alpha_nonderivability_model,
    inexpressibility_sweep,
    kt_completeness,
    kt_separation,
    lambda_incompleteness,
    lambda_separation,
    run_witness,
    run_witnesses,
    undefinability_report,
    verify_report,
)


def test_alpha_incompleteness():
    report = alpha_incompleteness(sample=10)
    assert report.verdict
    model = report.objects["model"]
    assert not evaluate(model, parse("p ~> p"))
    assert evaluate(model, parse("p -> (q ~> p)"))


def test_alpha_forcing_on_both_kinds_of_relation():
    without = alpha_forces_pp(WITHOUT_PP, sample=5)
    assert without.verdict
    assert without.objects["instance"] == parse("p -> (p ~> p)")
    full = alpha_forces_pp(FullRelation(), sample=5)
    assert full.verdict
    assert full.objects["failing_instances"] == 0


def test_alpha_forcing_fails_when_an_instance_is_not_validated():
    only_pp = FiniteRelation(pairs_of([(parse("p"), parse("p"))]))
    report = alpha_forces_pp(only_pp, sample=5)
    assert not report.verdict
    assert report.objects["failing_instances"] >= 1
    assert report.objects["first_failing_instance"] == parse("p -> (q ~> p)")


def test_alpha_model_report():
    report = alpha_nonderivability_model(sample=10, seed=4)
    assert report.verdict
    assert report.params == {"sample": 10, "seed": 4}


def test_kt_separation_picks_least_differing_index():
    report = kt_separation([1, 3], [1, 2], sample=5)
    assert report.verdict
    assert report.objects["index"] == 2
    assert report.objects["separator"] == k_formula(2)


def test_kt_separation_rejects_bad_sets():
    with pytest.raises(PreconditionError):
        kt_separation([0], [1])
    with pytest.raises(PreconditionError):
        kt_separation([1, 2], [2, 1])
    with pytest.raises(PreconditionError):
        kt_completeness([])


def test_kt_completeness():
    assert kt_completeness([1, 2], sample=5).verdict


def test_lambda_family():
    assert lambda_incompleteness([1, 2], sample=10).verdict
    report = lambda_separation([1], [2], sample=5)
    assert report.verdict
    assert report.objects["index"] == 1
    assert lambda_separation([2], [1], sample=5).verdict


def test_inexpressibility_sweep():
    report = inexpressibility_sweep(3)
    assert report.verdict
    assert report.objects["survivors"] == []


def test_inexpressibility_sweep_capacity():
    with pytest.raises(CapacityError):
        inexpressibility_sweep(50)


def test_undefinability_report():
    for condition in ("symmetry", "n-condition", "both"):
        assert undefinability_report(condition).verdict


def test_reports_reproduce():
    report = kt_separation([1], [2], sample=5, seed=7)
    assert verify_report(report)
    assert verify_report(undefinability_report("symmetry"))


def test_registry_runs_requests_in_order():
    requests = [
        ("kt_completeness", {"t": [1], "sample": 3}),
        ("undefinability", {"condition": "n-condition"}),
        ("lambda_separation", {"first": [1], "second": [3], "sample": 3}),
    ]
    reports = run_witnesses(requests, jobs=2)
    assert [report.lemma for report in reports] == ["kt_completeness", "undefinability", "lambda_separation"]
    assert all(report.verdict for report in reports)


def test_unknown_witness():
    with pytest.raises(PreconditionError):
        run_witness("zorn", {})

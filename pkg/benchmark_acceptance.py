"""Time the acceptance workloads and print a summary table.

Usage:
    python benchmark_acceptance.py [--quick]
"""

import json
import sys
import time
from pathlib import Path

import pandas as pd
import yaml

from epstein.generators import make_rng, random_formula, random_model
from epstein.interpolation import Pair, interpolate, realisable
from epstein.proofsys import (
    bounded_lindenbaum,
    canonical_adequacy,
    canonical_model,
    check_proof,
    condition_check,
    proof_system,
    sample_soundness,
)
from epstein.schemas import proof_from_payload
from epstein.semantics import FiniteRelation, evaluate, pairs_of, relation_validates
from epstein.sset import enumerate_omega, falsify_sset_invariance, sample_equivalents, sset_member, toggle
from epstein.syntax import implies, parse
from epstein.translation import CplAtom, PairAtom, assignment_of, atoms, cpl_evaluate, f_valid, translate
from epstein.witnesses import run_witnesses

DATA = Path(__file__).resolve().parent / "data"

COMPLETENESS_MODES = [
    ("F", "plain", ()),
    ("FS", "S", ("symmetry",)),
    ("FN", "N", ("n-condition",)),
    ("FSN", "SN", ("symmetry", "n-condition")),
]


def axiom_validity():
    axioms = ["(p ~> q) -> (p -> q)", "(p ^ q) <-> ((p ~> q) & (p & q))"]
    return all(f_valid(parse(text)) for text in axioms) and not f_valid(parse("p ~> p"))


def translation_agreement(pairs):
    rng = make_rng(0)
    for _ in range(pairs):
        phi = random_formula(rng, 5)
        model = random_model(rng, [phi])
        translated = translate(phi)
        if evaluate(model, phi) != cpl_evaluate(assignment_of(model, atoms(translated)), translated):
            return False
    return True


def micro_example():
    relation = FiniteRelation(pairs_of([(parse("p"), parse("p"))]))
    return (
        relation_validates(relation, parse("p ~> p"))
        and not relation_validates(relation, parse("q ~> q"))
        and not relation_validates(relation, parse("p"))
        and not relation_validates(relation, parse("!p"))
    )


def sset_suite(models, neighbours, formulas=200):
    rng = make_rng(1)
    for _ in range(models):
        model = random_model(rng, [random_formula(rng, 3)])
        sample = [random_formula(rng, 3) for _ in range(formulas)]
        theory = [evaluate(model, phi) for phi in sample]
        pairs = enumerate_omega(model, 50)
        for index in range(min(neighbours, len(pairs))):
            neighbour = toggle(model, [pairs[index]])
            if not sset_member(model, neighbour).is_yes:
                return False
            if [evaluate(neighbour, phi) for phi in sample] != theory:
                return False
    base = random_model(rng, [parse("p")])
    equivalents = sample_equivalents(base, 10)
    return len({other.relation for other in equivalents}) == 10 and all(sset_member(base, other).is_yes for other in equivalents)


def invariance_fuzzer(samples):
    bare = CplAtom(PairAtom(parse("T"), parse("F")))
    if falsify_sset_invariance(bare, samples) is None:
        return False
    rng = make_rng(2)
    return all(falsify_sset_invariance(translate(random_formula(rng, 3)), 5, seed=n) is None for n in range(samples))


def proof_library():
    for path in sorted((DATA / "proofs").glob("*.json")):
        with open(path, "r", encoding="utf-8") as fh:
            system, proof = proof_from_payload(json.load(fh))
        if not check_proof(system, proof).ok:
            return False
    return True


def bounded_completeness(runs):
    rng = make_rng(3)
    checked = 0
    for system_name, mode, conditions in COMPLETENESS_MODES:
        system = proof_system(system_name)
        for _ in range(runs):
            mcs = bounded_lindenbaum(system, [random_formula(rng, 2)])
            if mcs is None:
                continue
            if canonical_adequacy(mcs, mode):
                return False
            relation = canonical_model(mcs, mode).relation
            if not all(condition_check(relation, condition).holds for condition in conditions):
                return False
            checked += 1
    return checked > 0


def interpolation_corpus(duality_pairs):
    with open(DATA / "interpolation_corpus.yaml", "r", encoding="utf-8") as fh:
        corpus = yaml.safe_load(fh)
    for entry in corpus["entries"]:
        result = interpolate(parse(entry["left"]), parse(entry["right"]), corpus["depth"])
        if result is None or not result.ok:
            return False
    rng = make_rng(4)
    for _ in range(duality_pairs):
        phi, psi = random_formula(rng, 2), random_formula(rng, 2)
        if (realisable(Pair.of([phi], [psi])) is None) != f_valid(implies(phi, psi)):
            return False
    return True


def witness_demos():
    requests = [
        ("alpha_nonderivability_model", {"sample": 50, "seed": 0}),
        ("kt_separation", {"t": [1], "v": [2], "sample": 50, "seed": 0}),
        ("lambda_incompleteness", {"s": [1, 3], "sample": 50, "seed": 0}),
        ("undefinability", {"condition": "symmetry"}),
        ("undefinability", {"condition": "n-condition"}),
        ("undefinability", {"condition": "both"}),
        ("inexpressibility_sweep", {"size_bound": 5}),
    ]
    return all(report.verdict for report in run_witnesses(requests))


def soundness_sampling(relations):
    return all(
        not sample_soundness(proof_system(name), relations=relations, instances=20, valuations=4)
        for name in ("FS", "FN", "FSN")
    )


def benchmark(quick=False):
    scale = 10 if quick else 1
    workloads = [
        ("axiom validity", axiom_validity),
        ("translation agreement", lambda: translation_agreement(1000 // scale)),
        ("micro example", micro_example),
        ("S-set suite", lambda: sset_suite(100 // scale, 20)),
        ("invariance fuzzer", lambda: invariance_fuzzer(100 // scale)),
        ("proof library", proof_library),
        ("soundness sampling", lambda: soundness_sampling(200 // scale)),
        ("bounded completeness", lambda: bounded_completeness(25 // scale + 1)),
        ("interpolation corpus", lambda: interpolation_corpus(500 // scale)),
        ("witness demos", witness_demos),
    ]
    rows = []
    for name, workload in workloads:
        start = time.perf_counter()
        passed = workload()
        rows.append({"workload": name, "passed": passed, "seconds": time.perf_counter() - start})

    table = pd.DataFrame(rows)
    print(table.to_string(index=False, float_format=lambda value: f"{value:.3f}"))
    print(f"\nTotal time: {table['seconds'].sum():.2f}s")
    return bool(table["passed"].all())


if __name__ == "__main__":
    sys.exit(0 if benchmark(quick="--quick" in sys.argv[1:]) else 1)

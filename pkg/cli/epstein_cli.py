#!/usr/bin/env python3
"""Command-line frontend for the generalised Epstein toolkit.

Every verb reads formulas from the command line and models, proofs or reports
from JSON files, writes JSON (sorted keys) or a one-word verdict to stdout and
returns 0 for an affirmative result, 1 for a negative verdict and 2 for usage
or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from epstein.config import SETTINGS_HEALTH, apply_settings, get_settings
from epstein.errors import EpsteinError, PreconditionError
from epstein.interpolation import interpolate, rel_imp_interpolation_check
from epstein.proofsys import (
    CANONICAL_MODES,
    bounded_lindenbaum,
    canonical_adequacy,
    canonical_model,
    check_proof,
    condition_check,
    proof_system,
)
from epstein.schemas import (
    counterexample_to_payload,
    interpolation_to_payload,
    mcs_from_payload,
    mcs_to_payload,
    membership_to_payload,
    model_from_payload,
    model_to_payload,
    object_to_payload,
    proof_from_payload,
    proof_verdict_to_payload,
    report_from_payload,
    report_to_payload,
)
from epstein.semantics import evaluate, relation_validates
from epstein.sset import (
    distinguishing_formula,
    enumerate_omega,
    falsify_sset_invariance,
    sample_equivalents,
    sset_from_theory,
    sset_member,
    undefinability_counterexample,
)
from epstein.syntax import Bin, Const, Formula, Letter, format_formula, parse, size, vars_of
from epstein.translation import (
    CplAtom,
    PairAtom,
    atoms,
    cpl_not,
    f_countermodel,
    format_atom,
    format_cpl,
    model_from_assignment,
    sat_all,
    translate,
)
from epstein.witnesses import WitnessReport, run_witness, run_witnesses, verify_report

logger = logging.getLogger("epstein.cli")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
SYSTEMS = ("F", "FS", "FN", "FSN")
MODE_FOR_SYSTEM = {"F": "plain", "FS": "S", "FN": "N", "FSN": "SN"}
CONDITION_ALIASES = {"s": "symmetry", "n": "n-condition", "symmetry": "symmetry", "n-condition": "n-condition", "both": "both"}


class Outcome:
    """What a verb produced: an exit code, a JSON payload and a short summary."""

    def __init__(self, code: int, payload: Any = None, summary: Optional[str] = None) -> None:
        self.code = code
        self.payload = payload
        self.summary = summary


def _dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _formula(args: argparse.Namespace) -> Formula:
    text = getattr(args, "text", None) or args.formula
    if not text:
        raise PreconditionError("a formula is required (positional or --formula)")
    return parse(text)


def _model(args: argparse.Namespace, attr: str = "model"):
    path = getattr(args, attr)
    if not path:
        raise PreconditionError(f"--{attr} FILE is required")
    return model_from_payload(_read_json(path))


def _indices(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise PreconditionError(f"expected comma-separated naturals, got {text!r}") from exc


def _verdict(flag: bool, yes: str, no: str, payload: Any = None) -> Outcome:
    return Outcome(0 if flag else 1, payload, yes if flag else no)


def _ast(phi: Formula) -> Any:
    if isinstance(phi, Letter):
        return {"letter": phi.index}
    if isinstance(phi, Const):
        return {"const": phi.value}
    if isinstance(phi, Bin):
        return {"op": phi.connective.value, "left": _ast(phi.left), "right": _ast(phi.right)}
    return {"op": "!", "operand": _ast(phi.operand)}


# Syntax and semantics ----------------------------------------------------------------

def cmd_parse(args: argparse.Namespace) -> Outcome:
    phi = _formula(args)
    payload = {"ast": _ast(phi), "formula": format_formula(phi), "size": size(phi), "vars": sorted(vars_of(phi))}
    return Outcome(0, payload, format_formula(phi))


def cmd_print(args: argparse.Namespace) -> Outcome:
    text = format_formula(_formula(args))
    return Outcome(0, text, text)


def cmd_eval(args: argparse.Namespace) -> Outcome:
    value = evaluate(_model(args), _formula(args))
    return _verdict(value, "true", "false", "true" if value else "false")


def cmd_validate(args: argparse.Namespace) -> Outcome:
    relation = _model(args).relation
    valid = relation_validates(relation, _formula(args))
    return _verdict(valid, "valid", "invalid", "valid" if valid else "invalid")


def cmd_translate(args: argparse.Namespace) -> Outcome:
    translated = translate(_formula(args))
    payload = {"translation": format_cpl(translated), "atoms": [format_atom(atom) for atom in atoms(translated)]}
    return Outcome(0, payload, payload["translation"])


def cmd_theorem(args: argparse.Namespace) -> Outcome:
    countermodel = f_countermodel(_formula(args))
    if countermodel is None:
        return Outcome(0, "valid", "valid")
    return Outcome(1, {"verdict": "invalid", "countermodel": model_to_payload(countermodel)}, "invalid")


def cmd_consequence(args: argparse.Namespace) -> Outcome:
    premises = [parse(text) for text in args.premise or []]
    conclusion = _formula(args)
    found = sat_all([translate(phi) for phi in premises] + [cpl_not(translate(conclusion))])
    if found is None:
        return Outcome(0, "valid", "valid")
    payload = {"verdict": "invalid", "countermodel": model_to_payload(model_from_assignment(found))}
    return Outcome(1, payload, "invalid")


def cmd_condition(args: argparse.Namespace) -> Outcome:
    verdict = condition_check(_model(args).relation, CONDITION_ALIASES[args.condition])
    payload: Dict[str, Any] = {"status": verdict.status.value}
    if verdict.witness is not None:
        payload["witness"] = object_to_payload(verdict.witness)
    if verdict.reason:
        payload["reason"] = verdict.reason
    return _verdict(verdict.holds, "holds", verdict.status.value, payload)


# Proofs and canonical models ---------------------------------------------------------

def cmd_proof_check(args: argparse.Namespace) -> Outcome:
    if not args.proof:
        raise PreconditionError("--proof FILE is required")
    payload = _read_json(args.proof)
    if args.system:
        payload = {**payload, "system": args.system}
    system, proof = proof_from_payload(payload)
    verdict = check_proof(system, proof, jobs=args.jobs)
    return _verdict(verdict.ok, "accepted", "rejected", proof_verdict_to_payload(verdict))


def _system(args: argparse.Namespace):
    return proof_system(args.system or "F")


def cmd_lindenbaum(args: argparse.Namespace) -> Outcome:
    system = _system(args)
    mcs = bounded_lindenbaum(system, [parse(text) for text in args.formulas])
    if mcs is None:
        return Outcome(1, {"verdict": "inconsistent"}, "inconsistent")
    return Outcome(0, mcs_to_payload(mcs), f"{len(mcs.members)}/{len(mcs.universe)} members")


def cmd_canonical(args: argparse.Namespace) -> Outcome:
    if args.mcs:
        mcs = mcs_from_payload(_read_json(args.mcs))
    else:
        mcs = bounded_lindenbaum(_system(args), [parse(text) for text in args.formulas])
        if mcs is None:
            return Outcome(1, {"verdict": "inconsistent"}, "inconsistent")
    mode = args.mode or MODE_FOR_SYSTEM.get(mcs.system, "plain")
    model = canonical_model(mcs, mode)
    mismatches = canonical_adequacy(mcs, mode)
    payload = {"mode": mode, "model": model_to_payload(model), "mismatches": [format_formula(phi) for phi in mismatches]}
    return _verdict(not mismatches, "adequate", "mismatch", payload)


# S-sets -----------------------------------------------------------------------------

def cmd_omega_list(args: argparse.Namespace) -> Outcome:
    pairs = enumerate_omega(_model(args), args.samples)
    payload = [object_to_payload(pair) for pair in pairs]
    return Outcome(0, payload, f"{len(pairs)} pairs")


def cmd_sset_member(args: argparse.Namespace) -> Outcome:
    model, other = _model(args), _model(args, "other")
    verdict = sset_member(model, other)
    payload = membership_to_payload(verdict)
    payload["theory_check"] = sset_from_theory(model, other).status.value
    witness = distinguishing_formula(model, other)
    if witness is not None:
        payload["distinguishing_formula"] = format_formula(witness)
    return _verdict(verdict.status.value == "yes", "yes", verdict.status.value, payload)


def cmd_sset_sample(args: argparse.Namespace) -> Outcome:
    samples = sample_equivalents(_model(args), args.samples, seed=args.seed)
    return Outcome(0, [model_to_payload(model) for model in samples], f"{len(samples)} models")


def cmd_invariance_fuzz(args: argparse.Namespace) -> Outcome:
    if args.pair:
        target = PairAtom(parse(args.pair[0]), parse(args.pair[1]))
        formula = CplAtom(target)
    else:
        formula = translate(_formula(args))
    found = falsify_sset_invariance(formula, args.samples, args.toggle_bound, seed=args.seed)
    if found is None:
        return Outcome(0, {"counterexample": None, "formula": format_cpl(formula)}, "no counterexample")
    model, neighbour = found
    payload = {"formula": format_cpl(formula), "model": model_to_payload(model), "neighbour": model_to_payload(neighbour)}
    return Outcome(1, payload, "counterexample")


# Interpolation ----------------------------------------------------------------------

def cmd_interpolate(args: argparse.Namespace) -> Outcome:
    phi, psi = parse(args.left), parse(args.right)
    if args.relatedness:
        check = rel_imp_interpolation_check(phi, psi)
        payload = {"holds_vacuously": check.holds_vacuously, "countermodel": model_to_payload(check.countermodel)}
        return _verdict(check.holds_vacuously, "vacuous", "not vacuous", payload)
    depth = get_settings().default_depth if args.depth is None else args.depth
    result = interpolate(phi, psi, depth)
    if result is None:
        return Outcome(1, {"interpolant": None, "depth": depth}, "not found")
    return _verdict(result.ok, format_formula(result.interpolant), "checks failed", interpolation_to_payload(result))


# Witness demos ----------------------------------------------------------------------

def _report_outcome(reports: Sequence[WitnessReport]) -> Outcome:
    payload = [report_to_payload(report) for report in reports]
    ok = all(report.verdict for report in reports)
    summary = "\n".join(f"{report.lemma}: {'pass' if report.verdict else 'fail'}" for report in reports)
    return Outcome(0 if ok else 1, payload[0] if len(payload) == 1 else payload, summary)


def _demo_requests(args: argparse.Namespace) -> List[tuple]:
    sample = args.samples
    seed = args.seed
    demo = args.demo
    if demo == "undefinability":
        condition = CONDITION_ALIASES[args.condition]
        params: Dict[str, Any] = {"condition": condition}
        if args.model:
            params["base"] = _model(args).relation
        return [("undefinability", params)]
    if demo == "incompleteness":
        if args.kind == "alpha":
            return [("alpha_incompleteness", {"sample": sample, "seed": seed})]
        return [("lambda_incompleteness", {"s": _indices(args.indices), "sample": sample, "seed": seed})]
    if demo == "inexpressibility":
        return [("inexpressibility_sweep", {"size_bound": args.bound})]
    if demo == "kt-separation":
        return [("kt_separation", {"t": _indices(args.t), "v": _indices(args.v), "sample": sample, "seed": seed})]
    if demo == "kt-completeness":
        return [("kt_completeness", {"t": _indices(args.t), "sample": sample, "seed": seed})]
    if demo == "lambda-separation":
        params = {"first": _indices(args.first), "second": _indices(args.second), "sample": sample, "seed": seed}
        return [("lambda_separation", params)]
    return [
        ("alpha_nonderivability_model", {"sample": sample, "seed": seed}),
        ("kt_separation", {"t": [1], "v": [2], "sample": sample, "seed": seed}),
        ("lambda_incompleteness", {"s": [1, 3], "sample": sample, "seed": seed}),
        ("undefinability", {"condition": "symmetry"}),
        ("undefinability", {"condition": "n-condition"}),
        ("undefinability", {"condition": "both"}),
        ("inexpressibility_sweep", {"size_bound": args.bound}),
    ]


def cmd_demo(args: argparse.Namespace) -> Outcome:
    if args.demo == "verify":
        if not args.report:
            raise PreconditionError("--report FILE is required")
        report = report_from_payload(_read_json(args.report))
        same = verify_report(report)
        return _verdict(same, "reproduced", "not reproduced", {"lemma": report.lemma, "reproduced": same})
    requests = _demo_requests(args)
    if len(requests) == 1:
        return _report_outcome([run_witness(*requests[0])])
    return _report_outcome(run_witnesses(requests, jobs=args.jobs))


def cmd_undefinability_record(args: argparse.Namespace) -> Outcome:
    base = _model(args).relation
    record = undefinability_counterexample(CONDITION_ALIASES[args.condition], base)
    return _verdict(record.verified, "verified", "unverified", counterexample_to_payload(record))


def cmd_config(args: argparse.Namespace) -> Outcome:
    payload = {"settings": get_settings().dict(), "health": SETTINGS_HEALTH.snapshot()}
    return Outcome(0, payload, payload["health"]["status"])


# Parser -----------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model JSON file")
    common.add_argument("--formula", help="formula in the ASCII grammar")
    common.add_argument("--proof", help="proof JSON file")
    common.add_argument("--system", choices=SYSTEMS, help="proof system")
    common.add_argument("--depth", type=int, default=None, help="search depth")
    common.add_argument("--samples", type=int, default=None, help="sample count")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--quiet", action="store_true", help="warnings only; print verdicts as plain text")
    common.add_argument("--settings", help="settings YAML file")
    return common


def _add(sub, name: str, handler: Callable, common, help_text: str, text: bool = False) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, parents=[common], help=help_text)
    if text:
        parser.add_argument("text", nargs="?", help="formula (alternative to --formula)")
    parser.set_defaults(handler=handler)
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="epstein", description="Generalised Epstein semantics toolkit")
    sub = parser.add_subparsers(dest="verb", required=True)

    _add(sub, "parse", cmd_parse, common, "parse a formula and dump its syntax tree", text=True)
    _add(sub, "print", cmd_print, common, "print a formula in canonical form", text=True)
    _add(sub, "eval", cmd_eval, common, "evaluate a formula in a model", text=True)
    _add(sub, "validate", cmd_validate, common, "does the model's relation validate the formula", text=True)
    _add(sub, "translate", cmd_translate, common, "standard translation into classical logic", text=True)
    _add(sub, "theorem", cmd_theorem, common, "is the formula valid in F", text=True)
    consequence = _add(sub, "consequence", cmd_consequence, common, "semantic consequence in F", text=True)
    consequence.add_argument("--premise", action="append", help="premise formula (repeatable)")
    condition = _add(sub, "condition", cmd_condition, common, "check symmetry or the n-condition")
    condition.add_argument("--condition", choices=sorted(CONDITION_ALIASES), default="s")

    proof = sub.add_parser("proof", help="Hilbert proofs")
    proof_sub = proof.add_subparsers(dest="action", required=True)
    _add(proof_sub, "check", cmd_proof_check, common, "check a proof JSON file")

    omega = sub.add_parser("omega", help="Omega pairs of a model")
    omega_sub = omega.add_subparsers(dest="action", required=True)
    _add(omega_sub, "list", cmd_omega_list, common, "enumerate Omega pairs")

    sset = sub.add_parser("sset", help="S-set operations")
    sset_sub = sset.add_subparsers(dest="action", required=True)
    member = _add(sset_sub, "member", cmd_sset_member, common, "is --other in the S-set of --model")
    member.add_argument("--other", required=True, help="second model JSON file")
    _add(sset_sub, "sample", cmd_sset_sample, common, "sample distinct S-set members")
    record = _add(sset_sub, "undefinable", cmd_undefinability_record, common, "counterexample record for a base relation")
    record.add_argument("--condition", choices=sorted(CONDITION_ALIASES), default="s")

    invariance = sub.add_parser("invariance", help="S-set invariance of translations")
    invariance_sub = invariance.add_subparsers(dest="action", required=True)
    fuzz = _add(invariance_sub, "fuzz", cmd_invariance_fuzz, common, "search for a non-invariance witness", text=True)
    fuzz.add_argument("--pair", nargs=2, metavar=("FIRST", "SECOND"), help="fuzz the bare pair atom instead")
    fuzz.add_argument("--toggle-bound", type=int, default=None, help="neighbours tried per model")

    interp = _add(sub, "interpolate", cmd_interpolate, common, "interpolant for a valid implication")
    interp.add_argument("left", help="antecedent")
    interp.add_argument("right", help="consequent")
    interp.add_argument("--relatedness", action="store_true", help="check the relatedness-implication variant")

    demo = _add(sub, "demo", cmd_demo, common, "run witness constructions")
    demo.add_argument(
        "demo",
        choices=(
            "undefinability",
            "incompleteness",
            "inexpressibility",
            "kt-separation",
            "kt-completeness",
            "lambda-separation",
            "all",
            "verify",
        ),
    )
    demo.add_argument("--condition", choices=sorted(CONDITION_ALIASES), default="s")
    demo.add_argument("--kind", choices=("alpha", "lambda"), default="alpha")
    demo.add_argument("--indices", default="1,3", help="index set for lambda incompleteness")
    demo.add_argument("--t", default="1", help="index set T")
    demo.add_argument("--v", default="2", help="index set V")
    demo.add_argument("--first", default="1", help="first lambda index set")
    demo.add_argument("--second", default="2", help="second lambda index set")
    demo.add_argument("--bound", type=int, default=5, help="formula size bound for the sweep")
    demo.add_argument("--report", help="report JSON to re-verify")

    lindenbaum = _add(sub, "lindenbaum", cmd_lindenbaum, common, "bounded maximal consistent extension")
    lindenbaum.add_argument("formulas", nargs="*", help="formulas of the starting set")
    canonical = _add(sub, "canonical", cmd_canonical, common, "canonical model of a bounded MCS")
    canonical.add_argument("formulas", nargs="*", help="formulas of the starting set")
    canonical.add_argument("--mcs", help="bounded MCS JSON file")
    canonical.add_argument("--mode", choices=CANONICAL_MODES)

    _add(sub, "config", cmd_config, common, "show the active settings")
    return parser


def _configure_logging(quiet: bool) -> None:
    level = logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    _configure_logging(args.quiet)
    apply_settings(args.settings)
    if args.samples is None:
        args.samples = get_settings().default_samples

    try:
        outcome = args.handler(args)
    except (EpsteinError, OSError, json.JSONDecodeError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.quiet and outcome.summary is not None:
        print(outcome.summary)
    elif isinstance(outcome.payload, str):
        print(outcome.payload)
    else:
        print(_dumps(outcome.payload))
    logger.debug("%s finished with exit code %d", args.verb, outcome.code)
    return outcome.code


if __name__ == "__main__":
    raise SystemExit(main())

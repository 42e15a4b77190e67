import json
import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from cli.epstein_cli import main

PROOFS = os.path.join(ROOT, "data", "proofs")


def model_path(test_data_dir, name):
    return os.path.join(test_data_dir, f"{name}.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.strip(), captured.err


def test_parse_dumps_syntax_tree(capsys):
    code, out, _ = run(capsys, "parse", "p ~> q")
    assert code == 0
    payload = json.loads(out)
    assert payload["ast"] == {"op": "~>", "left": {"letter": 1}, "right": {"letter": 2}}
    assert payload["vars"] == [1, 2]


def test_print_and_translate(capsys):
    assert run(capsys, "print", "--formula", "(p ^ q) -> (p | s)")[1] == "p ^ q -> p | s"
    assert run(capsys, "translate", "p ~> q", "--quiet")[1] == "(p -> q) & a<p, q>"


def test_syntax_errors_exit_with_two(capsys):
    code, _, err = run(capsys, "parse", "p & & q")
    assert code == 2
    assert "position 4" in err


def test_unknown_verb_is_a_usage_error(capsys):
    assert run(capsys, "prove-everything")[0] == 2


def test_eval_exit_codes(capsys, test_data_dir):
    model = model_path(test_data_dir, "related_pp")
    assert run(capsys, "eval", "p ~> p", "--model", model)[:2] == (0, "true")
    code, out, _ = run(capsys, "eval", "q ~> q", "--model", model)
    assert (code, out) == (1, "false")


def test_validate_micro_example(capsys, test_data_dir):
    model = model_path(test_data_dir, "related_pp")
    assert run(capsys, "validate", "p ~> p", "--model", model)[:2] == (0, "valid")
    assert run(capsys, "validate", "p", "--model", model)[:2] == (1, "invalid")


def test_missing_model_file(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "p", "--model", str(tmp_path / "absent.json"))
    assert code == 2
    assert "error:" in err


def test_theorem(capsys):
    assert run(capsys, "theorem", "(p ^ q) -> (p -> q)")[:2] == (0, "valid")
    code, out, _ = run(capsys, "theorem", "p ~> p")
    assert code == 1
    assert json.loads(out)["verdict"] == "invalid"


def test_consequence(capsys):
    assert run(capsys, "consequence", "q", "--premise", "p ~> q", "--premise", "p")[:2] == (0, "valid")
    assert run(capsys, "consequence", "p ~> q", "--premise", "p -> q")[0] == 1


def test_condition(capsys, test_data_dir):
    model = model_path(test_data_dir, "true_p_toggled")
    code, out, _ = run(capsys, "condition", "--model", model, "--condition", "s")
    assert code == 1
    assert json.loads(out)["witness"] == ["q", "p"]
    assert run(capsys, "condition", "--model", model_path(test_data_dir, "related_pp"), "--quiet")[:2] == (0, "holds")


def test_proof_check(capsys):
    path = os.path.join(PROOFS, "rel_conj_implies_imp.json")
    assert run(capsys, "proof", "check", "--proof", path, "--quiet")[:2] == (0, "accepted")
    code, out, _ = run(capsys, "proof", "check", "--proof", path, "--jobs", "2")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_proof_check_reports_rejected_lines(capsys, tmp_path):
    with open(os.path.join(PROOFS, "rel_conj_implies_imp.json"), "r", encoding="utf-8") as f:
        payload = json.load(f)
    payload["lines"][4]["just"] = {"type": "mp", "imp": 3, "ant": 0}
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run(capsys, "proof", "check", "--proof", str(path))
    assert code == 1
    lines = json.loads(out)["lines"]
    assert [line["line"] for line in lines if not line["ok"]] == [4]


def test_omega_list(capsys, test_data_dir):
    code, out, _ = run(capsys, "omega", "list", "--model", model_path(test_data_dir, "true_p_empty"), "--samples", "4")
    assert code == 0
    assert len(json.loads(out)) == 4


def test_sset_member(capsys, test_data_dir):
    empty = model_path(test_data_dir, "true_p_empty")
    toggled = model_path(test_data_dir, "true_p_toggled")
    assert run(capsys, "sset", "member", "--model", empty, "--other", toggled, "--quiet")[:2] == (0, "yes")
    code, out, _ = run(capsys, "sset", "member", "--model", empty, "--other", model_path(test_data_dir, "related_pp"))
    assert code == 1
    assert json.loads(out)["verdict"] == "no"


def test_sset_sample_and_undefinable(capsys, test_data_dir):
    empty = model_path(test_data_dir, "true_p_empty")
    code, out, _ = run(capsys, "sset", "sample", "--model", empty, "--samples", "3")
    assert code == 0
    assert len(json.loads(out)) == 3
    assert run(capsys, "sset", "undefinable", "--model", empty, "--condition", "n", "--quiet")[:2] == (0, "verified")
    toggled = model_path(test_data_dir, "true_p_toggled")
    assert run(capsys, "sset", "undefinable", "--model", toggled, "--condition", "s")[0] == 2


def test_invariance_fuzz(capsys):
    assert run(capsys, "invariance", "fuzz", "--pair", "T", "F", "--samples", "5", "--quiet")[:2] == (1, "counterexample")
    assert run(capsys, "invariance", "fuzz", "p ~> q", "--samples", "5", "--quiet")[:2] == (0, "no counterexample")


def test_interpolate(capsys):
    code, out, _ = run(capsys, "interpolate", "p ^ q", "p | s", "--depth", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["checks"] == {"left": True, "right": True, "vars": True}
    assert run(capsys, "interpolate", "p", "q")[0] == 2


def test_interpolate_relatedness_variant(capsys):
    assert run(capsys, "interpolate", "p", "p", "--relatedness", "--quiet")[:2] == (0, "vacuous")


def test_demo_undefinability_and_separation(capsys):
    assert run(capsys, "demo", "undefinability", "--condition", "n", "--quiet")[:2] == (0, "undefinability: pass")
    code, out, _ = run(capsys, "demo", "kt-separation", "--t", "1,3", "--v", "1,2", "--samples", "5")
    assert code == 0
    assert json.loads(out)["objects"]["index"] == 2


def test_demo_report_can_be_verified(capsys, tmp_path):
    code, out, _ = run(capsys, "demo", "lambda-separation", "--first", "1", "--second", "2", "--samples", "4")
    assert code == 0
    path = tmp_path / "report.json"
    path.write_text(out)
    assert run(capsys, "demo", "verify", "--report", str(path), "--quiet")[:2] == (0, "reproduced")


def test_demo_rejects_bad_index_sets(capsys):
    assert run(capsys, "demo", "kt-separation", "--t", "1", "--v", "1")[0] == 2
    assert run(capsys, "demo", "kt-completeness", "--t", "a,b")[0] == 2


def test_lindenbaum_and_canonical(capsys):
    code, out, _ = run(capsys, "lindenbaum", "p ~> q", "!q")
    assert code == 0
    assert "!p" in json.loads(out)["members"]
    assert run(capsys, "lindenbaum", "p", "!p", "--quiet")[:2] == (1, "inconsistent")
    assert run(capsys, "canonical", "!p ~> q", "--system", "FN", "--quiet")[:2] == (0, "adequate")


def test_canonical_from_mcs_file(capsys, tmp_path):
    _, out, _ = run(capsys, "lindenbaum", "p ~> q", "--system", "FS")
    path = tmp_path / "mcs.json"
    path.write_text(out)
    code, out, _ = run(capsys, "canonical", "--mcs", str(path))
    assert code == 0
    assert json.loads(out)["mode"] == "S"


def test_config_shows_active_settings(capsys, tmp_path):
    code, out, _ = run(capsys, "config")
    assert code == 0
    payload = json.loads(out)
    assert payload["settings"]["max_validation_vars"] == 16
    assert payload["health"]["status"] == "healthy"

    broken = tmp_path / "broken.yaml"
    broken.write_text("max_validation_vars: 99\n")
    payload = json.loads(run(capsys, "config", "--settings", str(broken))[1])
    assert payload["settings"]["max_validation_vars"] == 20
    assert payload["health"]["status"] == "degraded"


@pytest.mark.parametrize("verb", ["eval", "validate", "omega"])
def test_model_is_required(capsys, verb):
    argv = [verb, "p"] if verb != "omega" else ["omega", "list"]
    assert run(capsys, *argv)[0] == 2

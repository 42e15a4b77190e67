import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)


def _ensure_test_data():
    """Write a small settings file and point the toolkit at it.

    The repository ships its own ``data/settings.yaml``.  Tests use a copy with
    tighter bounds in ``tests/test_data`` so bounded searches stay quick; the
    path is handed over through ``EPSTEIN_SETTINGS_PATH`` before anything
    loads settings.
    """
    root = os.path.dirname(__file__)
    data_dir = os.path.join(root, "test_data")
    os.makedirs(data_dir, exist_ok=True)

    with open(os.path.join(data_dir, "settings.yaml"), "w", encoding="utf-8") as f:
        f.write("max_validation_vars: 16\n")
        f.write("default_depth: 3\n")
        f.write("default_samples: 20\n")
        f.write("omega_letters: [0, 1]\n")
        f.write("omega_scan_size: 6\n")
        f.write("fuzz_toggle_bound: 20\n")

    # models used by the CLI tests
    with open(os.path.join(data_dir, "related_pp.json"), "w", encoding="utf-8") as f:
        f.write('{"valuation": {"default": 0}, "relation": {"kind": "finite", "pairs": [["p", "p"]]}}\n')
    with open(os.path.join(data_dir, "true_p_empty.json"), "w", encoding="utf-8") as f:
        f.write('{"valuation": {"default": 0, "true": ["p"]}, "relation": {"kind": "empty"}}\n')
    with open(os.path.join(data_dir, "true_p_toggled.json"), "w", encoding="utf-8") as f:
        f.write('{"valuation": {"default": 0, "true": ["p"]}, "relation": {"kind": "finite", "pairs": [["p", "q"]]}}\n')

    os.environ["EPSTEIN_SETTINGS_PATH"] = os.path.join(data_dir, "settings.yaml")


_ensure_test_data()

TEST_DATA = os.path.join(os.path.dirname(__file__), "test_data")


@pytest.fixture
def test_data_dir():
    return TEST_DATA


@pytest.fixture(autouse=True)
def _restore_settings():
    from epstein.config import reset_settings

    reset_settings()
    yield
    reset_settings()

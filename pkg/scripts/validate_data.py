#!/usr/bin/env python3
"""
Data Validation Script for the Epstein toolkit

Re-verifies the curated files in the data/ directory:
- settings.yaml against the Settings model
- every proof in proofs/ is accepted, and F proofs are semantically sound
- every model in models/ loads and survives a payload round trip
- every interpolation corpus entry is a valid implication with an interpolant

Usage:
    python scripts/validate_data.py [DATA_DIR]

Returns exit code 0 if all validations pass, 1 if any validation fails.
"""

import json
import sys
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, validator

REPO_ROOT = Path(__file__).resolve().parent.parent
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from epstein.config import Settings  # noqa: E402
from epstein.errors import EpsteinError  # noqa: E402
from epstein.interpolation import interpolate  # noqa: E402
from epstein.proofsys import check_proof  # noqa: E402
from epstein.schemas import model_from_payload, model_to_payload, proof_from_payload  # noqa: E402
from epstein.syntax import implies, parse, vars_of  # noqa: E402
from epstein.translation import f_consequence, f_valid  # noqa: E402


class CorpusEntry(BaseModel):
    """Schema for one interpolation corpus entry"""

    name: str = Field(..., min_length=1)
    left: str = Field(..., min_length=1)
    right: str = Field(..., min_length=1)

    @validator('left', 'right', allow_reuse=True)
    def validate_formula(cls, v: str) -> str:
        parse(v)
        return v


class Corpus(BaseModel):
    depth: int = Field(3, ge=0)
    entries: List[CorpusEntry]


class DataValidator:
    """Main data validation class"""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def validate_all(self) -> bool:
        """Run all validation checks"""
        print("\n" + "="*60)
        print("Starting Data Validation for the Epstein toolkit")
        print("="*60 + "\n")

        self.validate_settings('settings.yaml')
        self.validate_proofs('proofs')
        self.validate_models('models')
        self.validate_corpus('interpolation_corpus.yaml')

        self.print_results()
        return len(self.errors) == 0

    def _load_yaml(self, filename: str) -> Optional[dict]:
        filepath = self.data_dir / filename
        if not filepath.exists():
            self.errors.append(f"{filename}: File not found")
            return None
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                return yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            self.errors.append(f"{filename}: Invalid YAML - {e}")
            return None

    def _record_validation_error(self, label: str, exc: ValidationError) -> None:
        for error in exc.errors():
            field = '.'.join(str(x) for x in error['loc'])
            self.errors.append(f"{label}:{field}: {error['msg']}")

    def validate_settings(self, filename: str) -> None:
        print(f"Validating {filename}...")
        content = self._load_yaml(filename)
        if content is None:
            return
        try:
            Settings(**content)
        except ValidationError as e:
            self._record_validation_error(filename, e)
            return
        print("  ✓ Settings match the schema")

    def validate_proofs(self, dirname: str) -> None:
        print(f"Validating {dirname}/...")
        proof_dir = self.data_dir / dirname
        files = sorted(proof_dir.glob('*.json'))
        if not files:
            self.warnings.append(f"{dirname}: No proofs found")
            return

        accepted = 0
        for path in files:
            label = f"{dirname}/{path.name}"
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    system, proof = proof_from_payload(json.load(f))
            except ValidationError as e:
                self._record_validation_error(label, e)
                continue
            except (json.JSONDecodeError, EpsteinError) as e:
                self.errors.append(f"{label}: {e}")
                continue

            verdict = check_proof(system, proof)
            if not verdict.ok:
                for line in verdict.errors:
                    self.errors.append(f"{label}:line {line.index}: {line.reason}")
                continue
            if system.name == 'F' and not f_consequence(proof.premises, proof.conclusion):
                self.errors.append(f"{label}: conclusion does not follow semantically from the premises")
                continue
            accepted += 1

        print(f"  ✓ Accepted {accepted}/{len(files)} proofs")

    def validate_models(self, dirname: str) -> None:
        print(f"Validating {dirname}/...")
        model_dir = self.data_dir / dirname
        files = sorted(model_dir.glob('*.json'))
        if not files:
            self.warnings.append(f"{dirname}: No models found")
            return

        loaded = 0
        for path in files:
            label = f"{dirname}/{path.name}"
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    model = model_from_payload(json.load(f))
            except ValidationError as e:
                self._record_validation_error(label, e)
                continue
            except (json.JSONDecodeError, EpsteinError) as e:
                self.errors.append(f"{label}: {e}")
                continue
            if model_from_payload(model_to_payload(model)) != model:
                self.errors.append(f"{label}: Model does not survive a payload round trip")
                continue
            loaded += 1

        print(f"  ✓ Loaded {loaded}/{len(files)} models")

    def validate_corpus(self, filename: str) -> None:
        print(f"Validating {filename}...")
        content = self._load_yaml(filename)
        if content is None:
            return
        try:
            corpus = Corpus(**content)
        except ValidationError as e:
            self._record_validation_error(filename, e)
            return

        seen: set = set()
        solved = 0
        for entry in corpus.entries:
            label = f"{filename}:{entry.name}"
            if entry.name in seen:
                self.errors.append(f"{label}: Duplicate name")
                continue
            seen.add(entry.name)

            left, right = parse(entry.left), parse(entry.right)
            if not vars_of(left) & vars_of(right):
                self.warnings.append(f"{label}: No shared letters")
            if not f_valid(implies(left, right)):
                self.errors.append(f"{label}: Implication is not valid in F")
                continue
            result = interpolate(left, right, corpus.depth)
            if result is None:
                self.errors.append(f"{label}: No interpolant within depth {corpus.depth}")
            elif not result.ok:
                self.errors.append(f"{label}: Interpolant fails its checks")
            else:
                solved += 1

        print(f"  ✓ Interpolated {solved}/{len(corpus.entries)} entries")

    def print_results(self) -> None:
        """Print validation results"""
        print("\n" + "="*60)
        print("Validation Results")
        print("="*60 + "\n")

        if self.warnings:
            print(f"⚠️  {len(self.warnings)} Warning(s):\n")
            for warning in self.warnings:
                print(f"  • {warning}")
            print()

        if self.errors:
            print(f"❌ {len(self.errors)} Error(s):\n")
            for error in self.errors:
                print(f"  • {error}")
            print()
            print("VALIDATION FAILED\n")
        else:
            print("✅ All validations passed!\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = sys.argv[1:] if argv is None else argv
    data_dir = Path(args[0]) if args else REPO_ROOT / 'data'

    if not data_dir.exists():
        print(f"ERROR: Data directory not found: {data_dir}")
        return 1

    validator = DataValidator(data_dir)
    return 0 if validator.validate_all() else 1


if __name__ == '__main__':
    sys.exit(main())

"""Realisable and separable pairs, the saturation driver and interpolant search.

A pair ``<Gamma, Sigma>`` is realisable when one model makes all of Gamma
true and all of Sigma false.  A formula over the shared letters separates
the pair when Gamma entails it and it excludes Sigma.  Separators are
searched over a bounded candidate space and every hit is re-checked with
the SAT core.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import get_settings
from .errors import PreconditionError
from .generators import make_rng, random_formula
from .semantics import CofiniteRelation, EmptyRelation, FiniteRelation, Model, Valuation, evaluate
from .syntax import (
    TOP,
    Bin,
    Connective,
    Const,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    expand_constants,
    format_formula,
    has_constants,
    implies,
    neg,
    rel_conj,
    rel_imp,
    sort_key,
    subformulas,
    vars_of,
)
from .translation import (
    Assignment,
    Atom,
    CplAtom,
    CplBin,
    CplFormula,
    CplNot,
    LetterAtom,
    PairAtom,
    atoms,
    cpl_evaluate,
    f_valid,
    model_from_assignment,
    sat_all,
    translate,
)

__all__ = [
    "Pair",
    "TraceStep",
    "InterpolationResult",
    "VacuousInterpolation",
    "realisable",
    "separates",
    "find_separator",
    "saturate",
    "model_from_pair",
    "interpolate",
    "rel_imp_noninterpolation_demo",
    "rel_imp_interpolation_check",
]

logger = logging.getLogger(__name__)


def _ordered(formulas: Iterable[Formula]) -> List[Formula]:
    return sorted(set(formulas), key=sort_key)


@dataclass(frozen=True)
class Pair:
    gamma: FrozenSet[Formula] = frozenset()
    sigma: FrozenSet[Formula] = frozenset()

    @classmethod
    def of(cls, gamma: Iterable[Formula] = (), sigma: Iterable[Formula] = ()) -> "Pair":
        return cls(frozenset(gamma), frozenset(sigma))

    @property
    def shared_vars(self) -> FrozenSet[int]:
        left = frozenset().union(*(vars_of(phi) for phi in self.gamma))
        right = frozenset().union(*(vars_of(phi) for phi in self.sigma))
        return left & right

    def with_gamma(self, phi: Formula) -> "Pair":
        return Pair(self.gamma | {phi}, self.sigma)

    def with_sigma(self, phi: Formula) -> "Pair":
        return Pair(self.gamma, self.sigma | {phi})

    def __str__(self) -> str:
        left = ", ".join(format_formula(phi) for phi in _ordered(self.gamma))
        right = ", ".join(format_formula(phi) for phi in _ordered(self.sigma))
        return f"<{{{left}}}, {{{right}}}>"


@dataclass(frozen=True)
class TraceStep:
    pair: Pair
    branch: str
    separator_found: bool


@dataclass(frozen=True)
class InterpolationResult:
    interpolant: Formula
    left_check: bool
    right_check: bool
    var_check: bool
    trace: Tuple[TraceStep, ...] = field(default_factory=tuple)
    deviation: str = ""

    @property
    def ok(self) -> bool:
        return self.left_check and self.right_check and self.var_check


def _pair_formulas(t: Pair) -> List[CplFormula]:
    formulas: List[CplFormula] = [translate(phi) for phi in _ordered(t.gamma)]
    formulas += [CplNot(translate(phi)) for phi in _ordered(t.sigma)]
    return formulas


def realisable(t: Pair) -> Optional[Model]:
    assignment = sat_all(_pair_formulas(t))
    return None if assignment is None else model_from_assignment(assignment)


def separates(chi: Formula, t: Pair) -> bool:
    if not vars_of(chi) <= t.shared_vars:
        return False
    if realisable(Pair(t.gamma, frozenset({chi}))) is not None:
        return False
    return realisable(Pair(frozenset({chi}), t.sigma)) is None


# Separator search ------------------------------------------------------------------

def _base_candidates(t: Pair) -> Tuple[List[Formula], List[Atom]]:
    """Constants, shared letters and relatedness over pairs already occurring in ``t``.

    Relatedness over any other pair adds a pair atom that neither side
    constrains; replacing it by ``F`` keeps a separator a separator.
    """

    shared = t.shared_vars
    relevant: List[Atom] = [LetterAtom(index) for index in sorted(shared)]
    candidates: List[Formula] = [Letter(index) for index in sorted(shared)]
    candidates += [Const(True), Const(False)]
    for atom in atoms(*_pair_formulas(t)):
        if not isinstance(atom, PairAtom):
            continue
        if vars_of(atom.first) | vars_of(atom.second) <= shared:
            relevant.append(atom)
            candidates.append(rel_imp(atom.first, atom.second))
            candidates.append(rel_conj(atom.first, atom.second))
    return sorted(set(candidates), key=sort_key), relevant


def _projections(formulas: Sequence[CplFormula], relevant: Sequence[Atom]) -> List[Assignment]:
    """All assignments to ``relevant`` that extend to a model of ``formulas``."""

    mentions: List[CplFormula] = [
        CplBin(Connective.OR, CplAtom(atom), CplNot(CplAtom(atom))) for atom in relevant
    ]
    blocking: List[CplFormula] = []
    found: List[Assignment] = []
    while True:
        assignment = sat_all(list(formulas) + mentions + blocking)
        if assignment is None:
            return found
        row = {atom: assignment.value(atom) for atom in relevant}
        found.append(Assignment(row))
        literals = [CplAtom(atom) if bit else CplNot(CplAtom(atom)) for atom, bit in row.items()]
        if not literals:
            return found
        clause = literals[0]
        for literal in literals[1:]:
            clause = CplBin(Connective.AND, clause, literal)
        blocking.append(CplNot(clause))


def _combine(connective: Connective, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    if connective is Connective.AND:
        return left & right
    if connective is Connective.OR:
        return left | right
    if connective is Connective.IMP:
        return ~left | right
    return left == right


def _layered(
    base: Sequence[Formula],
    depth: int,
    limit: int,
    signature=None,
) -> Iterator[Tuple[Formula, Optional[np.ndarray]]]:
    """Base candidates, then classical combinations layer by layer.

    Each layer combines at least one member of the previous layer and is
    ordered by size.  With ``signature`` candidates equal on every relevant
    row are kept once.
    """

    pool: List[Tuple[Formula, Optional[np.ndarray]]] = []
    seen = set()

    def admit(phi: Formula, sig: Optional[np.ndarray]) -> bool:
        key = sig.tobytes() if sig is not None else phi
        if key in seen:
            return False
        seen.add(key)
        pool.append((phi, sig))
        return True

    for phi in base:
        sig = signature(phi) if signature is not None else None
        if admit(phi, sig):
            yield phi, sig
    start = 0
    for _ in range(depth):
        end = len(pool)
        fresh: List[Tuple[Formula, Optional[np.ndarray]]] = []
        for phi, sig in pool[start:end]:
            fresh.append((neg(phi), None if sig is None else ~sig))
        for i in range(end):
            for j in range(end):
                if i < start and j < start:
                    continue
                left, left_sig = pool[i]
                right, right_sig = pool[j]
                for connective in (Connective.AND, Connective.OR, Connective.IMP, Connective.IFF):
                    combined = None if left_sig is None else _combine(connective, left_sig, right_sig)
                    fresh.append((Bin(connective, left, right), combined))
                if len(fresh) > limit:
                    break
            if len(fresh) > limit:
                break
        fresh.sort(key=lambda item: sort_key(item[0]))
        for phi, sig in fresh:
            if len(pool) >= limit:
                logger.warning("Separator search stopped at the %d candidate cap", limit)
                return
            if admit(phi, sig):
                yield phi, sig
        start = end
        if start == len(pool):
            return


def find_separator(t: Pair, depth: int, max_candidates: Optional[int] = None) -> Optional[Formula]:
    """First separator of ``t`` in candidate order, or ``None`` within the bound."""

    if realisable(t) is not None:
        return None
    settings = get_settings()
    limit = settings.max_separator_candidates if max_candidates is None else max_candidates
    base, relevant = _base_candidates(t)

    if len(relevant) > settings.max_signature_atoms:
        for chi, _ in _layered(base, depth, limit):
            if separates(chi, t):
                return chi
        return None

    gamma_rows = _projections([translate(phi) for phi in _ordered(t.gamma)], relevant)
    sigma_rows = _projections([CplNot(translate(phi)) for phi in _ordered(t.sigma)], relevant)
    rows = gamma_rows + sigma_rows
    must_hold = np.array([True] * len(gamma_rows) + [False] * len(sigma_rows), dtype=bool)

    def signature(phi: Formula) -> np.ndarray:
        cpl = translate(phi)
        return np.array([cpl_evaluate(row, cpl) for row in rows], dtype=bool)

    for chi, sig in _layered(base, depth, limit, signature):
        if np.array_equal(sig, must_hold) and separates(chi, t):
            logger.debug("Separator for %s: %s", t, format_formula(chi))
            return chi
    return None


# Saturation and model construction -------------------------------------------------

def saturate(phi: Formula, psi: Formula, depth: int) -> Tuple[Pair, List[TraceStep]]:
    """Extend ``<{phi}, {psi}>`` over the proper subformulas of ``phi``, then of ``psi``.

    A subformula joins its side unsigned unless that makes the pair
    separable within ``depth``; then its negation joins instead.
    """

    t = Pair.of([phi], [psi])
    trace: List[TraceStep] = []
    for chi in subformulas(phi, proper=True):
        candidate = t.with_gamma(chi)
        found = find_separator(candidate, depth) is not None
        t = t.with_gamma(neg(chi)) if found else candidate
        trace.append(TraceStep(candidate, "gamma-negated" if found else "gamma", found))
        logger.debug("Saturation (gamma) %s -> %s", format_formula(chi), trace[-1].branch)
    for chi in subformulas(psi, proper=True):
        candidate = t.with_sigma(chi)
        found = find_separator(candidate, depth) is not None
        t = t.with_sigma(neg(chi)) if found else candidate
        trace.append(TraceStep(candidate, "sigma-negated" if found else "sigma", found))
        logger.debug("Saturation (sigma) %s -> %s", format_formula(chi), trace[-1].branch)
    return t, trace


def _relatedness_pair(phi: Formula, connective: Connective) -> Optional[FormulaPair]:
    if isinstance(phi, Bin) and phi.connective is connective:
        return FormulaPair(phi.left, phi.right)
    return None


def _negated(phi: Formula) -> Optional[Formula]:
    return phi.operand if isinstance(phi, Neg) else None


def model_from_pair(t: Pair, reading: str = "positive") -> Model:
    """The model read off a saturated pair.

    ``positive``: a pair is related when its ``~>`` or ``^`` formula is in
    Gamma or its negation is in Sigma.  ``complementary``: a pair is
    unrelated only when ``a ~> b`` and its negation sit in Gamma and
    ``a ^ b`` and its negation sit in Sigma.
    """

    letters: Dict[int, bool] = {}
    for phi in t.gamma:
        if isinstance(phi, Letter):
            letters[phi.index] = True
    for phi in t.sigma:
        inner = _negated(phi)
        if isinstance(inner, Letter):
            letters[inner.index] = True
    valuation = Valuation.of(False, letters)

    if reading == "positive":
        pairs = set()
        for phi in t.gamma:
            for connective in (Connective.REL_IMP, Connective.REL_CONJ):
                pair = _relatedness_pair(phi, connective)
                if pair is not None:
                    pairs.add(pair)
        for phi in t.sigma:
            inner = _negated(phi)
            if inner is None:
                continue
            for connective in (Connective.REL_IMP, Connective.REL_CONJ):
                pair = _relatedness_pair(inner, connective)
                if pair is not None:
                    pairs.add(pair)
        return Model(valuation, FiniteRelation(frozenset(pairs)))

    if reading == "complementary":
        excluded = set()
        for phi in t.gamma:
            pair = _relatedness_pair(phi, Connective.REL_IMP)
            if pair is None or neg(phi) not in t.gamma:
                continue
            conj_form = rel_conj(pair.first, pair.second)
            if conj_form in t.sigma and neg(conj_form) in t.sigma:
                excluded.add(pair)
        return Model(valuation, CofiniteRelation(frozenset(excluded)))

    raise PreconditionError(f"unknown reading {reading!r}")


# Interpolation ---------------------------------------------------------------------

def interpolate(phi: Formula, psi: Formula, depth: int) -> Optional[InterpolationResult]:
    """Find ``chi`` over the shared letters with ``phi -> chi`` and ``chi -> psi`` in F.

    The checks on the result are recomputed independently of the search.
    """

    if not f_valid(implies(phi, psi)):
        raise PreconditionError(f"{format_formula(implies(phi, psi))} is not valid in F")
    root = Pair.of([phi], [psi])
    chi = find_separator(root, depth)
    trace = (TraceStep(root, "root", chi is not None),)
    if chi is None:
        logger.warning("No interpolant within depth %d for %s", depth, format_formula(implies(phi, psi)))
        return None

    shared = vars_of(phi) & vars_of(psi)
    deviation = ""
    if has_constants(chi):
        if 0 in shared:
            chi = expand_constants(chi)
        else:
            deviation = "interpolant keeps variable-free constants because p0 is not shared"
    result = InterpolationResult(
        interpolant=chi,
        left_check=f_valid(implies(phi, chi)),
        right_check=f_valid(implies(chi, psi)),
        var_check=vars_of(chi) <= shared,
        trace=trace,
        deviation=deviation,
    )
    logger.info("Interpolant %s (checks ok: %s)", format_formula(chi), result.ok)
    return result


def rel_imp_noninterpolation_demo(samples: int = 20, seed: int = 0) -> Model:
    """A model falsifying every ``~>`` formula, so no ``~>`` implication is in F."""

    model = Model(Valuation.constant(False), EmptyRelation())
    rng = make_rng(seed)
    probes = [rel_imp(Letter(1), Letter(1)), rel_imp(TOP, TOP)]
    probes += [rel_imp(random_formula(rng, 3), random_formula(rng, 3)) for _ in range(samples)]
    survivors = [phi for phi in probes if evaluate(model, phi)]
    if survivors:
        raise RuntimeError(f"empty relation satisfied {format_formula(survivors[0])}")
    return model


class VacuousInterpolation(NamedTuple):
    holds_vacuously: bool
    countermodel: Model


def rel_imp_interpolation_check(phi: Formula, psi: Formula) -> VacuousInterpolation:
    model = Model(Valuation.constant(False), EmptyRelation())
    target = rel_imp(phi, psi)
    vacuous = not evaluate(model, target) and not f_valid(target)
    return VacuousInterpolation(vacuous, model)

"""Standard translation into classical logic and the SAT core behind it.

``translate`` maps a formula to a classical formula over letters and pair
atoms ``a<phi, psi>``; pair atoms are indexed by the untranslated pair.
Validity in F, consequence and classical-instance checks all reduce to
satisfiability, decided by a small DPLL solver over a Tseitin encoding.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .semantics import FiniteRelation, Model, Valuation, pairs_of
from .syntax import (
    CLASSICAL,
    RELATEDNESS,
    Bin,
    Connective,
    Const,
    Formula,
    FormulaPair,
    Letter,
    Neg,
    format_formula,
    letter_name,
)

__all__ = [
    "LetterAtom",
    "PairAtom",
    "SkeletonAtom",
    "Atom",
    "CplAtom",
    "CplNot",
    "CplBin",
    "CplConst",
    "CplFormula",
    "Assignment",
    "translate",
    "atoms",
    "assignment_of",
    "cpl_evaluate",
    "cpl_not",
    "cpl_and",
    "sat",
    "sat_all",
    "f_valid",
    "f_countermodel",
    "f_consequence",
    "skeleton",
    "is_cpl_instance",
    "model_from_assignment",
    "format_atom",
    "format_cpl",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class LetterAtom:
    index: int


@dataclass(frozen=True, slots=True)
class PairAtom:
    first: Formula
    second: Formula

    @property
    def pair(self) -> FormulaPair:
        return FormulaPair(self.first, self.second)


@dataclass(frozen=True, slots=True)
class SkeletonAtom:
    """Stand-in for a letter or a maximal relatedness subformula."""

    formula: Formula


Atom = Union[LetterAtom, PairAtom, SkeletonAtom]


@dataclass(frozen=True, slots=True, eq=False)
class CplAtom:
    atom: Atom
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("A", self.atom)))

    def __eq__(self, other: object) -> bool:
        return self is other or (other.__class__ is CplAtom and other.atom == self.atom)  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class CplConst:
    value: bool
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("K", self.value)))

    def __eq__(self, other: object) -> bool:
        return self is other or (other.__class__ is CplConst and other.value == self.value)  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class CplNot:
    operand: "CplFormula"
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("N", self.operand._hash)))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return other.__class__ is CplNot and other._hash == self._hash and other.operand == self.operand  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class CplBin:
    connective: Connective
    left: "CplFormula"
    right: "CplFormula"
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.connective not in CLASSICAL:
            raise ValueError(f"{self.connective.name} is not a classical connective")
        object.__setattr__(self, "_hash", hash(("B", self.connective.value, self.left._hash, self.right._hash)))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if other.__class__ is not CplBin or other._hash != self._hash:  # type: ignore[attr-defined]
            return False
        return (
            self.connective is other.connective  # type: ignore[attr-defined]
            and self.left == other.left  # type: ignore[attr-defined]
            and self.right == other.right  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return self._hash


CplFormula = Union[CplAtom, CplNot, CplBin, CplConst]


def cpl_not(operand: CplFormula) -> CplNot:
    return CplNot(operand)


def cpl_and(left: CplFormula, right: CplFormula) -> CplBin:
    return CplBin(Connective.AND, left, right)


@dataclass(frozen=True)
class Assignment:
    values: Mapping[Atom, bool] = field(default_factory=dict)
    default: bool = False

    def value(self, atom: Atom) -> bool:
        return self.values.get(atom, self.default)

    def true_atoms(self) -> List[Atom]:
        return [atom for atom, bit in self.values.items() if bit]


# Translation -----------------------------------------------------------------------

@lru_cache(maxsize=8192)
def translate(phi: Formula) -> CplFormula:
    """``St``: classical clauses map homomorphically, relatedness adds a pair atom."""

    cache: Dict[Formula, CplFormula] = {}

    def walk(node: Formula) -> CplFormula:
        hit = cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Letter):
            result: CplFormula = CplAtom(LetterAtom(node.index))
        elif isinstance(node, Const):
            result = CplConst(node.value)
        elif isinstance(node, Neg):
            result = CplNot(walk(node.operand))
        elif node.connective in CLASSICAL:
            result = CplBin(node.connective, walk(node.left), walk(node.right))
        else:
            inner = Connective.IMP if node.connective is Connective.REL_IMP else Connective.AND
            result = CplBin(
                Connective.AND,
                CplBin(inner, walk(node.left), walk(node.right)),
                CplAtom(PairAtom(node.left, node.right)),
            )
        cache[node] = result
        return result

    return walk(phi)


def atoms(*formulas: CplFormula) -> Tuple[Atom, ...]:
    """Atoms in order of first occurrence, scanning left to right."""

    seen: Dict[Atom, None] = {}
    for formula in formulas:
        stack: List[CplFormula] = [formula]
        while stack:
            node = stack.pop()
            if isinstance(node, CplAtom):
                seen.setdefault(node.atom, None)
            elif isinstance(node, CplNot):
                stack.append(node.operand)
            elif isinstance(node, CplBin):
                stack.append(node.right)
                stack.append(node.left)
    return tuple(seen)


def assignment_of(model: Model, atom_set: Iterable[Atom]) -> Assignment:
    values: Dict[Atom, bool] = {}
    for atom in atom_set:
        if isinstance(atom, LetterAtom):
            values[atom] = model.valuation.value(atom.index)
        elif isinstance(atom, PairAtom):
            values[atom] = atom.pair in model.relation
        else:
            raise TypeError("skeleton atoms have no reading in a model")
    return Assignment(values)


def cpl_evaluate(assignment: Assignment, formula: CplFormula) -> bool:
    if isinstance(formula, CplAtom):
        return assignment.value(formula.atom)
    if isinstance(formula, CplNot):
        return not cpl_evaluate(assignment, formula.operand)
    if isinstance(formula, CplConst):
        return formula.value
    left = cpl_evaluate(assignment, formula.left)
    connective = formula.connective
    if connective is Connective.AND:
        return left and cpl_evaluate(assignment, formula.right)
    if connective is Connective.OR:
        return left or cpl_evaluate(assignment, formula.right)
    right = cpl_evaluate(assignment, formula.right)
    if connective is Connective.IMP:
        return (not left) or right
    return left == right


# SAT core --------------------------------------------------------------------------

class _Tseitin:
    """Clause encoding with original atoms numbered first, in occurrence order."""

    def __init__(self, atom_order: Sequence[Atom]) -> None:
        self.atom_vars: Dict[Atom, int] = {atom: index + 1 for index, atom in enumerate(atom_order)}
        self.num_vars = len(atom_order)
        self.clauses: List[Tuple[int, ...]] = []
        self._cache: Dict[CplFormula, int] = {}
        self._true_var: Optional[int] = None

    def _fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def _truth(self) -> int:
        if self._true_var is None:
            self._true_var = self._fresh()
            self.clauses.append((self._true_var,))
        return self._true_var

    def literal(self, node: CplFormula) -> int:
        hit = self._cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, CplAtom):
            lit = self.atom_vars[node.atom]
        elif isinstance(node, CplConst):
            lit = self._truth() if node.value else -self._truth()
        elif isinstance(node, CplNot):
            lit = -self.literal(node.operand)
        else:
            a = self.literal(node.left)
            b = self.literal(node.right)
            g = self._fresh()
            connective = node.connective
            if connective is Connective.AND:
                self.clauses += [(-g, a), (-g, b), (g, -a, -b)]
            elif connective is Connective.OR:
                self.clauses += [(g, -a), (g, -b), (-g, a, b)]
            elif connective is Connective.IMP:
                self.clauses += [(g, a), (g, -b), (-g, -a, b)]
            else:
                self.clauses += [(-g, -a, b), (-g, a, -b), (g, a, b), (g, -a, -b)]
            lit = g
        self._cache[node] = lit
        return lit

    def require(self, node: CplFormula) -> None:
        self.clauses.append((self.literal(node),))


class _Dpll:
    """Chronological-backtracking DPLL with two watched literals, no learning."""

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]]) -> None:
        self.num_vars = num_vars
        self.values: List[Optional[bool]] = [None] * (num_vars + 1)
        self.trail: List[int] = []
        self.clauses: List[List[int]] = []
        self.watches: Dict[int, List[int]] = {}
        self.units: List[int] = []
        self.conflict = False
        for raw in clauses:
            lits = list(dict.fromkeys(raw))
            if any(-lit in lits for lit in lits):
                continue
            if not lits:
                self.conflict = True
            elif len(lits) == 1:
                self.units.append(lits[0])
            else:
                index = len(self.clauses)
                self.clauses.append(lits)
                self.watches.setdefault(lits[0], []).append(index)
                self.watches.setdefault(lits[1], []).append(index)

    def _value(self, lit: int) -> Optional[bool]:
        bit = self.values[lit if lit > 0 else -lit]
        if bit is None:
            return None
        return bit if lit > 0 else not bit

    def _assign(self, lit: int) -> None:
        self.values[lit if lit > 0 else -lit] = lit > 0
        self.trail.append(lit)

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            lit = self.trail.pop()
            self.values[lit if lit > 0 else -lit] = None

    def _propagate(self, head: int) -> bool:
        while head < len(self.trail):
            false_lit = -self.trail[head]
            head += 1
            watchers = self.watches.get(false_lit)
            if not watchers:
                continue
            i = 0
            while i < len(watchers):
                index = watchers[i]
                clause = self.clauses[index]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                other = clause[0]
                if self._value(other) is True:
                    i += 1
                    continue
                for k in range(2, len(clause)):
                    if self._value(clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(index)
                        watchers[i] = watchers[-1]
                        watchers.pop()
                        break
                else:
                    if self._value(other) is False:
                        return False
                    self._assign(other)
                    i += 1
        return True

    def solve(self) -> Optional[List[Optional[bool]]]:
        if self.conflict:
            return None
        for lit in self.units:
            bit = self._value(lit)
            if bit is False:
                return None
            if bit is None:
                self._assign(lit)
        if not self._propagate(0):
            return None

        decisions: List[Tuple[int, int, bool]] = []
        cursor = 1
        while True:
            while cursor <= self.num_vars and self.values[cursor] is not None:
                cursor += 1
            if cursor > self.num_vars:
                return self.values
            var = cursor
            mark = len(self.trail)
            decisions.append((mark, var, False))
            self._assign(-var)
            while not self._propagate(mark):
                while decisions and decisions[-1][2]:
                    self._undo(decisions.pop()[0])
                if not decisions:
                    return None
                mark, var, _ = decisions.pop()
                self._undo(mark)
                decisions.append((mark, var, True))
                self._assign(var)
                cursor = var + 1
            cursor = var + 1


def sat_all(formulas: Sequence[CplFormula]) -> Optional[Assignment]:
    """Satisfy every formula at once; branch on atoms in first-occurrence order."""

    order = atoms(*formulas)
    encoder = _Tseitin(order)
    for formula in formulas:
        encoder.require(formula)
    values = _Dpll(encoder.num_vars, encoder.clauses).solve()
    if values is None:
        return None
    return Assignment({atom: bool(values[index + 1]) for index, atom in enumerate(order)})


def sat(formula: CplFormula) -> Optional[Assignment]:
    return sat_all([formula])


# Decision procedures for F ---------------------------------------------------------

def f_countermodel(phi: Formula) -> Optional[Model]:
    assignment = sat(CplNot(translate(phi)))
    return None if assignment is None else model_from_assignment(assignment)


def f_valid(phi: Formula) -> bool:
    return sat(CplNot(translate(phi))) is None


def f_consequence(premises: Iterable[Formula], phi: Formula) -> bool:
    formulas: List[CplFormula] = [translate(premise) for premise in premises]
    formulas.append(CplNot(translate(phi)))
    return sat_all(formulas) is None


def skeleton(phi: Formula) -> CplFormula:
    """Abstract letters and maximal relatedness subformulas into shared atoms."""

    if isinstance(phi, Letter) or (isinstance(phi, Bin) and phi.connective in RELATEDNESS):
        return CplAtom(SkeletonAtom(phi))
    if isinstance(phi, Const):
        return CplConst(phi.value)
    if isinstance(phi, Neg):
        return CplNot(skeleton(phi.operand))
    return CplBin(phi.connective, skeleton(phi.left), skeleton(phi.right))


def is_cpl_instance(phi: Formula) -> bool:
    """True when ``phi`` is a substitution instance of a classical tautology."""

    return sat(CplNot(skeleton(phi))) is None


def model_from_assignment(assignment: Assignment) -> Model:
    """Letters read the valuation (default 0); true pair atoms form the relation."""

    letters = {atom.index: bit for atom, bit in assignment.values.items() if isinstance(atom, LetterAtom)}
    pairs = [
        (atom.first, atom.second)
        for atom, bit in assignment.values.items()
        if bit and isinstance(atom, PairAtom)
    ]
    return Model(Valuation.of(False, letters), FiniteRelation(pairs_of(pairs)))


def format_atom(atom: Atom) -> str:
    if isinstance(atom, LetterAtom):
        return letter_name(atom.index)
    if isinstance(atom, PairAtom):
        return f"a<{format_formula(atom.first)}, {format_formula(atom.second)}>"
    return f"[{format_formula(atom.formula)}]"


def format_cpl(formula: CplFormula) -> str:
    if isinstance(formula, CplAtom):
        return format_atom(formula.atom)
    if isinstance(formula, CplConst):
        return "T" if formula.value else "F"
    if isinstance(formula, CplNot):
        inner = format_cpl(formula.operand)
        return "!" + (f"({inner})" if isinstance(formula.operand, CplBin) else inner)

    def side(node: CplFormula) -> str:
        text = format_cpl(node)
        return f"({text})" if isinstance(node, CplBin) else text

    return f"{side(formula.left)} {formula.connective.value} {side(formula.right)}"

"""Formula representation, parsing, printing, substitution and tower builders.

Formulas are immutable trees with structural equality.  ``T`` and ``F`` in
source text are sugar for ``p0 | !p0`` and ``!(p0 | !p0)``; :class:`Const` is an
internal nullary node used only for variable-free separators and is never
produced by :func:`parse`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput

from .errors import FormulaSyntaxError

__all__ = [
    "Connective",
    "Letter",
    "Neg",
    "Bin",
    "Const",
    "Formula",
    "FormulaPair",
    "Substitution",
    "TOP",
    "BOTTOM",
    "letter",
    "neg",
    "conj",
    "disj",
    "implies",
    "iff",
    "rel_imp",
    "rel_conj",
    "parse",
    "parse_many",
    "format_formula",
    "letter_name",
    "substitute",
    "compose_substitutions",
    "match_schema",
    "vars_of",
    "subformulas",
    "imp_tower",
    "lambda_tower",
    "neg_tower",
    "k_formula",
    "lambda_formula",
    "size",
    "connective_count",
    "sort_key",
    "pair_sort_key",
    "expand_constants",
    "has_constants",
]


class Connective(str, Enum):
    AND = "&"
    OR = "|"
    IMP = "->"
    IFF = "<->"
    REL_IMP = "~>"
    REL_CONJ = "^"


CLASSICAL = frozenset({Connective.AND, Connective.OR, Connective.IMP, Connective.IFF})
RELATEDNESS = frozenset({Connective.REL_IMP, Connective.REL_CONJ})

_RANK = {conn: rank for rank, conn in enumerate(Connective)}


@dataclass(frozen=True, slots=True, eq=False)
class Letter:
    index: int
    _hash: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("letter indices are natural numbers")
        object.__setattr__(self, "_hash", hash(("L", self.index)))
        object.__setattr__(self, "_size", 1)
        object.__setattr__(self, "_key", (0, self.index))

    def __eq__(self, other: object) -> bool:
        return self is other or (other.__class__ is Letter and other.index == self.index)  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=False)
class Const:
    value: bool
    _hash: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("C", self.value)))
        object.__setattr__(self, "_size", 1)
        object.__setattr__(self, "_key", (1, int(self.value)))

    def __eq__(self, other: object) -> bool:
        return self is other or (other.__class__ is Const and other.value == self.value)  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=False)
class Neg:
    operand: "Formula"
    _hash: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("N", self.operand._hash)))
        object.__setattr__(self, "_size", 1 + self.operand._size)
        object.__setattr__(self, "_key", (2, self.operand._key))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if other.__class__ is not Neg or other._hash != self._hash:  # type: ignore[attr-defined]
            return False
        return self.operand == other.operand  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=False)
class Bin:
    connective: Connective
    left: "Formula"
    right: "Formula"
    _hash: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("B", self.connective.value, self.left._hash, self.right._hash)))
        object.__setattr__(self, "_size", 1 + self.left._size + self.right._size)
        object.__setattr__(self, "_key", (3, _RANK[self.connective], self.left._key, self.right._key))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if other.__class__ is not Bin or other._hash != self._hash:  # type: ignore[attr-defined]
            return False
        return (
            self.connective is other.connective  # type: ignore[attr-defined]
            and self.left == other.left  # type: ignore[attr-defined]
            and self.right == other.right  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Letter, Neg, Bin, Const]
Substitution = Mapping[int, Formula]


class FormulaPair(NamedTuple):
    first: Formula
    second: Formula

    def __str__(self) -> str:
        return f"<{format_formula(self.first)}, {format_formula(self.second)}>"


def letter(index: int) -> Letter:
    return Letter(index)


def neg(operand: Formula) -> Neg:
    return Neg(operand)


def conj(left: Formula, right: Formula) -> Bin:
    return Bin(Connective.AND, left, right)


def disj(left: Formula, right: Formula) -> Bin:
    return Bin(Connective.OR, left, right)


def implies(left: Formula, right: Formula) -> Bin:
    return Bin(Connective.IMP, left, right)


def iff(left: Formula, right: Formula) -> Bin:
    return Bin(Connective.IFF, left, right)


def rel_imp(left: Formula, right: Formula) -> Bin:
    return Bin(Connective.REL_IMP, left, right)


def rel_conj(left: Formula, right: Formula) -> Bin:
    return Bin(Connective.REL_CONJ, left, right)


P0 = Letter(0)
TOP: Formula = disj(P0, neg(P0))
BOTTOM: Formula = neg(TOP)


# Parsing ---------------------------------------------------------------------------

_GRAMMAR = r"""
?start: iff

?iff: imp
    | iff "<->" imp -> iff_

?imp: disj
    | disj "->" imp -> imp_
    | disj "~>" imp -> rel_imp_

?disj: conj
    | disj "|" conj -> or_

?conj: neg
    | conj "&" neg -> and_
    | conj "^" neg -> rel_conj_

?neg: "!" neg -> not_
    | "(" iff ")"
    | atom

?atom: LETTER -> letter
    | "T" -> top
    | "F" -> bottom

LETTER: /p[0-9]+|[pqrst]/

%import common.WS
%ignore WS
"""

_ALIASES: Dict[str, int] = {"p": 1, "q": 2, "r": 3, "s": 4, "t": 5}
_NAMES: Dict[int, str] = {index: name for name, index in _ALIASES.items()}


def _letter_index(token: str) -> int:
    if token in _ALIASES:
        return _ALIASES[token]
    return int(token[1:])


class _FormulaBuilder(Transformer):
    def letter(self, children):
        return Letter(_letter_index(str(children[0])))

    def top(self, _children):
        return TOP

    def bottom(self, _children):
        return BOTTOM

    def not_(self, children):
        return Neg(children[0])

    def and_(self, children):
        return Bin(Connective.AND, children[0], children[1])

    def rel_conj_(self, children):
        return Bin(Connective.REL_CONJ, children[0], children[1])

    def or_(self, children):
        return Bin(Connective.OR, children[0], children[1])

    def imp_(self, children):
        return Bin(Connective.IMP, children[0], children[1])

    def rel_imp_(self, children):
        return Bin(Connective.REL_IMP, children[0], children[1])

    def iff_(self, children):
        return Bin(Connective.IFF, children[0], children[1])


_PARSER = Lark(_GRAMMAR, parser="lalr", transformer=_FormulaBuilder())


def parse(text: str) -> Formula:
    """Parse ASCII formula text into a :data:`Formula`.

    Raises :class:`FormulaSyntaxError` carrying the character offset of the
    first offending token (the text length when input ends early).
    """

    try:
        return _PARSER.parse(text)
    except UnexpectedInput as exc:
        position = getattr(exc, "pos_in_stream", None)
        column = getattr(exc, "column", None)
        # $END borrows the position of the last real token
        at_end = getattr(getattr(exc, "token", None), "type", None) == "$END"
        if at_end or position is None or position < 0:
            position = len(text)
            column = None
        if column is not None and column < 0:
            column = None
        detail = str(exc).strip().splitlines()[0] if str(exc).strip() else ""
        raise FormulaSyntaxError(text, position, column, detail) from None


# Printing --------------------------------------------------------------------------

_PREC = {
    Connective.IFF: 1,
    Connective.IMP: 2,
    Connective.REL_IMP: 2,
    Connective.OR: 3,
    Connective.AND: 4,
    Connective.REL_CONJ: 4,
}
_RIGHT_ASSOC = frozenset({Connective.IMP, Connective.REL_IMP})


def letter_name(index: int) -> str:
    return _NAMES.get(index, f"p{index}")


def _prec(phi: Formula) -> int:
    if isinstance(phi, Bin):
        return _PREC[phi.connective]
    if isinstance(phi, Neg):
        return 5
    return 6


def format_formula(phi: Formula) -> str:
    """Render with the fewest parentheses that still parse back to ``phi``.

    Mixed ``->``/``~>`` chains are always parenthesised.
    """

    if isinstance(phi, Letter):
        return letter_name(phi.index)
    if isinstance(phi, Const):
        return "T" if phi.value else "F"
    if isinstance(phi, Neg):
        inner = format_formula(phi.operand)
        return "!" + (f"({inner})" if _prec(phi.operand) < 5 else inner)

    level = _PREC[phi.connective]
    left = format_formula(phi.left)
    right = format_formula(phi.right)
    if phi.connective in _RIGHT_ASSOC:
        wrap_left = _prec(phi.left) <= level
        wrap_right = _prec(phi.right) < level or (
            isinstance(phi.right, Bin)
            and phi.right.connective in _RIGHT_ASSOC
            and phi.right.connective is not phi.connective
        )
    else:
        wrap_left = _prec(phi.left) < level
        wrap_right = _prec(phi.right) <= level
    if wrap_left:
        left = f"({left})"
    if wrap_right:
        right = f"({right})"
    return f"{left} {phi.connective.value} {right}"


# Structural operations -------------------------------------------------------------

def substitute(sigma: Substitution, phi: Formula) -> Formula:
    if not sigma:
        return phi
    cache: Dict[Formula, Formula] = {}

    def walk(node: Formula) -> Formula:
        hit = cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Letter):
            result = sigma.get(node.index, node)
        elif isinstance(node, Const):
            result = node
        elif isinstance(node, Neg):
            result = Neg(walk(node.operand))
        else:
            result = Bin(node.connective, walk(node.left), walk(node.right))
        cache[node] = result
        return result

    return walk(phi)


def compose_substitutions(sigma: Substitution, tau: Substitution) -> Dict[int, Formula]:
    """Pointwise composition: applying the result equals ``sigma`` after ``tau``."""

    composed: Dict[int, Formula] = {index: substitute(sigma, image) for index, image in tau.items()}
    for index, image in sigma.items():
        composed.setdefault(index, image)
    return composed


def match_schema(schema: Formula, target: Formula) -> Optional[Dict[int, Formula]]:
    """One-sided matching: the unique ``sigma`` with ``sigma(schema) == target``."""

    bindings: Dict[int, Formula] = {}

    def walk(pattern: Formula, node: Formula) -> bool:
        if isinstance(pattern, Letter):
            bound = bindings.get(pattern.index)
            if bound is None:
                bindings[pattern.index] = node
                return True
            return bound == node
        if isinstance(pattern, Const):
            return pattern == node
        if isinstance(pattern, Neg):
            return isinstance(node, Neg) and walk(pattern.operand, node.operand)
        return (
            isinstance(node, Bin)
            and node.connective is pattern.connective
            and walk(pattern.left, node.left)
            and walk(pattern.right, node.right)
        )

    return bindings if walk(schema, target) else None


def vars_of(phi: Formula) -> FrozenSet[int]:
    found = set()
    stack: List[Formula] = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Letter):
            found.add(node.index)
        elif isinstance(node, Neg):
            stack.append(node.operand)
        elif isinstance(node, Bin):
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(found)


def subformulas(phi: Formula, proper: bool = False) -> List[Formula]:
    """Post-order enumeration without duplicates; ``phi`` itself comes last."""

    seen = set()
    ordered: List[Formula] = []

    def walk(node: Formula) -> None:
        if isinstance(node, Neg):
            walk(node.operand)
        elif isinstance(node, Bin):
            walk(node.left)
            walk(node.right)
        if node not in seen:
            seen.add(node)
            ordered.append(node)

    walk(phi)
    if proper:
        ordered.pop()
    return ordered


def imp_tower(base: Formula, n: int) -> Formula:
    tower = base
    for _ in range(n):
        tower = implies(base, tower)
    return tower


def lambda_tower(p: Formula, q: Formula, n: int) -> Formula:
    tower: Formula = rel_imp(q, p)
    for _ in range(n):
        tower = implies(p, tower)
    return tower


def neg_tower(n: int) -> Formula:
    tower = TOP
    for _ in range(n):
        tower = neg(tower)
    return tower


def k_formula(n: int, p: Formula = Letter(1)) -> Formula:
    """``p ~> p^n``, the generator of the K-family logics."""

    return rel_imp(p, imp_tower(p, n))


def lambda_formula(n: int, p: Formula = Letter(1), q: Formula = Letter(2)) -> Formula:
    """``q ~> p^n`` with the tower of the second family."""

    return rel_imp(q, lambda_tower(p, q, n))


def size(phi: Formula) -> int:
    return phi._size


def connective_count(phi: Formula) -> int:
    count = 0
    stack: List[Formula] = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Neg):
            count += 1
            stack.append(node.operand)
        elif isinstance(node, Bin):
            count += 1
            stack.append(node.left)
            stack.append(node.right)
    return count


def sort_key(phi: Formula) -> Tuple[int, tuple]:
    return (phi._size, phi._key)


def pair_sort_key(pair: Tuple[Formula, Formula]) -> Tuple[int, tuple, tuple]:
    first, second = pair
    return (first._size + second._size, sort_key(first), sort_key(second))


def has_constants(phi: Formula) -> bool:
    return any(isinstance(node, Const) for node in subformulas(phi))


def expand_constants(phi: Formula) -> Formula:
    """Replace internal constants by the ``p0`` sugar used for ``T`` and ``F``."""

    if isinstance(phi, Const):
        return TOP if phi.value else BOTTOM
    if isinstance(phi, Letter):
        return phi
    if isinstance(phi, Neg):
        return Neg(expand_constants(phi.operand))
    return Bin(phi.connective, expand_constants(phi.left), expand_constants(phi.right))


def parse_many(texts: Iterable[str]) -> List[Formula]:
    return [parse(text) for text in texts]

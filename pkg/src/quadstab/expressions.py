"""Expression trees for formal objects of the derived category, with a parser.

Grammar (also emitted by the pretty-printer):

    obj     := 'O(' divisor ')' | 'OE(' int ',' int ')'
             | 'shift(' obj ',' int ')'
             | 'L(' obj ',' obj ')' | 'R(' obj ',' obj ')'
             | 'sum(' obj {',' obj} ')'
             | 'cone(' obj ',' obj ')' | 'zero()' | NAME
    divisor := '' | signed term { ('+'|'-') term },  term := [int] ('H'|'h'|'k')

L and R are mutation nodes; they are elaborated into cones by the calculus
during normalization.  Cones parsed from text carry no provenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .geometry import DivisorClass, SurfaceDivisor


class ParseError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class FormalObject:
    """Base class for expression-tree nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Zero(FormalObject):
    pass


@dataclass(frozen=True)
class LineAtom(FormalObject):
    """Line bundle O(D) on the threefold."""

    divisor: DivisorClass


@dataclass(frozen=True)
class PushAtom(FormalObject):
    """Sheaf O_E(d, e) on the embedded quadric surface."""

    beta: SurfaceDivisor


@dataclass(frozen=True)
class Shift(FormalObject):
    child: FormalObject
    n: int


@dataclass(frozen=True)
class Sum(FormalObject):
    children: tuple[FormalObject, ...]


@dataclass(frozen=True)
class Mutation:
    """Provenance record for a cone produced by a mutation functor."""

    direction: str  # 'left' or 'right'
    through: FormalObject
    operand: FormalObject


@dataclass(frozen=True)
class Cone(FormalObject):
    """Third vertex of the triangle source -> target -> cone -> source[1]."""

    source: FormalObject
    target: FormalObject
    provenance: str = "unspecified"
    mutation: Optional[Mutation] = None


@dataclass(frozen=True)
class MutateLeftNode(FormalObject):
    """Unevaluated left mutation L(e, x); removed by normalization."""

    e: FormalObject
    x: FormalObject


@dataclass(frozen=True)
class MutateRightNode(FormalObject):
    """Unevaluated right mutation R(x, e); removed by normalization."""

    x: FormalObject
    e: FormalObject


PROVENANCES = ("evaluation", "restriction", "euler", "universalExtension", "unspecified")


def line(nH: int = 0, nh: int = 0, nk: int = 0) -> LineAtom:
    return LineAtom(DivisorClass(nH, nh, nk))


def push(d: int, e: int) -> PushAtom:
    return PushAtom(SurfaceDivisor(d, e))


def shifted(x: FormalObject, n: int) -> FormalObject:
    if n == 0:
        return x
    if isinstance(x, Shift):
        return shifted(x.child, x.n + n)
    if isinstance(x, Zero):
        return x
    return Shift(x, n)


def strip_shift(x: FormalObject) -> tuple[FormalObject, int]:
    """Peel outer shifts, returning (core, total shift)."""
    n = 0
    while isinstance(x, Shift):
        n += x.n
        x = x.child
    return x, n


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, names: Optional[dict[str, FormalObject]] = None):
        self.text = text
        self.pos = 0
        self.names = names or {}

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise self.error(f"expected '{ch}'")
        self.pos += 1

    def read_int(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        token = self.text[start : self.pos]
        if token in ("", "+", "-"):
            raise self.error("expected an integer")
        return int(token)

    def read_word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a name")
        return self.text[start : self.pos]

    def parse_divisor(self) -> DivisorClass:
        coeffs = {"H": 0, "h": 0, "k": 0}
        self.skip_ws()
        if self.peek() == ")":
            return DivisorClass(0, 0, 0)
        first = True
        while True:
            self.skip_ws()
            sign = 1
            if self.peek() == "+":
                self.pos += 1
            elif self.peek() == "-":
                sign = -1
                self.pos += 1
            elif not first:
                break
            self.skip_ws()
            mag = 1
            if self.pos < len(self.text) and self.text[self.pos].isdigit():
                start = self.pos
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
                mag = int(self.text[start : self.pos])
            self.skip_ws()
            if self.pos >= len(self.text) or self.text[self.pos] not in "Hhk":
                raise self.error("expected one of H, h, k")
            coeffs[self.text[self.pos]] += sign * mag
            self.pos += 1
            first = False
            if self.peek() not in "+-":
                break
        return DivisorClass(coeffs["H"], coeffs["h"], coeffs["k"])

    def parse_object(self) -> FormalObject:
        word = self.read_word()
        if word == "O":
            self.expect("(")
            d = self.parse_divisor()
            self.expect(")")
            return LineAtom(d)
        if word == "OE":
            self.expect("(")
            d = self.read_int()
            self.expect(",")
            e = self.read_int()
            self.expect(")")
            return PushAtom(SurfaceDivisor(d, e))
        if word == "shift":
            self.expect("(")
            x = self.parse_object()
            self.expect(",")
            n = self.read_int()
            self.expect(")")
            return Shift(x, n)
        if word == "L":
            self.expect("(")
            e = self.parse_object()
            self.expect(",")
            x = self.parse_object()
            self.expect(")")
            return MutateLeftNode(e, x)
        if word == "R":
            self.expect("(")
            x = self.parse_object()
            self.expect(",")
            e = self.parse_object()
            self.expect(")")
            return MutateRightNode(x, e)
        if word == "sum":
            self.expect("(")
            children = [self.parse_object()]
            while self.peek() == ",":
                self.expect(",")
                children.append(self.parse_object())
            self.expect(")")
            return Sum(tuple(children))
        if word == "cone":
            self.expect("(")
            src = self.parse_object()
            self.expect(",")
            tgt = self.parse_object()
            self.expect(")")
            return Cone(src, tgt)
        if word == "zero":
            self.expect("(")
            self.expect(")")
            return Zero()
        if word in self.names:
            return self.names[word]
        raise self.error(f"unknown name '{word}'")


def parse_object(text: str, names: Optional[dict[str, FormalObject]] = None) -> FormalObject:
    parser = _Parser(text, names)
    obj = parser.parse_object()
    parser.skip_ws()
    if parser.pos != len(parser.text):
        raise parser.error("trailing input")
    return obj


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def pretty(x: FormalObject) -> str:
    if isinstance(x, Zero):
        return "zero()"
    if isinstance(x, LineAtom):
        d = x.divisor
        return f"O({'' if d == DivisorClass(0, 0, 0) else d})"
    if isinstance(x, PushAtom):
        return f"OE({x.beta.d},{x.beta.e})"
    if isinstance(x, Shift):
        return f"shift({pretty(x.child)},{x.n})"
    if isinstance(x, Sum):
        return "sum(" + ",".join(pretty(c) for c in x.children) + ")"
    if isinstance(x, Cone):
        return f"cone({pretty(x.source)},{pretty(x.target)})"
    if isinstance(x, MutateLeftNode):
        return f"L({pretty(x.e)},{pretty(x.x)})"
    if isinstance(x, MutateRightNode):
        return f"R({pretty(x.x)},{pretty(x.e)})"
    raise TypeError(f"cannot print {x!r}")

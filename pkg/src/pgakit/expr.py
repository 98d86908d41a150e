"""Tiny expression language over multivectors.

Lets constructions live in config files and on the command line instead
of in code, e.g. ``((Pi | P) ^ Pi) & P`` with Pi and P bound in an
environment.  Grammar, loosest binding first:

    expr     = join
    join     = wedge  { "&" wedge }          regressive product
    wedge    = inner  { "^" inner }          outer (meet in dual algebras)
    inner    = product { "|" product }       left contraction
    product  = unary { "*" unary }           geometric product
    unary    = { "~" | "!" | "-" } postfix   reverse, complement map, negate
    postfix  = primary { "#" }               polarity (right factor I)
    primary  = NUMBER | BLADE | IDENT
             | "(" expr ")"
             | "<" expr ">" INT              grade selection

BLADE is ``e`` plus digits (``e0``, ``e12``, ``e012``); any other word
is an identifier looked up in the environment.  All binary operators are
left-associative.  There is deliberately no addition and no assignment:
anything that needs a sum is built in code and bound to a name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .algebra import Algebra, GAError, Multivector
from .duality import j_map, join, polarity


class ParseError(GAError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class EvalError(GAError):
    pass


# -- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    line: int = field(default=0, compare=False, kw_only=True)
    col: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Blade(Node):
    name: str


@dataclass(frozen=True)
class Name(Node):
    ident: str


@dataclass(frozen=True)
class Unary(Node):
    op: str  # "~" and "!" print as prefixes, "#" as a postfix
    operand: Node


@dataclass(frozen=True)
class GradeSel(Node):
    operand: Node
    k: int


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node


BINDING = {"&": 10, "^": 20, "|": 30, "*": 40}


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<word>[A-Za-z_]\w*)"
    r"|(?P<op>[-&^|*~!#()<>])"
)
_BLADE = re.compile(r"e\d+\Z")


@dataclass(frozen=True)
class _Token:
    kind: str  # number | blade | ident | op | end
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}",
                             line, pos - start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - start + 1
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                start = pos + text.rindex("\n") + 1
        elif kind == "word":
            sub = "blade" if _BLADE.match(text) else "ident"
            out.append(_Token(sub, text, line, col))
        else:
            out.append(_Token(kind, text, line, col))
        pos = m.end()
    out.append(_Token("end", "", line, len(src) - start + 1))
    return out


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def here(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.here
        self.i += 1
        return t

    def fail(self, message: str):
        t = self.here
        raise ParseError(message, t.line, t.col)

    def expect(self, text: str):
        if self.here.kind != "op" or self.here.text != text:
            self.fail(f"expected {text!r}")
        return self.advance()

    def parse(self) -> Node:
        node = self.binary(0)
        if self.here.kind != "end":
            self.fail(f"unexpected {self.here.text!r}")
        return node

    def binary(self, min_bp: int) -> Node:
        left = self.unary()
        while (self.here.kind == "op" and self.here.text in BINDING
               and BINDING[self.here.text] >= min_bp):
            t = self.advance()
            # climb with bp+1 so equal precedence associates left
            right = self.binary(BINDING[t.text] + 1)
            left = Binary(t.text, left, right, line=t.line, col=t.col)
        return left

    def unary(self) -> Node:
        if self.here.kind == "op" and self.here.text in ("~", "!", "-"):
            t = self.advance()
            operand = self.unary()
            if t.text == "-" and isinstance(operand, Num):
                # fold so printing a negative literal reparses to itself
                return Num(-operand.value, line=t.line, col=t.col)
            return Unary(t.text, operand, line=t.line, col=t.col)
        return self.postfix()

    def postfix(self) -> Node:
        node = self.primary()
        while self.here.kind == "op" and self.here.text == "#":
            t = self.advance()
            node = Unary("#", node, line=t.line, col=t.col)
        return node

    def primary(self) -> Node:
        t = self.here
        if t.kind == "number":
            self.advance()
            return Num(float(t.text), line=t.line, col=t.col)
        if t.kind == "blade":
            self.advance()
            return Blade(t.text, line=t.line, col=t.col)
        if t.kind == "ident":
            self.advance()
            return Name(t.text, line=t.line, col=t.col)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.binary(0)
            self.expect(")")
            return node
        if t.kind == "op" and t.text == "<":
            self.advance()
            node = self.binary(0)
            self.expect(">")
            k = self.here
            if k.kind != "number" or not k.text.isdigit():
                self.fail("grade index must be a plain integer")
            self.advance()
            return GradeSel(node, int(k.text), line=t.line, col=t.col)
        self.fail("expected a value" if t.kind == "end"
                  else f"unexpected {t.text!r}")


def parse(src: str) -> Node:
    return _Parser(_tokenize(src)).parse()


# -- evaluation ---------------------------------------------------------------


def evaluate(node: Node, alg: Algebra, env: dict[str, Multivector]) -> Multivector:
    if isinstance(node, Num):
        return alg.scalar(node.value)
    if isinstance(node, Blade):
        try:
            return alg.blade(node.name)
        except GAError:
            raise EvalError(f"line {node.line}, column {node.col}: "
                            f"no blade {node.name!r} in this algebra") from None
    if isinstance(node, Name):
        bound = env.get(node.ident)
        if bound is None:
            raise EvalError(f"line {node.line}, column {node.col}: "
                            f"unbound name {node.ident!r}")
        if bound.algebra is not alg:
            raise EvalError(f"{node.ident!r} is bound in a different algebra")
        return bound
    if isinstance(node, Unary):
        x = evaluate(node.operand, alg, env)
        if node.op == "~":
            return x.reverse()
        if node.op == "!":
            return j_map(x)
        if node.op == "-":
            return -x
        return polarity(x)
    if isinstance(node, GradeSel):
        return evaluate(node.operand, alg, env).grade(node.k)
    if isinstance(node, Binary):
        a = evaluate(node.left, alg, env)
        b = evaluate(node.right, alg, env)
        if node.op == "*":
            return a.gp(b)
        if node.op == "^":
            return a.outer(b)
        if node.op == "|":
            return a.left_contract(b)
        return join(a, b)
    raise EvalError(f"cannot evaluate {type(node).__name__}")


# -- printing -----------------------------------------------------------------


def _bp(node: Node) -> int:
    if isinstance(node, Binary):
        return BINDING[node.op]
    return 100


def to_text(node: Node) -> str:
    """Canonical text form; parse(to_text(n)) == n up to positions."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Blade):
        return node.name
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Unary):
        inner = to_text(node.operand)
        needs_parens = isinstance(node.operand, Binary) or (
            node.op == "#" and (
                isinstance(node.operand, Unary) and node.operand.op != "#"
                # a printed minus sign would capture the postfix
                or isinstance(node.operand, Num) and inner.startswith("-")))
        if needs_parens:
            inner = f"({inner})"
        return inner + "#" if node.op == "#" else node.op + inner
    if isinstance(node, GradeSel):
        return f"<{to_text(node.operand)}>{node.k}"
    if isinstance(node, Binary):
        lhs, rhs = to_text(node.left), to_text(node.right)
        if _bp(node.left) < _bp(node):
            lhs = f"({lhs})"
        if _bp(node.right) <= _bp(node):
            rhs = f"({rhs})"
        return f"{lhs} {node.op} {rhs}"
    raise EvalError(f"cannot print {type(node).__name__}")

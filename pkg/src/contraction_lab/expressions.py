"""Parsing and evaluation of the small arithmetic language used for custom
triangle functions, distance formulas and interval self-maps.

Grammar ('^' is right-associative and binds a unary base):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := unary ("^" factor)?
    unary  := "-" unary | atom
    atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"

Numbers are decimal with an optional exponent.  Identifiers are limited to
the variables x, y, u, v and the functions abs, min, max, sqrt.  Evaluation
is double precision throughout; numpy arrays pass through element-wise, so a
parsed expression can be applied to whole sample batches at once.  Division
by zero and fractional powers of negatives produce inf/nan rather than
raising; callers that need finite non-negative values check the result.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

VARIABLES = ("x", "y", "u", "v")

# function name -> (min arity, max arity or None for unbounded)
FUNCTIONS = {"abs": (1, 1), "sqrt": (1, 1), "min": (2, None), "max": (2, None)}


class ExpressionError(ValueError):
    """Base class for problems with expression text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class ExpressionSyntaxError(ExpressionError):
    """Malformed expression text."""


class UnknownIdentifierError(ExpressionError):
    """Identifier outside the allowed variables and functions."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Node", ...]


Node = Union[Num, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "ident" | "op" | "end"
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = str(match.lastgroup)
        tokens.append(Token(kind, match.group(), match.start()))
        pos = match.end()
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], allowed_vars: frozenset[str]):
        self.tokens = tokens
        self.index = 0
        self.allowed_vars = allowed_vars

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect_op(self, text: str) -> Token:
        token = self.peek()
        if token.kind != "op" or token.text != text:
            raise ExpressionSyntaxError(f"expected {text!r}", token.pos)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        tail = self.peek()
        if tail.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {tail.text!r}", tail.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        base = self.unary()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def unary(self) -> Node:
        token = self.peek()
        if token.kind == "op" and token.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Node:
        token = self.advance()
        if token.kind == "num":
            value = float(token.text)
            if not np.isfinite(value):
                raise ExpressionSyntaxError("numeric literal overflows", token.pos)
            return Num(value)
        if token.kind == "ident":
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.call(token)
            if token.text in FUNCTIONS:
                raise ExpressionSyntaxError(
                    f"{token.text!r} is a function and needs arguments", token.pos
                )
            if token.text not in VARIABLES:
                raise UnknownIdentifierError(
                    f"unknown identifier {token.text!r}", token.pos
                )
            if token.text not in self.allowed_vars:
                allowed = ", ".join(sorted(self.allowed_vars))
                raise UnknownIdentifierError(
                    f"variable {token.text!r} not allowed here (allowed: {allowed})",
                    token.pos,
                )
            return Var(token.text)
        if token.kind == "op" and token.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionSyntaxError("expected a value", token.pos)

    def call(self, name: Token) -> Node:
        if name.text not in FUNCTIONS:
            raise UnknownIdentifierError(f"unknown function {name.text!r}", name.pos)
        self.expect_op("(")
        args = [self.expr()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.expr())
        self.expect_op(")")
        lo, hi = FUNCTIONS[name.text]
        if len(args) < lo or (hi is not None and len(args) > hi):
            wanted = str(lo) if hi == lo else f"at least {lo}"
            raise ExpressionSyntaxError(
                f"{name.text} expects {wanted} argument(s), got {len(args)}", name.pos
            )
        return Call(name.text, tuple(args))


def _free_vars(node: Node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, Neg):
        return _free_vars(node.operand)
    if isinstance(node, BinOp):
        return _free_vars(node.left) | _free_vars(node.right)
    if isinstance(node, Call):
        out: frozenset[str] = frozenset()
        for arg in node.args:
            out |= _free_vars(arg)
        return out
    return frozenset()


# Grammar slots, loosest to tightest.  A node prints bare in a slot when its
# own rank is at least the slot's; otherwise it gets wrapped in parentheses.
_RANK_EXPR, _RANK_TERM, _RANK_FACTOR, _RANK_UNARY, _RANK_ATOM = range(5)


def _rank(node: Node) -> int:
    if isinstance(node, (Num, Var, Call)):
        return _RANK_ATOM
    if isinstance(node, Neg):
        return _RANK_UNARY
    if isinstance(node, BinOp):
        if node.op == "^":
            return _RANK_FACTOR
        if node.op in "*/":
            return _RANK_TERM
        return _RANK_EXPR
    raise TypeError(f"not an expression node: {node!r}")


def unparse(node: Node, slot: int = _RANK_EXPR) -> str:
    """Render a tree back to text that reparses to an identical tree."""
    if _rank(node) < slot:
        return "(" + unparse(node, _RANK_EXPR) + ")"
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + unparse(node.operand, _RANK_UNARY)
    if isinstance(node, Call):
        args = ", ".join(unparse(a, _RANK_EXPR) for a in node.args)
        return f"{node.func}({args})"
    if node.op == "^":
        return unparse(node.left, _RANK_UNARY) + "^" + unparse(node.right, _RANK_FACTOR)
    if node.op in "*/":
        return unparse(node.left, _RANK_TERM) + node.op + unparse(node.right, _RANK_FACTOR)
    return unparse(node.left, _RANK_EXPR) + node.op + unparse(node.right, _RANK_TERM)


def _eval(node: Node, env: dict):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        try:
            value = env[node.name]
        except KeyError:
            raise ValueError(f"no value supplied for variable {node.name!r}") from None
        return np.asarray(value, dtype=np.float64)
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        args = [_eval(a, env) for a in node.args]
        if node.func == "abs":
            return np.abs(args[0])
        if node.func == "sqrt":
            return np.sqrt(args[0])
        if node.func == "min":
            return functools.reduce(np.minimum, args)
        return functools.reduce(np.maximum, args)
    left = _eval(node.left, env)
    right = _eval(node.right, env)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        return np.divide(left, right)
    return np.power(left, right)


@dataclass(frozen=True)
class Expression:
    """A parsed expression: source text, tree and free variables."""

    source: str
    tree: Node
    variables: frozenset[str]

    def __call__(self, **env):
        """Evaluate with keyword bindings; arrays broadcast element-wise."""
        with np.errstate(all="ignore"):
            result = _eval(self.tree, env)
        if np.ndim(result) == 0:
            return float(result)
        return result

    def text(self) -> str:
        """Canonical rendering; reparsing it reproduces the same tree."""
        return unparse(self.tree)


def parse_expression(text: str, allowed: Iterable[str] | None = None) -> Expression:
    """Parse ``text``; ``allowed`` restricts which variables may appear."""
    allowed_vars = frozenset(VARIABLES if allowed is None else allowed)
    tokens = _tokenize(text)
    tree = _Parser(tokens, allowed_vars).parse()
    return Expression(text, tree, _free_vars(tree))

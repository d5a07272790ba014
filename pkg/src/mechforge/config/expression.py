"""Scalar expressions for time/space dependent boundary data.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := primary ('^' unary)?          # right associative
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Variables are ``t, x, y, z``; functions are ``sin, cos, exp, sqrt``.
Evaluation accepts floats or numpy arrays (broadcast elementwise).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import EvalError, ExprSyntaxError, UnknownIdentifier

VARIABLES = ("t", "x", "y", "z")
FUNCTIONS = ("sin", "cos", "exp", "sqrt")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))")


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
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


def _tokenize(src):
    tokens = []
    pos = 0
    raw = src.encode("utf-8")
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            stripped = len(src[pos:]) - len(src[pos:].lstrip())
            bad = pos + stripped
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}",
                                  len(src[:bad].encode("utf-8")))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(src[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, off = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", off)

    def parse(self):
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in VARIABLES:
                return Var(text)
            raise UnknownIdentifier(text, off)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", off)


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        arg = _eval(node.arg, env)
        if node.func == "sqrt":
            if np.any(np.asarray(arg) < 0):
                raise EvalError("sqrt of negative argument")
            return np.sqrt(arg)
        if node.func == "exp":
            if np.any(np.asarray(arg) > 709.0):
                raise EvalError("exp overflow")
            return np.exp(arg)
        return np.sin(arg) if node.func == "sin" else np.cos(arg)
    a = _eval(node.left, env)
    b = _eval(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(np.asarray(b) == 0):
            raise EvalError("division by zero")
        return a / b
    with np.errstate(all="raise", under="ignore"):
        try:
            out = np.power(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        except FloatingPointError as exc:
            raise EvalError(f"invalid power: {exc}") from None
    if np.any(np.isnan(out)):
        raise EvalError("power of negative base with fractional exponent")
    return out if np.ndim(out) else float(out)


def _unparse(node, parent_prec=0, right=False):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({_unparse(node.arg)})"
    if isinstance(node, Neg):
        s = "-" + _unparse(node.operand, 3)
        return f"({s})" if parent_prec > 3 else s
    prec = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[node.op]
    if node.op == "^":
        s = f"{_unparse(node.left, 5)}^{_unparse(node.right, 3)}"
    else:
        s = f"{_unparse(node.left, prec)}{node.op}{_unparse(node.right, prec + 1)}"
    return f"({s})" if prec < parent_prec else s


@dataclass(frozen=True)
class ScalarExpression:
    """Parsed expression; equality is structural (AST based)."""

    ast: Node

    def __call__(self, t=0.0, x=0.0, y=0.0, z=0.0):
        return evaluate(self, t, (x, y, z))

    def depends_on(self, name):
        return name in _names(self.ast)

    @property
    def is_constant(self):
        return not _names(self.ast)

    def __str__(self):
        return _unparse(self.ast)


def _names(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return _names(node.operand)
    if isinstance(node, Call):
        return _names(node.arg)
    return _names(node.left) | _names(node.right)


def parse_expression(src):
    """Parse ``src`` (a string, or a plain number) into a ScalarExpression."""
    if isinstance(src, bool):
        raise ExprSyntaxError("boolean is not an expression", 0)
    if isinstance(src, (int, float)):
        return ScalarExpression(Num(float(src)))
    if not isinstance(src, str):
        raise ExprSyntaxError(f"expected string, got {type(src).__name__}", 0)
    return ScalarExpression(_Parser(src).parse())


def evaluate(expr, t, x=(0.0, 0.0, 0.0)):
    """Evaluate at time ``t`` and position ``x``.

    ``x`` may be a length-2/3 sequence of scalars or an ``(n, dim)`` array,
    in which case an array of ``n`` values is returned.
    """
    if isinstance(x, np.ndarray) and x.ndim == 2:
        cols = [x[:, i] for i in range(x.shape[1])]
        cols += [np.zeros(x.shape[0])] * (3 - len(cols))
        env = dict(zip(VARIABLES, [t] + cols))
        out = _eval(expr.ast, env)
        return np.broadcast_to(np.asarray(out, dtype=float), (x.shape[0],)).copy()
    coords = list(x) + [0.0] * (3 - len(x))
    env = dict(zip(VARIABLES, [t] + coords))
    out = _eval(expr.ast, env)
    return out if isinstance(out, np.ndarray) else float(out)

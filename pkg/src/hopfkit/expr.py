"""The ``expr-v1`` expression language: tokenizer, parser, printer, evaluators.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?            # right-associative
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Names are ``x``, ``z1``, ``z2``, ... (variables), ``pi`` and ``e``
(constants) and the calls ``exp sin cos log abs`` (one argument) and
``pow`` (two arguments).  There is no implicit multiplication: ``2x`` is a
syntax error.  A non-integer power of a negative base is a domain error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import (
    DomainError,
    NonDifferentiableError,
    ParseError,
    SingularityError,
    UnboundVariableError,
)
from .jets import Jet

GRAMMAR_VERSION = "expr-v1"

FUNCTIONS = {"exp": 1, "sin": 1, "cos": 1, "log": 1, "abs": 1, "pow": 2}
CONSTANTS = {"pi": math.pi, "e": math.e}
_VAR_RE = re.compile(r"^(x|z[1-9][0-9]*)$")


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Const:
    name: str
    pos: int = field(default=0, compare=False)

    @property
    def value(self) -> float:
        return CONSTANTS[self.name]


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    pos: int = field(default=0, compare=False)


Node = Num | Const | Var | Unary | Binary | Call


def variables(node) -> set[str]:
    """Set of variable names referenced by the tree."""
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Unary):
        return variables(node.operand)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= variables(a)
        return out
    return set()


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if kind == "num" and not math.isfinite(float(text)):
                raise ParseError(f"number {text!r} overflows", pos, source)
            tokens.append(Token(kind, text, pos))
        pos = m.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.pos, self.source)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
        self.error(f"expected {text!r}, found {found}")

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            if self.tok.text == ")":
                self.error("unbalanced ')'")
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.advance()
            node = Binary(t.text, node, self.term(), t.pos)
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.advance()
            node = Binary(t.text, node, self.unary(), t.pos)
        return node

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in "+-":
            t = self.advance()
            return Unary(t.text, self.unary(), t.pos)
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            t = self.advance()
            return Binary("^", base, self.unary(), t.pos)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text), t.pos)
        if t.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(t)
            if t.text in FUNCTIONS:
                self.error(f"function {t.text!r} needs an argument list")
            if t.text in CONSTANTS:
                return Const(t.text, t.pos)
            if _VAR_RE.match(t.text):
                return Var(t.text, t.pos)
            self.error(f"unknown identifier {t.text!r}", t)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.error("unbalanced '('" if self.tok.kind == "end" else f"expected ')', found {self.tok.text!r}")
            self.advance()
            return node
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def call(self, name_tok: Token):
        if name_tok.text not in FUNCTIONS:
            self.error(f"unknown function {name_tok.text!r}", name_tok)
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        if not (self.tok.kind == "op" and self.tok.text == ")"):
            self.error("unbalanced '('" if self.tok.kind == "end" else f"expected ')', found {self.tok.text!r}")
        self.advance()
        arity = FUNCTIONS[name_tok.text]
        if len(args) != arity:
            self.error(f"{name_tok.text} takes {arity} argument(s), got {len(args)}", name_tok)
        return Call(name_tok.text, tuple(args), name_tok.pos)


def parse(source: str):
    """Parse ``source`` into an expression tree; raises :class:`ParseError`."""
    if not source or not source.strip():
        raise ParseError("empty expression", 0, source or "")
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# printer

def _fmt_num(v: float) -> str:
    r = repr(float(v))
    return r


def to_source(node) -> str:
    """Fully parenthesized source text; ``parse(to_source(t)) == t``."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        return f"({node.op}{to_source(node.operand)})"
    if isinstance(node, Binary):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation

def _plain_pow(base, r):
    n = jets.integer_exponent(r)
    if n is not None:
        if n == 0:
            return np.ones_like(base) if isinstance(base, np.ndarray) else 1.0
        result = base
        for _ in range(abs(n) - 1):
            result = result * base
        if n < 0:
            if np.any(np.asarray(result) == 0):
                raise SingularityError("negative power of zero")
            result = 1.0 / result
        return result
    if np.any(np.asarray(base) < 0):
        raise DomainError("non-integer power of a negative base")
    if np.any((np.asarray(base) == 0) & (np.asarray(r) < 0)):
        raise SingularityError("negative power of zero")
    return np.power(base, r)


def evaluate(node, env: dict):
    """Plain recursive evaluation on floats or numpy arrays (no derivatives)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise UnboundVariableError(f"variable {node.name!r} is not bound") from None
    if isinstance(node, Unary):
        v = evaluate(node.operand, env)
        return -v if node.op == "-" else v
    if isinstance(node, Binary):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(np.asarray(b) == 0):
                raise SingularityError("division by zero")
            return a / b
        return _plain_pow(a, b)
    if isinstance(node, Call):
        args = [evaluate(a, env) for a in node.args]
        fn = node.fn
        if fn == "pow":
            return _plain_pow(args[0], args[1])
        v = args[0]
        if fn == "exp":
            return np.exp(v)
        if fn == "sin":
            return np.sin(v)
        if fn == "cos":
            return np.cos(v)
        if fn == "log":
            if np.any(np.asarray(v) <= 0):
                raise DomainError("log of a non-positive value")
            return np.log(v)
        return np.abs(v)
    raise TypeError(f"not an expression node: {node!r}")


def _jet_pow(base: Jet, expo: Jet) -> Jet:
    if all(not np.any(d) for d in expo.derivs[1:]):
        return jets.power(base, expo.value)
    return jets.exp(expo * jets.log(base))


def eval_jet(node, bindings: dict, order: int) -> Jet:
    """Evaluate to a jet of ``order``; bindings map variable names to jets.

    Bound jets may carry a higher order than requested and are truncated.
    Derivatives are taken with respect to the common independent variable
    of the bound jets (``x``); z-variables carry the jets of whatever
    functions were substituted for them.
    """
    prepared = {}
    point = None
    for name, j in bindings.items():
        if not isinstance(j, Jet):
            continue
        if j.order < order:
            raise NonDifferentiableError(
                f"binding {name!r} has order {j.order} < requested {order}")
        prepared[name] = j.truncate(order)
        if point is None:
            point = j.point
    for name, j in bindings.items():
        if not isinstance(j, Jet):
            prepared[name] = Jet.constant(j, point if point is not None else 0.0, order)
    if point is None:
        point = 0.0
    return _eval_jet(node, prepared, order, point)


def _eval_jet(node, env, order, point) -> Jet:
    if isinstance(node, (Num, Const)):
        return Jet.constant(node.value, point, order)
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise UnboundVariableError(f"variable {node.name!r} is not bound") from None
    if isinstance(node, Unary):
        v = _eval_jet(node.operand, env, order, point)
        return -v if node.op == "-" else v
    if isinstance(node, Binary):
        a = _eval_jet(node.left, env, order, point)
        b = _eval_jet(node.right, env, order, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return _jet_pow(a, b)
    if isinstance(node, Call):
        args = [_eval_jet(a, env, order, point) for a in node.args]
        if node.fn == "pow":
            return _jet_pow(args[0], args[1])
        return jets.jet_elementary(node.fn, args[0])
    raise TypeError(f"not an expression node: {node!r}")

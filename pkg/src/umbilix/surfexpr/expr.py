"""Expression language for surface definitions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'u' | 'v' | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

so ``^`` binds tightest and is right-associative, and ``-u^2`` means ``-(u^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ExprSyntaxError, NonFiniteError, UnknownIdentifierError

VARIABLES = ("u", "v")
FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "log": 1, "sqrt": 1, "atan2": 2}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    offset: int  # byte offset into the UTF-8 source


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", byte_pos)
        text = m.group()
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, text, byte_pos))
        pos = m.end()
        byte_pos += len(text.encode("utf-8"))
    tokens.append(Token("end", "", byte_pos))
    return tokens


# --------------------------------------------------------------------------
# parser

_ATOM_START = frozenset({"number", "u", "v", "(", "-"} | set(FUNCTIONS))


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind != "op":
            self.fail({text})
        return self.advance()

    def fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else f"token {tok.text!r}"
        raise ExprSyntaxError(f"unexpected {what}", tok.offset, expected)

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                return self.call(tok)
            raise UnknownIdentifierError(tok.text, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(_ATOM_START)

    def call(self, name_tok: Token) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        arity = FUNCTIONS[name_tok.text]
        if len(args) != arity:
            if len(args) < arity:
                self.fail({","})
            raise ExprSyntaxError(
                f"{name_tok.text} takes {arity} argument(s), got {len(args)}",
                name_tok.offset,
            )
        self.expect(")")
        return Call(name_tok.text, tuple(args))


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises ExprSyntaxError (with byte offset and expected tokens) or
    UnknownIdentifierError.
    """
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# pretty printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _fmt_num(x: float) -> str:
    if x < 0 or not np.isfinite(x):
        raise ValueError(f"cannot print literal {x!r}; build negatives with Neg")
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def to_source(node: Expr) -> str:
    """Render with the minimal parentheses needed for ``parse`` to rebuild ``node``."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        if _prec(node.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        # the base of a power must be an atom; the exponent may be any unary
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _NEG_PREC:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------------------
# helpers for building trees programmatically


def num(x: float) -> Expr:
    x = float(x)
    return Neg(Num(-x)) if x < 0 else Num(x)


def add(*terms: Expr) -> Expr:
    node = terms[0]
    for t in terms[1:]:
        node = BinOp("+", node, t)
    return node


def sub(a: Expr, b: Expr) -> Expr:
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    return BinOp("/", a, b)


def power(a: Expr, n) -> Expr:
    return BinOp("^", a, num(n))


def integer_exponent(node: Expr):
    """Return the exponent as an int if ``node`` is a (possibly negated) integer literal."""
    sign = 1
    while isinstance(node, Neg):
        sign = -sign
        node = node.operand
    if isinstance(node, Num) and float(node.value).is_integer():
        return sign * int(node.value)
    return None


# --------------------------------------------------------------------------
# plain float evaluation (no derivatives); also serves as the value oracle


def _check(mask, what):
    if np.any(mask):
        raise NonFiniteError(what)


def evaluate(node: Expr, u, v):
    """Evaluate ``node`` at arrays (or scalars) ``u``, ``v`` with plain floats."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    cache: dict[int, np.ndarray] = {}

    def ev(n):
        key = id(n)
        if key in cache:
            return cache[key]
        if isinstance(n, Num):
            out = np.float64(n.value)
        elif isinstance(n, Var):
            out = u if n.name == "u" else v
        elif isinstance(n, Neg):
            out = -ev(n.operand)
        elif isinstance(n, BinOp):
            a = ev(n.left)
            if n.op == "^":
                k = integer_exponent(n.right)
                if k is not None:
                    if k < 0:
                        _check(a == 0, "zero raised to a negative power")
                    out = np.power(a, float(k)) if k < 0 else a ** k
                else:
                    b = ev(n.right)
                    _check(a <= 0, "non-integer power of a non-positive base")
                    out = np.exp(b * np.log(a))
            else:
                b = ev(n.right)
                if n.op == "+":
                    out = a + b
                elif n.op == "-":
                    out = a - b
                elif n.op == "*":
                    out = a * b
                else:
                    _check(b == 0, "division by zero")
                    out = a / b
        else:
            args = [ev(x) for x in n.args]
            f = n.func
            if f == "log":
                _check(args[0] <= 0, "log of a non-positive number")
                out = np.log(args[0])
            elif f == "sqrt":
                _check(args[0] < 0, "sqrt of a negative number")
                out = np.sqrt(args[0])
            elif f == "atan2":
                _check((args[0] == 0) & (args[1] == 0), "atan2(0, 0)")
                out = np.arctan2(args[0], args[1])
            else:
                out = getattr(np, f)(args[0])
        cache[key] = out
        return out

    with np.errstate(all="ignore"):
        out = ev(node)
    out = np.broadcast_to(out, np.broadcast(u, v).shape).astype(float)
    _check(~np.isfinite(out), "non-finite value")
    return out

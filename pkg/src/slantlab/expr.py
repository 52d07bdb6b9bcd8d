"""Scalar expression language for immersion components.

Grammar (whitespace-insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?            # right-associative, binds tighter than unary minus
    atom    := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := sin | cos | tan | sqrt | exp | log | abs
    NAME    := declared parameter | pi | e

Exponents must be constant (no parameters). Integer exponents accept any base,
non-integer exponents need a positive base.

Evaluation propagates order-2 jets (value, gradient, Hessian) through the tree,
so second derivatives of an immersion are exact up to roundoff.
"""

from __future__ import annotations

import math
import re
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "tan", "sqrt", "exp", "log", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


# --------------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Param:
    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    arg: Expr


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    func: str
    arg: Expr


Expr = Num | Const | Param | Neg | BinOp | Call


# ------------------------------------------------------------------------ parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str, params: Sequence[str]):
        self.source = source
        self.params = {name: i for i, name in enumerate(params)}
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, offset = self.take()
        if value != text or kind != "op":
            found = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", offset)

    def parse(self) -> Expr:
        node = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {value!r}", offset)
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
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            offset = self.take()[2]
            exponent = self.unary()
            if _depends_on_params(exponent):
                raise ExprSyntaxError("exponent must be constant", offset)
            return BinOp("^", base, exponent)
        return base

    def atom(self):
        kind, value, offset = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value in self.params:
                return Param(value, self.params[value])
            if value in CONSTANTS:
                return Const(value)
            raise UnknownIdentifier(value, offset)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"unexpected {found}", offset)


def _depends_on_params(node: Expr) -> bool:
    if isinstance(node, Param):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, Neg):
        return _depends_on_params(node.arg)
    if isinstance(node, Call):
        return _depends_on_params(node.arg)
    return _depends_on_params(node.left) or _depends_on_params(node.right)


def parse(source: str, params: Sequence[str]) -> Expr:
    """Parse ``source`` against the declared parameter names."""
    for name in params:
        if name in CONSTANTS or name in FUNCTIONS:
            raise ExprSyntaxError(f"parameter name {name!r} is reserved")
    return _Parser(source, params).parse()


# ----------------------------------------------------------------- pretty printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_source(node: Expr) -> str:
    """Render an AST back to source text that reparses to the same tree."""
    return _render(node)[0]


def _render(node):
    if isinstance(node, Num):
        text = repr(float(node.value))
        if node.value < 0 or text in ("inf", "nan"):
            return f"({text})", 5
        return text, 5
    if isinstance(node, (Const, Param)):
        return node.name, 5
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)[0]})", 5
    if isinstance(node, Neg):
        text, prec = _render(node.arg)
        if prec < _PREC["neg"]:
            text = f"({text})"
        return f"-{text}", _PREC["neg"]
    prec = _PREC[node.op]
    left, lp = _render(node.left)
    right, rp = _render(node.right)
    if node.op == "^":
        # base must be an atom; exponent may be unary or another power
        if lp <= prec:
            left = f"({left})"
        if rp < _PREC["neg"]:
            right = f"({right})"
    else:
        if lp < prec:
            left = f"({left})"
        if rp <= prec:
            right = f"({right})"
    return f"{left}{node.op}{right}", prec


# ------------------------------------------------------------------------ jets


class Jet2:
    """Order-2 truncated Taylor expansion: value, gradient, Hessian."""

    __slots__ = ("value", "gradient", "hessian")

    def __init__(self, value, gradient, hessian):
        self.value = float(value)
        self.gradient = gradient
        self.hessian = hessian

    @classmethod
    def constant(cls, value, dim):
        return cls(value, np.zeros(dim), np.zeros((dim, dim)))

    @classmethod
    def variable(cls, value, index, dim):
        grad = np.zeros(dim)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((dim, dim)))

    def __add__(self, other):
        return Jet2(self.value + other.value, self.gradient + other.gradient, self.hessian + other.hessian)

    def __sub__(self, other):
        return Jet2(self.value - other.value, self.gradient - other.gradient, self.hessian - other.hessian)

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.gradient * other, self.hessian * other)
        cross = np.outer(self.gradient, other.gradient)
        return Jet2(
            self.value * other.value,
            self.value * other.gradient + other.value * self.gradient,
            self.value * other.hessian + other.value * self.hessian + cross + cross.T,
        )

    __rmul__ = __mul__

    def chain(self, f0, f1, f2):
        """Compose a scalar function with derivatives (f0, f1, f2) at self.value."""
        g = self.gradient
        return Jet2(f0, f1 * g, f1 * self.hessian + f2 * np.outer(g, g))

    def __repr__(self):
        return f"Jet2(value={self.value!r}, gradient={self.gradient.tolist()!r}, hessian={self.hessian.tolist()!r})"


def _reciprocal(x: Jet2, node) -> Jet2:
    a = x.value
    if a == 0.0:
        raise DomainError("division by zero", to_source(node))
    return x.chain(1.0 / a, -1.0 / a**2, 2.0 / a**3)


def _call(func: str, x: Jet2, node) -> Jet2:
    a = x.value
    if func == "sin":
        s, c = math.sin(a), math.cos(a)
        return x.chain(s, c, -s)
    if func == "cos":
        s, c = math.sin(a), math.cos(a)
        return x.chain(c, -s, -c)
    if func == "tan":
        c = math.cos(a)
        if c == 0.0:
            raise DomainError("tan pole", to_source(node))
        t = math.tan(a)
        sec2 = 1.0 / c**2
        return x.chain(t, sec2, 2.0 * sec2 * t)
    if func == "sqrt":
        if a <= 0.0:
            raise DomainError("sqrt of non-positive value", to_source(node))
        r = math.sqrt(a)
        return x.chain(r, 0.5 / r, -0.25 / (r * a))
    if func == "exp":
        v = math.exp(a)
        return x.chain(v, v, v)
    if func == "log":
        if a <= 0.0:
            raise DomainError("log of non-positive value", to_source(node))
        return x.chain(math.log(a), 1.0 / a, -1.0 / a**2)
    if func == "abs":
        if a == 0.0:
            raise DomainError("abs is not differentiable at 0", to_source(node))
        sign = 1.0 if a > 0 else -1.0
        return x.chain(abs(a), sign, 0.0)
    raise AssertionError(func)


def _power(base: Jet2, exponent: float, node) -> Jet2:
    a = base.value
    if float(exponent).is_integer():
        n = int(exponent)
        if n == 0:
            return Jet2.constant(1.0, base.gradient.shape[0])
        if a == 0.0 and n < 0:
            raise DomainError("division by zero", to_source(node))
        f1 = n * a ** (n - 1) if n != 1 else 1.0
        f2 = n * (n - 1) * a ** (n - 2) if n not in (0, 1) else 0.0
        return base.chain(a**n, f1, f2)
    if a <= 0.0:
        raise DomainError("non-integer power of non-positive base", to_source(node))
    p = exponent
    return base.chain(a**p, p * a ** (p - 1), p * (p - 1) * a ** (p - 2))


def eval_jet2(node: Expr, point: Sequence[float]) -> Jet2:
    """Value, gradient and Hessian of ``node`` at ``point`` (one entry per declared parameter)."""
    point = [float(v) for v in point]
    return _jet(node, point, len(point))


def _jet(node, point, dim):
    if isinstance(node, Num):
        return Jet2.constant(node.value, dim)
    if isinstance(node, Const):
        return Jet2.constant(CONSTANTS[node.name], dim)
    if isinstance(node, Param):
        return Jet2.variable(point[node.index], node.index, dim)
    if isinstance(node, Neg):
        return -_jet(node.arg, point, dim)
    if isinstance(node, Call):
        return _call(node.func, _jet(node.arg, point, dim), node)
    if node.op == "^":
        return _power(_jet(node.left, point, dim), evaluate(node.right, point), node)
    left = _jet(node.left, point, dim)
    right = _jet(node.right, point, dim)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left * _reciprocal(right, node)


def evaluate(node: Expr, point: Sequence[float]) -> float:
    """Plain float evaluation (no derivatives)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Param):
        return float(point[node.index])
    if isinstance(node, Neg):
        return -evaluate(node.arg, point)
    if isinstance(node, Call):
        a = evaluate(node.arg, point)
        if node.func in ("sqrt", "log") and a <= 0.0:
            raise DomainError(f"{node.func} of non-positive value", to_source(node))
        return getattr(math, "fabs" if node.func == "abs" else node.func)(a)
    left = evaluate(node.left, point)
    right = evaluate(node.right, point)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        if right == 0.0:
            raise DomainError("division by zero", to_source(node))
        return left / right
    if not float(right).is_integer() and left <= 0.0:
        raise DomainError("non-integer power of non-positive base", to_source(node))
    return left**right


def fd_jet2(node: Expr, point: Sequence[float], step: float = 1e-5) -> Jet2:
    """Central finite-difference estimate of the jet; a cross-check, never the main path."""
    p = np.asarray(point, dtype=float)
    d = p.size
    f0 = evaluate(node, p)
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    eye = np.eye(d) * step
    for i in range(d):
        fp, fm = evaluate(node, p + eye[i]), evaluate(node, p - eye[i])
        grad[i] = (fp - fm) / (2 * step)
        hess[i, i] = (fp - 2 * f0 + fm) / step**2
        for j in range(i + 1, d):
            fpp = evaluate(node, p + eye[i] + eye[j])
            fpm = evaluate(node, p + eye[i] - eye[j])
            fmp = evaluate(node, p - eye[i] + eye[j])
            fmm = evaluate(node, p - eye[i] - eye[j])
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4 * step**2)
    return Jet2(f0, grad, hess)

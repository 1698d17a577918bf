"""Small closed expression language used for charts, metrics and immersions.

Grammar (whitespace insensitive)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative, binds tighter
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

`pi` and `e` are constants.  Known unary functions: sin cos tan exp log
sqrt asin acos atan abs (arcsin/arccos/arctan are accepted as aliases and
canonicalized).  Everything downstream (metric entries, immersion
components, declared slant and warping functions) is an `Expr` tree, so
derivatives and compositions stay exact; only the final evaluation is
floating point.

Evaluation accepts scalars or numpy arrays in the environment and
broadcasts elementwise.  Out-of-domain input raises `DomainError` naming
the offending subexpression, which samplers treat as a degenerate sample.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Neg",
    "Call",
    "BinOp",
    "ExprError",
    "DomainError",
    "parse",
    "evaluate",
    "differentiate",
    "subst",
    "variables",
    "pretty",
    "compile_exprs",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "power",
    "const",
]


class ExprError(ValueError):
    """Parse-time or binding error."""


class DomainError(ExprError):
    """Evaluation left the mathematical domain of a subexpression."""

    def __init__(self, reason: str, node: "Expr"):
        super().__init__(f"{reason} in '{pretty(node)}'")
        self.node = node


@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Neg:
    arg: "Expr"

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return pretty(self)


Expr = Union[Const, Var, Neg, Call, BinOp]

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "asin", "acos", "atan", "abs")
_ALIASES = {"arcsin": "asin", "arccos": "acos", "arctan": "atan"}
_CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ExprError(f"unexpected character {rest[0]!r} at position {pos}")
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], names):
        self.tokens = tokens
        self.i = 0
        self.names = None if names is None else set(names)
        self.declared = names

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ExprError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, op: str):
        tok = self.peek()
        if tok is None or tok[0] != "op" or tok[1] != op:
            got = "end of input" if tok is None else repr(tok[1])
            raise ExprError(f"expected {op!r}, got {got}")
        self.i += 1

    def expr(self) -> Expr:
        node = self.term()
        while (tok := self.peek()) is not None and tok[1] in ("+", "-") and tok[0] == "op":
            self.i += 1
            node = BinOp(tok[1], node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (tok := self.peek()) is not None and tok[1] in ("*", "/") and tok[0] == "op":
            self.i += 1
            node = BinOp(tok[1], node, self.unary())
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.i += 1
            inner = self.unary()
            # fold a negated literal so '-3' means the constant -3
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.next()
        if kind == "num":
            return Const(float(value))
        if kind == "ident":
            nxt = self.peek()
            if nxt is not None and nxt[0] == "op" and nxt[1] == "(":
                fn = _ALIASES.get(value, value)
                if fn not in FUNCTIONS:
                    raise ExprError(
                        f"unknown function '{value}' at position {pos}; "
                        f"known functions: {', '.join(FUNCTIONS)}"
                    )
                self.i += 1
                arg = self.expr()
                self.expect(")")
                return Call(fn, arg)
            if value in _CONSTANTS:
                return Const(_CONSTANTS[value])
            if self.names is not None and value not in self.names:
                declared = ", ".join(self.declared)
                raise ExprError(
                    f"unknown identifier '{value}' at position {pos}; "
                    f"declared names: {declared}"
                )
            return Var(value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected token {value!r} at position {pos}")


def parse(text: str, names: Sequence[str] | None = None) -> Expr:
    """Parse `text`; if `names` is given, reject identifiers outside it."""
    parser = _Parser(_tokenize(text), names)
    node = parser.expr()
    if parser.peek() is not None:
        kind, value, pos = parser.peek()
        raise ExprError(f"trailing input {value!r} at position {pos}")
    return node


# evaluation ---------------------------------------------------------------

_FN_EVAL: dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "asin": np.arcsin,
    "acos": np.arccos,
    "atan": np.arctan,
    "abs": np.abs,
}


def _ev(node: Expr, env: Mapping[str, object]):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise ExprError(f"unbound variable '{node.name}'") from None
    if isinstance(node, Neg):
        return -_ev(node.arg, env)
    if isinstance(node, Call):
        x = _ev(node.arg, env)
        if node.fn == "log" and np.any(np.less_equal(x, 0.0)):
            raise DomainError("log of a non-positive value", node)
        if node.fn == "sqrt" and np.any(np.less(x, 0.0)):
            raise DomainError("sqrt of a negative value", node)
        if node.fn in ("asin", "acos") and np.any(np.greater(np.abs(x), 1.0)):
            raise DomainError(f"{node.fn} argument outside [-1, 1]", node)
        return _FN_EVAL[node.fn](x)
    a = _ev(node.left, env)
    b = _ev(node.right, env)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if np.any(np.equal(b, 0.0)):
            raise DomainError("division by zero", node)
        return a / b
    # '^'
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        r = np.power(a, b)
    if not np.all(np.isfinite(r)):
        raise DomainError("invalid power", node)
    return r


def evaluate(expr: Expr, env: Mapping[str, object]):
    """Evaluate with scalar or array bindings; arrays broadcast elementwise."""
    r = _ev(expr, env)
    if not np.all(np.isfinite(r)):
        raise DomainError("non-finite result", expr)
    if isinstance(r, np.ndarray):
        return r
    return float(r)


def compile_exprs(exprs: Iterable[Expr], varnames: Sequence[str]):
    """Batch evaluator: returns fn(points[N, d]) -> values[len(exprs), N]."""
    exprs = list(exprs)

    def run(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        env = {name: pts[:, j] for j, name in enumerate(varnames)}
        out = np.empty((len(exprs), pts.shape[0]))
        for i, e in enumerate(exprs):
            out[i] = evaluate(e, env)
        return out

    return run


# structure helpers --------------------------------------------------------


def variables(expr: Expr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, (Neg, Call)):
        return variables(expr.arg)
    if isinstance(expr, BinOp):
        return variables(expr.left) | variables(expr.right)
    return set()


def subst(expr: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by subtrees (composition of expressions)."""
    if isinstance(expr, Var):
        return mapping.get(expr.name, expr)
    if isinstance(expr, Neg):
        return Neg(subst(expr.arg, mapping))
    if isinstance(expr, Call):
        return Call(expr.fn, subst(expr.arg, mapping))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, subst(expr.left, mapping), subst(expr.right, mapping))
    return expr


# differentiation ----------------------------------------------------------
# Smart constructors fold constants so derivative trees stay small enough to
# nest (second derivatives of metric entries appear in curvature).


def _is_const(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    return BinOp("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Const(1.0)
    return BinOp("^", a, b)


def differentiate(expr: Expr, name: str) -> Expr:
    """Exact partial derivative with respect to `name`."""
    if isinstance(expr, Const):
        return Const(0.0)
    if isinstance(expr, Var):
        return Const(1.0 if expr.name == name else 0.0)
    if isinstance(expr, Neg):
        return _neg(differentiate(expr.arg, name))
    if isinstance(expr, BinOp):
        a, b = expr.left, expr.right
        da = differentiate(a, name)
        db = differentiate(b, name)
        if expr.op == "+":
            return _add(da, db)
        if expr.op == "-":
            return _sub(da, db)
        if expr.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if expr.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, Const(2.0)))
        # a^b: constant exponent keeps negative bases legal
        if isinstance(b, Const):
            return _mul(_mul(b, _pow(a, Const(b.value - 1.0))), da)
        return _mul(
            _pow(a, b),
            _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)),
        )
    u = expr.arg
    du = differentiate(u, name)
    fn = expr.fn
    if fn == "sin":
        outer: Expr = Call("cos", u)
    elif fn == "cos":
        outer = _neg(Call("sin", u))
    elif fn == "tan":
        return _div(du, _pow(Call("cos", u), Const(2.0)))
    elif fn == "exp":
        outer = Call("exp", u)
    elif fn == "log":
        return _div(du, u)
    elif fn == "sqrt":
        return _div(du, _mul(Const(2.0), Call("sqrt", u)))
    elif fn == "asin":
        return _div(du, Call("sqrt", _sub(Const(1.0), _pow(u, Const(2.0)))))
    elif fn == "acos":
        return _neg(_div(du, Call("sqrt", _sub(Const(1.0), _pow(u, Const(2.0))))))
    elif fn == "atan":
        return _div(du, _add(Const(1.0), _pow(u, Const(2.0))))
    else:  # abs: u/|u| * du, with the kink surfacing as division by zero
        return _div(_mul(u, du), Call("abs", u))
    return _mul(outer, du)


# public names for building expression trees in code (constant-folding)
add = _add
sub = _sub
mul = _mul
div = _div
neg = _neg
power = _pow


def const(v: float) -> Const:
    return Const(float(v))


# printing -----------------------------------------------------------------

_PREC_ADD = 10
_PREC_MUL = 20
_PREC_NEG = 30
_PREC_POW = 40
_PREC_ATOM = 50


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        if e.op in ("+", "-"):
            return _PREC_ADD
        if e.op in ("*", "/"):
            return _PREC_MUL
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Const) and e.value < 0:
        # prints with a leading minus, so it binds like a negation
        return _PREC_NEG
    return _PREC_ATOM


def _fmt_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def pretty(e: Expr) -> str:
    """Render with minimal parentheses; `parse(pretty(e)) == e` holds."""
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({pretty(e.arg)})"
    if isinstance(e, Neg):
        inner = pretty(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    p = _prec(e)
    left, right = pretty(e.left), pretty(e.right)
    if e.op == "^":
        # right associative: parenthesize an exponent base that is itself
        # a power or negation
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < p:
            right = f"({right})"
    else:
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p or _prec(e.right) == _PREC_NEG:
            right = f"({right})"
    return f"{left}{e.op}{right}"

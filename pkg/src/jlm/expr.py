"""Arithmetic expression language for stencil coefficients and boundary data.

Grammar (left-associative, ``^`` binds tightest, unary minus looser than ``^``)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' ['-'] INT)?
    atom   := NUMBER | VARIABLE | '(' expr ')'

Variables are fixed: ``x`` = x_n, ``x1`` = x_{n+1}, ``y`` = y_m, ``y1`` = y_{m+1},
and the integer indices ``n`` and ``m``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import ExprEvalError, ExprSyntaxError
from .grid import IndexDomain, OrthoLattice2D, ScalarField2D

VARIABLES = ("x", "x1", "y", "y1", "n", "m")


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
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, Neg, BinOp, Pow]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if mt is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = mt.lastgroup
        tokens.append((kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.peek()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)
        self.take()

    def parse(self) -> Expr:
        kind, _, pos = self.peek()
        if kind == "end":
            raise ExprSyntaxError("empty expression", pos)
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            if text == ")":
                raise ExprSyntaxError("unbalanced ')'", pos)
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, text, pos = self.take()
            if kind != "num" or not text.isdigit():
                found = "end of input" if kind == "end" else repr(text)
                raise ExprSyntaxError(f"exponent must be an integer literal, found {found}", pos)
            return Pow(base, sign * int(text))
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text not in VARIABLES:
                raise ExprSyntaxError(
                    f"unknown identifier {text!r} (allowed: {', '.join(VARIABLES)})", pos
                )
            return Var(text)
        if (kind, text) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"expected a number, variable or '(', found {found}", pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def to_text(e: Expr) -> str:
    """Canonical text with the minimum parentheses; ``parse(to_text(e)) == e``."""
    return _show(e, 0)


# Printing contexts: 0 free, 1 right of +/-, 2 left of * /, 3 right of * /,
# 4 operand of unary minus, 5 base of ^. A node is wrapped when ctx >= its limit.
_WRAP_AT = {"+": 1, "-": 1, "*": 3, "/": 3}


def _show(e: Expr, ctx: int) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        s = "-" + _show(e.operand, 4)
        limit = 5
    elif isinstance(e, Pow):
        s = f"{_show(e.base, 5)}^{e.exponent}"
        limit = 5
    else:
        additive = e.op in "+-"
        left = _show(e.left, 0 if additive else 2)
        right = _show(e.right, 1 if additive else 3)
        s = f"{left} {e.op} {right}"
        limit = _WRAP_AT[e.op]
    return f"({s})" if ctx >= limit else s


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Pow):
        return variables(e.base)
    return variables(e.left) | variables(e.right)


class _ZeroDivision(Exception):
    def __init__(self, where):
        self.where = where


def _ev(e: Expr, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprEvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_ev(e.operand, env)
    if isinstance(e, Pow):
        base = _ev(e.base, env)
        if e.exponent < 0:
            # check the power itself: a tiny base can underflow to zero
            den = _ipow(base, -e.exponent)
            _check_nonzero(den)
            return 1.0 / den
        return _ipow(base, e.exponent)
    a = _ev(e.left, env)
    b = _ev(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    _check_nonzero(b)
    return a / b


def _ipow(base, k: int):
    # repeated multiplication keeps scalar and array evaluation bitwise identical
    out = base * 0.0 + 1.0
    for _ in range(k):
        out = out * base
    return out


def _check_nonzero(b):
    zero = np.asarray(b) == 0
    if np.any(zero):
        raise _ZeroDivision(np.argwhere(zero)[0] if zero.ndim else None)


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Value of ``e`` with variables bound to reals."""
    env = {k: np.float64(v) for k, v in bindings.items()}
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            out = float(_ev(e, env))
    except _ZeroDivision:
        raise ExprEvalError("division by zero") from None
    if not np.isfinite(out):
        raise ExprEvalError("non-finite value")
    return out


def bind_coefficient(e: Expr, lat: OrthoLattice2D, domain: IndexDomain) -> ScalarField2D:
    """Tabulate ``e`` on every cell of ``domain``.

    Cell ``(n, m)`` binds ``x=x_n, x1=x_{n+1}, y=y_m, y1=y_{m+1}, n, m``; the
    lattice must extend one point beyond the domain in any direction whose
    shifted variable appears.
    """
    used = variables(e)
    n_extra = 1 if "x1" in used else 0
    m_extra = 1 if "y1" in used else 0
    lat.require_x(domain.n_min, domain.n_max + n_extra)
    lat.require_y(domain.m0, domain.m1 + m_extra)
    rows, cols = domain.box_shape
    n_idx = np.arange(domain.n_min, domain.n_min + cols)
    m_idx = np.arange(domain.m0, domain.m0 + rows)
    x_ext = np.append(lat.x, np.nan)
    y_ext = np.append(lat.y, np.nan)
    shape = (rows, cols)
    env = {
        "x": np.broadcast_to(x_ext[n_idx][None, :], shape),
        "x1": np.broadcast_to(x_ext[n_idx + 1][None, :], shape),
        "y": np.broadcast_to(y_ext[m_idx][:, None], shape),
        "y1": np.broadcast_to(y_ext[m_idx + 1][:, None], shape),
        "n": np.broadcast_to(n_idx.astype(np.float64)[None, :], shape),
        "m": np.broadcast_to(m_idx.astype(np.float64)[:, None], shape),
    }
    mask = domain.mask()
    # off-domain cells are evaluated on a harmless stand-in so that only
    # domain cells can trigger division errors
    env = {k: np.where(mask, v, 1.0) for k, v in env.items()}
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.broadcast_to(np.asarray(_ev(e, env), dtype=np.float64), shape)
    except _ZeroDivision as exc:
        k, i = exc.where
        raise ExprEvalError(
            "division by zero", cell=(domain.n_min + int(i), domain.m0 + int(k))
        ) from None
    bad = mask & ~np.isfinite(vals)
    if np.any(bad):
        k, i = np.argwhere(bad)[0]
        raise ExprEvalError(
            "non-finite value", cell=(domain.n_min + int(i), domain.m0 + int(k))
        )
    return ScalarField2D(domain, np.where(mask, vals, np.nan))


def bind_row(e: Expr, lat: OrthoLattice2D, n_lo: int, n_hi: int, m: int = 0) -> np.ndarray:
    """Values of ``e`` along row ``m`` for ``n = n_lo .. n_hi`` (boundary data)."""
    f = bind_coefficient(e, lat, IndexDomain.rectangle(n_lo, n_hi, m, m))
    return f.masked()

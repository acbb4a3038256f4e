"""Metric definition language: parsing, evaluation, built-in families.

The DSL stores the Finsler function F itself (the engine squares it
internally).  Expressions evaluate over a generic scalar type: feed plain
floats and you get a float back, feed jets and every retained partial
derivative propagates.  Parsed expressions are immutable and evaluation is
pure, so concurrent use needs no synchronization.

Grammar (operator precedence ^ > unary - > */ > +-, ^ right-associative)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := base ("^" factor)?
    base   := number | symbol | func "(" expr ")" | "(" expr ")"
    func   := "sqrt" | "sin" | "cos" | "exp" | "log"
    symbol := ("x" | "y") digits          # 1-based, x1..xn / y1..yn
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (DimensionError, DomainError, HomogeneityViolation,
                     MetricSyntaxError, UnknownSymbol)
from .jets import Jet, integer_power

__all__ = [
    "MetricExpr", "MetricSpec", "parse_metric", "eval_expr",
    "check_homogeneity", "builtin_family", "metric_from_json",
]

_FUNCTIONS = ("sqrt", "sin", "cos", "exp", "log")


# ----------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float
    is_int: bool


@dataclass(frozen=True)
class Sym:
    kind: str   # 'x' or 'y'
    index: int  # 1-based


@dataclass(frozen=True)
class Bin:
    op: str     # '+', '-', '*', '/', '^'
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


# ----------------------------------------------------------------------
# Tokenizer / parser


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch in "+-*/^()":
            toks.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < len(text) and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < len(text) and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            if j < len(text) and text[j] in "eE":
                k = j + 1
                if k < len(text) and text[k] in "+-":
                    k += 1
                if k < len(text) and text[k].isdigit():
                    j = k
                    while j < len(text) and text[j].isdigit():
                        j += 1
            toks.append(_Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise MetricSyntaxError(f"unexpected character {ch!r}", line, col)
    toks.append(_Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens, dim):
        self.toks = tokens
        self.pos = 0
        self.dim = dim

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t.kind != kind:
            raise MetricSyntaxError(f"expected {kind!r}, found {t.text or 'end of input'!r}",
                                    t.line, t.col)
        return t

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t.kind != "eof":
            raise MetricSyntaxError(f"trailing input {t.text!r}", t.line, t.col)
        return e

    def expr(self):
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        if self.peek().kind == "-":
            self.next()
            return Neg(self.factor())
        return self.power()

    def power(self):
        node = self.base()
        if self.peek().kind == "^":
            self.next()
            return Bin("^", node, self.factor())
        return node

    def base(self):
        t = self.next()
        if t.kind == "num":
            text = t.text
            is_int = text.isdigit()
            return Num(float(text), is_int)
        if t.kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "name":
            name = t.text
            if name in _FUNCTIONS:
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return Call(name, e)
            if name[0] in "xy" and name[1:].isdigit():
                idx = int(name[1:])
                if not 1 <= idx <= self.dim:
                    raise UnknownSymbol(
                        f"coordinate index {name!r} out of range 1..{self.dim}",
                        t.line, t.col)
                return Sym(name[0], idx)
            raise UnknownSymbol(f"unknown symbol {name!r}", t.line, t.col)
        raise MetricSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col)


# ----------------------------------------------------------------------
# Printing (normal form used by the round-trip property)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _fmt_num(v, is_int):
    return str(int(v)) if is_int else repr(v)


def _pp(node):
    """Return (text, precedence)."""
    if isinstance(node, Num):
        return _fmt_num(node.value, node.is_int), _PREC["atom"]
    if isinstance(node, Sym):
        return f"{node.kind}{node.index}", _PREC["atom"]
    if isinstance(node, Call):
        inner, _ = _pp(node.arg)
        return f"{node.func}({inner})", _PREC["atom"]
    if isinstance(node, Neg):
        inner, p = _pp(node.arg)
        if p < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}", _PREC["neg"]
    lt, lp = _pp(node.left)
    rt, rp = _pp(node.right)
    p = _PREC[node.op]
    if node.op in ("+", "*"):
        if lp < p:
            lt = f"({lt})"
        if rp <= p:  # keep right-nested chains explicit
            rt = f"({rt})" if rp < p else rt
    if node.op in ("-", "/"):
        if lp < p:
            lt = f"({lt})"
        if rp <= p:
            rt = f"({rt})"
    if node.op == "^":
        if lp <= p:  # '^' is right associative and binds tighter than unary -
            lt = f"({lt})"
        if rp < p:
            rt = f"({rt})"
    return f"{lt}{node.op}{rt}", p


# ----------------------------------------------------------------------
# Evaluation over a generic scalar algebra


def _apply_func(name, v):
    if isinstance(v, Jet):
        return getattr(v, name)()
    if name == "sqrt":
        if v <= 0.0:
            raise DomainError("sqrt of a non-positive value")
        return float(np.sqrt(v))
    if name == "log":
        if v <= 0.0:
            raise DomainError("log of a non-positive value")
        return float(np.log(v))
    return float(getattr(np, name)(v))


def _eval(node, xs, ys):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Sym):
        return (xs if node.kind == "x" else ys)[node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.arg, xs, ys)
    if isinstance(node, Call):
        return _apply_func(node.func, _eval(node.arg, xs, ys))
    left = _eval(node.left, xs, ys)
    if node.op == "^":
        p = _eval(node.right, xs, ys)
        if isinstance(p, Jet):
            # generic exponent: a^b = exp(b*log(a))
            if isinstance(left, Jet):
                return (p * left.log()).exp()
            if left <= 0.0:
                raise DomainError("power of a non-positive base with jet exponent")
            return (p * float(np.log(left))).exp()
        if float(p).is_integer():
            return integer_power(left, int(p))
        if isinstance(left, Jet):
            return left.powf(p)
        if left <= 0.0:
            raise DomainError("non-integer power of a non-positive base")
        return float(np.power(left, p))
    right = _eval(node.right, xs, ys)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if isinstance(right, (int, float)) and right == 0.0:
        raise DomainError("division by zero")
    return left / right


# ----------------------------------------------------------------------
# Public types


@dataclass(frozen=True)
class MetricExpr:
    """A parsed, validated metric expression for the Finsler function F."""

    root: object
    dim: int
    source: str = ""

    def pretty(self):
        """Printed normal form; parsing it back reproduces the same tree."""
        return _pp(self.root)[0]

    def evaluate(self, xs, ys):
        """Value of F at the point, in the scalar algebra of the inputs."""
        return _eval(self.root, xs, ys)


def parse_metric(text, dim):
    """Parse DSL source into a :class:`MetricExpr`.

    Raises :class:`MetricSyntaxError` (with line/column),
    :class:`UnknownSymbol`, or :class:`DimensionError`.
    """
    if dim < 3:
        raise DimensionError(f"dimension {dim} below the standing hypothesis n >= 3")
    tokens = _tokenize(text)
    root = _Parser(tokens, dim).parse()
    return MetricExpr(root=root, dim=dim, source=text)


def eval_expr(expr, xs, ys):
    """Evaluate F at a point given per-coordinate scalars or jets."""
    if len(xs) != expr.dim or len(ys) != expr.dim:
        raise ValueError("coordinate count does not match the metric dimension")
    return expr.evaluate(xs, ys)


def _default_guard(x, y):
    return float(np.linalg.norm(y)) > 1e-12


@dataclass(frozen=True)
class MetricSpec:
    """A Finsler metric ready for the engine: expression, dimension, and the
    predicate deciding which (x, y) are admissible."""

    expr: MetricExpr
    dim: int
    domain_guard: Callable = _default_guard
    guard_description: str = "y != 0"
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    name: str = "custom"

    def admissible(self, x, y):
        return bool(self.domain_guard(np.asarray(x, float), np.asarray(y, float)))

    def F(self, xs, ys):
        return self.expr.evaluate(xs, ys)

    def describe(self):
        if self.family:
            return {"family": self.family, "params": self.params, "dim": self.dim}
        return {"dsl": self.expr.source or self.expr.pretty(), "dim": self.dim}


# ----------------------------------------------------------------------
# Built-in families (a small corpus of test metrics, compiled to the DSL)


def _sum_text(terms):
    return "+".join(terms)


def _euclidean(dim):
    text = "sqrt(" + _sum_text([f"y{i}^2" for i in range(1, dim + 1)]) + ")"
    return MetricSpec(expr=parse_metric(text, dim), dim=dim,
                      domain_guard=lambda x, y: float(np.linalg.norm(y)) > 1e-12,
                      guard_description="y != 0",
                      family="euclidean", params={}, name="euclidean")


def _constant_curvature(dim, K):
    # conformally flat model a_ij = delta_ij / (1 + (K/4)|x|^2)^2
    norm = "sqrt(" + _sum_text([f"y{i}^2" for i in range(1, dim + 1)]) + ")"
    x2 = _sum_text([f"x{i}^2" for i in range(1, dim + 1)])
    text = f"{norm}/(1+{repr(K / 4.0)}*({x2}))"
    K = float(K)

    def guard(x, y, K=K):
        return 1.0 + (K / 4.0) * float(x @ x) > 1e-3 and float(np.linalg.norm(y)) > 1e-12

    return MetricSpec(expr=parse_metric(text, dim), dim=dim, domain_guard=guard,
                      guard_description="1 + (K/4)|x|^2 > 0 and y != 0",
                      family="riemannian_constant_curvature", params={"K": K},
                      name=f"constant_curvature(K={K:g})")


def _randers(dim, a=None, b=None):
    a = np.eye(dim) if a is None else np.asarray(a, float)
    if b is None:
        b = np.zeros(dim)
        b[0] = 0.3
    b = np.asarray(b, float)
    if a.shape != (dim, dim) or not np.allclose(a, a.T):
        raise ValueError("randers 'a' must be a symmetric dim x dim matrix")
    if np.min(np.linalg.eigvalsh(a)) <= 0:
        raise ValueError("randers 'a' must be positive definite")
    if float(b @ np.linalg.solve(a, b)) >= 1.0:
        raise ValueError("randers condition b^T a^-1 b < 1 violated")
    quad = []
    for i in range(dim):
        for j in range(dim):
            if a[i, j] != 0.0:
                quad.append(f"{repr(float(a[i, j]))}*y{i + 1}*y{j + 1}")
    lin = [f"{repr(float(b[i]))}*y{i + 1}" for i in range(dim) if b[i] != 0.0]
    text = "sqrt(" + _sum_text(quad) + ")" + ("+" + _sum_text(lin) if lin else "")
    return MetricSpec(expr=parse_metric(text, dim), dim=dim,
                      domain_guard=lambda x, y: float(np.linalg.norm(y)) > 1e-12,
                      guard_description="y != 0",
                      family="randers", params={"a": a.tolist(), "b": b.tolist()},
                      name="randers")


def _quartic(dim):
    text = "(" + _sum_text([f"y{i}^4" for i in range(1, dim + 1)]) + ")^(1/4)"

    def guard(x, y):
        ay = np.abs(y)
        return float(np.min(ay)) > 0.05 * float(np.max(ay)) and float(np.max(ay)) > 1e-12

    return MetricSpec(expr=parse_metric(text, dim), dim=dim, domain_guard=guard,
                      guard_description="every y^i bounded away from 0",
                      family="locally_minkowski_quartic", params={},
                      name="locally_minkowski_quartic")


_FAMILIES = {
    "euclidean": _euclidean,
    "riemannian_constant_curvature": _constant_curvature,
    "randers": _randers,
    "locally_minkowski_quartic": _quartic,
}


def builtin_family(kind, dim, **params):
    """Construct one of the built-in metric families as a :class:`MetricSpec`."""
    if kind not in _FAMILIES:
        raise UnknownSymbol(f"unknown metric family {kind!r}")
    if dim < 3:
        raise DimensionError(f"dimension {dim} below the standing hypothesis n >= 3")
    return _FAMILIES[kind](dim, **params)


def metric_from_json(obj):
    """Build a MetricSpec from the metric JSON shape
    ``{"dim": n, "metric": {"dsl": ...} | {"family": ..., "params": {...}}}``.
    """
    try:
        dim = int(obj["dim"])
        metric = obj["metric"]
    except (KeyError, TypeError) as exc:
        raise UnknownSymbol(f"malformed metric object: missing {exc}") from exc
    if "dsl" in metric:
        expr = parse_metric(metric["dsl"], dim)
        return MetricSpec(expr=expr, dim=dim, name="custom")
    if "family" in metric:
        params = dict(metric.get("params", {}))
        if "a" in params:
            params["a"] = np.asarray(params["a"], float)
        if "b" in params:
            params["b"] = np.asarray(params["b"], float)
        return builtin_family(metric["family"], dim, **params)
    raise UnknownSymbol("metric object needs a 'dsl' or 'family' entry")


# ----------------------------------------------------------------------
# Homogeneity validation (sampled; the DSL admits transcendental functions
# where symbolic degree checking is undecidable)


@dataclass
class HomogeneityReport:
    passed: bool
    worst_violation: float
    worst_point: Optional[tuple]
    worst_lambda: Optional[float]
    checked: int


def check_homogeneity(spec, samples, lambdas, tol=1e-12):
    """Verify positive 1-homogeneity of F in y on sample points.

    Asserts |F(x, s*y) - s*F(x, y)| <= tol*|s*F(x, y)| for every sample and
    scale; raises :class:`HomogeneityViolation` carrying the worst offender,
    otherwise returns a :class:`HomogeneityReport`.
    """
    worst = (0.0, None, None)
    checked = 0
    for (x, y) in samples:
        base = spec.F(list(x), list(y))
        for s in lambdas:
            if s <= 0:
                raise ValueError("homogeneity scales must be positive")
            scaled = spec.F(list(x), [s * yi for yi in y])
            err = abs(scaled - s * base)
            rel = err / max(abs(s * base), 1e-300)
            checked += 1
            if rel > worst[0]:
                worst = (rel, (tuple(x), tuple(y)), s)
    if worst[0] > tol:
        raise HomogeneityViolation(
            f"F is not 1-homogeneous: relative violation {worst[0]:.3e} "
            f"at point {worst[1]} with scale {worst[2]}",
            point=worst[1], scale=worst[2])
    return HomogeneityReport(True, worst[0], worst[1], worst[2], checked)

"""Scalar functions of one variable: parsing, evaluation, and exact jets.

The module supplies the two scalar inputs every metric in this package is
built from.  A function is either a parsed arithmetic expression in ``x``,
one of a small set of named builtins (step functions, flat exponentials,
and the triadic staircase pair), or the running integral of another
function.  Derivatives are computed by truncated Taylor-polynomial (jet)
arithmetic up to order 4; no finite differencing is used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ._quad import adaptive_simpson

JET_ORDER_MAX = 4

_FACTORIALS = (1.0, 1.0, 2.0, 6.0, 24.0)


# ---------------------------------------------------------------------------
# Errors


class ExprError(Exception):
    """Base class for scalar-function errors."""


class ParseError(ExprError):
    """Malformed source text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    """A name that is neither ``x`` nor a known function or builtin."""


class ArityError(ExprError):
    """A builtin was constructed with the wrong number of parameters."""


class DomainError(ExprError):
    """Evaluation outside a function's domain (log of a non-positive value, ...)."""


class OrderUnsupportedError(ExprError):
    """A jet was requested beyond a function's smooth order at the point."""


# ---------------------------------------------------------------------------
# Abstract syntax trees


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The free variable ``x``."""


@dataclass(frozen=True)
class Neg:
    arg: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expression"


Expression = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = frozenset(
    {"sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "abs", "sqrt"}
)


# ---------------------------------------------------------------------------
# Parser
#
# Grammar (whitespace-insensitive):
#   sum     := product (('+' | '-') product)*
#   product := unary (('*' | '/') unary)*
#   unary   := '-' unary | power
#   power   := atom ('^' unary)?          (right-associative)
#   atom    := NUMBER | 'x' | NAME '(' sum ')' | '(' sum ')'


_DIGITS = "0123456789"


class _Scanner:
    def __init__(self, src: str):
        self.src = src
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()

    def _scan(self) -> None:
        src = self.src
        i = 0
        n = len(src)
        while i < n:
            c = src[i]
            if c.isspace():
                i += 1
                continue
            if c in _DIGITS or (c == "." and i + 1 < n and src[i + 1] in _DIGITS):
                j = i
                while j < n and src[j] in _DIGITS:
                    j += 1
                if j < n and src[j] == ".":
                    j += 1
                    while j < n and src[j] in _DIGITS:
                        j += 1
                if j < n and src[j] in "eE":
                    k = j + 1
                    if k < n and src[k] in "+-":
                        k += 1
                    if k < n and src[k] in _DIGITS:
                        j = k
                        while j < n and src[j] in _DIGITS:
                            j += 1
                self.tokens.append(("num", src[i:j], i))
                i = j
                continue
            if c.isalpha() or c == "_":
                j = i
                while j < n and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                self.tokens.append(("name", src[i:j], i))
                i = j
                continue
            if c in "+-*/^()":
                self.tokens.append(("op", c, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {c!r}", i)
        self.tokens.append(("end", "", n))


class _Parser:
    def __init__(self, src: str):
        self.tokens = _Scanner(src).tokens
        self.pos = 0

    def _peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def _advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect_op(self, op: str) -> None:
        kind, text, offset = self._peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", offset)
        self.pos += 1

    def parse(self) -> Expression:
        node = self._sum()
        kind, text, offset = self._peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", offset)
        return node

    def _sum(self) -> Expression:
        node = self._product()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self.pos += 1
                node = BinOp(text, node, self._product())
            else:
                return node

    def _product(self) -> Expression:
        node = self._unary()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "*/":
                self.pos += 1
                node = BinOp(text, node, self._unary())
            else:
                return node

    def _unary(self) -> Expression:
        kind, text, _ = self._peek()
        if kind == "op" and text == "-":
            self.pos += 1
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Expression:
        base = self._atom()
        kind, text, _ = self._peek()
        if kind == "op" and text == "^":
            self.pos += 1
            return BinOp("^", base, self._unary())
        return base

    def _atom(self) -> Expression:
        kind, text, offset = self._advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            nkind, ntext, _ = self._peek()
            if nkind == "op" and ntext == "(":
                if text not in FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {text!r}", offset)
                self.pos += 1
                arg = self._sum()
                self._expect_op(")")
                return Call(text, arg)
            if text == "x":
                return Var()
            raise UnknownIdentifierError(f"unknown identifier {text!r}", offset)
        if kind == "op" and text == "(":
            node = self._sum()
            self._expect_op(")")
            return node
        raise ParseError("expected expression", offset)


def parse(src: str) -> Expression:
    """Parse expression source text into an AST.

    ``^`` binds tightest and associates to the right, then unary minus,
    then ``*``/``/``, then ``+``/``-``.  Raises :class:`ParseError` with a
    byte offset on malformed input and :class:`UnknownIdentifierError` for
    names outside the recognized function list.
    """
    if not src or not src.strip():
        raise ParseError("empty source", 0)
    return _Parser(src).parse()


_PREC_SUM = 1
_PREC_PRODUCT = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(e: Expression) -> int:
    if isinstance(e, BinOp):
        if e.op in "+-":
            return _PREC_SUM
        if e.op in "*/":
            return _PREC_PRODUCT
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _num_str(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_source(e: Expression) -> str:
    """Canonical printing; reparsing the output reproduces the tree.

    Canonical trees carry non-negative literals (negation is a ``Neg``
    node, which is what the parser produces).
    """
    if isinstance(e, Num):
        return _num_str(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, Neg):
        s = to_source(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            return f"-({s})"
        return f"-{s}"
    assert isinstance(e, BinOp)
    p = _prec(e)
    ls = to_source(e.left)
    rs = to_source(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            ls = f"({ls})"
        if _prec(e.right) < p:
            rs = f"({rs})"
    else:
        if _prec(e.left) < p:
            ls = f"({ls})"
        if _prec(e.right) <= p:
            rs = f"({rs})"
    return f"{ls}{e.op}{rs}"


# ---------------------------------------------------------------------------
# Plain evaluation


def _apply_value(fn: str, u: float) -> float:
    if fn == "sin":
        return math.sin(u)
    if fn == "cos":
        return math.cos(u)
    if fn == "tan":
        return math.tan(u)
    if fn == "sinh":
        return math.sinh(u)
    if fn == "cosh":
        return math.cosh(u)
    if fn == "tanh":
        return math.tanh(u)
    if fn == "exp":
        if u < -745.0:
            return 0.0
        return math.exp(u)
    if fn == "ln":
        if u <= 0.0:
            raise DomainError(f"ln of non-positive value {u}")
        return math.log(u)
    if fn == "abs":
        return abs(u)
    if fn == "sqrt":
        if u < 0.0:
            raise DomainError(f"sqrt of negative value {u}")
        return math.sqrt(u)
    raise UnknownIdentifierError(f"unknown function {fn!r}", 0)


def _literal_int_exponent(e: Expression) -> Optional[int]:
    if isinstance(e, Num) and e.value.is_integer() and abs(e.value) < 2**31:
        return int(e.value)
    if isinstance(e, Neg):
        inner = _literal_int_exponent(e.arg)
        if inner is not None:
            return -inner
    return None


def eval_value(e: Expression, x: float) -> float:
    """Evaluate the expression at ``x``."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -eval_value(e.arg, x)
    if isinstance(e, Call):
        return _apply_value(e.fn, eval_value(e.arg, x))
    assert isinstance(e, BinOp)
    a = eval_value(e.left, x)
    if e.op == "^":
        n = _literal_int_exponent(e.right)
        if n is None:
            b = eval_value(e.right, x)
            if b.is_integer() and abs(b) < 2**31:
                n = int(b)
        if n is not None:
            if n < 0 and a == 0.0:
                raise DomainError("zero raised to a negative power")
            return a ** n
        if a <= 0.0:
            raise DomainError(f"{a} raised to non-integer power")
        return math.exp(b * math.log(a))
    b = eval_value(e.right, x)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


# ---------------------------------------------------------------------------
# Truncated Taylor-polynomial (jet) arithmetic
#
# Series are lists of Taylor coefficients [c0, ..., ck]; derivative values
# are ci * i!.


def _s_const(v: float, k: int) -> list[float]:
    return [v] + [0.0] * k


def _s_add(a: list[float], b: list[float]) -> list[float]:
    return [x + y for x, y in zip(a, b)]

def _s_sub(a: list[float], b: list[float]) -> list[float]:
    return [x - y for x, y in zip(a, b)]


def _s_neg(a: list[float]) -> list[float]:
    return [-x for x in a]


def _s_mul(a: list[float], b: list[float]) -> list[float]:
    k = len(a) - 1
    return [
        sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(k + 1)
    ]


def _s_inv(b: list[float]) -> list[float]:
    if b[0] == 0.0:
        raise DomainError("division by zero")
    k = len(b) - 1
    c = [1.0 / b[0]] + [0.0] * k
    for n in range(1, k + 1):
        c[n] = -sum(b[i] * c[n - i] for i in range(1, n + 1)) / b[0]
    return c


def _s_int_pow(a: list[float], n: int) -> list[float]:
    k = len(a) - 1
    if n == 0:
        return _s_const(1.0, k)
    if n < 0:
        return _s_inv(_s_int_pow(a, -n))
    out = _s_const(1.0, k)
    base = a
    m = n
    while m:
        if m & 1:
            out = _s_mul(out, base)
        m >>= 1
        if m:
            base = _s_mul(base, base)
    return out


def _fn_derivatives(fn: str, u0: float, k: int) -> list[float]:
    """Values f(u0), f'(u0), ..., f^(k)(u0) for the named elementary function."""
    if fn == "sin":
        cyc = (math.sin(u0), math.cos(u0), -math.sin(u0), -math.cos(u0))
        return [cyc[j % 4] for j in range(k + 1)]
    if fn == "cos":
        cyc = (math.cos(u0), -math.sin(u0), -math.cos(u0), math.sin(u0))
        return [cyc[j % 4] for j in range(k + 1)]
    if fn == "sinh":
        s, c = math.sinh(u0), math.cosh(u0)
        return [s if j % 2 == 0 else c for j in range(k + 1)]
    if fn == "cosh":
        s, c = math.sinh(u0), math.cosh(u0)
        return [c if j % 2 == 0 else s for j in range(k + 1)]
    if fn == "exp":
        v = _apply_value("exp", u0)
        return [v] * (k + 1)
    if fn == "ln":
        if u0 <= 0.0:
            raise DomainError(f"ln of non-positive value {u0}")
        inv = 1.0 / u0
        table = [math.log(u0), inv, -(inv**2), 2.0 * inv**3, -6.0 * inv**4]
        return table[: k + 1]
    if fn == "sqrt":
        if u0 < 0.0:
            raise DomainError(f"sqrt of negative value {u0}")
        if u0 == 0.0:
            if k == 0:
                return [0.0]
            raise DomainError("sqrt is not differentiable at 0")
        s = math.sqrt(u0)
        table = [
            s,
            0.5 / s,
            -0.25 / (u0 * s),
            0.375 / (u0**2 * s),
            -0.9375 / (u0**3 * s),
        ]
        return table[: k + 1]
    if fn == "tan":
        t = math.tan(u0)
        sec2 = 1.0 + t * t
        table = [
            t,
            sec2,
            2.0 * t * sec2,
            sec2 * (2.0 + 6.0 * t * t),
            8.0 * t * sec2 * (2.0 + 3.0 * t * t),
        ]
        return table[: k + 1]
    if fn == "tanh":
        t = math.tanh(u0)
        sech2 = 1.0 - t * t
        table = [
            t,
            sech2,
            -2.0 * t * sech2,
            sech2 * (6.0 * t * t - 2.0),
            8.0 * t * sech2 * (2.0 - 3.0 * t * t),
        ]
        return table[: k + 1]
    if fn == "abs":
        if u0 > 0.0:
            return [u0, 1.0] + [0.0] * max(0, k - 1)
        if u0 < 0.0:
            return [-u0, -1.0] + [0.0] * max(0, k - 1)
        if k == 0:
            return [0.0]
        raise OrderUnsupportedError("abs is not differentiable at 0")
    raise UnknownIdentifierError(f"unknown function {fn!r}", 0)


def _s_compose(table: list[float], u: list[float]) -> list[float]:
    """Taylor series of f(u(x)) from the derivative table of f at u[0]."""
    k = len(u) - 1
    delta = [0.0] + u[1:]
    out = _s_const(table[0], k)
    power = _s_const(1.0, k)
    for j in range(1, k + 1):
        power = _s_mul(power, delta)
        coeff = table[j] / _FACTORIALS[j]
        out = [o + coeff * p for o, p in zip(out, power)]
    return out


def eval_series(e: Expression, seed: list[float]) -> list[float]:
    """Evaluate the expression on a Taylor series seed for the variable."""
    if isinstance(e, Num):
        return _s_const(e.value, len(seed) - 1)
    if isinstance(e, Var):
        return list(seed)
    if isinstance(e, Neg):
        return _s_neg(eval_series(e.arg, seed))
    if isinstance(e, Call):
        u = eval_series(e.arg, seed)
        return _s_compose(_fn_derivatives(e.fn, u[0], len(seed) - 1), u)
    assert isinstance(e, BinOp)
    a = eval_series(e.left, seed)
    if e.op == "^":
        n = _literal_int_exponent(e.right)
        if n is None:
            b = eval_series(e.right, seed)
            if all(c == 0.0 for c in b[1:]) and b[0].is_integer() and abs(b[0]) < 2**31:
                n = int(b[0])
        if n is not None:
            if n < 0 and a[0] == 0.0:
                raise DomainError("zero raised to a negative power")
            return _s_int_pow(a, n)
        b = eval_series(e.right, seed)
        if a[0] <= 0.0:
            raise DomainError(f"{a[0]} raised to non-integer power")
        ln_a = _s_compose(_fn_derivatives("ln", a[0], len(seed) - 1), a)
        prod = _s_mul(b, ln_a)
        return _s_compose(_fn_derivatives("exp", prod[0], len(seed) - 1), prod)
    b = eval_series(e.right, seed)
    if e.op == "+":
        return _s_add(a, b)
    if e.op == "-":
        return _s_sub(a, b)
    if e.op == "*":
        return _s_mul(a, b)
    return _s_mul(a, _s_inv(b))


# ---------------------------------------------------------------------------
# Jets and scalar functions


@dataclass(frozen=True)
class Jet:
    """Derivative values (g(x), g'(x), ..., g^(order)(x)) at a base point."""

    x: float
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("a jet holds at least the order-0 value")

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, i: int) -> float:
        return self.values[i]


def _check_order(order: int) -> None:
    if order < 0:
        raise ValueError("jet order must be non-negative")
    if order > JET_ORDER_MAX:
        raise OrderUnsupportedError(
            f"jets above order {JET_ORDER_MAX} are not supported"
        )


def _series_to_jet(x: float, series: list[float]) -> Jet:
    values = tuple(c * _FACTORIALS[i] for i, c in enumerate(series))
    return Jet(x, values)


class ScalarFunction:
    """A real function of one real variable with exact jets.

    Instances are immutable after construction and all queries are pure.
    """

    def value(self, x: float) -> float:
        return self.jet(x, 0).values[0]

    def jet(self, x: float, order: int) -> Jet:
        raise NotImplementedError

    def nonsmooth_hints(self) -> tuple[float, ...]:
        """Isolated points where the function may lose smoothness."""
        return ()

    def __call__(self, x: float) -> float:
        return self.value(x)


class ExprFunction(ScalarFunction):
    """A scalar function backed by a parsed expression."""

    def __init__(self, expr: Expression, source: Optional[str] = None):
        self.expr = expr
        self.source = source if source is not None else to_source(expr)

    def value(self, x: float) -> float:
        return eval_value(self.expr, x)

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        seed = [x, 1.0] + [0.0] * max(0, order - 1)
        if order == 0:
            seed = [x]
        return _series_to_jet(x, eval_series(self.expr, seed))

    def __repr__(self) -> str:
        return f"ExprFunction({self.source!r})"


def function_from_source(src: str) -> ExprFunction:
    return ExprFunction(parse(src), src)


# ---------------------------------------------------------------------------
# Triadic digit machinery for the staircase builtins

_TRIADIC_DEPTH = 48


def _first_one(t: float) -> Optional[tuple[int, float, float]]:
    """Locate the first digit 1 in the greedy triadic expansion of t in [0, 1).

    Returns ``(n, prefix, residue)`` where ``n`` is the 1-based digit index,
    ``prefix`` is the value of the digits before the 1, and ``residue`` in
    [0, 1) is the remaining fraction after consuming that digit.  ``None``
    when no 1 occurs within the scan depth.  Digits are extracted with
    integer arithmetic on the float's exact binary value, so the expansion
    is exact for every representable input.
    """
    num, den = t.as_integer_ratio()
    prefix = 0.0
    scale = 1.0
    for n in range(1, _TRIADIC_DEPTH + 1):
        num *= 3
        d = num // den
        num -= d * den
        scale /= 3.0
        if d == 1:
            return n, prefix, num / den
        prefix += d * scale
    return None


def cantor_h_value(t: float) -> float:
    """The +-1 staircase derivative: (-1)^n for first triadic digit 1 at n.

    Zero outside [0, 1], zero when no digit 1 occurs (the point lies in the
    middle-thirds set), and the greedy expansion is used for triadic
    rationals (1/3 reads as 0.1000...).
    """
    if t < 0.0 or t >= 1.0:
        return 0.0
    fo = _first_one(t)
    if fo is None:
        return 0.0
    n, _, _ = fo
    return -1.0 if n % 2 else 1.0


def cantor_distance(x: float) -> float:
    """Distance from ``x`` to the middle-thirds set in [0, 1]."""
    if x < 0.0:
        return -x
    if x > 1.0:
        return x - 1.0
    if x == 0.0 or x == 1.0:
        return 0.0
    fo = _first_one(x)
    if fo is None:
        return 0.0
    n, prefix, residue = fo
    if residue == 0.0:
        return 0.0
    width = 3.0 ** (-n)
    lo = prefix + width
    hi = prefix + 2.0 * width
    return max(0.0, min(x - lo, hi - x))


def _gap_of(x: float) -> Optional[tuple[float, float]]:
    """The open complement interval containing ``x``, or None on the set."""
    if not 0.0 < x < 1.0:
        return None
    fo = _first_one(x)
    if fo is None:
        return None
    n, prefix, residue = fo
    if residue == 0.0:
        return None
    width = 3.0 ** (-n)
    return prefix + width, prefix + 2.0 * width


# ---------------------------------------------------------------------------
# Builtins


class StepPM1(ScalarFunction):
    """+1 for x < 0 and -1 for x > 0, with the value at 0 fixed to 0.

    The jump makes derivatives at 0 undefined; elsewhere all derivatives
    vanish.
    """

    def value(self, x: float) -> float:
        if x < 0.0:
            return 1.0
        if x > 0.0:
            return -1.0
        return 0.0

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        if x == 0.0 and order >= 1:
            raise OrderUnsupportedError("step_pm1 has no derivatives at 0")
        return Jet(x, (self.value(x),) + (0.0,) * order)

    def nonsmooth_hints(self) -> tuple[float, ...]:
        return (0.0,)

    def __repr__(self) -> str:
        return "builtin:step_pm1"


_INV_SQUARE_EXP = parse("exp(-1/x^2)")
# Below this scale exp(-1/x^2) underflows to an exact float 0 along with all
# the jet coefficients we track, so the flat branch returns zeros directly
# instead of risking inf * 0 in the series arithmetic.
_FLAT_TINY = 1e-18


class FlatExp(ScalarFunction):
    """exp(-1/x^2) extended by 0 at x = 0; flat to infinite order there."""

    def value(self, x: float) -> float:
        if abs(x) < _FLAT_TINY:
            return 0.0
        return eval_value(_INV_SQUARE_EXP, x)

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        if abs(x) < _FLAT_TINY:
            return Jet(x, (0.0,) * (order + 1))
        seed = [x, 1.0][: order + 1] + [0.0] * max(0, order - 1)
        return _series_to_jet(x, eval_series(_INV_SQUARE_EXP, seed))

    def nonsmooth_hints(self) -> tuple[float, ...]:
        return (0.0,)

    def __repr__(self) -> str:
        return "builtin:flat_exp"


class FlatBump(ScalarFunction):
    """exp(-1/(r^2 - (x-c)^2)) inside |x-c| < r, and 0 outside."""

    def __init__(self, center: float, radius: float):
        if radius <= 0.0:
            raise ArityError("flat_bump radius must be positive")
        self.center = center
        self.radius = radius
        # exp(-1/(r^2 - (x-c)^2)) as an AST, evaluated through jet arithmetic
        self._expr = Call(
            "exp",
            Neg(
                BinOp(
                    "/",
                    Num(1.0),
                    BinOp(
                        "-",
                        Num(radius * radius),
                        BinOp("^", BinOp("-", Var(), Num(center)), Num(2.0)),
                    ),
                )
            ),
        )

    def _inside(self, x: float) -> bool:
        s = self.radius**2 - (x - self.center) ** 2
        return s > _FLAT_TINY

    def value(self, x: float) -> float:
        if not self._inside(x):
            return 0.0
        return eval_value(self._expr, x)

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        if not self._inside(x):
            return Jet(x, (0.0,) * (order + 1))
        seed = [x, 1.0][: order + 1] + [0.0] * max(0, order - 1)
        return _series_to_jet(x, eval_series(self._expr, seed))

    def nonsmooth_hints(self) -> tuple[float, ...]:
        return (self.center - self.radius, self.center + self.radius)

    def __repr__(self) -> str:
        return f"builtin:flat_bump({self.center},{self.radius})"


class CantorH(ScalarFunction):
    """The staircase derivative of the triadic example; values in {-1, 0, +1}.

    Locally constant on the open complement intervals, discontinuous on the
    middle-thirds set, where derivatives are unavailable.
    """

    def value(self, x: float) -> float:
        return cantor_h_value(x)

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        v = cantor_h_value(x)
        if order == 0:
            return Jet(x, (v,))
        if 0.0 <= x <= 1.0 and _gap_of(x) is None:
            raise OrderUnsupportedError(
                "cantor_h has no derivatives on the middle-thirds set"
            )
        return Jet(x, (v,) + (0.0,) * order)

    def __repr__(self) -> str:
        return "builtin:cantor_h"


class CantorFlat(ScalarFunction):
    """exp(-1/d(x)^2) where d is the distance to the middle-thirds set.

    Vanishes to infinite order on the set; outside [0, 1] it matches the
    one-sided flat exponential.  Kinks at the midpoints of complement
    intervals limit jets there to order 0.
    """

    def _local(self, x: float) -> Optional[tuple[float, float]]:
        """(distance, slope) of d near x, or None where d is flat zero/kinked."""
        if x < 0.0:
            return -x, -1.0
        if x > 1.0:
            return x - 1.0, 1.0
        gap = _gap_of(x)
        if gap is None:
            return None
        lo, hi = gap
        left = x - lo
        right = hi - x
        if left == right:
            return None  # exact midpoint: one-sided derivatives disagree
        if left < right:
            return left, 1.0
        return right, -1.0

    def value(self, x: float) -> float:
        d = cantor_distance(x)
        if d < _FLAT_TINY:
            return 0.0
        return eval_value(_INV_SQUARE_EXP, d)

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        if order == 0:
            return Jet(x, (self.value(x),))
        loc = self._local(x)
        if loc is None:
            if cantor_distance(x) < _FLAT_TINY:
                return Jet(x, (0.0,) * (order + 1))
            raise OrderUnsupportedError(
                "distance kink: no derivatives at a complement-interval midpoint"
            )
        d, slope = loc
        if d < _FLAT_TINY:
            return Jet(x, (0.0,) * (order + 1))
        seed = [d, slope] + [0.0] * (order - 1)
        return _series_to_jet(x, eval_series(_INV_SQUARE_EXP, seed))

    def __repr__(self) -> str:
        return "cantor_flat"


# Triadic-trisection Simpson tree for the running integral of cantor_h.
# Depth 17 keeps the cumulative quadrature error under the 1e-3 agreement
# with the self-similar series value (plain Simpson converges like (2/3)^n
# on the residual no-1 intervals, so depth 12 is measurably too coarse).
_CANTOR_TREE_DEPTH = 17
_CANTOR_TREE_TOL = 1e-9


def _build_cantor_table() -> tuple[list[float], list[float]]:
    """Leaf breakpoints and cumulative integral of cantor_h over [0, 1]."""
    hmemo: dict[float, float] = {}

    def h(t: float) -> float:
        v = hmemo.get(t)
        if v is None:
            v = cantor_h_value(t)
            hmemo[t] = v
        return v

    def simpson(a: float, b: float) -> float:
        return (b - a) * (h(a) + 4.0 * h(0.5 * (a + b)) + h(b)) / 6.0

    xs: list[float] = [0.0]
    cum: list[float] = [0.0]

    def rec(a: float, b: float, whole: float, depth: int) -> None:
        third = (b - a) / 3.0
        m1 = a + third
        m2 = b - third
        parts = (simpson(a, m1), simpson(m1, m2), simpson(m2, b))
        total = parts[0] + parts[1] + parts[2]
        tol_here = _CANTOR_TREE_TOL * (b - a)
        if depth >= _CANTOR_TREE_DEPTH or abs(total - whole) <= tol_here:
            for hi, val in zip((m1, m2, b), parts):
                xs.append(hi)
                cum.append(cum[-1] + val)
            return
        rec(a, m1, parts[0], depth + 1)
        rec(m1, m2, parts[1], depth + 1)
        rec(m2, b, parts[2], depth + 1)

    rec(0.0, 1.0, simpson(0.0, 1.0), 1)
    return xs, cum


_cantor_table_cache: Optional[tuple[object, object]] = None


def _cantor_table():
    global _cantor_table_cache
    if _cantor_table_cache is None:
        xs, cum = _build_cantor_table()
        _cantor_table_cache = (np.asarray(xs), np.asarray(cum))
    return _cantor_table_cache


class CantorHIntegral(ScalarFunction):
    """Running integral of cantor_h from 0, by triadic adaptive Simpson.

    The quadrature tree is built once per process and shared; evaluation
    interpolates the cumulative table, which is exact on complement
    intervals (the integrand is constant there) and Lipschitz-1 everywhere.
    """

    def value(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        xs, cum = _cantor_table()
        if x >= 1.0:
            return float(cum[-1])
        i = int(np.searchsorted(xs, x, side="right")) - 1
        lo = float(xs[i])
        hi = float(xs[i + 1])
        frac = (x - lo) / (hi - lo)
        return float(cum[i] + frac * (cum[i + 1] - cum[i]))

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        if order == 0:
            return Jet(x, (self.value(x),))
        if 0.0 <= x <= 1.0 and _gap_of(x) is None:
            raise OrderUnsupportedError(
                "cantor_H is not twice differentiable on the middle-thirds set"
            )
        values = [self.value(x), cantor_h_value(x)] + [0.0] * (order - 1)
        return Jet(x, tuple(values))

    def __repr__(self) -> str:
        return "builtin:cantor_H"


class RunningIntegral(ScalarFunction):
    """The function x -> integral of the integrand from 0 to x.

    Values are assembled from memoized fixed-grid chunks plus an adaptive
    Simpson tail, so repeated evaluation is cheap and the result does not
    depend on call order.
    """

    _DELTA = 1.0 / 256.0

    def __init__(self, integrand: ScalarFunction):
        self.integrand = integrand
        self._chunks: dict[int, float] = {}
        self._anchors: dict[int, float] = {0: 0.0}
        self._lo = 0
        self._hi = 0
        self._breaks = tuple(integrand.nonsmooth_hints())

    def _chunk(self, j: int) -> float:
        v = self._chunks.get(j)
        if v is None:
            a = j * self._DELTA
            b = (j + 1) * self._DELTA
            v = adaptive_simpson(
                self.integrand.value, a, b, tol=1e-13, breakpoints=self._breaks
            )
            self._chunks[j] = v
        return v

    def _anchor(self, k: int) -> float:
        anchors = self._anchors
        if k > self._hi:
            acc = anchors[self._hi]
            for j in range(self._hi, k):
                acc += self._chunk(j)
                anchors[j + 1] = acc
            self._hi = k
        elif k < self._lo:
            acc = anchors[self._lo]
            for j in range(self._lo - 1, k - 1, -1):
                acc -= self._chunk(j)
                anchors[j] = acc
            self._lo = k
        return anchors[k]

    def value(self, x: float) -> float:
        k = math.floor(x / self._DELTA)
        base = self._anchor(k)
        a = k * self._DELTA
        if x == a:
            return base
        return base + adaptive_simpson(
            self.integrand.value, a, x, tol=1e-13, breakpoints=self._breaks
        )

    def jet(self, x: float, order: int) -> Jet:
        _check_order(order)
        if order == 0:
            return Jet(x, (self.value(x),))
        inner = self.integrand.jet(x, order - 1)
        return Jet(x, (self.value(x),) + inner.values)

    def __repr__(self) -> str:
        return f"integral({self.integrand!r})"


def integral_of(fn: ScalarFunction) -> ScalarFunction:
    """Running integral from 0 of ``fn``, dispatching to the cached triadic
    quadrature when the integrand is the staircase builtin."""
    if isinstance(fn, CantorH):
        return CantorHIntegral()
    return RunningIntegral(fn)


_BUILTIN_ARITY = {
    "cantor_h": 0,
    "cantor_H": 0,
    "step_pm1": 0,
    "flat_exp": 0,
    "flat_bump": 2,
}


def builtin(name: str, params: Sequence[float] = ()) -> ScalarFunction:
    """Construct a named builtin; see ``_BUILTIN_ARITY`` for the name list."""
    if name not in _BUILTIN_ARITY:
        raise UnknownIdentifierError(f"unknown builtin {name!r}", 0)
    if len(params) != _BUILTIN_ARITY[name]:
        raise ArityError(
            f"builtin {name!r} takes {_BUILTIN_ARITY[name]} parameters, got {len(params)}"
        )
    if name == "cantor_h":
        return CantorH()
    if name == "cantor_H":
        return CantorHIntegral()
    if name == "step_pm1":
        return StepPM1()
    if name == "flat_exp":
        return FlatExp()
    return FlatBump(params[0], params[1])


def scalar_from_text(src: str) -> ScalarFunction:
    """Build a scalar function from config text.

    Accepts either expression source or a builtin reference of the form
    ``builtin:name(arg,...)`` (parentheses optional when there are no
    arguments).
    """
    text = src.strip()
    if text.startswith("builtin:"):
        rest = text[len("builtin:"):].strip()
        if "(" in rest:
            if not rest.endswith(")"):
                raise ParseError("unterminated builtin parameter list", len(src) - 1)
            name, _, arglist = rest[:-1].partition("(")
            name = name.strip()
            args = [a for a in (s.strip() for s in arglist.split(",")) if a]
            try:
                params = [float(a) for a in args]
            except ValueError as exc:
                raise ParseError(f"bad builtin parameter: {exc}", 0) from None
        else:
            name, params = rest, []
        return builtin(name, params)
    return function_from_source(src)


def eval_jet(fn: ScalarFunction, x: float, order: int) -> Jet:
    """Jet of a scalar function at ``x`` up to ``order`` (at most 4)."""
    return fn.jet(x, order)

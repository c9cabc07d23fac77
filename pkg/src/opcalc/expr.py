"""Expression trees for elementary functions of one real variable.

The grammar is deliberately small: constants, the single variable ``x``,
the four arithmetic operations, unary minus, powers with a *constant*
exponent, and sin/cos/exp/ln.  Restricting exponents to literal constants
keeps symbolic differentiation closed over the grammar, so arbitrarily
high derivatives are exact expression trees rather than finite-difference
estimates.

Expr values are immutable; every operation here is a pure function.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

# Node kinds.
CONST = "const"
VAR = "var"
ADD = "add"
SUB = "sub"
MUL = "mul"
DIV = "div"
NEG = "neg"
POW = "pow"
SIN = "sin"
COS = "cos"
EXP = "exp"
LN = "ln"

FUNC_KINDS = (SIN, COS, EXP, LN)
BINARY_KINDS = (ADD, SUB, MUL, DIV)


class ParseError(ValueError):
    """Raised on malformed expression text.

    Carries the code-unit offset of the offending token, a message, and a
    hint for what was expected there.
    """

    def __init__(self, offset: int, message: str, expected: str = ""):
        self.offset = offset
        self.message = message
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"parse error at offset {offset}: {message}{hint}")


class DomainError(ValueError):
    """Raised when evaluation leaves the mathematical domain.

    Names the offending subexpression and the input that triggered it.
    """

    def __init__(self, subexpression: str, x, reason: str):
        self.subexpression = subexpression
        self.x = x
        self.reason = reason
        super().__init__(f"domain violation in '{subexpression}' at x={x}: {reason}")


@dataclass(frozen=True)
class Expr:
    """One node of an expression tree.

    ``value`` holds the constant for CONST nodes and the exponent for POW
    nodes; it is None everywhere else.  ``children`` holds 0-2 subtrees.
    """

    kind: str
    children: tuple["Expr", ...] = ()
    value: float | None = None

    def __str__(self) -> str:
        return render(self)


# ---------------------------------------------------------------------------
# Builders.  `neg` folds a literal constant so negative constants are a
# single node; the parser relies on this for the render round-trip.
# ---------------------------------------------------------------------------

def const(value: float) -> Expr:
    return Expr(CONST, (), float(value))


def var() -> Expr:
    return Expr(VAR)


def add(left: Expr, right: Expr) -> Expr:
    return Expr(ADD, (left, right))


def sub(left: Expr, right: Expr) -> Expr:
    return Expr(SUB, (left, right))


def mul(left: Expr, right: Expr) -> Expr:
    return Expr(MUL, (left, right))


def div(left: Expr, right: Expr) -> Expr:
    return Expr(DIV, (left, right))


def neg(operand: Expr) -> Expr:
    if operand.kind == CONST:
        return const(-operand.value)
    return Expr(NEG, (operand,))


def power(base: Expr, exponent: float) -> Expr:
    if isinstance(exponent, Expr):
        raise TypeError("power exponent must be a constant real, not an Expr")
    return Expr(POW, (base,), float(exponent))


def sin(operand: Expr) -> Expr:
    return Expr(SIN, (operand,))


def cos(operand: Expr) -> Expr:
    return Expr(COS, (operand,))


def exp(operand: Expr) -> Expr:
    return Expr(EXP, (operand,))


def ln(operand: Expr) -> Expr:
    return Expr(LN, (operand,))


# ---------------------------------------------------------------------------
# Parsing.
#
#   expr   := term (('+'|'-') term)*
#   term   := unary (('*'|'/') unary)*
#   unary  := '-' unary | factor
#   factor := base ('^' exponent)?
#   base   := number | 'x' | func '(' expr ')' | '(' expr ')'
#   func   := 'sin' | 'cos' | 'exp' | 'ln'
#
# The exponent is a literal number; an optional sign and optional enclosing
# parentheses are accepted there (e.g. "(1+x)^(-1)") since reciprocal powers
# are the natural way to write 1/(1+x) with closed-form derivatives.
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_FUNC_BUILDERS = {"sin": sin, "cos": cos, "exp": exp, "ln": ln}


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind  # "number" | "ident" | one of "+-*/^()" | "end"
        self.text = text
        self.offset = offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or c == ".":
            m = _NUMBER_RE.match(text, i)
            if not m:
                raise ParseError(i, f"malformed number starting at {c!r}", "number")
            tokens.append(_Token("number", m.group(), i))
            i = m.end()
            continue
        if c.isalpha() or c == "_":
            m = _IDENT_RE.match(text, i)
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^()":
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise ParseError(i, f"unknown token {c!r}")
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.offset, f"unexpected token {tok.text!r}", expected)
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.parse_term()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.parse_unary()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def parse_unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return neg(self.parse_unary())
        return self.parse_factor()

    def parse_factor(self) -> Expr:
        base = self.parse_base()
        if self.peek().kind == "^":
            self.advance()
            return power(base, self.parse_exponent())
        return base

    def parse_exponent(self) -> float:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            value = self._signed_number()
            self.expect(")", "')' closing the exponent")
            return value
        return self._signed_number()

    def _signed_number(self) -> float:
        sign = 1.0
        if self.peek().kind == "-":
            self.advance()
            sign = -1.0
        tok = self.peek()
        if tok.kind != "number":
            raise ParseError(tok.offset, "exponent must be a constant", "number")
        self.advance()
        return sign * float(tok.text)

    def parse_base(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text == "x":
                return var()
            builder = _FUNC_BUILDERS.get(tok.text)
            if builder is None:
                raise ParseError(
                    tok.offset, f"unknown identifier {tok.text!r}",
                    "'x' or one of sin, cos, exp, ln",
                )
            self.expect("(", f"'(' after {tok.text}")
            inner = self.parse_expr()
            self.expect(")", "')'")
            return builder(inner)
        if tok.kind == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")", "')'")
            return inner
        raise ParseError(tok.offset, f"unexpected token {tok.text!r}",
                         "number, 'x', function, or '('")


def parse(text: str) -> Expr:
    """Parse infix expression text into an Expr tree."""
    tokens = _tokenize(text)
    if tokens[0].kind == "end":
        raise ParseError(0, "empty input", "an expression")
    parser = _Parser(tokens)
    node = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(tail.offset, f"unexpected token {tail.text!r}",
                         "end of input or an operator")
    return node


# ---------------------------------------------------------------------------
# Rendering.  Parenthesization is chosen so parse(render(e)) rebuilds a
# structurally identical tree (binary operators are left-associative in the
# grammar, so right operands at equal precedence get parentheses).
# ---------------------------------------------------------------------------

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def format_number(value: float) -> str:
    return repr(float(value))


def _precedence(e: Expr) -> int:
    if e.kind in (ADD, SUB):
        return _PREC_ADD
    if e.kind in (MUL, DIV):
        return _PREC_MUL
    if e.kind == NEG:
        return _PREC_NEG
    if e.kind == CONST and e.value < 0:
        return _PREC_NEG  # negative literal reparses through unary minus
    if e.kind == POW:
        return _PREC_POW
    return _PREC_ATOM


def _render(e: Expr, minprec: int) -> str:
    k = e.kind
    if k == CONST:
        s = format_number(e.value)
    elif k == VAR:
        s = "x"
    elif k == ADD:
        s = f"{_render(e.children[0], _PREC_ADD)}+{_render(e.children[1], _PREC_ADD + 1)}"
    elif k == SUB:
        s = f"{_render(e.children[0], _PREC_ADD)}-{_render(e.children[1], _PREC_ADD + 1)}"
    elif k == MUL:
        s = f"{_render(e.children[0], _PREC_MUL)}*{_render(e.children[1], _PREC_MUL + 1)}"
    elif k == DIV:
        s = f"{_render(e.children[0], _PREC_MUL)}/{_render(e.children[1], _PREC_MUL + 1)}"
    elif k == NEG:
        s = f"-{_render(e.children[0], _PREC_NEG)}"
    elif k == POW:
        s = f"{_render(e.children[0], _PREC_ATOM)}^{format_number(e.value)}"
    elif k in FUNC_KINDS:
        s = f"{k}({_render(e.children[0], _PREC_ADD)})"
    else:
        raise ValueError(f"unknown node kind {k!r}")
    if _precedence(e) < minprec:
        return f"({s})"
    return s


def render(e: Expr) -> str:
    """Render to infix text; parse(render(e)) is structurally identical."""
    return _render(e, _PREC_ADD)


# ---------------------------------------------------------------------------
# Evaluation.  Scalar path uses math.*; the array path uses numpy and exists
# so quadrature can evaluate a whole panel of nodes in one call.  Both raise
# DomainError naming the subexpression on ln/division/power violations.
# ---------------------------------------------------------------------------

_EXP_OVERFLOW = 709.782712893384  # log(DBL_MAX)


def _eval_scalar(e: Expr, x: float) -> float:
    k = e.kind
    if k == CONST:
        return e.value
    if k == VAR:
        return x
    if k in BINARY_KINDS:
        lv = _eval_scalar(e.children[0], x)
        rv = _eval_scalar(e.children[1], x)
        if k == ADD:
            return lv + rv
        if k == SUB:
            return lv - rv
        if k == MUL:
            return lv * rv
        if rv == 0.0:
            raise DomainError(render(e), x, "division by zero")
        return lv / rv
    v = _eval_scalar(e.children[0], x)
    if k == NEG:
        return -v
    if k == POW:
        c = e.value
        if v == 0.0 and c < 0.0:
            raise DomainError(render(e), x, "zero base with negative exponent")
        if v < 0.0 and c != int(c):
            raise DomainError(render(e), x, "negative base with non-integer exponent")
        return math.pow(v, c)
    if k == SIN:
        return math.sin(v)
    if k == COS:
        return math.cos(v)
    if k == EXP:
        if v > _EXP_OVERFLOW:
            raise DomainError(render(e), x, "exp overflow")
        return math.exp(v)
    if k == LN:
        if v <= 0.0:
            raise DomainError(render(e), x, f"ln of non-positive value {v}")
        return math.log(v)
    raise ValueError(f"unknown node kind {k!r}")


def evaluate(e: Expr, x: float) -> float:
    """IEEE-double evaluation of e at the point x."""
    try:
        result = _eval_scalar(e, float(x))
    except DomainError:
        raise
    except (OverflowError, ValueError) as err:
        raise DomainError(render(e), x, f"arithmetic failure: {err}") from err
    if not math.isfinite(result):
        raise DomainError(render(e), x, "non-finite result")
    return result


def _first_offender(xs: np.ndarray, mask: np.ndarray) -> float:
    return float(xs[np.nonzero(mask)[0][0]])


def _eval_array(e: Expr, xs: np.ndarray) -> np.ndarray:
    k = e.kind
    if k == CONST:
        return np.full(xs.shape, e.value)
    if k == VAR:
        return xs
    if k in BINARY_KINDS:
        lv = _eval_array(e.children[0], xs)
        rv = _eval_array(e.children[1], xs)
        if k == ADD:
            return lv + rv
        if k == SUB:
            return lv - rv
        if k == MUL:
            return lv * rv
        bad = rv == 0.0
        if bad.any():
            raise DomainError(render(e), _first_offender(xs, bad), "division by zero")
        return lv / rv
    v = _eval_array(e.children[0], xs)
    if k == NEG:
        return -v
    if k == POW:
        c = e.value
        if c < 0.0:
            bad = v == 0.0
            if bad.any():
                raise DomainError(render(e), _first_offender(xs, bad),
                                  "zero base with negative exponent")
        if c != int(c):
            bad = v < 0.0
            if bad.any():
                raise DomainError(render(e), _first_offender(xs, bad),
                                  "negative base with non-integer exponent")
        return np.power(v, c)
    if k == SIN:
        return np.sin(v)
    if k == COS:
        return np.cos(v)
    if k == EXP:
        bad = v > _EXP_OVERFLOW
        if bad.any():
            raise DomainError(render(e), _first_offender(xs, bad), "exp overflow")
        return np.exp(v)
    if k == LN:
        bad = v <= 0.0
        if bad.any():
            raise DomainError(render(e), _first_offender(xs, bad),
                              "ln of non-positive value")
        return np.log(v)
    raise ValueError(f"unknown node kind {k!r}")


def evaluate_array(e: Expr, xs: np.ndarray) -> np.ndarray:
    """Vectorized evaluation over a 1-D array of points."""
    xs = np.asarray(xs, dtype=float)
    with np.errstate(all="ignore"):
        result = _eval_array(e, xs)
    bad = ~np.isfinite(result)
    if bad.any():
        raise DomainError(render(e), _first_offender(xs, bad), "non-finite result")
    return result


# ---------------------------------------------------------------------------
# Differentiation.  The local folds below drop exact 0/1 terms so repeated
# derivatives stay compact; they are bit-preserving (0+v, 1*v, v^1 are exact
# identities in IEEE arithmetic).
# ---------------------------------------------------------------------------

def _is_zero(e: Expr) -> bool:
    return e.kind == CONST and e.value == 0.0


def _is_one(e: Expr) -> bool:
    return e.kind == CONST and e.value == 1.0


def _fold_add(l: Expr, r: Expr) -> Expr:
    if _is_zero(l):
        return r
    if _is_zero(r):
        return l
    return add(l, r)


def _fold_sub(l: Expr, r: Expr) -> Expr:
    if _is_zero(r):
        return l
    if _is_zero(l):
        return neg(r)
    return sub(l, r)


def _fold_mul(l: Expr, r: Expr) -> Expr:
    if _is_zero(l) or _is_zero(r):
        return const(0.0)
    if _is_one(l):
        return r
    if _is_one(r):
        return l
    return mul(l, r)


def _fold_power(base: Expr, exponent: float) -> Expr:
    if exponent == 1.0:
        return base
    if exponent == 0.0:
        return const(1.0)
    return power(base, exponent)


def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative; repeated application is exact at any order."""
    k = e.kind
    if k == CONST:
        return const(0.0)
    if k == VAR:
        return const(1.0)
    if k == ADD:
        return _fold_add(differentiate(e.children[0]), differentiate(e.children[1]))
    if k == SUB:
        return _fold_sub(differentiate(e.children[0]), differentiate(e.children[1]))
    if k == MUL:
        l, r = e.children
        return _fold_add(_fold_mul(differentiate(l), r), _fold_mul(l, differentiate(r)))
    if k == DIV:
        u, v = e.children
        numerator = _fold_sub(_fold_mul(differentiate(u), v), _fold_mul(u, differentiate(v)))
        if _is_zero(numerator):
            return const(0.0)
        return div(numerator, power(v, 2.0))
    if k == NEG:
        inner = differentiate(e.children[0])
        if _is_zero(inner):
            return const(0.0)
        return neg(inner)
    if k == POW:
        u = e.children[0]
        c = e.value
        if c == 0.0:
            return const(0.0)
        return _fold_mul(_fold_mul(const(c), _fold_power(u, c - 1.0)), differentiate(u))
    if k == SIN:
        u = e.children[0]
        return _fold_mul(cos(u), differentiate(u))
    if k == COS:
        u = e.children[0]
        du = differentiate(u)
        if _is_zero(du):
            return const(0.0)
        return _fold_mul(neg(sin(u)), du)
    if k == EXP:
        u = e.children[0]
        return _fold_mul(exp(u), differentiate(u))
    if k == LN:
        u = e.children[0]
        du = differentiate(u)
        if _is_zero(du):
            return const(0.0)
        return div(du, u)
    raise ValueError(f"unknown node kind {k!r}")


# ---------------------------------------------------------------------------
# Simplification: value-preserving local rewrites only.  Constant folding
# performs the node's single operation at fold time, so folded and unfolded
# trees produce bit-identical values.  Folds that could raise (division by
# zero, ln of a non-positive constant, invalid power) are skipped so error
# behavior is unchanged.
# ---------------------------------------------------------------------------

def _fold_constants(e: Expr) -> Expr | None:
    kids = e.children
    if not all(c.kind == CONST for c in kids):
        return None
    k = e.kind
    if k == ADD:
        return const(kids[0].value + kids[1].value)
    if k == SUB:
        return const(kids[0].value - kids[1].value)
    if k == MUL:
        return const(kids[0].value * kids[1].value)
    if k == DIV:
        if kids[1].value == 0.0:
            return None
        return const(kids[0].value / kids[1].value)
    if k == NEG:
        return const(-kids[0].value)
    if k == POW:
        v, c = kids[0].value, e.value
        if (v == 0.0 and c < 0.0) or (v < 0.0 and c != int(c)):
            return None
        return const(math.pow(v, c))
    if k == SIN:
        return const(math.sin(kids[0].value))
    if k == COS:
        return const(math.cos(kids[0].value))
    if k == EXP:
        if kids[0].value > _EXP_OVERFLOW:
            return None
        return const(math.exp(kids[0].value))
    if k == LN:
        if kids[0].value <= 0.0:
            return None
        return const(math.log(kids[0].value))
    return None


def _rewrite(e: Expr) -> Expr:
    try:
        folded = _fold_constants(e)
    except (OverflowError, ValueError):
        folded = None
    if folded is not None and math.isfinite(folded.value):
        return folded
    k = e.kind
    if k == ADD:
        l, r = e.children
        if _is_zero(l):
            return r
        if _is_zero(r):
            return l
    elif k == SUB:
        if _is_zero(e.children[1]):
            return e.children[0]
    elif k == MUL:
        l, r = e.children
        if _is_zero(l) or _is_zero(r):
            return const(0.0)
        if _is_one(l):
            return r
        if _is_one(r):
            return l
    elif k == DIV:
        if _is_one(e.children[1]):
            return e.children[0]
    elif k == POW:
        if e.value == 1.0:
            return e.children[0]
        if e.value == 0.0:
            return const(1.0)
    elif k == NEG:
        if e.children[0].kind == NEG:
            return e.children[0].children[0]
    return e


def simplify(e: Expr) -> Expr:
    """Bottom-up application of the value-preserving rewrites."""
    if not e.children:
        return e
    kids = tuple(simplify(c) for c in e.children)
    return _rewrite(Expr(e.kind, kids, e.value))

"""Formula language for web functions, surface heights, and metric components.

The grammar (recursive descent, standard precedence):

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" number)?
    atom   := number | "x" | "y" | name "(" expr ")" | "(" expr ")"
    name   := "sqrt" | "exp" | "ln" | "sin" | "cos" | "tan"
    number := digits ("." digits)? (("e"|"E") ("+"|"-")? digits)?

Whitespace between tokens is ignored.  Exponents must be numeric literals,
which keeps jet composition closed-form; a non-constant exponent is a parse
error, not an evaluation error.  Identifiers are case-sensitive and only the
two variables and the six function names are legal.

Parsed expressions are immutable trees that evaluate both over plain floats
(:func:`evaluate`) and over :class:`~webgeo.taylor.TaylorJet` values
(:func:`evaluate_jet`), with identical constant terms: the float path and
the jet constant-term path share the same arithmetic, so
``evaluate(e, p) == partial_derivative(evaluate_jet(e, p, k), 0, 0)``
holds exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .taylor import (
    MAX_ORDER,
    JetDomainError,
    JetError,
    TaylorJet,
    derivative_jet,
    jet_add,
    jet_constant,
    jet_div,
    jet_elementary,
    jet_mul,
    jet_sub,
    jet_variable,
    partial_derivative,
    _check_order,
    _integer_power,
)

FUNCTION_NAMES = ("sqrt", "exp", "ln", "sin", "cos", "tan")


class ParseError(ValueError):
    """Syntax error, carrying the byte offset of the offending token."""

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"parse error at offset {position}: {message}")


class EvaluationError(ValueError):
    """Domain error during evaluation, naming the offending subexpression."""

    def __init__(self, message: str, subexpression: str | None = None):
        self.subexpression = subexpression
        if subexpression is not None:
            message = f"{message} in '{subexpression}'"
        super().__init__(message)


class _Node:
    """Mixin giving AST nodes arithmetic operators for programmatic builds."""

    __slots__ = ()

    @staticmethod
    def _coerce(other):
        if isinstance(other, _Node):
            return other
        if isinstance(other, (int, float)):
            return Constant(float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("+", self, other)

    def __radd__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("+", other, self)

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("-", self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("-", other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("*", self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("*", other, self)

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("/", self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else Binary("/", other, self)

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise TypeError("exponents must be numeric constants")
        return Binary("^", self, Constant(float(exponent)))

    def __neg__(self):
        return Unary("neg", self)

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Constant(_Node):
    value: float


@dataclass(frozen=True)
class Variable(_Node):
    name: str  # "x" or "y"


@dataclass(frozen=True)
class Unary(_Node):
    op: str  # only "neg"
    child: "Expression"


@dataclass(frozen=True)
class Binary(_Node):
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call(_Node):
    func: str  # one of FUNCTION_NAMES
    arg: "Expression"


@dataclass(frozen=True)
class PartialDerivative(_Node):
    """Numeric partial derivative of a wrapped expression.

    Not produced by the parser and not printable back into the grammar; it
    exists so derived geometric fields (Christoffel components of generated
    connections) remain ordinary evaluable expressions.  Evaluation extracts
    the derivative from a jet of the target, so the total derivative order
    plus any requested jet order must stay within the jet engine's capacity.
    """

    target: "Expression"
    dx: int
    dy: int


Expression = Constant | Variable | Unary | Binary | Call | PartialDerivative

X = Variable("x")
Y = Variable("y")

_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = "+-*/^"


def _tokenize(text: str):
    tokens = []
    i = 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch.isdigit():
            m = _NUMBER_RE.match(text, i)
            tokens.append(("num", float(m.group()), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(text, i)
            tokens.append(("ident", m.group(), i))
            i = m.end()
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch == "(":
            tokens.append(("(", ch, i))
            i += 1
            continue
        if ch == ")":
            tokens.append((")", ch, i))
            i += 1
            continue
        raise ParseError(i, f"unexpected character {ch!r}")
    tokens.append(("end", None, length))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(tok[2], f"expected {what}")
        return self.advance()

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Unary("neg", self.factor())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            tok = self.peek()
            if tok[0] != "num":
                raise ParseError(tok[2], "exponent must be a numeric constant")
            self.advance()
            return Binary("^", node, Constant(tok[1]))
        return node

    def atom(self):
        tok = self.peek()
        kind, value, pos = tok
        if kind == "num":
            self.advance()
            return Constant(value)
        if kind == "ident":
            self.advance()
            if value in ("x", "y"):
                return Variable(value)
            if value in FUNCTION_NAMES:
                self.expect("(", f"'(' after function name '{value}'")
                inner = self.expr()
                self.expect(")", "closing ')'")
                return Call(value, inner)
            raise ParseError(pos, f"unknown identifier '{value}'")
        if kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")", "closing ')'")
            return inner
        raise ParseError(pos, "expected a number, variable, function call, or '('")


def parse(text: str) -> Expression:
    """Parse a formula string into an expression tree.

    Raises :class:`ParseError` (with the byte offset) for every
    non-grammatical input; no input string crashes the parser.
    """
    if not isinstance(text, str):
        raise ParseError(0, "input must be a string")
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(tok[2], f"unexpected trailing input {tok[1]!r}")
    return node


def as_expression(value) -> Expression:
    """Coerce a string or expression to an expression tree."""
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, _Node):
        return value
    raise TypeError(f"expected formula string or Expression, got {type(value).__name__}")


def _format_number(v: float) -> str:
    return repr(float(v))


def to_source(e: Expression) -> str:
    """Render an expression back to formula text.

    For parser-produced trees the output re-parses to a structurally
    identical tree (the printer parenthesizes fully, and the parser never
    creates negative constants).  :class:`PartialDerivative` nodes use a
    `D[i,j](...)` notation that is intentionally outside the grammar.
    """
    if isinstance(e, Constant):
        return _format_number(e.value)
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, Unary):
        return f"(-{to_source(e.child)})"
    if isinstance(e, Binary):
        if e.op == "^":
            exponent = e.right.value if isinstance(e.right, Constant) else e.right
            return f"({to_source(e.left)})^{_format_number(exponent)}"
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, PartialDerivative):
        return f"D[{e.dx},{e.dy}]({to_source(e.target)})"
    raise TypeError(f"not an expression node: {e!r}")


_MATH_FUNCTIONS = {
    "sqrt": math.sqrt,
    "exp": math.exp,
    "ln": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
}


def evaluate(e: Expression, point) -> float:
    """IEEE double evaluation of the formula at (x, y).

    Domain violations (square roots of negative numbers, logs of
    non-positive numbers, division by zero, non-finite results) raise
    :class:`EvaluationError` naming the offending subexpression.
    """
    x, y = float(point[0]), float(point[1])
    return _eval(e, x, y)


def _eval(node: Expression, x: float, y: float) -> float:
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, Variable):
        return x if node.name == "x" else y
    if isinstance(node, Unary):
        return -_eval(node.child, x, y)
    if isinstance(node, Binary):
        left = _eval(node.left, x, y)
        if node.op == "^":
            if not isinstance(node.right, Constant):
                raise EvaluationError("exponent must be constant", to_source(node))
            p = node.right.value
            if p.is_integer():
                n = int(p)
                if n < 0 and left == 0.0:
                    raise EvaluationError("zero raised to a negative power", to_source(node))
                value = _integer_power(left, n, 1.0)
            else:
                if left < 0.0:
                    raise EvaluationError(
                        f"fractional power of negative base {left!r}", to_source(node)
                    )
                if left == 0.0 and p < 0.0:
                    raise EvaluationError("zero raised to a negative power", to_source(node))
                value = left**p
        else:
            right = _eval(node.right, x, y)
            if node.op == "+":
                value = left + right
            elif node.op == "-":
                value = left - right
            elif node.op == "*":
                value = left * right
            elif node.op == "/":
                if right == 0.0:
                    raise EvaluationError("division by zero", to_source(node))
                value = left / right
            else:
                raise EvaluationError(f"unknown operator {node.op!r}", to_source(node))
        if not math.isfinite(value):
            raise EvaluationError("non-finite result", to_source(node))
        return value
    if isinstance(node, Call):
        u = _eval(node.arg, x, y)
        if node.func == "sqrt" and u < 0.0:
            raise EvaluationError(f"sqrt of negative value {u!r}", to_source(node))
        if node.func == "ln" and u <= 0.0:
            raise EvaluationError(f"ln of non-positive value {u!r}", to_source(node))
        try:
            value = _MATH_FUNCTIONS[node.func](u)
        except (ValueError, OverflowError) as exc:
            raise EvaluationError(str(exc), to_source(node)) from None
        if not math.isfinite(value):
            raise EvaluationError("non-finite result", to_source(node))
        return value
    if isinstance(node, PartialDerivative):
        total = node.dx + node.dy
        if total == 0:
            return _eval(node.target, x, y)
        jet = evaluate_jet(node.target, (x, y), min(MAX_ORDER, max(1, total)))
        return partial_derivative(jet, node.dx, node.dy)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_gradient(e: Expression, point) -> tuple[float, float, float]:
    """(value, df/dx, df/dy) at a point, by scalar forward propagation.

    Equivalent to an order-1 jet but allocation free; inner loop of the
    level-curve tracer.
    """
    x, y = float(point[0]), float(point[1])
    v, gx, gy = _eval_grad(e, x, y)
    if not (math.isfinite(gx) and math.isfinite(gy)):
        raise EvaluationError("non-finite gradient", to_source(e))
    return v, gx, gy


def _eval_grad(node, x, y):
    if isinstance(node, Constant):
        return node.value, 0.0, 0.0
    if isinstance(node, Variable):
        if node.name == "x":
            return x, 1.0, 0.0
        return y, 0.0, 1.0
    if isinstance(node, Unary):
        v, gx, gy = _eval_grad(node.child, x, y)
        return -v, -gx, -gy
    if isinstance(node, Binary):
        lv, lx, ly = _eval_grad(node.left, x, y)
        if node.op == "^":
            if not isinstance(node.right, Constant):
                raise EvaluationError("exponent must be constant", to_source(node))
            p = node.right.value
            v = _eval(node, x, y)
            if lv == 0.0:
                # derivative p * lv^(p-1): defined at zero base only for
                # integer exponents with p = 0 or p >= 1
                if p.is_integer() and p >= 0.0:
                    scale = 1.0 if p == 1.0 else 0.0
                else:
                    raise EvaluationError(
                        "gradient of power undefined at zero base", to_source(node)
                    )
            else:
                scale = p * v / lv
            return v, scale * lx, scale * ly
        rv, rx, ry = _eval_grad(node.right, x, y)
        if node.op == "+":
            return lv + rv, lx + rx, ly + ry
        if node.op == "-":
            return lv - rv, lx - rx, ly - ry
        if node.op == "*":
            return lv * rv, lx * rv + lv * rx, ly * rv + lv * ry
        if node.op == "/":
            if rv == 0.0:
                raise EvaluationError("division by zero", to_source(node))
            v = lv / rv
            return v, (lx - v * rx) / rv, (ly - v * ry) / rv
        raise EvaluationError(f"unknown operator {node.op!r}", to_source(node))
    if isinstance(node, Call):
        u, ux, uy = _eval_grad(node.arg, x, y)
        if node.func == "sqrt":
            if u <= 0.0:
                raise EvaluationError(f"sqrt of non-positive value {u!r}", to_source(node))
            v = math.sqrt(u)
            scale = 0.5 / v
        elif node.func == "exp":
            try:
                v = math.exp(u)
            except OverflowError:
                raise EvaluationError("exp overflow", to_source(node)) from None
            scale = v
        elif node.func == "ln":
            if u <= 0.0:
                raise EvaluationError(f"ln of non-positive value {u!r}", to_source(node))
            v = math.log(u)
            scale = 1.0 / u
        elif node.func == "sin":
            v = math.sin(u)
            scale = math.cos(u)
        elif node.func == "cos":
            v = math.cos(u)
            scale = -math.sin(u)
        else:
            v = math.tan(u)
            scale = 1.0 + v * v
        return v, scale * ux, scale * uy
    if isinstance(node, PartialDerivative):
        needed = node.dx + node.dy + 1
        if needed > MAX_ORDER:
            raise EvaluationError(
                f"gradient of a derivative of order {node.dx + node.dy} needs "
                f"order {needed}, beyond the engine maximum {MAX_ORDER}",
                to_source(node),
            )
        base = evaluate_jet(node.target, (x, y), needed)
        for _ in range(node.dx):
            base = derivative_jet(base, "x")
        for _ in range(node.dy):
            base = derivative_jet(base, "y")
        return (
            base.value,
            partial_derivative(base, 1, 0),
            partial_derivative(base, 0, 1),
        )
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_jet(e: Expression, point, order: int) -> TaylorJet:
    """Jet of the formula at `point`, truncated at `order` (1..4)."""
    _check_order(order)
    x = jet_variable(point, "x", order)
    y = jet_variable(point, "y", order)
    return _eval_jet(e, x, y, point, order)


def evaluate_jet_with(e: Expression, bindings: dict) -> TaylorJet:
    """Evaluate with the variables bound to caller-supplied jets.

    All bound jets must share a base point and order; constants are seeded
    at that base point.  Derivative nodes are not supported under general
    substitution (they need coordinate bindings).
    """
    if not bindings:
        raise EvaluationError("no variable bindings supplied")
    jets = list(bindings.values())
    base = jets[0].base_point
    order = jets[0].order
    for j in jets[1:]:
        if j.base_point != base or j.order != order:
            raise EvaluationError("bound jets disagree on base point or order")
    xj = bindings.get("x")
    yj = bindings.get("y")
    return _eval_jet(e, xj, yj, base, order, substitution=True)


def _eval_jet(node, xj, yj, point, order, substitution=False) -> TaylorJet:
    try:
        if isinstance(node, Constant):
            return jet_constant(point, node.value, order)
        if isinstance(node, Variable):
            jet = xj if node.name == "x" else yj
            if jet is None:
                raise EvaluationError(f"variable '{node.name}' is not bound")
            return jet
        if isinstance(node, Unary):
            child = _eval_jet(node.child, xj, yj, point, order, substitution)
            return jet_constant(point, 0.0, order) - child
        if isinstance(node, Binary):
            left = _eval_jet(node.left, xj, yj, point, order, substitution)
            if node.op == "^":
                if not isinstance(node.right, Constant):
                    raise EvaluationError("exponent must be constant", to_source(node))
                return jet_elementary("pow_const", left, node.right.value)
            right = _eval_jet(node.right, xj, yj, point, order, substitution)
            return _JET_OPS[node.op](left, right)
        if isinstance(node, Call):
            arg = _eval_jet(node.arg, xj, yj, point, order, substitution)
            return jet_elementary(node.func, arg)
        if isinstance(node, PartialDerivative):
            if substitution:
                raise EvaluationError(
                    "derivative nodes require coordinate bindings", to_source(node)
                )
            total = node.dx + node.dy
            needed = order + total
            if needed > MAX_ORDER:
                raise EvaluationError(
                    f"jet of order {order} of a derivative of order {total} "
                    f"needs order {needed}, beyond the engine maximum {MAX_ORDER}",
                    to_source(node),
                )
            jet = evaluate_jet(node.target, point, needed)
            for _ in range(node.dx):
                jet = derivative_jet(jet, "x")
            for _ in range(node.dy):
                jet = derivative_jet(jet, "y")
            return jet
        raise TypeError(f"not an expression node: {node!r}")
    except (JetDomainError, JetError) as exc:
        raise EvaluationError(str(exc), to_source(node)) from None


_JET_OPS = {"+": jet_add, "-": jet_sub, "*": jet_mul, "/": jet_div}


def variables_of(e: Expression) -> set[str]:
    """Set of variable names referenced by the expression."""
    if isinstance(e, Variable):
        return {e.name}
    if isinstance(e, Constant):
        return set()
    if isinstance(e, Unary):
        return variables_of(e.child)
    if isinstance(e, Binary):
        return variables_of(e.left) | variables_of(e.right)
    if isinstance(e, Call):
        return variables_of(e.arg)
    if isinstance(e, PartialDerivative):
        return variables_of(e.target)
    raise TypeError(f"not an expression node: {e!r}")

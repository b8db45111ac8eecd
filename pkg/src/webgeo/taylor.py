"""Truncated bivariate Taylor expansions ("jets") of scalar fields.

A :class:`TaylorJet` stores the normalized Taylor coefficients

    c[i][j] = (d^{i+j} f / dx^i dy^j)(x0, y0) / (i! * j!)

of a smooth function at a base point, for every i + j <= order with the
order between 1 and 4.  Arithmetic between jets is exact up to truncation,
so all partial derivatives through order 4 are available without symbolic
differentiation and without finite differences.

Coefficients are kept in Taylor form (divided by factorials) so that the
truncated product is a plain 2-d convolution.  Division and the elementary
functions are computed by composing with the univariate Taylor expansion of
the outer function at the jet's constant term.  Any operation that would
produce a NaN or infinite coefficient raises immediately; non-finite values
are never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_ORDER = 4

_FACTORIAL = (1.0, 1.0, 2.0, 6.0, 24.0)


class JetError(ValueError):
    """Violation of a jet arithmetic contract (orders, base points, ranges)."""


class JetDomainError(JetError):
    """An elementary function was applied outside its domain, or an
    operation produced a non-finite coefficient."""


def _as_axis(axis) -> str:
    name = str(axis).lower()
    if name not in ("x", "y"):
        raise JetError(f"axis must be 'x' or 'y', got {axis!r}")
    return name


def _check_order(order: int) -> int:
    if not isinstance(order, int) or isinstance(order, bool):
        raise JetError(f"order must be an integer, got {order!r}")
    if not 1 <= order <= MAX_ORDER:
        raise JetError(f"order out of range: {order} (must be 1..{MAX_ORDER})")
    return order


@dataclass(frozen=True, eq=False)
class TaylorJet:
    """Immutable truncated Taylor expansion at a point of the plane.

    Attributes:
      base_point: the expansion point (x0, y0).
      order: truncation order, between 1 and 4.
      coeffs: square array of shape (order+1, order+1); entry [i, j] holds
        the normalized coefficient for x^i y^j, entries with i + j > order
        are zero.
    """

    base_point: tuple[float, float]
    order: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_order(self.order)
        point = (float(self.base_point[0]), float(self.base_point[1]))
        arr = np.array(self.coeffs, dtype=float)
        n = self.order
        if arr.shape != (n + 1, n + 1):
            raise JetError(
                f"coefficient table must have shape {(n + 1, n + 1)}, got {arr.shape}"
            )
        for i in range(n + 1):
            for j in range(n + 1):
                if i + j > n and arr[i, j] != 0.0:
                    raise JetError("coefficients beyond the truncation order must be zero")
        if not np.isfinite(arr).all():
            raise JetDomainError("jet holds a non-finite coefficient")
        arr.setflags(write=False)
        object.__setattr__(self, "base_point", point)
        object.__setattr__(self, "coeffs", arr)

    @property
    def n_coefficients(self) -> int:
        """Number of stored coefficients, (order+1)(order+2)/2."""
        return (self.order + 1) * (self.order + 2) // 2

    def c(self, i: int, j: int) -> float:
        """Normalized coefficient c[i][j]."""
        if i < 0 or j < 0 or i + j > self.order:
            raise JetError(f"coefficient ({i},{j}) outside jet of order {self.order}")
        return float(self.coeffs[i, j])

    @property
    def value(self) -> float:
        """Value of the underlying function at the base point."""
        return float(self.coeffs[0, 0])

    def _coerce(self, other):
        if isinstance(other, TaylorJet):
            return other
        if isinstance(other, (int, float)):
            return jet_constant(self.base_point, float(other), self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else jet_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else jet_sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else jet_sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else jet_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else jet_div(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else jet_div(other, self)

    def __neg__(self):
        return jet_constant(self.base_point, 0.0, self.order) - self

    def __pow__(self, exponent):
        if isinstance(exponent, (int, float)) and float(exponent).is_integer():
            return _integer_power(self, int(exponent), _one_like(self))
        return jet_pow_const(self, float(exponent))

    def __repr__(self):
        return (
            f"TaylorJet(base_point={self.base_point}, order={self.order}, "
            f"value={self.value!r})"
        )


def _finish(point, order, coeffs, context: str) -> TaylorJet:
    """Internal constructor for arithmetic results.

    The coefficient layout is trusted (correct shape, zero truncation tail),
    so only the finiteness guard runs; full validation stays in the public
    constructor.
    """
    if not np.isfinite(coeffs).all():
        raise JetDomainError(f"non-finite coefficient produced by {context}")
    jet = object.__new__(TaylorJet)
    coeffs.setflags(write=False)
    object.__setattr__(jet, "base_point", point)
    object.__setattr__(jet, "order", order)
    object.__setattr__(jet, "coeffs", coeffs)
    return jet


def jet_constant(point, value: float, order: int) -> TaylorJet:
    """Jet of the constant function `value`."""
    _check_order(order)
    point = (float(point[0]), float(point[1]))
    coeffs = np.zeros((order + 1, order + 1))
    coeffs[0, 0] = float(value)
    return _finish(point, order, coeffs, "constant seed")


def jet_variable(point, axis, order: int) -> TaylorJet:
    """Jet of the coordinate function x or y at `point`."""
    _check_order(order)
    name = _as_axis(axis)
    point = (float(point[0]), float(point[1]))
    coeffs = np.zeros((order + 1, order + 1))
    coeffs[0, 0] = point[0] if name == "x" else point[1]
    if name == "x":
        coeffs[1, 0] = 1.0
    else:
        coeffs[0, 1] = 1.0
    return _finish(point, order, coeffs, "coordinate seed")


def _one_like(a: TaylorJet) -> TaylorJet:
    return jet_constant(a.base_point, 1.0, a.order)


def _check_compatible(a: TaylorJet, b: TaylorJet, op: str):
    if a.order != b.order:
        raise JetError(f"{op}: mismatched jet orders {a.order} and {b.order}")
    if a.base_point != b.base_point:
        raise JetError(
            f"{op}: mismatched base points {a.base_point} and {b.base_point}"
        )


def jet_add(a: TaylorJet, b: TaylorJet) -> TaylorJet:
    _check_compatible(a, b, "add")
    return _finish(a.base_point, a.order, a.coeffs + b.coeffs, "add")


def jet_sub(a: TaylorJet, b: TaylorJet) -> TaylorJet:
    _check_compatible(a, b, "sub")
    return _finish(a.base_point, a.order, a.coeffs - b.coeffs, "sub")


def jet_mul(a: TaylorJet, b: TaylorJet) -> TaylorJet:
    """Truncated Cauchy product of two jets."""
    _check_compatible(a, b, "mul")
    n = a.order
    la = a.coeffs.tolist()
    lb = b.coeffs.tolist()
    out = [[0.0] * (n + 1) for _ in range(n + 1)]
    for p in range(n + 1):
        row_a = la[p]
        for q in range(n + 1 - p):
            apq = row_a[q]
            if apq == 0.0:
                continue
            for i in range(p, n + 1):
                row_b = lb[i - p]
                row_out = out[i]
                for j in range(q, n + 1 - i):
                    row_out[j] += apq * row_b[j - q]
    return _finish(a.base_point, n, np.array(out), "mul")


def jet_div(a: TaylorJet, b: TaylorJet) -> TaylorJet:
    """Truncated quotient, solved degree by degree.

    A zero constant term in the divisor signals a singular point of the
    formula being evaluated and raises :class:`JetDomainError`.
    """
    _check_compatible(a, b, "div")
    n = a.order
    b00 = float(b.coeffs[0, 0])
    if b00 == 0.0:
        raise JetDomainError("division by a jet with zero constant term")
    la = a.coeffs.tolist()
    lb = b.coeffs.tolist()
    out = [[0.0] * (n + 1) for _ in range(n + 1)]
    out[0][0] = la[0][0] / b00
    for d in range(1, n + 1):
        for i in range(d + 1):
            j = d - i
            s = la[i][j]
            for p in range(i + 1):
                row_out = out[p]
                row_b = lb[i - p]
                for q in range(j + 1):
                    if p == i and q == j:
                        continue
                    s -= row_out[q] * row_b[j - q]
            out[i][j] = s / b00
    return _finish(a.base_point, n, np.array(out), "div")


_ARITH = {"add": jet_add, "sub": jet_sub, "mul": jet_mul, "div": jet_div}


def jet_arith(operation: str, a: TaylorJet, b: TaylorJet) -> TaylorJet:
    """Dispatch one of the four arithmetic operations by name."""
    try:
        fn = _ARITH[operation]
    except KeyError:
        raise JetError(f"unknown jet operation {operation!r}") from None
    return fn(a, b)


def _integer_power(value, n: int, one):
    """value**n by binary exponentiation.  Works for floats and jets alike,
    so both evaluation paths share the exact same sequence of float ops."""
    if n == 0:
        return one
    if n < 0:
        return _integer_power(one / value, -n, one)

    def positive(v, k):
        if k == 1:
            return v
        half = positive(v, k // 2)
        squared = half * half
        return squared if k % 2 == 0 else squared * v

    return positive(value, n)


def _compose_univariate(a: TaylorJet, series, context: str) -> TaylorJet:
    """Jet of g(a) given the univariate Taylor coefficients of g at a's
    constant term (Horner evaluation in the zero-constant part of a)."""
    n = a.order
    h = np.array(a.coeffs)
    h[0, 0] = 0.0
    h_jet = _finish(a.base_point, n, h, context)
    acc = jet_constant(a.base_point, series[n], n)
    for k in range(n - 1, -1, -1):
        acc = jet_mul(acc, h_jet)
        bumped = np.array(acc.coeffs)
        bumped[0, 0] += series[k]
        acc = _finish(a.base_point, n, bumped, context)
    return acc


def _series_sqrt(u: float, n: int):
    if u <= 0.0:
        raise JetDomainError(f"sqrt of non-positive constant term {u!r}")
    coeffs = [math.sqrt(u)]
    p = 0.5
    for k in range(1, n + 1):
        coeffs.append(coeffs[-1] * (p - k + 1) / (k * u))
    return coeffs


def _series_exp(u: float, n: int):
    e = math.exp(u)
    return [e / _FACTORIAL[k] for k in range(n + 1)]


def _series_ln(u: float, n: int):
    if u <= 0.0:
        raise JetDomainError(f"ln of non-positive constant term {u!r}")
    coeffs = [math.log(u), 1.0 / u]
    for k in range(2, n + 1):
        coeffs.append(-coeffs[-1] * (k - 1) / (k * u))
    return coeffs[: n + 1]


def _series_sin(u: float, n: int):
    s, c = math.sin(u), math.cos(u)
    cycle = (s, c, -s, -c)
    return [cycle[k % 4] / _FACTORIAL[k] for k in range(n + 1)]


def _series_cos(u: float, n: int):
    s, c = math.sin(u), math.cos(u)
    cycle = (c, -s, -c, s)
    return [cycle[k % 4] / _FACTORIAL[k] for k in range(n + 1)]


def _series_tan(u: float, n: int):
    t = math.tan(u)
    if not math.isfinite(t):
        raise JetDomainError(f"tan undefined at constant term {u!r}")
    t2 = t * t
    coeffs = [
        t,
        1.0 + t2,
        t + t * t2,
        (1.0 + 4.0 * t2 + 3.0 * t2 * t2) / 3.0,
        (2.0 * t + 5.0 * t * t2 + 3.0 * t * t2 * t2) / 3.0,
    ]
    return coeffs[: n + 1]


def _series_pow(u: float, p: float, n: int):
    if u <= 0.0:
        raise JetDomainError(
            f"pow_const with non-integer exponent {p!r} needs a positive "
            f"constant term, got {u!r}"
        )
    coeffs = [u**p]
    for k in range(1, n + 1):
        coeffs.append(coeffs[-1] * (p - k + 1) / (k * u))
    return coeffs


def jet_sqrt(a: TaylorJet) -> TaylorJet:
    return _compose_univariate(a, _series_sqrt(a.value, a.order), "sqrt")


def jet_exp(a: TaylorJet) -> TaylorJet:
    try:
        series = _series_exp(a.value, a.order)
    except OverflowError:
        raise JetDomainError(f"exp overflow at constant term {a.value!r}") from None
    return _compose_univariate(a, series, "exp")


def jet_ln(a: TaylorJet) -> TaylorJet:
    return _compose_univariate(a, _series_ln(a.value, a.order), "ln")


def jet_sin(a: TaylorJet) -> TaylorJet:
    return _compose_univariate(a, _series_sin(a.value, a.order), "sin")


def jet_cos(a: TaylorJet) -> TaylorJet:
    return _compose_univariate(a, _series_cos(a.value, a.order), "cos")


def jet_tan(a: TaylorJet) -> TaylorJet:
    return _compose_univariate(a, _series_tan(a.value, a.order), "tan")


def jet_pow_const(a: TaylorJet, exponent: float) -> TaylorJet:
    """a raised to a constant real power.

    Integer exponents go through binary exponentiation (valid wherever the
    jet itself is, including zero constant terms for non-negative powers);
    fractional exponents require a positive constant term.
    """
    p = float(exponent)
    if p.is_integer():
        n = int(p)
        if n < 0 and a.value == 0.0:
            raise JetDomainError(
                "negative power of a jet with zero constant term"
            )
        return _integer_power(a, n, _one_like(a))
    return _compose_univariate(a, _series_pow(a.value, p, a.order), "pow_const")


_ELEMENTARY = {
    "sqrt": jet_sqrt,
    "exp": jet_exp,
    "ln": jet_ln,
    "sin": jet_sin,
    "cos": jet_cos,
    "tan": jet_tan,
}


def jet_elementary(fn: str, a: TaylorJet, exponent: float | None = None) -> TaylorJet:
    """Apply an elementary function to a jet by name."""
    if fn == "pow_const":
        if exponent is None:
            raise JetError("pow_const requires an exponent")
        return jet_pow_const(a, exponent)
    try:
        impl = _ELEMENTARY[fn]
    except KeyError:
        raise JetError(f"unknown elementary function {fn!r}") from None
    return impl(a)


def partial_derivative(a: TaylorJet, i: int, j: int) -> float:
    """The raw partial derivative d^{i+j} f / dx^i dy^j at the base point."""
    if i < 0 or j < 0:
        raise JetError("derivative multi-index must be non-negative")
    if i + j > a.order:
        raise JetError(
            f"derivative order {i}+{j} exceeds jet order {a.order}"
        )
    return float(a.coeffs[i, j]) * _FACTORIAL[i] * _FACTORIAL[j]


def derivative_jet(a: TaylorJet, axis) -> TaylorJet:
    """Jet of the partial derivative of `a` along `axis`, one order lower."""
    if a.order < 2:
        raise JetError("derivative_jet would drop the order below 1")
    name = _as_axis(axis)
    n = a.order - 1
    out = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1 - i):
            if name == "x":
                out[i, j] = (i + 1) * a.coeffs[i + 1, j]
            else:
                out[i, j] = (j + 1) * a.coeffs[i, j + 1]
    return _finish(a.base_point, n, out, "derivative_jet")


def truncate_jet(a: TaylorJet, order: int) -> TaylorJet:
    """Copy of `a` truncated to a lower (or equal) order."""
    _check_order(order)
    if order > a.order:
        raise JetError(f"cannot raise jet order from {a.order} to {order}")
    out = np.array(a.coeffs[: order + 1, : order + 1])
    for i in range(order + 1):
        for j in range(order + 1):
            if i + j > order:
                out[i, j] = 0.0
    return _finish(a.base_point, order, out, "truncate")

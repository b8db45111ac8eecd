"""Projective structures of planar webs.

A non-degenerate 4-web determines a unique projective structure whose
geodesics contain all four families of leaves: each web function imposes one
linear condition

    P1_22 fx^3 - 3 P1_12 fx^2 fy - 3 P2_12 fx fy^2 + P2_11 fy^3 = Flex f

on the Thomas parameters, and four transversal foliations pin all four.
Two independent routes to the solution are provided: a closed form obtained
by Lagrange interpolation of binary cubics through the four gradient
directions, and a direct dense solve of the 4x4 system.  They are each
other's oracle.

For webs normalized to (x, y, f3, f4) the structure is encoded by the two
combinations alpha = G2_22 - 2 G1_12 and beta = G1_11 - 2 G2_12, built from
derivatives of f3 and f4.  The structure contains an affine symmetric
connection (covariantly constant curvature) iff

    alpha_xx + 2 beta_xy = beta alpha_x + 2 beta beta_y
    2 alpha_xy + beta_yy = 2 alpha alpha_x + alpha beta_y

hold.  In that case the remaining freedom (sigma = G1_12, tau = G2_12 and
their first derivatives, constrained by a vanishing curvature trace) forms
a finite-type system: all second derivatives of sigma and tau are explicit
in the state, and transporting a state along paths is path independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exprlang import EvaluationError, as_expression, evaluate_jet, to_source
from .geodesy import (
    ResidualSample,
    WebPresentation,
    flex_of_jet,
    projective_flex_residual,
)
from .geometry import CurvatureMatrix, ThomasParameters, curvature_components
from .taylor import (
    TaylorJet,
    derivative_jet,
    partial_derivative,
    truncate_jet,
)

#: Pairs with |J(f_i, f_j)| below this times |grad f_i| |grad f_j| are
#: treated as tangent (degenerate) directions.
JACOBIAN_DEGENERACY_COEFF = 1e-8

MAX_CONDITION = 1e12


class DegenerateWebError(ValueError):
    """A web fails the transversality / conditioning requirements."""


def _require_web(web, d: int | None = None, at_least: int | None = None):
    if not isinstance(web, WebPresentation):
        web = WebPresentation(web)
    n = len(web)
    if d is not None and n != d:
        raise ValueError(f"operation needs a web of exactly {d} functions, got {n}")
    if at_least is not None and n < at_least:
        raise ValueError(f"operation needs a web of at least {at_least} functions, got {n}")
    return web


def _gradients_and_flexes(web: WebPresentation, point):
    grads = []
    flexes = []
    for f in web.functions:
        jet = evaluate_jet(f, point, 2)
        grads.append((partial_derivative(jet, 1, 0), partial_derivative(jet, 0, 1)))
        flexes.append(flex_of_jet(jet))
    return grads, flexes


def _check_transversality(web: WebPresentation, grads, point):
    n = len(grads)
    for i in range(n):
        for j in range(i + 1, n):
            (pix, piy), (pjx, pjy) = grads[i], grads[j]
            jac = pix * pjy - piy * pjx
            scale = math.hypot(pix, piy) * math.hypot(pjx, pjy)
            if abs(jac) <= JACOBIAN_DEGENERACY_COEFF * scale:
                raise DegenerateWebError(
                    f"degenerate web at {tuple(point)}: foliations ({i + 1}, {j + 1}) "
                    f"('{to_source(web.functions[i])}', '{to_source(web.functions[j])}') "
                    f"are tangent (Jacobian {jac!r})"
                )


def fit_projective_structure(web, point) -> ThomasParameters:
    """Thomas parameters of the projective structure of a 4-web, in closed
    form.

    The cubic gradient form interpolating the four flex values is assembled
    by Lagrange interpolation over the gradient directions:

        C(p, q) = sum_i Flex f_i * prod_{k != i} (q_k p - p_k q)
                                 / prod_{k != i} J(f_i, f_k)

    and the Thomas parameters are read off its coefficients.  Substituting
    the result back into the geodesicity equation of any of the four
    functions gives a zero residual to machine precision.
    """
    web = _require_web(web, d=4)
    grads, flexes = _gradients_and_flexes(web, point)
    _check_transversality(web, grads, point)

    p1_22 = p1_12 = p2_12 = p2_11 = 0.0
    for i in range(4):
        others = [k for k in range(4) if k != i]
        denom = 1.0
        for k in others:
            denom *= grads[i][0] * grads[k][1] - grads[i][1] * grads[k][0]
        prod_fy = 1.0
        prod_fx = 1.0
        for k in others:
            prod_fy *= grads[k][1]
            prod_fx *= grads[k][0]
        sum_x_prod_y = 0.0
        sum_y_prod_x = 0.0
        for k in others:
            rest = [l for l in others if l != k]
            term_y = 1.0
            term_x = 1.0
            for l in rest:
                term_y *= grads[l][1]
                term_x *= grads[l][0]
            sum_x_prod_y += grads[k][0] * term_y
            sum_y_prod_x += grads[k][1] * term_x
        weight = flexes[i] / denom
        p1_22 += weight * prod_fy
        p2_11 -= weight * prod_fx
        p1_12 += weight * sum_x_prod_y / 3.0
        p2_12 -= weight * sum_y_prod_x / 3.0
    return ThomasParameters(p1_22=p1_22, p1_12=p1_12, p2_12=p2_12, p2_11=p2_11)


def fit_by_linear_solve(web, point) -> ThomasParameters:
    """Thomas parameters of a 4-web by dense solution of the 4x4 linear
    system; the independent oracle for :func:`fit_projective_structure`."""
    web = _require_web(web, d=4)
    grads, flexes = _gradients_and_flexes(web, point)
    matrix = np.array(
        [
            [
                fx**3,
                -3.0 * fx * fx * fy,
                -3.0 * fx * fy * fy,
                fy**3,
            ]
            for fx, fy in grads
        ]
    )
    condition = float(np.linalg.cond(matrix))
    if not math.isfinite(condition) or condition > MAX_CONDITION:
        raise DegenerateWebError(
            f"geodesicity system is singular or ill-conditioned at {tuple(point)}: "
            f"condition estimate {condition:.3e}"
        )
    solution = np.linalg.solve(matrix, np.array(flexes))
    return ThomasParameters(
        p1_22=float(solution[0]),
        p1_12=float(solution[1]),
        p2_12=float(solution[2]),
        p2_11=float(solution[3]),
    )


@dataclass(frozen=True)
class AlphaBeta:
    """The two projective invariants of a normalized 4-web at a point,
    optionally with their order-2 jets (for derivative extraction)."""

    alpha: float
    beta: float
    alpha_jet: TaylorJet | None = None
    beta_jet: TaylorJet | None = None

    def _need_jets(self):
        if self.alpha_jet is None or self.beta_jet is None:
            raise ValueError("AlphaBeta was built without jets (jet_order=0)")

    @property
    def alpha_x(self) -> float:
        self._need_jets()
        return partial_derivative(self.alpha_jet, 1, 0)

    @property
    def alpha_y(self) -> float:
        self._need_jets()
        return partial_derivative(self.alpha_jet, 0, 1)

    @property
    def alpha_xx(self) -> float:
        self._need_jets()
        return partial_derivative(self.alpha_jet, 2, 0)

    @property
    def alpha_xy(self) -> float:
        self._need_jets()
        return partial_derivative(self.alpha_jet, 1, 1)

    @property
    def alpha_yy(self) -> float:
        self._need_jets()
        return partial_derivative(self.alpha_jet, 0, 2)

    @property
    def beta_x(self) -> float:
        self._need_jets()
        return partial_derivative(self.beta_jet, 1, 0)

    @property
    def beta_y(self) -> float:
        self._need_jets()
        return partial_derivative(self.beta_jet, 0, 1)

    @property
    def beta_xx(self) -> float:
        self._need_jets()
        return partial_derivative(self.beta_jet, 2, 0)

    @property
    def beta_xy(self) -> float:
        self._need_jets()
        return partial_derivative(self.beta_jet, 1, 1)

    @property
    def beta_yy(self) -> float:
        self._need_jets()
        return partial_derivative(self.beta_jet, 0, 2)


def _gradient_and_flex_jets(fjet: TaylorJet, order: int):
    """(f_x, f_y, Flex f) as jets of `order`, from a jet of f two orders
    higher; the derivative jets are shared between the three outputs."""
    dx = derivative_jet(fjet, "x")
    dy = derivative_jet(fjet, "y")
    fx = truncate_jet(dx, order)
    fy = truncate_jet(dy, order)
    fxx = truncate_jet(derivative_jet(dx, "x"), order)
    fxy = truncate_jet(derivative_jet(dx, "y"), order)
    fyy = truncate_jet(derivative_jet(dy, "y"), order)
    flex = fy * fy * fxx - 2.0 * fx * fy * fxy + fx * fx * fyy
    return fx, fy, flex


def alpha_beta(f3, f4, point, jet_order: int = 0) -> AlphaBeta:
    """The invariants (alpha, beta) of the normalized web (x, y, f3, f4):

        alpha = f4_y Flex f3 / (f3_x f3_y D) - f3_y Flex f4 / (f4_x f4_y D)
        beta  = -f4_x Flex f3 / (f3_x f3_y D) + f3_x Flex f4 / (f4_x f4_y D)

    with D = f3_x f4_y - f3_y f4_x.  With jet_order=2 the same combination
    is carried out in truncated jet arithmetic on order-4 jets of f3 and
    f4, so first and second derivatives of alpha and beta come out exact to
    truncation.  Each vanishing denominator factor is reported by name.
    """
    if jet_order not in (0, 2):
        raise ValueError("jet_order must be 0 or 2")
    f3 = as_expression(f3)
    f4 = as_expression(f4)

    if jet_order == 0:
        j3 = evaluate_jet(f3, point, 2)
        j4 = evaluate_jet(f4, point, 2)
        f3x = partial_derivative(j3, 1, 0)
        f3y = partial_derivative(j3, 0, 1)
        f4x = partial_derivative(j4, 1, 0)
        f4y = partial_derivative(j4, 0, 1)
        delta = f3x * f4y - f3y * f4x
        _check_alpha_beta_denominators(point, f3x, f3y, f4x, f4y, delta)
        flex3 = flex_of_jet(j3)
        flex4 = flex_of_jet(j4)
        term3 = flex3 / (f3x * f3y * delta)
        term4 = flex4 / (f4x * f4y * delta)
        return AlphaBeta(
            alpha=f4y * term3 - f3y * term4,
            beta=-f4x * term3 + f3x * term4,
        )

    j3 = evaluate_jet(f3, point, 4)
    j4 = evaluate_jet(f4, point, 4)
    f3x, f3y, flex3 = _gradient_and_flex_jets(j3, jet_order)
    f4x, f4y, flex4 = _gradient_and_flex_jets(j4, jet_order)
    delta = f3x * f4y - f3y * f4x
    _check_alpha_beta_denominators(
        point, f3x.value, f3y.value, f4x.value, f4y.value, delta.value
    )
    term3 = flex3 / (f3x * f3y * delta)
    term4 = flex4 / (f4x * f4y * delta)
    alpha_jet = f4y * term3 - f3y * term4
    beta_jet = f3x * term4 - f4x * term3
    return AlphaBeta(
        alpha=alpha_jet.value,
        beta=beta_jet.value,
        alpha_jet=alpha_jet,
        beta_jet=beta_jet,
    )


def _check_alpha_beta_denominators(point, f3x, f3y, f4x, f4y, delta):
    factors = {"f3_x": f3x, "f3_y": f3y, "f4_x": f4x, "f4_y": f4y, "Delta": delta}
    for name, value in factors.items():
        if value == 0.0:
            raise EvaluationError(
                f"invariant denominators vanish at {tuple(point)}: {name} = 0"
            )


def symmetric_conditions_residual(f3, f4, point) -> tuple[float, float]:
    """Residuals of the two symmetry conditions on (alpha, beta):

        r1 = alpha_xx + 2 beta_xy - beta alpha_x - 2 beta beta_y
        r2 = 2 alpha_xy + beta_yy - 2 alpha alpha_x - alpha beta_y

    Both vanish exactly when the projective structure of the normalized web
    (x, y, f3, f4) contains an affine symmetric connection at the point.
    """
    ab = alpha_beta(f3, f4, point, jet_order=2)
    r1 = ab.alpha_xx + 2.0 * ab.beta_xy - ab.beta * ab.alpha_x - 2.0 * ab.beta * ab.beta_y
    r2 = 2.0 * ab.alpha_xy + ab.beta_yy - 2.0 * ab.alpha * ab.alpha_x - ab.alpha * ab.beta_y
    return (r1, r2)


def dweb_geodesic_residuals(web, point) -> list[ResidualSample]:
    """Geodesicity residuals of f5..fd for the projective structure fitted
    to the leading 4-subweb.  The web is geodesic at the point iff all of
    them vanish."""
    web = _require_web(web, at_least=5)
    leading = WebPresentation(web.functions[:4])
    pi = fit_projective_structure(leading, point)
    return [
        projective_flex_residual(f, pi, point) for f in web.functions[4:]
    ]


@dataclass(frozen=True)
class FiniteTypeState:
    """State of the finite-type system: sigma, tau and their first
    derivatives.  The free choice of a state subject to the single trace
    constraint is the 5-parameter family of symmetric connections."""

    sigma: float
    tau: float
    sigma_x: float
    sigma_y: float
    tau_x: float
    tau_y: float

    def constraint_residual(self, alpha_x: float, beta_y: float) -> float:
        """Residual of the vanishing-curvature-trace constraint
        alpha_x - beta_y + 3 (sigma_x - tau_y)."""
        return alpha_x - beta_y + 3.0 * (self.sigma_x - self.tau_y)

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.sigma, self.tau, self.sigma_x, self.sigma_y, self.tau_x, self.tau_y]
        )

    @staticmethod
    def from_array(values) -> "FiniteTypeState":
        s, t, sx, sy, tx, ty = (float(v) for v in values)
        return FiniteTypeState(s, t, sx, sy, tx, ty)


def finite_type_rhs(state: FiniteTypeState, ab: AlphaBeta):
    """All second derivatives of sigma and tau in terms of the state and
    the (alpha, beta) field with its first and mixed derivatives.

    Returns (sigma_xx, sigma_xy, sigma_yy, tau_xx, tau_xy, tau_yy).
    """
    s, t = state.sigma, state.tau
    sx, sy = state.sigma_x, state.sigma_y
    tx, ty = state.tau_x, state.tau_y
    a, b = ab.alpha, ab.beta
    ax, ay = ab.alpha_x, ab.alpha_y
    bx, by = ab.beta_x, ab.beta_y
    axy, bxy = ab.alpha_xy, ab.beta_xy

    sigma_xx = (
        2.0 * s * tx
        + (4.0 * t + b) * sx
        + (t - b) * by
        + 2.0 * t * ax
        + bxy
        - 2.0 * s * t * (2.0 * t + b)
    )
    sigma_xy = (
        (3.0 * s + a) * sx
        + 2.0 * s * ax
        + s * ty
        + 2.0 * t * sy
        + s * by
        - 2.0 * s * t * (2.0 * s + a)
    )
    sigma_yy = (
        3.0 * (2.0 * s + a) * sy
        + s * ay
        - 2.0 * s * (a * a + 2.0 * s * s + 3.0 * s * a)
    )
    tau_xx = (
        3.0 * (2.0 * t + b) * tx
        + t * bx
        - 2.0 * t * (b * b + 2.0 * t * t + 3.0 * t * b)
    )
    tau_xy = (
        t * sx
        + t * ax
        + (3.0 * t + b) * ty
        + 2.0 * (t * by + s * tx)
        - 2.0 * s * t * (2.0 * t + b)
    )
    tau_yy = (
        (s - a) * ax
        + (4.0 * s + a) * ty
        + 2.0 * (t * sy + s * by)
        + axy
        - 2.0 * s * t * (2.0 * s + a)
    )
    return (sigma_xx, sigma_xy, sigma_yy, tau_xx, tau_xy, tau_yy)


@dataclass(frozen=True)
class IntegrationResult:
    """Endpoint of a finite-type transport, with constraint diagnostics."""

    state: FiniteTypeState
    endpoint: tuple[float, float]
    constraint_residual: float
    max_symmetry_residual: float
    warnings: tuple[str, ...]


#: Tolerance on the trace constraint at the start point of a transport.
INITIAL_CONSTRAINT_TOLERANCE = 1e-8

#: Symmetry-condition residuals above this along the path are flagged; the
#: system is only path independent where the conditions hold.
SYMMETRY_WARNING_THRESHOLD = 1e-6


def integrate_symmetric_connection(
    f3,
    f4,
    initial: FiniteTypeState,
    path,
    step: float,
) -> IntegrationResult:
    """Transport a finite-type state along a polyline by classical 4-stage
    fixed-step integration of the total-derivative system.

    Along a segment with unit direction (ux, uy) the state evolves by
    ux * d/dx + uy * d/dy, with the second derivatives supplied by
    :func:`finite_type_rhs` from the (alpha, beta) field of the web
    (x, y, f3, f4).  The trace constraint must hold at the start point; the
    symmetry conditions are monitored along the way and violations are
    reported as warnings (transport is then path dependent, not wrong).
    """
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step!r}")
    points = [(float(p[0]), float(p[1])) for p in path]
    if len(points) < 2:
        raise ValueError("path needs at least two points")
    f3 = as_expression(f3)
    f4 = as_expression(f4)

    monitor = {"max_sym": 0.0}

    def ab_at(point) -> AlphaBeta:
        ab = alpha_beta(f3, f4, point, jet_order=2)
        r1 = (
            ab.alpha_xx
            + 2.0 * ab.beta_xy
            - ab.beta * ab.alpha_x
            - 2.0 * ab.beta * ab.beta_y
        )
        r2 = (
            2.0 * ab.alpha_xy
            + ab.beta_yy
            - 2.0 * ab.alpha * ab.alpha_x
            - ab.alpha * ab.beta_y
        )
        monitor["max_sym"] = max(monitor["max_sym"], abs(r1), abs(r2))
        return ab

    def field(values: np.ndarray, ab: AlphaBeta, direction):
        state = FiniteTypeState.from_array(values)
        sxx, sxy, syy, txx, txy, tyy = finite_type_rhs(state, ab)
        ddx = np.array([state.sigma_x, state.tau_x, sxx, sxy, txx, txy])
        ddy = np.array([state.sigma_y, state.tau_y, sxy, syy, txy, tyy])
        return direction[0] * ddx + direction[1] * ddy

    ab_current = ab_at(points[0])
    c0 = initial.constraint_residual(ab_current.alpha_x, ab_current.beta_y)
    if abs(c0) > INITIAL_CONSTRAINT_TOLERANCE:
        raise ValueError(
            f"initial state violates the trace constraint: residual {c0!r} "
            f"at {points[0]}"
        )

    # The classical 4-stage scheme samples the field at the step base, at
    # the midpoint (twice), and at the step end; the end sample is the next
    # step's base sample, so each step costs two fresh (alpha, beta) jets.
    values = initial.as_array()
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        length = math.hypot(x1 - x0, y1 - y0)
        if length == 0.0:
            continue
        direction = ((x1 - x0) / length, (y1 - y0) / length)
        n_steps = max(1, math.ceil(length / step))
        h = length / n_steps
        base = (x0, y0)
        for k in range(n_steps):
            if k == n_steps - 1:
                end = (x1, y1)
            else:
                end = (x0 + direction[0] * (k + 1) * h, y0 + direction[1] * (k + 1) * h)
            mid = (base[0] + direction[0] * h / 2.0, base[1] + direction[1] * h / 2.0)
            ab_mid = ab_at(mid)
            ab_end = ab_at(end)
            k1 = field(values, ab_current, direction)
            k2 = field(values + 0.5 * h * k1, ab_mid, direction)
            k3 = field(values + 0.5 * h * k2, ab_mid, direction)
            k4 = field(values + h * k3, ab_end, direction)
            values = values + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            ab_current = ab_end
            base = end

    final_state = FiniteTypeState.from_array(values)
    c_end = final_state.constraint_residual(ab_current.alpha_x, ab_current.beta_y)
    warnings = []
    if monitor["max_sym"] > SYMMETRY_WARNING_THRESHOLD:
        warnings.append(
            "symmetry conditions violated along the path "
            f"(max residual {monitor['max_sym']:.3e}); transport is path dependent"
        )
    return IntegrationResult(
        state=final_state,
        endpoint=points[-1],
        constraint_residual=c_end,
        max_symmetry_residual=monitor["max_sym"],
        warnings=tuple(warnings),
    )


def curvature_along(state: FiniteTypeState, ab: AlphaBeta) -> CurvatureMatrix:
    """Curvature matrix of the transported connection at a point, from the
    state and the local (alpha, beta) values and derivatives."""
    return curvature_components(
        sigma=state.sigma,
        tau=state.tau,
        alpha=ab.alpha,
        beta=ab.beta,
        sigma_x=state.sigma_x,
        sigma_y=state.sigma_y,
        tau_x=state.tau_x,
        tau_y=state.tau_y,
        alpha_x=ab.alpha_x,
        beta_y=ab.beta_y,
    )


__all__ = [
    "AlphaBeta",
    "DegenerateWebError",
    "FiniteTypeState",
    "IntegrationResult",
    "WebPresentation",
    "alpha_beta",
    "curvature_along",
    "dweb_geodesic_residuals",
    "finite_type_rhs",
    "fit_by_linear_solve",
    "fit_projective_structure",
    "integrate_symmetric_connection",
    "symmetric_conditions_residual",
]

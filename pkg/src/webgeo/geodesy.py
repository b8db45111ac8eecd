"""The flex operator and geodesicity residuals for planar foliations.

The flex of a function f(x, y),

    Flex f = f_y^2 f_xx - 2 f_x f_y f_xy + f_x^2 f_yy,

vanishes identically exactly when every level set of f is a straight line.
Replacing the bare second derivatives by their covariant counterparts gives
the geodesicity test for an affine connection: the level curve of f through
a point is a geodesic there iff

    f_y^2 (f_xx - G^k_11 f_k) - 2 f_x f_y (f_xy - G^k_12 f_k)
        + f_x^2 (f_yy - G^k_22 f_k) = 0      (sum over k = x, y).

Residuals are reported both raw and normalized by |grad f|^3: both sides of
every geodesicity equation are cubic in the gradient, so the normalized
value is invariant under relabeling f by a gauge function and comparable
across foliations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exprlang import (
    EvaluationError,
    Expression,
    Variable,
    as_expression,
    evaluate_jet,
    to_source,
)
from .geometry import (
    GRAPH_SURFACE_GAMMA_NOTE,
    ChristoffelField,
    ThomasParameters,
)
from .taylor import TaylorJet, partial_derivative

DEFAULT_TOLERANCE = 1e-8

#: Gradients below ``DEGENERACY_COEFF * (1 + |x| + |y|)`` mark a sample
#: degenerate: the foliation has no well-defined leaf direction there.
DEGENERACY_COEFF = 1e-10


@dataclass(frozen=True)
class ResidualSample:
    """One geodesicity residual at one point."""

    point: tuple[float, float]
    raw: float
    normalized: float
    gradient_norm: float
    degenerate: bool


def _gradient_threshold(point) -> float:
    return DEGENERACY_COEFF * (1.0 + abs(point[0]) + abs(point[1]))


def _make_sample(point, raw: float, fx: float, fy: float) -> ResidualSample:
    point = (float(point[0]), float(point[1]))
    gradient_norm = math.hypot(fx, fy)
    if gradient_norm <= _gradient_threshold(point):
        return ResidualSample(point, raw, math.nan, gradient_norm, True)
    return ResidualSample(point, raw, raw / gradient_norm**3, gradient_norm, False)


def flex_of_jet(jet: TaylorJet) -> float:
    """Flex value from an order >= 2 jet."""
    fx = partial_derivative(jet, 1, 0)
    fy = partial_derivative(jet, 0, 1)
    fxx = partial_derivative(jet, 2, 0)
    fxy = partial_derivative(jet, 1, 1)
    fyy = partial_derivative(jet, 0, 2)
    return fy * fy * fxx - 2.0 * fx * fy * fxy + fx * fx * fyy


def flex(f, point) -> float:
    """Flex of the function at a point (zero for all straight level sets)."""
    return flex_of_jet(evaluate_jet(as_expression(f), point, 2))


def flex_residual(f, gammas: ChristoffelField, point) -> ResidualSample:
    """Geodesicity residual of f's foliation for an affine connection.

    Zero exactly when the level set of f through `point` is a geodesic of
    the connection at that point.  Orientation: raw = Flex f minus the
    Christoffel terms.
    """
    jet = evaluate_jet(as_expression(f), point, 2)
    fx = partial_derivative(jet, 1, 0)
    fy = partial_derivative(jet, 0, 1)
    fxx = partial_derivative(jet, 2, 0)
    fxy = partial_derivative(jet, 1, 1)
    fyy = partial_derivative(jet, 0, 2)
    g1_11, g1_12, g1_22, g2_11, g2_12, g2_22 = gammas.components_at(point)
    raw = (
        fy * fy * (fxx - g1_11 * fx - g2_11 * fy)
        - 2.0 * fx * fy * (fxy - g1_12 * fx - g2_12 * fy)
        + fx * fx * (fyy - g1_22 * fx - g2_22 * fy)
    )
    return _make_sample(point, raw, fx, fy)


def projective_flex_residual(f, pi: ThomasParameters, point) -> ResidualSample:
    """Geodesicity residual of f for a projective structure.

    raw is the cubic gradient form of the Thomas parameters minus Flex f:

        raw = P1_22 fx^3 - 3 P1_12 fx^2 fy - 3 P2_12 fx fy^2 + P2_11 fy^3
              - Flex f
    """
    jet = evaluate_jet(as_expression(f), point, 2)
    fx = partial_derivative(jet, 1, 0)
    fy = partial_derivative(jet, 0, 1)
    cubic = (
        pi.p1_22 * fx**3
        - 3.0 * pi.p1_12 * fx * fx * fy
        - 3.0 * pi.p2_12 * fx * fy * fy
        + pi.p2_11 * fy**3
    )
    raw = cubic - flex_of_jet(jet)
    return _make_sample(point, raw, fx, fy)


def constant_curvature_residual(f, kappa: float, point) -> ResidualSample:
    """Geodesicity residual on the constant-curvature model surface:

        raw = Flex f - 2 kappa (x fx + y fy)(fx^2 + fy^2) / (1 + kappa r^2)
    """
    x, y = float(point[0]), float(point[1])
    denom = 1.0 + kappa * (x * x + y * y)
    if denom <= 0.0:
        raise EvaluationError(
            f"metric singularity: 1 + kappa*(x^2+y^2) = {denom!r} at {(x, y)}"
        )
    jet = evaluate_jet(as_expression(f), point, 2)
    fx = partial_derivative(jet, 1, 0)
    fy = partial_derivative(jet, 0, 1)
    rhs = 2.0 * kappa * (x * fx + y * fy) * (fx * fx + fy * fy) / denom
    raw = flex_of_jet(jet) - rhs
    return _make_sample(point, raw, fx, fy)


def graph_surface_residual(f, z, point) -> ResidualSample:
    """Geodesicity residual on the graph surface w = z(x, y):

        raw = Flex f - (z_x fx + z_y fy)
                       (fy^2 z_xx - 2 fx fy z_xy + fx^2 z_yy)
                       / (1 + z_x^2 + z_y^2)
    """
    fjet = evaluate_jet(as_expression(f), point, 2)
    zjet = evaluate_jet(as_expression(z), point, 2)
    fx = partial_derivative(fjet, 1, 0)
    fy = partial_derivative(fjet, 0, 1)
    zx = partial_derivative(zjet, 1, 0)
    zy = partial_derivative(zjet, 0, 1)
    zxx = partial_derivative(zjet, 2, 0)
    zxy = partial_derivative(zjet, 1, 1)
    zyy = partial_derivative(zjet, 0, 2)
    rhs = (
        (zx * fx + zy * fy)
        * (fy * fy * zxx - 2.0 * fx * fy * zxy + fx * fx * zyy)
        / (1.0 + zx * zx + zy * zy)
    )
    raw = flex_of_jet(fjet) - rhs
    return _make_sample(point, raw, fx, fy)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular evaluation lattice with inclusive endpoints."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs nx >= 1 and ny >= 1")
        if self.xmax < self.xmin or self.ymax < self.ymin:
            raise ValueError("grid bounds are reversed")

    def xs(self) -> list[float]:
        if self.nx == 1:
            return [self.xmin]
        h = (self.xmax - self.xmin) / (self.nx - 1)
        return [self.xmin + i * h for i in range(self.nx)]

    def ys(self) -> list[float]:
        if self.ny == 1:
            return [self.ymin]
        h = (self.ymax - self.ymin) / (self.ny - 1)
        return [self.ymin + j * h for j in range(self.ny)]

    def points(self):
        """All lattice points, y-major then x, deterministic order."""
        for y in self.ys():
            for x in self.xs():
                yield (x, y)

    def as_dict(self) -> dict:
        return {
            "xmin": self.xmin,
            "xmax": self.xmax,
            "ymin": self.ymin,
            "ymax": self.ymax,
            "nx": self.nx,
            "ny": self.ny,
        }


@dataclass(frozen=True)
class WebPresentation:
    """An ordered family of d >= 3 foliations given by level sets."""

    functions: tuple[Expression, ...]
    normalized: bool = field(init=False)

    def __init__(self, functions):
        funcs = tuple(as_expression(f) for f in functions)
        if len(funcs) < 3:
            raise ValueError(f"a web needs at least 3 functions, got {len(funcs)}")
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(
            self,
            "normalized",
            funcs[0] == Variable("x") and funcs[1] == Variable("y"),
        )

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def sources(self) -> list[str]:
        return [to_source(f) for f in self.functions]


def _web_functions(web) -> list[Expression]:
    if isinstance(web, WebPresentation):
        return list(web.functions)
    return [as_expression(f) for f in web]


def geodesic_web_report(
    web,
    grid: GridSpec,
    *,
    christoffels: ChristoffelField | None = None,
    thomas=None,
    curvature: float | None = None,
    surface=None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> dict:
    """Evaluate geodesicity of every foliation of a web over a grid.

    Exactly one structure must be supplied:

      christoffels: affine connection (covariant flex residual),
      thomas: ThomasParameters or a callable point -> ThomasParameters,
      curvature: constant-curvature parameter kappa of the model metric,
      surface: height expression z of a graph surface.

    Grid points where a web function or the structure hits a domain error
    are skipped and reported; points with a degenerate gradient are listed
    and excluded from the verdict.  The verdict is "geodesic" when every
    foliation's largest normalized residual stays within `tolerance`.
    """
    funcs = _web_functions(web)
    if not funcs:
        raise ValueError("web has no functions")
    supplied = [
        name
        for name, value in (
            ("christoffels", christoffels),
            ("thomas", thomas),
            ("curvature", curvature),
            ("surface", surface),
        )
        if value is not None
    ]
    if len(supplied) != 1:
        raise ValueError(
            f"exactly one geometric structure is required, got {supplied or 'none'}"
        )

    notes: list[str] = []
    if surface is not None:
        surface = as_expression(surface)
        notes.append(GRAPH_SURFACE_GAMMA_NOTE)

    def residual_at(f: Expression, point) -> ResidualSample:
        if christoffels is not None:
            return flex_residual(f, christoffels, point)
        if thomas is not None:
            pi = thomas(point) if callable(thomas) else thomas
            return projective_flex_residual(f, pi, point)
        if curvature is not None:
            return constant_curvature_residual(f, curvature, point)
        return graph_surface_residual(f, surface, point)

    per_foliation = []
    worst = 0.0
    for index, f in enumerate(funcs):
        normalized_values = []
        degenerate_points = []
        skipped_points = []
        for point in grid.points():
            try:
                sample = residual_at(f, point)
            except EvaluationError:
                skipped_points.append([point[0], point[1]])
                continue
            if sample.degenerate:
                degenerate_points.append([point[0], point[1]])
                continue
            normalized_values.append(abs(sample.normalized))
        if not normalized_values:
            raise ValueError(
                f"no valid grid samples for foliation {index + 1} "
                f"('{to_source(f)}'): all points degenerate or out of domain"
            )
        max_normalized = max(normalized_values)
        worst = max(worst, max_normalized)
        per_foliation.append(
            {
                "index": index + 1,
                "function": to_source(f),
                "samples": len(normalized_values),
                "max_normalized": max_normalized,
                "mean_normalized": sum(normalized_values) / len(normalized_values),
                "degenerate_points": degenerate_points,
                "skipped_points": skipped_points,
            }
        )

    return {
        "per_foliation": per_foliation,
        "verdict": "geodesic" if worst <= tolerance else "non-geodesic",
        "max_normalized": worst,
        "tolerance": tolerance,
        "notes": notes,
    }

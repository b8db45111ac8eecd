"""webgeo: numeric analysis of planar webs.

A planar d-web is a family of d foliations of a plane domain, each given by
the level sets of a function.  This package decides, numerically on grids,
whether webs are geodesic for affine connections and projective structures,
fits the unique projective structure determined by a 4-web, tests whether
that structure contains an affine symmetric connection, and generates
linear webs by solving the Euler equation with the method of
characteristics.  Derivatives come from truncated Taylor jets of
user-supplied formulas; nothing is differentiated symbolically.

The main entry points:

- :func:`parse` / :func:`evaluate` / :func:`evaluate_jet`: the formula
  language.
- :func:`flex` and the ``*_residual`` family: geodesicity tests.
- :func:`fit_projective_structure` / :func:`fit_by_linear_solve`: the
  4-web fit, each the oracle of the other.
- :func:`symmetric_conditions_residual` and
  :func:`integrate_symmetric_connection`: symmetric projective structures.
- :func:`characteristic_roots` / :func:`generate_linear_web`: linear webs.
- :func:`trace_level_curve` / :func:`render_svg` / :func:`write_report`:
  output.

The ``webgeo`` command line exposes the same analyses; see the README.
"""

from .taylor import (
    MAX_ORDER,
    JetDomainError,
    JetError,
    TaylorJet,
    derivative_jet,
    jet_arith,
    jet_constant,
    jet_elementary,
    jet_variable,
    partial_derivative,
    truncate_jet,
)
from .exprlang import (
    Binary,
    Call,
    Constant,
    EvaluationError,
    Expression,
    ParseError,
    PartialDerivative,
    Unary,
    Variable,
    as_expression,
    evaluate,
    evaluate_gradient,
    evaluate_jet,
    evaluate_jet_with,
    parse,
    to_source,
)
from .geometry import (
    ChristoffelField,
    CurvatureMatrix,
    GRAPH_SURFACE_GAMMA_NOTE,
    ThomasParameters,
    christoffels_constant_curvature,
    christoffels_graph_surface,
    constant_curvature_metric,
    curvature_components,
    gaussian_curvature_oracle,
    thomas_from_christoffels,
)
from .geodesy import (
    DEFAULT_TOLERANCE,
    GridSpec,
    ResidualSample,
    WebPresentation,
    constant_curvature_residual,
    flex,
    flex_of_jet,
    flex_residual,
    geodesic_web_report,
    graph_surface_residual,
    projective_flex_residual,
)
from .projective import (
    AlphaBeta,
    DegenerateWebError,
    FiniteTypeState,
    IntegrationResult,
    alpha_beta,
    curvature_along,
    dweb_geodesic_residuals,
    finite_type_rhs,
    fit_by_linear_solve,
    fit_projective_structure,
    integrate_symmetric_connection,
    symmetric_conditions_residual,
)
from .eulerweb import (
    CauchyDatum,
    CharacteristicRoot,
    CharacteristicSolution,
    FoliationSample,
    LinearWebSample,
    characteristic_roots,
    connection_euler_residual,
    connection_euler_residual_of_jet,
    euler_residual,
    euler_residual_of_jet,
    generate_linear_web,
)
from .render import (
    LeafPolyline,
    Rect,
    compose_report,
    render_svg,
    trace_level_curve,
    write_csv_grid,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_ORDER",
    "JetDomainError",
    "JetError",
    "TaylorJet",
    "derivative_jet",
    "jet_arith",
    "jet_constant",
    "jet_elementary",
    "jet_variable",
    "partial_derivative",
    "truncate_jet",
    "Binary",
    "Call",
    "Constant",
    "EvaluationError",
    "Expression",
    "ParseError",
    "PartialDerivative",
    "Unary",
    "Variable",
    "as_expression",
    "evaluate",
    "evaluate_gradient",
    "evaluate_jet",
    "evaluate_jet_with",
    "parse",
    "to_source",
    "ChristoffelField",
    "CurvatureMatrix",
    "GRAPH_SURFACE_GAMMA_NOTE",
    "ThomasParameters",
    "christoffels_constant_curvature",
    "christoffels_graph_surface",
    "constant_curvature_metric",
    "curvature_components",
    "gaussian_curvature_oracle",
    "thomas_from_christoffels",
    "DEFAULT_TOLERANCE",
    "GridSpec",
    "ResidualSample",
    "WebPresentation",
    "constant_curvature_residual",
    "flex",
    "flex_of_jet",
    "flex_residual",
    "geodesic_web_report",
    "graph_surface_residual",
    "projective_flex_residual",
    "AlphaBeta",
    "DegenerateWebError",
    "FiniteTypeState",
    "IntegrationResult",
    "alpha_beta",
    "curvature_along",
    "dweb_geodesic_residuals",
    "finite_type_rhs",
    "fit_by_linear_solve",
    "fit_projective_structure",
    "integrate_symmetric_connection",
    "symmetric_conditions_residual",
    "CauchyDatum",
    "CharacteristicRoot",
    "CharacteristicSolution",
    "FoliationSample",
    "LinearWebSample",
    "characteristic_roots",
    "connection_euler_residual",
    "connection_euler_residual_of_jet",
    "euler_residual",
    "euler_residual_of_jet",
    "generate_linear_web",
    "LeafPolyline",
    "Rect",
    "compose_report",
    "render_svg",
    "trace_level_curve",
    "write_csv_grid",
    "write_report",
]

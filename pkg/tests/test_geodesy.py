"""Flex operator, geodesicity residuals, equivalences, and web reports."""

from __future__ import annotations

import math

import pytest

from webgeo import (
    ChristoffelField,
    Constant,
    EvaluationError,
    GridSpec,
    ThomasParameters,
    WebPresentation,
    christoffels_constant_curvature,
    christoffels_graph_surface,
    constant_curvature_residual,
    evaluate,
    flex,
    flex_residual,
    geodesic_web_report,
    graph_surface_residual,
    parse,
    projective_flex_residual,
)
from conftest import CORPUS, rel_close, sample_point

FLAT = ChristoffelField(*([Constant(0.0)] * 6))


def test_flex_of_affine_function(rng):
    f = parse("3*x - 2*y + 7")
    for _ in range(5):
        assert flex(f, sample_point(rng, (-2, 2, -2, 2))) == 0.0


def test_flex_of_circle_family():
    assert flex("x^2 + y^2", (1, 1)) == 16.0


def test_flex_of_parabola_tangents():
    f = parse("x + sqrt(x^2 - y)")
    assert abs(flex(f, (2, 3))) <= 1e-12


def test_flex_residual_flat_equals_flex(rng):
    for source, box in CORPUS[:8]:
        f = parse(source)
        p = sample_point(rng, box)
        sample = flex_residual(f, FLAT, p)
        assert sample.raw == flex(f, p)


def test_flex_residual_constant_curvature_radial_lines(rng):
    gammas = christoffels_constant_curvature(1.0)
    f = parse("y/x")
    for _ in range(8):
        p = sample_point(rng, (0.4, 1.5, 0.2, 1.2))
        sample = flex_residual(f, gammas, p)
        assert abs(sample.normalized) <= 1e-12


def test_flex_residual_vertical_line_value():
    gammas = christoffels_constant_curvature(1.0)
    sample = flex_residual(parse("x"), gammas, (1, 0))
    assert sample.raw == pytest.approx(-1.0)


def test_projective_residual_linear_flat():
    pi = ThomasParameters(0, 0, 0, 0)
    assert projective_flex_residual("2*x - y", pi, (0.3, 0.4)).raw == 0.0


def test_projective_residual_of_hyperbolas():
    pi = ThomasParameters(0, 0, 0, 0)
    sample = projective_flex_residual("x*y", pi, (1, 1))
    assert sample.raw == pytest.approx(2.0)


def test_constant_curvature_residual_reduces_to_flex(rng):
    for source, box in CORPUS[:6]:
        f = parse(source)
        p = sample_point(rng, box)
        assert constant_curvature_residual(f, 0.0, p).raw == flex(f, p)


@pytest.mark.parametrize("kappa", [-0.3, 0.5, 1.0])
@pytest.mark.parametrize("gauge", ["y/x", "sin(y/x)"])
def test_radial_gauges_are_geodesic_on_model_surface(gauge, kappa, rng):
    f = parse(gauge)
    for _ in range(6):
        p = sample_point(rng, (0.4, 1.2, 0.2, 1.0))
        sample = constant_curvature_residual(f, kappa, p)
        assert abs(sample.normalized) <= 1e-10


def test_constant_curvature_metric_singularity():
    with pytest.raises(EvaluationError):
        constant_curvature_residual("x", -1.0, (1.0, 1.0))


def test_graph_surface_radial_solution():
    sample = graph_surface_residual("x/y", "exp(x^2 + y^2)", (1, 2))
    assert abs(sample.normalized) <= 1e-10


def test_graph_surface_linear_height_reduces_to_flex(rng):
    z = parse("x + 2*y + 1")
    for source, box in CORPUS[:6]:
        f = parse(source)
        p = sample_point(rng, box)
        assert graph_surface_residual(f, z, p).raw == flex(f, p)


def test_graph_surface_coordinate_lines_on_ruled_graph():
    sample = graph_surface_residual("x", "x*y", (0.7, -0.2))
    assert sample.raw == 0.0


def test_connection_equals_model_surface_residual(rng):
    """The covariant flex against the model-metric connection must replay
    the closed-form constant-curvature residual."""
    for kappa in (-0.3, 0.5, 1.0):
        gammas = christoffels_constant_curvature(kappa)
        for source, box in CORPUS[:8]:
            f = parse(source)
            p = sample_point(rng, box)
            if 1.0 + kappa * (p[0] ** 2 + p[1] ** 2) <= 0.1:
                continue
            a = flex_residual(f, gammas, p).raw
            b = constant_curvature_residual(f, kappa, p).raw
            assert rel_close(a, b, 1e-9)


def test_connection_equals_graph_surface_residual(rng):
    for z_source in ("x*y + 1", "exp(x*y/4)", "x^2 + y^2"):
        z = parse(z_source)
        gammas = christoffels_graph_surface(z)
        for source, _ in CORPUS[:6]:
            f = parse(source)
            p = sample_point(rng, (-1.0, 1.0, -1.0, 1.0))
            try:
                a = flex_residual(f, gammas, p).raw
                b = graph_surface_residual(f, z, p).raw
            except EvaluationError:
                continue
            assert rel_close(a, b, 1e-9)


def test_flex_gauge_covariance(rng):
    """Relabeling f by Phi(t) = t + t^3 scales the flex by Phi'(f)^3."""
    for source, box in CORPUS[:10]:
        f = parse(source)
        relabeled = f + f**3
        p = sample_point(rng, box)
        value = evaluate(f, p)
        scale = (1.0 + 3.0 * value * value) ** 3
        assert rel_close(flex(relabeled, p), scale * flex(f, p), 1e-9)


def test_degenerate_gradient_is_flagged():
    sample = flex_residual("x^2 + y^2", FLAT, (0, 0))
    assert sample.degenerate
    assert math.isnan(sample.normalized)
    assert sample.gradient_norm == 0.0


def test_web_report_flat_linear_web():
    grid = GridSpec(0, 1, 0, 1, 5, 5)
    report = geodesic_web_report(["x", "y", "x+y"], grid, christoffels=FLAT)
    assert report["verdict"] == "geodesic"
    assert report["max_normalized"] == 0.0
    assert len(report["per_foliation"]) == 3


def test_web_report_radial_gauges_constant_curvature():
    grid = GridSpec(0.4, 1.2, 0.2, 1.0, 6, 6)
    report = geodesic_web_report(["y/x", "sin(y/x)"], grid, curvature=1.0)
    assert report["verdict"] == "geodesic"


def test_web_report_non_geodesic():
    grid = GridSpec(0.5, 1.5, 0.5, 1.5, 5, 5)
    report = geodesic_web_report(
        ["x*y"], grid, thomas=ThomasParameters(0, 0, 0, 0), tolerance=1e-8
    )
    assert report["verdict"] == "non-geodesic"
    assert report["max_normalized"] > 1e-8


def test_web_report_callable_thomas():
    grid = GridSpec(0.5, 1.5, 0.5, 1.5, 4, 4)
    report = geodesic_web_report(
        ["x", "y"], grid, thomas=lambda p: ThomasParameters(0, 0, 0, 0)
    )
    assert report["verdict"] == "geodesic"


def test_web_report_skips_out_of_domain_points():
    # sqrt(x^2 - y) has a domain boundary crossing this grid
    grid = GridSpec(0.5, 2.0, 0.0, 2.0, 6, 6)
    report = geodesic_web_report(["x + sqrt(x^2 - y)"], grid, christoffels=FLAT)
    entry = report["per_foliation"][0]
    assert entry["skipped_points"]
    assert entry["samples"] + len(entry["skipped_points"]) + len(
        entry["degenerate_points"]
    ) == 36


def test_web_report_structure_validation():
    grid = GridSpec(0, 1, 0, 1, 3, 3)
    with pytest.raises(ValueError):
        geodesic_web_report(["x"], grid)
    with pytest.raises(ValueError):
        geodesic_web_report(["x"], grid, christoffels=FLAT, curvature=1.0)


def test_web_report_all_points_invalid():
    grid = GridSpec(10.0, 11.0, 10.0, 11.0, 3, 3)
    with pytest.raises(ValueError):
        geodesic_web_report(["sqrt(x - 100)"], grid, christoffels=FLAT)


def test_web_report_graph_surface_note():
    grid = GridSpec(0.5, 1.5, 0.5, 1.5, 4, 4)
    report = geodesic_web_report(["x/y"], grid, surface="exp(x^2 + y^2)")
    assert report["verdict"] == "geodesic"
    assert any("Gamma^2_22" in note for note in report["notes"])


def test_web_presentation_contract():
    with pytest.raises(ValueError):
        WebPresentation(["x", "y"])
    web = WebPresentation(["x", "y", "x+y"])
    assert web.normalized
    assert len(web) == 3
    other = WebPresentation(["x*y", "y", "x"])
    assert not other.normalized


def test_grid_spec_contract():
    with pytest.raises(ValueError):
        GridSpec(0, 1, 0, 1, 0, 5)
    with pytest.raises(ValueError):
        GridSpec(1, 0, 0, 1, 5, 5)
    grid = GridSpec(0, 1, 0, 2, 2, 3)
    assert list(grid.points())[0] == (0.0, 0.0)
    assert list(grid.points())[-1] == (1.0, 2.0)
    assert len(list(grid.points())) == 6

"""Command line interface: `webgeo <subcommand> ...`.

Exit codes: 0 for a completed analysis (and, with --expect, a matching
verdict), 1 when the analysis verdict misses an --expect value or a web is
degenerate at the request point, 2 for usage errors and formula syntax
errors.  Diagnostics go to standard error; reports go to --out or standard
output and are byte-identical across repeated identical invocations.
"""

from __future__ import annotations

import argparse
import sys

from .exprlang import EvaluationError, ParseError, parse, to_source
from .eulerweb import (
    CauchyDatum,
    connection_euler_residual,
    euler_residual,
    generate_linear_web,
)
from .geodesy import GridSpec, flex_residual, geodesic_web_report
from .geometry import ChristoffelField, ThomasParameters
from .projective import (
    DegenerateWebError,
    FiniteTypeState,
    alpha_beta,
    curvature_along,
    dweb_geodesic_residuals,
    fit_projective_structure,
    integrate_symmetric_connection,
    symmetric_conditions_residual,
)
from .render import (
    Rect,
    compose_report,
    render_svg,
    trace_level_curve,
    write_csv_grid,
    write_report,
)

DEFAULT_TOL = 1e-8


class _UsageError(Exception):
    pass


def _parse_expr(text: str, what: str):
    try:
        return parse(text)
    except ParseError as exc:
        raise _UsageError(f"{what}: {exc}") from None


def _parse_web(text: str, what: str = "--web"):
    parts = [p.strip() for p in text.split(";")]
    if any(not p for p in parts):
        raise _UsageError(f"{what}: empty entry in web list")
    return [_parse_expr(p, what) for p in parts]


def _parse_grid(text: str) -> GridSpec:
    pieces = text.split(":")
    if len(pieces) != 6:
        raise _UsageError(f"--grid: expected xmin:xmax:ymin:ymax:nx:ny, got {text!r}")
    try:
        xmin, xmax, ymin, ymax = (float(p) for p in pieces[:4])
        nx, ny = int(pieces[4]), int(pieces[5])
    except ValueError as exc:
        raise _UsageError(f"--grid: {exc}") from None
    try:
        return GridSpec(xmin, xmax, ymin, ymax, nx, ny)
    except ValueError as exc:
        raise _UsageError(f"--grid: {exc}") from None


def _parse_point(text: str):
    pieces = text.split(",")
    if len(pieces) != 2:
        raise _UsageError(f"--point: expected x,y, got {text!r}")
    try:
        return (float(pieces[0]), float(pieces[1]))
    except ValueError as exc:
        raise _UsageError(f"--point: {exc}") from None


def _parse_path(text: str):
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            raise _UsageError("--path: empty point entry")
        points.append(_parse_point(chunk))
    if len(points) < 2:
        raise _UsageError("--path: need at least two points")
    return points


def _parse_rect(text: str) -> Rect:
    pieces = text.split(":")
    if len(pieces) != 4:
        raise _UsageError(f"--domain: expected xmin:xmax:ymin:ymax, got {text!r}")
    try:
        return Rect(*(float(p) for p in pieces))
    except ValueError as exc:
        raise _UsageError(f"--domain: {exc}") from None


def _parse_floats(text: str, count: int, what: str):
    pieces = text.split(",")
    if len(pieces) != count:
        raise _UsageError(f"{what}: expected {count} comma-separated numbers")
    try:
        return [float(p) for p in pieces]
    except ValueError as exc:
        raise _UsageError(f"{what}: {exc}") from None


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _verdict_exit(args, verdict: str) -> int:
    if args.expect is not None and verdict != args.expect:
        print(
            f"webgeo: verdict {verdict!r} does not match expected {args.expect!r}",
            file=sys.stderr,
        )
        return 1
    return 0


def _grid_samples(residual_fn, grid: GridSpec):
    samples = []
    skipped = []
    for point in grid.points():
        try:
            samples.append(residual_fn(point))
        except EvaluationError:
            skipped.append([point[0], point[1]])
    return samples, skipped


def _residual_results(samples, skipped, tol):
    valid = [s for s in samples if not s.degenerate]
    if not valid:
        raise EvaluationError("no valid samples on the requested grid")
    max_normalized = max(abs(s.normalized) for s in valid)
    mean_normalized = sum(abs(s.normalized) for s in valid) / len(valid)
    return {
        "per_foliation": [
            {
                "samples": len(valid),
                "max_normalized": max_normalized,
                "mean_normalized": mean_normalized,
                "degenerate_points": [list(s.point) for s in samples if s.degenerate],
                "skipped_points": skipped,
            }
        ],
        "verdict": "geodesic" if max_normalized <= tol else "non-geodesic",
        "max_normalized": max_normalized,
        "tolerance": tol,
    }


def _cmd_flex(args) -> int:
    f = _parse_expr(args.f, "--f")
    grid = _parse_grid(args.grid)
    zero = ChristoffelField(*([_parse_expr("0", "zero")] * 6))
    samples, skipped = _grid_samples(lambda p: flex_residual(f, zero, p), grid)
    results = _residual_results(samples, skipped, args.tol)
    if args.format == "csv":
        _emit(args, write_csv_grid(samples))
    else:
        report = compose_report(
            "flex",
            {"f": to_source(f), "tolerance": args.tol},
            grid.as_dict(),
            results,
        )
        _emit(args, write_report(report))
    return _verdict_exit(args, results["verdict"])


def _parse_structure(text: str):
    if text.startswith("constcurv:"):
        return {"curvature": float(text.split(":", 1)[1])}
    if text.startswith("graph:"):
        return {"surface": _parse_expr(text.split(":", 1)[1], "--christoffel graph")}
    if text.startswith("custom:"):
        names = text.split(":", 1)[1]
        comps = _parse_web(names, "--christoffel custom")
        if len(comps) != 6:
            raise _UsageError(
                "--christoffel custom: expected six semicolon-separated "
                "components g1_11; g1_12; g1_22; g2_11; g2_12; g2_22"
            )
        return {"christoffels": ChristoffelField(*comps)}
    raise _UsageError(
        f"--christoffel: expected constcurv:<kappa>, graph:<expr>, or "
        f"custom:<six exprs>, got {text!r}"
    )


def _cmd_geodesic(args) -> int:
    web = _parse_web(args.web)
    grid = _parse_grid(args.grid)
    structure = _parse_structure(args.christoffel)
    results = geodesic_web_report(web, grid, tolerance=args.tol, **structure)
    notes = results.pop("notes", [])
    if args.format == "csv":
        raise _UsageError("--format csv is only available for flex and euler")
    report = compose_report(
        "geodesic",
        {
            "web": [to_source(f) for f in web],
            "christoffel": args.christoffel,
            "tolerance": args.tol,
        },
        grid.as_dict(),
        results,
        notes=notes,
    )
    _emit(args, write_report(report))
    return _verdict_exit(args, results["verdict"])


def _cmd_fit(args) -> int:
    web = _parse_web(args.web)
    if len(web) != 4:
        raise _UsageError(f"--web: fit needs exactly 4 functions, got {len(web)}")
    inputs = {"web": [to_source(f) for f in web]}
    if args.point:
        point = _parse_point(args.point)
        pi = fit_projective_structure(web, point)
        inputs["point"] = list(point)
        results = {
            "pi": {
                "p1_22": pi.p1_22,
                "p1_12": pi.p1_12,
                "p2_12": pi.p2_12,
                "p2_11": pi.p2_11,
            }
        }
        grid_dict = None
    elif args.grid:
        grid = _parse_grid(args.grid)
        grid_dict = grid.as_dict()
        sums = [0.0, 0.0, 0.0, 0.0]
        lows = [float("inf")] * 4
        highs = [float("-inf")] * 4
        count = 0
        skipped = []
        for point in grid.points():
            try:
                pi = fit_projective_structure(web, point)
            except (DegenerateWebError, EvaluationError):
                skipped.append([point[0], point[1]])
                continue
            for idx, value in enumerate(pi.as_tuple()):
                sums[idx] += value
                lows[idx] = min(lows[idx], value)
                highs[idx] = max(highs[idx], value)
            count += 1
        if count == 0:
            raise EvaluationError("web is degenerate on the whole grid")
        names = ("p1_22", "p1_12", "p2_12", "p2_11")
        results = {
            "pi": {n: sums[i] / count for i, n in enumerate(names)},
            "max_spread": max(highs[i] - lows[i] for i in range(4)),
            "points_used": count,
            "skipped_points": skipped,
        }
    else:
        raise _UsageError("fit needs --point or --grid")
    report = compose_report("fit", inputs, grid_dict, results)
    _emit(args, write_report(report))
    return 0


def _cmd_dweb(args) -> int:
    web = _parse_web(args.web)
    if len(web) < 5:
        raise _UsageError(f"--web: dweb needs at least 5 functions, got {len(web)}")
    grid = _parse_grid(args.grid)
    worst = 0.0
    per_function = [
        {"index": idx + 5, "function": to_source(f), "max_normalized": 0.0, "samples": 0}
        for idx, f in enumerate(web[4:])
    ]
    skipped = []
    for point in grid.points():
        try:
            residuals = dweb_geodesic_residuals(web, point)
        except (DegenerateWebError, EvaluationError):
            skipped.append([point[0], point[1]])
            continue
        for entry, sample in zip(per_function, residuals):
            if sample.degenerate:
                continue
            entry["samples"] += 1
            entry["max_normalized"] = max(entry["max_normalized"], abs(sample.normalized))
            worst = max(worst, abs(sample.normalized))
    if all(entry["samples"] == 0 for entry in per_function):
        raise EvaluationError("no valid samples on the requested grid")
    verdict = "geodesic" if worst <= args.tol else "non-geodesic"
    results = {
        "per_function": per_function,
        "skipped_points": skipped,
        "max_normalized": worst,
        "verdict": verdict,
        "tolerance": args.tol,
    }
    report = compose_report(
        "dweb",
        {"web": [to_source(f) for f in web], "tolerance": args.tol},
        grid.as_dict(),
        results,
    )
    _emit(args, write_report(report))
    return _verdict_exit(args, verdict)


def _cmd_symcheck(args) -> int:
    f3 = _parse_expr(args.f3, "--f3")
    f4 = _parse_expr(args.f4, "--f4")
    grid = _parse_grid(args.grid)
    r1_values = []
    r2_values = []
    skipped = []
    for point in grid.points():
        try:
            r1, r2 = symmetric_conditions_residual(f3, f4, point)
        except EvaluationError:
            skipped.append([point[0], point[1]])
            continue
        r1_values.append(abs(r1))
        r2_values.append(abs(r2))
    if not r1_values:
        raise EvaluationError("no valid samples on the requested grid")
    worst = max(max(r1_values), max(r2_values))
    verdict = "symmetric" if worst <= args.tol else "non-symmetric"
    results = {
        "r1": {"max": max(r1_values), "mean": sum(r1_values) / len(r1_values)},
        "r2": {"max": max(r2_values), "mean": sum(r2_values) / len(r2_values)},
        "samples": len(r1_values),
        "skipped_points": skipped,
        "verdict": verdict,
        "tolerance": args.tol,
    }
    report = compose_report(
        "symcheck",
        {"f3": to_source(f3), "f4": to_source(f4), "tolerance": args.tol},
        grid.as_dict(),
        results,
    )
    _emit(args, write_report(report))
    return _verdict_exit(args, verdict)


def _cmd_symintegrate(args) -> int:
    f3 = _parse_expr(args.f3, "--f3")
    f4 = _parse_expr(args.f4, "--f4")
    path = _parse_path(args.path)
    initial_values = _parse_floats(args.initial, 6, "--initial")
    initial = FiniteTypeState(*initial_values)
    result = integrate_symmetric_connection(f3, f4, initial, path, step=args.step)
    ab_end = alpha_beta(f3, f4, result.endpoint, jet_order=2)
    curvature = curvature_along(result.state, ab_end)
    verdict = "pass" if abs(result.constraint_residual) <= args.tol else "fail"
    end = result.state
    results = {
        "state": {
            "sigma": end.sigma,
            "tau": end.tau,
            "sigma_x": end.sigma_x,
            "sigma_y": end.sigma_y,
            "tau_x": end.tau_x,
            "tau_y": end.tau_y,
        },
        "endpoint": list(result.endpoint),
        "constraint_residual": result.constraint_residual,
        "max_symmetry_residual": result.max_symmetry_residual,
        "curvature": {
            "r1_112": curvature.r1_112,
            "r1_212": curvature.r1_212,
            "r2_112": curvature.r2_112,
            "r2_212": curvature.r2_212,
            "trace": curvature.trace,
        },
        "verdict": verdict,
    }
    report = compose_report(
        "symintegrate",
        {
            "f3": to_source(f3),
            "f4": to_source(f4),
            "initial": initial_values,
            "path": [list(p) for p in path],
            "step": args.step,
        },
        None,
        results,
        warnings=result.warnings,
    )
    _emit(args, write_report(report))
    return _verdict_exit(args, verdict)


def _cmd_euler(args) -> int:
    w = _parse_expr(args.w, "--w")
    pi = None
    if args.pi:
        values = _parse_floats(args.pi, 4, "--pi")
        pi = ThomasParameters(*values)

    def residual(point):
        if pi is None:
            return euler_residual(w, point)
        return connection_euler_residual(w, pi, point)

    inputs = {"w": to_source(w), "tolerance": args.tol}
    if pi is not None:
        inputs["pi"] = [pi.p1_22, pi.p1_12, pi.p2_12, pi.p2_11]
    if args.point:
        point = _parse_point(args.point)
        value = residual(point)
        inputs["point"] = list(point)
        verdict = "pass" if abs(value) <= args.tol else "fail"
        results = {"residual": value, "verdict": verdict}
        grid_dict = None
        if args.format == "csv":
            raise _UsageError("--format csv needs --grid")
        report = compose_report("euler", inputs, grid_dict, results)
        _emit(args, write_report(report))
        return _verdict_exit(args, verdict)

    if not args.grid:
        raise _UsageError("euler needs --point or --grid")
    grid = _parse_grid(args.grid)
    values = []
    skipped = []
    for point in grid.points():
        try:
            values.append((point, residual(point)))
        except EvaluationError:
            skipped.append([point[0], point[1]])
    if not values:
        raise EvaluationError("no valid samples on the requested grid")
    worst = max(abs(v) for _, v in values)
    verdict = "pass" if worst <= args.tol else "fail"
    if args.format == "csv":
        rows = ["x,y,raw,normalized,degenerate"]
        for point, v in values:
            rows.append(f"{point[0]!r},{point[1]!r},{v!r},{v!r},false")
        _emit(args, "\n".join(rows) + "\n")
        return _verdict_exit(args, verdict)
    results = {
        "max_residual": worst,
        "mean_residual": sum(abs(v) for _, v in values) / len(values),
        "samples": len(values),
        "skipped_points": skipped,
        "verdict": verdict,
    }
    report = compose_report("euler", inputs, grid.as_dict(), results)
    _emit(args, write_report(report))
    return _verdict_exit(args, verdict)


def _cmd_lingen(args) -> int:
    sources = [p.strip() for p in args.data.split(";")]
    if any(not s for s in sources):
        raise _UsageError("--data: empty datum entry")
    interval_pieces = args.lam.split(":")
    if len(interval_pieces) != 2:
        raise _UsageError(f"--lambda: expected lo:hi, got {args.lam!r}")
    try:
        interval = (float(interval_pieces[0]), float(interval_pieces[1]))
    except ValueError as exc:
        raise _UsageError(f"--lambda: {exc}") from None
    data = []
    for source in sources:
        expr = _parse_expr(source, "--data")
        try:
            data.append(CauchyDatum(expr, interval))
        except ValueError as exc:
            raise _UsageError(f"--data: {exc}") from None
    domain = _parse_rect(args.domain)
    try:
        sample = generate_linear_web(data, domain, args.leaves)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    leaves = sample.all_leaves()
    warnings = [w for f in sample.foliations for w in f.warnings]
    svg_path = args.svg
    if svg_path:
        if not leaves:
            print("webgeo: no leaves meet the domain; SVG not written", file=sys.stderr)
            return 1
        with open(svg_path, "w", encoding="utf-8") as handle:
            handle.write(render_svg(leaves, domain))
    results = {"leaves": len(leaves), "svg_path": svg_path}
    report = compose_report(
        "lingen",
        {
            "data": [d.source() for d in data],
            "lambda_interval": list(interval),
            "domain": domain.as_dict(),
            "leaves_per_foliation": args.leaves,
        },
        None,
        results,
        warnings=warnings,
    )
    _emit(args, write_report(report))
    return 0


def _cmd_render(args) -> int:
    web = _parse_web(args.web)
    domain = _parse_rect(args.domain)
    leaves = []
    warnings = []
    for index, f in enumerate(web):
        placed = 0
        for level_index in range(args.levels):
            frac = (level_index + 0.5) / args.levels
            seed = (
                domain.xmin + frac * (domain.xmax - domain.xmin),
                domain.ymin + frac * (domain.ymax - domain.ymin),
            )
            try:
                leaf = trace_level_curve(
                    f, seed, domain, step=args.step, foliation_index=index
                )
            except (EvaluationError, ValueError):
                continue
            leaves.append(leaf)
            placed += 1
        if placed == 0:
            warnings.append(f"no leaves traced for '{to_source(f)}'")
    if not leaves:
        print("webgeo: nothing traced; SVG not written", file=sys.stderr)
        return 1
    with open(args.svg, "w", encoding="utf-8") as handle:
        handle.write(render_svg(leaves, domain))
    results = {"leaves": len(leaves), "svg_path": args.svg}
    report = compose_report(
        "render",
        {
            "web": [to_source(f) for f in web],
            "domain": domain.as_dict(),
            "levels": args.levels,
            "step": args.step,
        },
        None,
        results,
        warnings=warnings,
    )
    _emit(args, write_report(report))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="webgeo",
        description="Numeric analysis of planar webs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, expect=True):
        p.add_argument("--out", help="write the report to this file instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        if expect:
            p.add_argument("--expect", help="exit 1 unless the verdict equals this")

    p = sub.add_parser("flex", help="flat-plane linearity test: Flex f over a grid")
    p.add_argument("--f", required=True)
    p.add_argument("--grid", required=True)
    common(p)
    p.set_defaults(handler=_cmd_flex)

    p = sub.add_parser("geodesic", help="geodesicity of a web for a connection")
    p.add_argument("--web", required=True, help="semicolon-separated web functions")
    p.add_argument(
        "--christoffel",
        required=True,
        help="constcurv:<kappa> | graph:<z expr> | custom:<six exprs>",
    )
    p.add_argument("--grid", required=True)
    common(p)
    p.set_defaults(handler=_cmd_geodesic)

    p = sub.add_parser("fit", help="projective structure of a 4-web")
    p.add_argument("--web", required=True)
    p.add_argument("--point")
    p.add_argument("--grid")
    common(p, expect=False)
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("dweb", help="geodesicity residuals of f5..fd")
    p.add_argument("--web", required=True)
    p.add_argument("--grid", required=True)
    common(p)
    p.set_defaults(handler=_cmd_dweb)

    p = sub.add_parser("symcheck", help="symmetric-structure conditions of (x,y,f3,f4)")
    p.add_argument("--f3", required=True)
    p.add_argument("--f4", required=True)
    p.add_argument("--grid", required=True)
    common(p)
    p.set_defaults(handler=_cmd_symcheck)

    p = sub.add_parser("symintegrate", help="transport the finite-type state along a path")
    p.add_argument("--f3", required=True)
    p.add_argument("--f4", required=True)
    p.add_argument("--initial", required=True, help="sigma,tau,sigma_x,sigma_y,tau_x,tau_y")
    p.add_argument("--path", required=True, help="semicolon-separated x,y points")
    p.add_argument("--step", type=float, default=1e-3)
    common(p)
    p.set_defaults(handler=_cmd_symintegrate)

    p = sub.add_parser("euler", help="Euler equation residuals")
    p.add_argument("--w", required=True)
    p.add_argument("--pi", help="p1_22,p1_12,p2_12,p2_11 for the connection variant")
    p.add_argument("--point")
    p.add_argument("--grid")
    common(p)
    p.set_defaults(handler=_cmd_euler)

    p = sub.add_parser("lingen", help="generate a linear web from Cauchy data")
    p.add_argument("--data", required=True, help="semicolon-separated Cauchy data in y")
    p.add_argument("--lambda", dest="lam", required=True, help="parameter interval lo:hi")
    p.add_argument("--domain", required=True, help="xmin:xmax:ymin:ymax")
    p.add_argument("--leaves", type=int, default=7)
    p.add_argument("--svg", help="write the leaves to this SVG file")
    common(p, expect=False)
    p.set_defaults(handler=_cmd_lingen)

    p = sub.add_parser("render", help="trace level curves of a web into an SVG")
    p.add_argument("--web", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--svg", required=True)
    common(p, expect=False)
    p.set_defaults(handler=_cmd_render)

    return parser


def run(argv) -> int:
    """Run the CLI on an argument list and return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"webgeo: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"webgeo: {exc}", file=sys.stderr)
        return 2
    except (DegenerateWebError, EvaluationError, ValueError) as exc:
        print(f"webgeo: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"webgeo: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line interface.

Subcommands expose each capability with file-based inputs and CSV or
JSON outputs; every run writes a manifest (subcommand, config digest,
seed, version, output paths) so reruns can be verified byte-for-byte.

Exit codes: 0 success, 2 validation problem, 3 numeric failure, 4 I/O.
"""

import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import click

from . import __version__
from .errors import NumericError, ValidationError
from .expsim import (
    RabiModel,
    estimate_J,
    measure_J_pipeline,
    mixture_J,
    paper_protocol_times,
    theory_parities,
)
from .functionals import (
    GAUSSIAN_BOUND,
    PointSet4,
    RectangleSpec,
    SqueezeMap,
    TriangleSpec,
    eval_J,
    eval_Jprime,
    pointset_from_dict,
    squeeze_points,
)
from .eigenmax import LatticeProblem, max_eigen
from .kernels import backend_name, parity_grid
from .optimize import OptimConfig, optimize, threshold_scan
from .scans import FAMILIES, SCAN_NAMES, parallelogram_config, rectangle_config, run_scan
from .states import compile_state, state_from_dict

# fixed measurement points of the bundled ion presets
ION_POINTS = ((-0.110, -0.110), (0.121, 0.100), (0.100, 0.121), (0.331, 0.331))
PRESETS = ("ion_n0", "ion_n2", "ion_mix")


def _digest(payload):
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode()
    ).hexdigest()


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return value


def _manifest(ctx, subcommand, settings, outputs):
    out_dir = ctx.obj["out"]
    payload = {
        "subcommand": subcommand,
        "config_digest": _digest(settings),
        "seed": ctx.obj["seed"],
        "version": __version__,
        "backend": backend_name(),
        "outputs": [str(p) for p in outputs],
    }
    path = out_dir / f"{subcommand}_manifest.json"
    _write_json(path, payload)
    return path


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _load_state(path):
    return state_from_dict(_load_json(path))


def _config_section(ctx, name):
    cfg = ctx.obj.get("config") or {}
    section = cfg.get(name, {})
    if not isinstance(section, dict):
        raise ValidationError(f"config section {name!r} must be an object")
    return section


@click.group()
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON config file with per-subcommand sections.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True,
              help="Output directory.")
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True, help="Preferred table format where both exist.")
@click.version_option(__version__)
@click.pass_context
def cli(ctx, config, seed, out, threads, fmt):
    """Phase-space nonclassicality and non-Gaussianity tests."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx.obj = {
        "config": _load_json(config) if config else {},
        "seed": seed,
        "out": out_dir,
        "threads": max(threads, 1),
        "format": fmt,
    }


def _parse_grid(spec):
    parts = spec.split(",")
    if len(parts) == 1:
        parts = [parts[0], parts[0]]
    axes = []
    for part in parts:
        bits = part.split(":")
        if len(bits) != 3:
            raise ValidationError(f"grid axis must be min:max:count, got {part!r}")
        lo, hi, n = float(bits[0]), float(bits[1]), int(bits[2])
        if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError(f"bad grid axis {part!r}")
        axes.append((lo, hi, n))
    return axes


@cli.command()
@click.argument("state_file", type=click.Path(exists=True))
@click.option("--grid", default="-3:3:61", show_default=True,
              help="Evaluation grid, min:max:count[,min:max:count].")
@click.option("--points", "points_file", type=click.Path(exists=True), default=None,
              help="JSON list of [x, y] pairs instead of a grid.")
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.pass_context
def wigner(ctx, state_file, grid, points_file, theta):
    """Tabulate scaled Wigner values (x, y, parity) for a state."""
    import numpy as np

    state = _load_state(state_file)
    data = compile_state(state)
    if points_file:
        pts = _load_json(points_file)
        xs = np.array([float(p[0]) for p in pts])
        ys = np.array([float(p[1]) for p in pts])
    else:
        (x0, x1, nx), (y0, y1, ny) = _parse_grid(grid)
        gx, gy = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny), indexing="ij")
        xs, ys = gx.ravel(), gy.ravel()
    vals = parity_grid(data, xs, ys, theta)
    out = ctx.obj["out"] / "wigner.csv"
    _write_csv(out, ("x", "y", "parity"), list(zip(xs, ys, vals)))
    _manifest(ctx, "wigner", {"state": state_file, "grid": grid, "points": points_file,
                              "theta": theta}, [out])
    click.echo(f"wrote {out}")


@cli.command("test")
@click.argument("state_file", type=click.Path(exists=True))
@click.argument("pointset_file", type=click.Path(exists=True))
@click.pass_context
def test_cmd(ctx, state_file, pointset_file):
    """Evaluate J or J' for a state on a stored point set."""
    state = _load_state(state_file)
    doc = _load_json(pointset_file)
    squeeze = None
    if isinstance(doc, dict) and "squeeze" in doc and doc.get("type") is None:
        squeeze = pointset_from_dict(doc["squeeze"])
        doc = doc["pointset"]
    obj = pointset_from_dict(doc)
    if isinstance(obj, TriangleSpec):
        result = eval_Jprime(state, obj, squeeze)
    elif isinstance(obj, RectangleSpec):
        result = eval_J(state, squeeze_points(obj, squeeze or SqueezeMap()))
    elif isinstance(obj, PointSet4):
        result = eval_J(state, obj)
    else:
        raise ValidationError(f"point-set file holds a {type(obj).__name__}, not a test geometry")
    payload = result.to_dict()
    out = ctx.obj["out"] / ("test_result.json" if ctx.obj["format"] == "json" else "test_result.csv")
    if ctx.obj["format"] == "json":
        _write_json(out, payload)
    else:
        _write_csv(
            out,
            ("value", "kind", "violates_lower_bound", "exceeds_classical", "exceeds_gaussian",
             *(f"parity_{i}" for i in range(len(result.parities)))),
            [(
                result.value, result.kind, int(result.violates_lower_bound),
                int(result.exceeds_classical), int(result.exceeds_gaussian), *result.parities,
            )],
        )
    _manifest(ctx, "test", {"state": state_file, "pointset": pointset_file}, [out])
    click.echo(f"{result.kind}: value={result.value:.6f} "
               f"exceeds_classical={result.exceeds_classical} "
               f"exceeds_gaussian={result.exceeds_gaussian}")
    click.echo(f"wrote {out}")


@cli.command("optimize")
@click.argument("state_file", type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["rectangle", "parallelogram", "triangle"]),
              default="rectangle", show_default=True)
@click.option("--objective", type=click.Choice(["maximize", "minimize"]),
              default="maximize", show_default=True)
@click.option("--trace", is_flag=True, help="Also write the per-start trace CSV.")
@click.pass_context
def optimize_cmd(ctx, state_file, mode, objective, trace):
    """Search for extremal J or J' over point-set parameters."""
    state = _load_state(state_file)
    section = dict(_config_section(ctx, "optimize"))
    section.setdefault("mode", mode)
    section.setdefault("objective", objective)
    section.setdefault("seed", ctx.obj["seed"])
    section.setdefault("threads", ctx.obj["threads"])
    cfg = OptimConfig.from_dict(section)
    report = optimize(state, cfg)
    outputs = []
    out = ctx.obj["out"] / "optimize_report.json"
    _write_json(out, {"config": cfg.to_dict(), "report": report.to_dict()})
    outputs.append(out)
    if trace:
        trace_path = ctx.obj["out"] / "optimize_trace.csv"
        _write_csv(
            trace_path,
            ("start", "origin", "start_value", "final_value", "evaluations"),
            [(s.index, s.origin, s.start_value, s.final_value, s.evaluations)
             for s in report.starts],
        )
        outputs.append(trace_path)
    _manifest(ctx, "optimize", {"state": state_file, "config": cfg.to_dict()}, outputs)
    click.echo(f"{objective} {mode}: value={report.value:.6f} "
               f"evaluations={report.evaluations}")
    click.echo(f"wrote {out}")


@cli.command()
@click.argument("name", type=click.Choice(SCAN_NAMES))
@click.pass_context
def scan(ctx, name):
    """Run a named parameter scan and write its CSV tables."""
    options = _config_section(ctx, name)
    tables = run_scan(name, seed=ctx.obj["seed"], threads=ctx.obj["threads"], **options)
    outputs = []
    for table, (header, rows) in tables.items():
        out = ctx.obj["out"] / f"{table}.csv"
        _write_csv(out, header, rows)
        outputs.append(out)
    _manifest(ctx, "scan", {"name": name, "options": options}, outputs)
    for out in outputs:
        click.echo(f"wrote {out}")


@cli.command("eigenmax")
@click.option("--n", "n_trunc", type=int, default=1, show_default=True,
              help="Lattice truncation N.")
@click.option("--d-squared", type=float, default=math.pi / 4,
              help="Squared half-spacing (default pi/4).")
@click.pass_context
def eigenmax_cmd(ctx, n_trunc, d_squared):
    """Solve the truncated lattice eigenproblem and export the state."""
    problem = LatticeProblem(N=n_trunc, d=math.sqrt(d_squared))
    result = max_eigen(problem)
    state_path = ctx.obj["out"] / "eigen_state.csv"
    _write_csv(state_path, ("n", "m", "re", "im"), result.state.to_rows())
    summary_path = ctx.obj["out"] / "eigenmax_summary.json"
    _write_json(
        summary_path,
        {
            "N": problem.N,
            "d_squared": problem.d_squared,
            "dimension": problem.dimension,
            "lambda_N": result.lambda_N,
            "lambda_abs": result.lambda_abs,
            "mu_N": result.mu,
            "gap": result.gap,
        },
    )
    _manifest(ctx, "eigenmax", {"N": n_trunc, "d_squared": d_squared},
              [state_path, summary_path])
    click.echo(f"N={n_trunc}: lambda={result.lambda_N:.6f} mu={result.mu:.6f}")
    click.echo(f"wrote {summary_path}")


def _expsim_settings(ctx, preset):
    section = dict(_config_section(ctx, "expsim"))
    if preset:
        base = {"points": [list(p) for p in ION_POINTS], "shots": 100, "repeats": 10}
        if preset == "ion_n0":
            base["state"] = {"type": "fock", "n": 0}
        elif preset == "ion_n2":
            base["state"] = {"type": "fock", "n": 2}
        else:
            base["states"] = [{"type": "fock", "n": 0}, {"type": "fock", "n": 2}]
            base["weight"] = 0.5
        base.update(section)
        return base
    if not section:
        raise ValidationError("expsim needs --preset or an 'expsim' config section")
    return section


def _run_single_expsim(settings, seed, threads):
    state = state_from_dict(settings["state"])
    points = [tuple(map(float, p)) for p in settings["points"]]
    model = RabiModel(**settings.get("model", {}))
    times = paper_protocol_times(
        duration=float(settings.get("duration", 150e-6)),
        step=float(settings.get("step", 1e-6)),
    )
    value, sigma, per_point = measure_J_pipeline(
        state, points, model=model, times=times,
        shots=int(settings.get("shots", 100)),
        repeats=int(settings.get("repeats", 10)),
        seed=seed, threads=threads,
    )
    theory = theory_parities(state, points)
    theory_j = theory[0] + theory[1] + theory[2] - theory[3]
    return {
        "J": value,
        "sigma": sigma,
        "points": [list(p) for p in points],
        "parities": [{"mean": m, "sigma": s} for m, s in per_point],
        "theory_parities": theory,
        "theory_J": theory_j,
        "exceeds_classical": value > 2.0,
        "exceeds_gaussian": value > GAUSSIAN_BOUND,
    }


@cli.command("expsim")
@click.option("--preset", type=click.Choice(PRESETS), default=None,
              help="Bundled pipeline configuration.")
@click.pass_context
def expsim_cmd(ctx, preset):
    """Simulate the sideband pipeline and estimate J with uncertainty."""
    settings = _expsim_settings(ctx, preset)
    seed = ctx.obj["seed"]
    threads = ctx.obj["threads"]
    if "states" in settings:
        f = float(settings.get("weight", 0.5))
        parts = []
        for i, state_doc in enumerate(settings["states"]):
            single = dict(settings)
            single.pop("states")
            single.pop("weight", None)
            single["state"] = state_doc
            parts.append(_run_single_expsim(single, seed + i, threads))
        value, sigma = mixture_J(
            (parts[0]["J"], parts[0]["sigma"]), (parts[1]["J"], parts[1]["sigma"]), f
        )
        payload = {
            "weight": f,
            "components": parts,
            "J": value,
            "sigma": sigma,
            "exceeds_classical": value > 2.0,
            "exceeds_gaussian": value > GAUSSIAN_BOUND,
        }
    else:
        payload = _run_single_expsim(settings, seed, threads)
    out = ctx.obj["out"] / "expsim_report.json"
    _write_json(out, payload)
    _manifest(ctx, "expsim", {"preset": preset, "settings": settings}, [out])
    click.echo(f"J = {payload['J']:.4f} +- {payload['sigma']:.4f} "
               f"(exceeds_gaussian={payload['exceeds_gaussian']})")
    click.echo(f"wrote {out}")


@cli.command("thresholds")
@click.argument("family", type=click.Choice(sorted(FAMILIES)))
@click.option("--functional", type=click.Choice(["rectangle", "parallelogram"]),
              default="parallelogram", show_default=True)
@click.option("--bound", type=click.Choice(["classical", "gaussian", "lower"]),
              default="gaussian", show_default=True)
@click.pass_context
def thresholds_cmd(ctx, family, functional, bound):
    """Bisect the family parameter where the optimized value crosses a bound."""
    factory, default_range = FAMILIES[family]
    section = dict(_config_section(ctx, "thresholds"))
    bound_value = {"classical": 2.0, "gaussian": GAUSSIAN_BOUND, "lower": -1.0}[bound]
    objective = "minimize" if bound == "lower" else "maximize"
    cfg_factory = rectangle_config if functional == "rectangle" else parallelogram_config
    cfg = cfg_factory(
        seed=ctx.obj["seed"], threads=ctx.obj["threads"], objective=objective,
        **section.get("optimize", {}),
    )
    param_range = tuple(section.get("range", default_range))
    result = threshold_scan(
        factory, param_range, bound_value, cfg,
        param_tol=float(section.get("param_tol", 1e-3)),
        coarse=int(section.get("coarse", 9)),
    )
    out = ctx.obj["out"] / "thresholds_report.json"
    _write_json(
        out,
        {
            "family": family,
            "functional": functional,
            "bound": bound,
            "bound_value": bound_value,
            **result.to_dict(),
        },
    )
    _manifest(ctx, "thresholds", {"family": family, "functional": functional,
                                  "bound": bound, "config": cfg.to_dict()}, [out])
    if result.no_crossing:
        click.echo("no crossing")
    else:
        click.echo("crossings: " + ", ".join(f"{c:.4f}" for c in result.crossings))
    click.echo(f"wrote {out}")


def main():
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.exceptions.Abort:
        sys.exit(130)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except NumericError as exc:
        click.echo(f"numeric error: {exc}", err=True)
        sys.exit(3)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()

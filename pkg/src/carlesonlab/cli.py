"""Command-line surface: batch computations emitting CSV/JSON flat files.

Exit codes: 0 on success, 2 on precondition errors, 3 on numerical failures.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click
import numpy as np

from . import curves as _curves
from .argbranch import eta, phi, power_weight, unit_weight, unwrap_arg
from .criteria import check_kps, check_main, verdict_to_json
from .errors import NumericalError, PreconditionError
from .harness import (ExperimentConfig, build_curve, gamma_rectangle,
                      probe_report_csv, probe_report_json, run_probe,
                      run_sweep, sweep_csv)
from .maximal import export_maximal_csv, maximal, weighted_maximal
from .norms import constant_exponent, luxemburg_norm, muckenhoupt_ap
from .submult import (IndexPair, compute_W, estimate_indices,
                      export_submult_csv)

CURVE_KINDS = ["circle", "graded-circle", "log-spiral", "mixed", "segment",
               "corner"]


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PreconditionError as exc:
            click.echo(f"precondition error: {exc}", err=True)
            sys.exit(2)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)
    return wrapper


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise PreconditionError(f"cannot parse complex number {text!r}") from exc


def _curve_spec(kind, n, radius, delta, alpha, beta, r_min, r_max, turn,
                grade, t0_angle):
    spec = {"kind": kind.replace("-", "_"), "radius": radius, "delta": delta,
            "alpha": alpha, "beta": beta, "r_min": r_min, "r_max": r_max,
            "turn": turn, "grade": grade, "t0_angle": t0_angle}
    if spec["kind"] == "mixed":
        spec["kind"] = "mixed_spirality"
    if spec["kind"] == "log_spiral" and delta is None:
        raise PreconditionError("--delta is required for log spirals")
    if spec["kind"] == "mixed_spirality" and (alpha is None or beta is None):
        raise PreconditionError("--alpha/--beta are required for mixed curves")
    return {k: v for k, v in spec.items() if v is not None}, n


def _resolve_curve(ctx, kind, n, **params):
    """Global --curve file wins; otherwise a generator spec is required."""
    path = ctx.obj.get("curve")
    if path is not None:
        curve = _curves.load_curve(path)
        return curve, 0j, False
    if kind is None:
        raise PreconditionError("pass --curve globally or --kind here")
    spec, n = _curve_spec(kind, n, **params)
    return build_curve(spec, n)


def _kind_options(fn):
    fn = click.option("--kind", type=click.Choice(CURVE_KINDS), default=None)(fn)
    fn = click.option("--n", type=int, default=4096, show_default=True)(fn)
    fn = click.option("--radius", type=float, default=None)(fn)
    fn = click.option("--delta", type=float, default=None)(fn)
    fn = click.option("--alpha", type=float, default=None)(fn)
    fn = click.option("--beta", type=float, default=None)(fn)
    fn = click.option("--r-min", "r_min", type=float, default=None)(fn)
    fn = click.option("--r-max", "r_max", type=float, default=None)(fn)
    fn = click.option("--turn", type=float, default=None)(fn)
    fn = click.option("--grade", type=float, default=None)(fn)
    fn = click.option("--t0-angle", "t0_angle", type=float, default=None)(fn)
    fn = click.option("--t0", "t0_text", default=None,
                      help="distinguished point, e.g. '0' or '1+0j'")(fn)
    return fn


def _pick_t0(t0_text, default_t0):
    return _parse_complex(t0_text) if t0_text is not None else default_t0


@click.group()
@click.option("--curve", "curve_path", type=click.Path(path_type=Path),
              default=None, help="curve JSON file used by subcommands")
@click.option("--out", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="output directory")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--levels", default=None,
              help="comma-separated refinement levels, e.g. 2048,4096,8192")
@click.pass_context
def main(ctx, curve_path, out, seed, levels):
    """Numerical lab for curves, oscillating weights and maximal operators."""
    ctx.ensure_object(dict)
    ctx.obj["curve"] = curve_path
    ctx.obj["out"] = out
    ctx.obj["seed"] = seed
    ctx.obj["levels"] = (tuple(int(x) for x in levels.split(","))
                         if levels else None)


@main.command("gen-curve")
@_kind_options
@click.option("--name", default="curve.json", show_default=True)
@click.pass_context
@handles_errors
def gen_curve(ctx, kind, n, t0_text, name, **params):
    """Generate a curve from the zoo and write it as JSON."""
    if kind is None:
        raise PreconditionError("--kind is required")
    spec, n = _curve_spec(kind, n, **params)
    curve, t0, _ = build_curve(spec, n)
    out = ctx.obj["out"] / name
    out.parent.mkdir(parents=True, exist_ok=True)
    _curves.save_curve(curve, out)
    click.echo(f"wrote {out} ({curve.n_samples} samples, "
               f"length {curve.total_length:.6g}, t0={t0})")


@main.command()
@_kind_options
@click.option("--csv", "csv_name", default=None,
              help="also dump the majorant samples to this CSV file")
@click.pass_context
@handles_errors
def indices(ctx, kind, n, t0_text, csv_name, **params):
    """Estimate the spirality indices at t0."""
    curve, t0_default, _ = _resolve_curve(ctx, kind, n, **params)
    t0 = _pick_t0(t0_text, t0_default)
    branch = unwrap_arg(curve, t0)
    samples = compute_W(curve, t0, eta(branch))
    pair = estimate_indices(samples)
    if csv_name:
        path = ctx.obj["out"] / csv_name
        path.parent.mkdir(parents=True, exist_ok=True)
        export_submult_csv(samples, path)
    click.echo(f"spirality indices at t0={t0}: "
               f"({pair.alpha:.6f}, {pair.beta:.6f}) "
               f"residuals ({pair.diagnostics['alpha_residual']:.2e}, "
               f"{pair.diagnostics['beta_residual']:.2e})")


@main.command()
@_kind_options
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--lam", type=float, default=None, help="power weight exponent")
@click.option("--gamma", default=None, help="oscillating weight exponent")
@click.pass_context
@handles_errors
def apcheck(ctx, kind, n, t0_text, p, lam, gamma, **params):
    """Estimate the Muckenhoupt A_p product for a power/oscillating weight."""
    curve, t0_default, _ = _resolve_curve(ctx, kind, n, **params)
    t0 = _pick_t0(t0_text, t0_default)
    if (lam is None) == (gamma is None):
        raise PreconditionError("pass exactly one of --lam / --gamma")
    if lam is not None:
        w = power_weight(curve, t0, lam)
    else:
        w = phi(unwrap_arg(curve, t0), _parse_complex(gamma))
    value = muckenhoupt_ap(curve, w, p)
    click.echo(f"A_{p:g} estimate: {value:.8g}")


@main.command()
@_kind_options
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--f-const", type=float, default=1.0, show_default=True,
              help="constant test function value")
@click.option("--lam", type=float, default=0.0, show_default=True,
              help="power weight exponent")
@click.pass_context
@handles_errors
def norm(ctx, kind, n, t0_text, p, f_const, lam, **params):
    """Luxemburg norm of a constant function against a power weight."""
    curve, t0_default, _ = _resolve_curve(ctx, kind, n, **params)
    t0 = _pick_t0(t0_text, t0_default)
    w = power_weight(curve, t0, lam) if lam != 0.0 else unit_weight(curve)
    value = luxemburg_norm(curve, f_const, w, constant_exponent(curve, p))
    click.echo(f"norm: {value:.12g}")


@main.command("maximal")
@_kind_options
@click.option("--gamma", default=None, help="conjugating weight exponent")
@click.option("--arc-radius", type=float, default=None,
              help="test function: indicator of this arc around t0")
@click.option("--name", default="maximal.csv", show_default=True)
@click.pass_context
@handles_errors
def maximal_cmd(ctx, kind, n, t0_text, gamma, arc_radius, name, **params):
    """Evaluate the (weighted) maximal operator and write a CSV."""
    curve, t0_default, join_ends = _resolve_curve(ctx, kind, n, **params)
    t0 = _pick_t0(t0_text, t0_default)
    if arc_radius is None:
        f = np.ones(curve.n_samples)
    else:
        f = _curves.omega_arc(curve, t0, arc_radius,
                              join_ends=join_ends).astype(float)
    if gamma is None:
        result = maximal(curve, f)
    else:
        result = weighted_maximal(curve, f, t0, _parse_complex(gamma))
    out = ctx.obj["out"] / name
    out.parent.mkdir(parents=True, exist_ok=True)
    export_maximal_csv(curve, result, out)
    click.echo(f"wrote {out} (max Mf = {result.values.max():.8g})")


@main.command()
@click.option("--p-at", type=float, required=True, help="p at t0")
@click.option("--gamma", required=True)
@click.option("--delta-minus", type=float, default=0.0, show_default=True)
@click.option("--delta-plus", type=float, default=0.0, show_default=True)
@click.option("--name", default="verdict.json", show_default=True)
@click.pass_context
@handles_errors
def verdict(ctx, p_at, gamma, delta_minus, delta_plus, name):
    """Classify a configuration from p(t0), gamma and spirality indices."""
    g = _parse_complex(gamma)
    if g.imag == 0.0:
        v = check_kps(p_at, g.real)
    else:
        v = check_main(p_at, g,
                       IndexPair(delta_minus, delta_plus, {"source": "cli"}))
    out = ctx.obj["out"] / name
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(verdict_to_json(v) + "\n", encoding="utf-8")
    click.echo(f"{v.classification} (lower={v.lower:.6f}, "
               f"upper={v.upper:.6f}) -> {out}")


def _probe_config(ctx, kind, n, gamma, p, p_at, p_far, levels, **params):
    if kind is None:
        raise PreconditionError("--kind is required for probes")
    spec, _ = _curve_spec(kind, n, **params)
    if "r_min" not in spec:
        spec["r_min_scale"] = 16.0  # deepen the resolved scale per level
    if p_at is not None and p_far is not None:
        exponent = {"kind": "profile", "p_at": p_at, "p_far": p_far}
    else:
        exponent = {"kind": "constant", "value": p}
    levels = levels or ctx.obj["levels"] or (512, 2048, 8192)
    return ExperimentConfig(curve=spec, exponent=exponent, gamma=gamma,
                            levels=levels, seed=ctx.obj["seed"])


@main.command()
@_kind_options
@click.option("--gamma", required=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--p-at", type=float, default=None)
@click.option("--p-far", type=float, default=None)
@click.option("--name", default="probe", show_default=True)
@click.pass_context
@handles_errors
def probe(ctx, kind, n, t0_text, gamma, p, p_at, p_far, name, **params):
    """Empirical boundedness probe across refinement levels."""
    config = _probe_config(ctx, kind, n, _parse_complex(gamma), p, p_at,
                           p_far, None, **params)
    report = run_probe(config)
    out_dir = ctx.obj["out"]
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{name}.csv").write_text(probe_report_csv(report),
                                         encoding="utf-8")
    (out_dir / f"{name}.json").write_text(probe_report_json(report) + "\n",
                                          encoding="utf-8")
    click.echo(f"verdict {report.verdict.classification}, trend "
               f"{report.trend}, ratios "
               + ", ".join(f"{r:.4g}" for r in report.max_ratios))


@main.command()
@_kind_options
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--p-at", type=float, default=None)
@click.option("--p-far", type=float, default=None)
@click.option("--re-min", type=float, required=True)
@click.option("--re-max", type=float, required=True)
@click.option("--im-min", type=float, required=True)
@click.option("--im-max", type=float, required=True)
@click.option("--step", type=float, required=True)
@click.option("--name", default="sweep.csv", show_default=True)
@click.pass_context
@handles_errors
def sweep(ctx, kind, n, t0_text, p, p_at, p_far, re_min, re_max, im_min,
          im_max, step, name, **params):
    """Probe a rectangle of gamma values and write the verdict/trend table."""
    gammas = gamma_rectangle(re_min, re_max, im_min, im_max, step)
    config = _probe_config(ctx, kind, n, gammas[0], p, p_at, p_far, None,
                           **params)
    reports = run_sweep(config, gammas)
    out = ctx.obj["out"] / name
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(sweep_csv(reports), encoding="utf-8")
    click.echo(f"wrote {out} ({len(reports)} cells)")


if __name__ == "__main__":
    main()

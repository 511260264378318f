"""Experiment runner: boundedness probes over curve x exponent x gamma grids.

A probe evaluates, per refinement level, the ratio

    ||M_{t0,gamma} f||_{p(.)} / ||f||_{p(.)}

over a fixed test family and classifies the trend of the per-level maxima.
Boundedness is probed, not proved: a stable trend is evidence consistent
with the predicted verdict, a growing trend is evidence of unboundedness,
and anything else is reported as indeterminate.

Refinement levels deepen the graded discretization toward the weight
singularity, so configurations violating the necessary conditions see their
ratios grow like a power of the resolved scale.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import curves as _curves
from .argbranch import unit_weight, unwrap_arg
from .criteria import Verdict, check_kps, check_main
from .curves import Curve, d_t, omega_arc
from .errors import EmptyArc, NotLocallyIntegrable, PreconditionError
from .maximal import MaximalEvaluator, weighted_maximal
from .norms import (ExponentField, constant_exponent, exponent_at,
                    luxemburg_norm, profile_exponent, tabulated_exponent)
from .submult import IndexPair, spirality_indices

TREND_STABLE = "stable"
TREND_GROWING = "growing"
TREND_INDETERMINATE = "indeterminate"

GROWING_FACTOR = 1.5
STABLE_FACTOR = 1.35


@dataclass(frozen=True)
class ExperimentConfig:
    """One probe configuration: curve family, exponent, weight, levels.

    curve: {"kind": ..., kind-specific parameters}.  Kinds: circle,
        graded_circle, log_spiral, mixed_spirality, segment, corner.
        Spiral kinds accept r_min_scale, making r_min = r_min_scale / n so
        that refinement levels deepen the resolved scale.
    exponent: {"kind": "constant", "value": p} or
        {"kind": "profile", "p_at": ..., "p_far": ...}.
    spirality: optional (alpha, beta) override; measured on the top-level
        curve when absent and gamma is not real.
    """

    curve: dict
    exponent: dict
    gamma: complex
    levels: tuple
    seed: int = 0
    n_random: int = 8
    extremal_margin: float = 0.1
    eval_points: int = 256
    max_radii: int = 256
    spirality: tuple | None = None

    def __post_init__(self):
        levels = tuple(int(n) for n in self.levels)
        if len(levels) == 0 or any(b <= a for a, b in zip(levels, levels[1:])):
            raise PreconditionError("levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "gamma", complex(self.gamma))


@dataclass(frozen=True)
class ProbeReport:
    """Per-level ratio maxima, the predicted verdict, and the trend."""

    gamma: complex
    levels: tuple
    max_ratios: tuple
    trend: str
    verdict: Verdict
    rows: tuple = ()
    skipped: tuple = ()

    def __post_init__(self):
        if any(r <= 0 for r in self.max_ratios):
            raise PreconditionError("probe ratios must be positive")


def classify_trend(ratios) -> str:
    """growing: monotone increase by >= 1.5x across the last three levels;
    stable: bounded within 1.35x over the same window; else indeterminate."""
    if len(ratios) < 3:
        return TREND_INDETERMINATE
    r1, r2, r3 = ratios[-3], ratios[-2], ratios[-1]
    if r1 < r2 < r3 and r3 >= GROWING_FACTOR * r1:
        return TREND_GROWING
    if r3 <= STABLE_FACTOR * r1:
        return TREND_STABLE
    return TREND_INDETERMINATE


def build_curve(spec: dict, n: int) -> tuple[Curve, complex, bool]:
    """Materialize a curve spec at refinement level n.

    Returns (curve, t0, join_ends): join_ends marks curves generated as a
    slit at t0, whose two array ends are adjacent through the singularity.
    """
    kind = spec.get("kind")
    if kind == "circle":
        radius = spec.get("radius", 1.0)
        curve = _curves.generate_circle(radius, n, spec.get("phase", 0.0))
        t0 = radius * np.exp(1j * spec.get("t0_angle", 0.0))
        return curve, complex(t0), False
    if kind == "graded_circle":
        radius = spec.get("radius", 1.0)
        angle = spec.get("t0_angle", 0.0)
        curve = _curves.generate_graded_circle(
            radius, n, t0_angle=angle, grade=spec.get("grade", 3.0),
            theta_min=spec.get("theta_min"))
        return curve, complex(radius * np.exp(1j * angle)), True
    r_max = spec.get("r_max", 1.0)
    if "r_min_scale" in spec:
        r_min = spec["r_min_scale"] / n
    else:
        r_min = spec.get("r_min", 1e-4)
    if kind == "log_spiral":
        curve = _curves.generate_log_spiral(spec["delta"], r_min, r_max, n)
        return curve, 0j, False
    if kind == "mixed_spirality":
        curve = _curves.generate_mixed_spirality(spec["alpha"], spec["beta"],
                                                 r_min, r_max, n)
        return curve, 0j, False
    if kind == "segment":
        curve = _curves.generate_segment(r_min, r_max, n,
                                         spec.get("angle", 0.0))
        return curve, 0j, False
    if kind == "corner":
        curve = _curves.generate_corner(spec.get("turn", np.pi / 2), r_min,
                                        r_max, n)
        return curve, 0j, False
    raise PreconditionError(f"unknown curve kind: {kind!r}")


def build_exponent(curve: Curve, spec: dict, t0: complex) -> ExponentField:
    kind = spec.get("kind")
    if kind == "constant":
        return constant_exponent(curve, spec["value"])
    if kind == "profile":
        return profile_exponent(curve, t0, spec["p_at"], spec["p_far"])
    if kind == "table":
        return tabulated_exponent(curve, spec["values"])
    raise PreconditionError(f"unknown exponent kind: {kind!r}")


def _eval_subgrid(curve: Curve, count: int) -> np.ndarray:
    """Deterministic evaluation subgrid: an index stride.

    Generated curves are log-graded near the singularity, so an index stride
    is a log stride in scale there.  Both array ends are always included.
    """
    m = curve.n_samples
    if curve.closed:
        m -= 1  # skip the duplicate closure sample
    return np.unique(np.linspace(0, m - 1, min(count, m)).round().astype(int))


def _nested_arc_indicators(curve: Curve, t0: complex, join_ends: bool):
    """Indicators of nested arcs omega(t0, delta0 * 2^-j) down to resolution."""
    delta0 = d_t(curve, t0) / 4.0
    d_min = float(np.min(curve.distances_from(t0)))
    out = []
    j = 0
    delta = delta0
    while delta >= 2.0 * d_min and j < 60:
        try:
            mask = omega_arc(curve, t0, delta, join_ends=join_ends)
        except EmptyArc:
            break
        out.append((f"arc_j{j}", mask.astype(np.float64)))
        delta *= 0.5
        j += 1
    return out


def _extremal_profile(curve: Curve, t0: complex, p: ExponentField,
                      log_phi: np.ndarray, margin: float) -> np.ndarray:
    """Near-critical profile phi^-1 * |tau-t0|^(-1/p + margin), truncated.

    Truncation (hard zero) below four times the closest approach keeps the
    profile sampled where the quadrature still resolves it.
    """
    d = curve.distances_from(t0)
    trunc = 4.0 * float(np.min(d))
    log_f = -log_phi + (-1.0 / p.values + margin) * np.log(d)
    f = np.exp(np.clip(log_f, -700.0, 700.0))
    f[d < trunc] = 0.0
    return f


def build_family(curve: Curve, t0: complex, p: ExponentField,
                 log_phi: np.ndarray, config: ExperimentConfig, level_n: int,
                 join_ends: bool):
    """The probe's test functions.

    Nested arc indicators and their weight-inverted companions phi^-1 * chi
    (the classical two-sided witnesses, which blow up at the full rate when
    the conditions fail), one near-critical profile, and seeded nonnegative
    random functions.
    """
    arcs = _nested_arc_indicators(curve, t0, join_ends)
    inv_phi = np.exp(np.clip(-log_phi, -700.0, 700.0))
    family = list(arcs)
    family += [(tag.replace("arc", "warc"), f * inv_phi) for tag, f in arcs]
    family.append(("extremal",
                   _extremal_profile(curve, t0, p, log_phi,
                                     config.extremal_margin)))
    rng = np.random.default_rng([config.seed, level_n])
    for k in range(config.n_random):
        family.append((f"random_{k}", rng.uniform(0.0, 1.0, curve.n_samples)))
    return family


def _subcurve(curve: Curve, idx: np.ndarray) -> Curve:
    cum = curve.cumlen[idx] - curve.cumlen[idx[0]]
    return Curve(curve.samples[idx].copy(), cum.copy(), False,
                 "eval-subgrid")


def _probe_levels(config: ExperimentConfig, gammas):
    """Shared level loop for probes and sweeps.

    Returns {gamma: [(level, rows, max_ratio, skipped), ...]} plus the
    top-level curve context for verdicts.
    """
    per_gamma = {g: [] for g in gammas}
    top_ctx = None
    for n in config.levels:
        curve, t0, join_ends = build_curve(config.curve, n)
        p = build_exponent(curve, config.exponent, t0)
        branch = unwrap_arg(curve, t0)
        eval_idx = _eval_subgrid(curve, config.eval_points)
        evaluator = MaximalEvaluator(curve, eval_idx, config.max_radii)
        sub = _subcurve(curve, eval_idx)
        sub_p = tabulated_exponent(sub, p.values[eval_idx])
        sub_one = unit_weight(sub)
        one = unit_weight(curve)
        for gamma in gammas:
            gamma = complex(gamma)
            log_phi = (gamma.real * branch.log_abs
                       - gamma.imag * branch.values)
            family = build_family(curve, t0, p, log_phi, config, n,
                                  join_ends)
            rows, skipped = [], []
            for tag, f in family:
                try:
                    den = luxemburg_norm(curve, f, one, p)
                    if den == 0.0:
                        skipped.append((n, tag, "zero norm"))
                        continue
                    res = weighted_maximal(curve, f, t0, gamma, branch=branch,
                                           evaluator=evaluator)
                    num = luxemburg_norm(sub, res.values, sub_one, sub_p)
                except NotLocallyIntegrable as exc:
                    skipped.append((n, tag, str(exc)))
                    continue
                rows.append({"level": n, "function": tag,
                             "ratio": num / den, "num": num, "den": den})
            if not rows:
                raise PreconditionError(
                    f"every test function was skipped at level {n}")
            best = max(r["ratio"] for r in rows)
            per_gamma[gamma].append((n, rows, best, skipped))
        top_ctx = (curve, t0, p)
    return per_gamma, top_ctx


def _verdict_for(config: ExperimentConfig, gamma: complex, top_ctx,
                 spir_cache: dict) -> Verdict:
    curve, t0, p = top_ctx
    p_t0 = exponent_at(curve, p, t0)
    if gamma.imag == 0.0:
        return check_kps(p_t0, gamma.real)
    if config.spirality is not None:
        spir = IndexPair(config.spirality[0], config.spirality[1],
                         {"source": "config"})
    else:
        if "measured" not in spir_cache:
            spir_cache["measured"] = spirality_indices(curve, t0)
        spir = spir_cache["measured"]
    return check_main(p_t0, gamma, spir)


def run_probe(config: ExperimentConfig) -> ProbeReport:
    """Run the full refinement ladder for one gamma and classify the trend."""
    reports = run_sweep(config, [config.gamma])
    return reports[0]


def run_sweep(config: ExperimentConfig, gammas) -> list[ProbeReport]:
    """Run probes for several gammas sharing curves and evaluators per level."""
    gammas = [complex(g) for g in gammas]
    per_gamma, top_ctx = _probe_levels(config, gammas)
    spir_cache: dict = {}
    reports = []
    for gamma in gammas:
        entries = per_gamma[gamma]
        levels = tuple(e[0] for e in entries)
        ratios = tuple(e[2] for e in entries)
        rows = tuple(r for e in entries for r in e[1])
        skipped = tuple(s for e in entries for s in e[3])
        verdict = _verdict_for(config, gamma, top_ctx, spir_cache)
        reports.append(ProbeReport(gamma, levels, ratios,
                                   classify_trend(ratios), verdict, rows,
                                   skipped))
    return reports


def gamma_rectangle(re_min: float, re_max: float, im_min: float,
                    im_max: float, step: float) -> list[complex]:
    """Row-major complex grid over a rectangle with the given step."""
    if step <= 0:
        raise PreconditionError("step must be positive")
    res = np.arange(0, math.floor((re_max - re_min) / step + 1e-9) + 1)
    ims = np.arange(0, math.floor((im_max - im_min) / step + 1e-9) + 1)
    return [complex(re_min + i * step, im_min + j * step)
            for i in res for j in ims]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def probe_report_csv(report: ProbeReport) -> str:
    """Per-(level, function) rows; byte-stable for a fixed config and seed."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["level", "function", "ratio", "num", "den"])
    for row in report.rows:
        writer.writerow([row["level"], row["function"], _fmt(row["ratio"]),
                         _fmt(row["num"]), _fmt(row["den"])])
    return buf.getvalue()


def probe_report_json(report: ProbeReport) -> str:
    doc = {
        "gamma": [report.gamma.real, report.gamma.imag],
        "levels": list(report.levels),
        "max_ratios": list(report.max_ratios),
        "trend": report.trend,
        "verdict": {
            "lower": report.verdict.lower,
            "upper": report.verdict.upper,
            "classification": report.verdict.classification,
            "margins": list(report.verdict.margins),
        },
        "skipped": [list(s) for s in report.skipped],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def sweep_csv(reports) -> str:
    """One row per gamma cell: verdict, trend, and per-level ratio maxima."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    n_levels = max(len(r.levels) for r in reports)
    header = ["re_gamma", "im_gamma", "lower", "upper", "classification",
              "trend"]
    header += [f"ratio_n{k}" for k in range(n_levels)]
    writer.writerow(header)
    for rep in reports:
        row = [_fmt(rep.gamma.real), _fmt(rep.gamma.imag),
               _fmt(rep.verdict.lower), _fmt(rep.verdict.upper),
               rep.verdict.classification, rep.trend]
        row += [_fmt(x) for x in rep.max_ratios]
        row += [""] * (n_levels - len(rep.max_ratios))
        writer.writerow(row)
    return buf.getvalue()

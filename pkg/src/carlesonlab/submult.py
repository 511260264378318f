"""Submultiplicative majorants of weights and their lower/upper indices.

For a weight psi with a single singularity at t0, the majorant

    rho(x) = sup_R  max{psi on |tau-t0| = x*R} / min{psi on |tau-t0| = R}

(and the mirrored formula for x > 1) is evaluated on a multiplicative grid.
Exact circles have sampling measure zero, so each circle is replaced by an
adaptive annulus band whose log-radius half-width is half the local sample
spacing; the band extrema converge to the circle extrema under refinement.

Indices are tail slopes of log rho against log x over the extreme decade of
the grid: the limit formulas justify tail slopes, while raw ratios at
moderate x are biased by the bounded prefactors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .argbranch import Weight, eta, unwrap_arg
from .curves import Curve, d_t, omega_arc
from .errors import AllAnnuliEmpty, GridTooNarrow, PreconditionError

X_DECADES = 3
X_POINTS_PER_SIDE = 64
R_POINTS = 64


@dataclass(frozen=True)
class SubmultSamples:
    """Majorant estimates rho(x) on a multiplicative grid.

    xs is sorted ascending, contains 1, and is symmetric under x -> 1/x;
    meta records the inner radius grid and band policy.
    """

    xs: np.ndarray
    vals: np.ndarray
    meta: dict

    @property
    def log_xs(self) -> np.ndarray:
        return np.log(self.xs)

    @property
    def log_vals(self) -> np.ndarray:
        return np.log(self.vals)


@dataclass(frozen=True)
class IndexPair:
    """Lower/upper indices of a regular submultiplicative function."""

    alpha: float
    beta: float
    diagnostics: dict

    def __post_init__(self):
        if self.alpha > self.beta:
            raise PreconditionError("index pair needs alpha <= beta")


def default_x_grid(decades: int = X_DECADES,
                   per_side: int = X_POINTS_PER_SIDE) -> np.ndarray:
    """Log-uniform grid over [10^-decades, 10^decades] with 1 at the center.

    Uniform log spacing keeps products of grid points on the grid, which the
    submultiplicativity checks rely on.
    """
    return 10.0 ** np.linspace(-decades, decades, 2 * per_side + 1)


def default_radius_grid(curve: Curve, t0: complex,
                        count: int = R_POINTS) -> np.ndarray:
    """Log-spaced radii in [min|tau - t0|, d_t].

    The grid reaches the innermost realized radius: flooring it higher makes
    the factor estimates miss deep denominator circles that the product
    estimate realizes, which breaks grid submultiplicativity on curves with
    strongly varying local winding.
    """
    d = curve.distances_from(t0)
    lo = float(np.min(d))
    hi = d_t(curve, t0)
    if lo >= hi:
        raise PreconditionError("curve spans too few scales around t0")
    return np.geomspace(lo, hi, count)


def _band_extrema(log_d: np.ndarray, log_psi: np.ndarray, queries: np.ndarray,
                  widen: float):
    """Max/min of log psi over adaptive annulus bands at the query radii.

    Band half-width is half the log-spacing of the gap containing the query
    (times a small safety factor), so any query inside the sampled radius
    range finds at least one sample.
    """
    m = log_d.size
    j = np.searchsorted(log_d, queries)
    jc = np.clip(j, 1, m - 1)
    hw = 0.5 * widen * (log_d[jc] - log_d[jc - 1])
    lo = np.searchsorted(log_d, queries - hw, side="left")
    hi = np.searchsorted(log_d, queries + hw, side="right")
    bmax = np.full(queries.size, -np.inf)
    bmin = np.full(queries.size, np.inf)
    for k in range(queries.size):
        if hi[k] > lo[k]:
            sl = log_psi[lo[k]:hi[k]]
            bmax[k] = sl.max()
            bmin[k] = sl.min()
    return bmax, bmin, hi > lo


def compute_W(curve: Curve, t0: complex, psi: Weight,
              x_grid: np.ndarray | None = None,
              R_grid: np.ndarray | None = None,
              widen: float = 1.01) -> SubmultSamples:
    """Evaluate the submultiplicative majorant of psi at t0 on a grid.

    For each grid x the supremum runs over the radius grid; radius pairs with
    an empty annulus on either side are skipped.  Raises AllAnnuliEmpty when
    some x admits no radius at all, which signals a degenerate grid.
    """
    d = curve.distances_from(t0)
    if np.any(d == 0):
        raise PreconditionError("t0 coincides with a curve sample")
    if psi.log_values.shape != d.shape:
        raise PreconditionError("psi must be tabulated on the curve")
    if x_grid is None:
        x_grid = default_x_grid()
    if R_grid is None:
        R_grid = default_radius_grid(curve, t0)
    x_grid = np.asarray(x_grid, dtype=np.float64)
    R_grid = np.asarray(R_grid, dtype=np.float64)
    if np.any(x_grid <= 0) or np.any(R_grid <= 0):
        raise PreconditionError("grids must be positive")

    order = np.argsort(d)
    log_d = np.log(d[order])
    log_psi = psi.log_values[order]
    log_R = np.log(R_grid)

    log_vals = np.empty(x_grid.size)
    for i, x in enumerate(x_grid):
        lx = np.log(x)
        if x <= 1.0:
            num_q, den_q = log_R + lx, log_R
        else:
            num_q, den_q = log_R, log_R - lx
        nmax, _, n_ok = _band_extrema(log_d, log_psi, num_q, widen)
        _, dmin, d_ok = _band_extrema(log_d, log_psi, den_q, widen)
        ok = n_ok & d_ok
        if not ok.any():
            raise AllAnnuliEmpty(
                f"no admissible radius for x={x:.6g}; widen the radius grid "
                "or deepen the curve")
        log_vals[i] = float(np.max(nmax[ok] - dmin[ok]))

    # band quantization floor: estimates carry +-(halfwidth * local slope)
    max_hw = 0.5 * widen * float(np.max(np.diff(log_d)))
    meta = {"t0": t0, "R_grid": R_grid, "widen": widen,
            "max_halfwidth": max_hw}
    return SubmultSamples(x_grid, np.exp(log_vals), meta)


def estimate_indices(s: SubmultSamples) -> IndexPair:
    """Tail-slope estimates of the lower and upper indices.

    alpha is the least-squares slope of log rho vs log x over the smallest
    decade of the grid, beta over the largest.  Requires at least three
    decades on each side of 1.  The raw slopes are clamped into
    alpha <= beta; diagnostics carry both raw values and fit residuals.
    """
    xs, lv = s.xs, s.log_vals
    if xs[0] > 1e-3 * (1 + 1e-9) or xs[-1] < 1e3 * (1 - 1e-9):
        raise GridTooNarrow("grid must span 3 decades on each side of 1")
    lo = xs <= xs[0] * 10.0 * (1 + 1e-12)
    hi = xs >= xs[-1] / 10.0 * (1 - 1e-12)
    if lo.sum() < 3 or hi.sum() < 3:
        raise GridTooNarrow("tail decades must contain at least 3 points")

    def _fit(mask):
        coef, diag = np.polynomial.polynomial.polyfit(
            np.log(xs[mask]), lv[mask], 1, full=True)
        n = int(mask.sum())
        rms = float(np.sqrt(diag[0][0] / n)) if diag[0].size else 0.0
        return float(coef[1]), rms

    a_raw, a_res = _fit(lo)
    b_raw, b_res = _fit(hi)
    alpha, beta = min(a_raw, b_raw), max(a_raw, b_raw)
    return IndexPair(alpha, beta, {
        "alpha_raw": a_raw, "beta_raw": b_raw,
        "alpha_residual": a_res, "beta_residual": b_res,
        "x_min": float(xs[0]), "x_max": float(xs[-1]),
    })


def spirality_indices(curve: Curve, t0: complex,
                      x_grid: np.ndarray | None = None,
                      R_grid: np.ndarray | None = None) -> IndexPair:
    """Lower/upper spirality indices at t0: the indices of W_{t0} eta_{t0}."""
    branch = unwrap_arg(curve, t0)
    samples = compute_W(curve, t0, eta(branch), x_grid=x_grid, R_grid=R_grid)
    return estimate_indices(samples)


def phi_indices_closed_form(gamma: complex, spirality: IndexPair) -> IndexPair:
    """Indices of W_{t0} phi_{t0,gamma} from the spirality indices.

    alpha = Re(gamma) + min(dm*Im, dp*Im), beta = Re(gamma) + max(...),
    where (dm, dp) are the spirality indices.
    """
    gamma = complex(gamma)
    lo = gamma.real + min(spirality.alpha * gamma.imag,
                          spirality.beta * gamma.imag)
    hi = gamma.real + max(spirality.alpha * gamma.imag,
                          spirality.beta * gamma.imag)
    return IndexPair(lo, hi, {"gamma": gamma,
                              "spirality": (spirality.alpha, spirality.beta)})


def power_sandwich(curve: Curve, t0: complex, w: Weight, eps: float,
                   delta: float, indices: IndexPair | None = None,
                   join_ends: bool = False) -> tuple[float, float]:
    """Smallest constants sandwiching w between power weights across the arc.

    C1 bounds w(t)/w(tau) <= C1 * |(t-t0)/(tau-t0)|^(beta+eps) for t outside
    and tau inside the arc omega(t0, delta); C2 is the mirrored bound with
    exponent alpha-eps for t inside and tau outside.  The pairwise maximum
    factorizes as max(g) / min(g) with g = w / |tau-t0|^exponent, so both
    constants are exact maxima over all sample pairs at O(n) cost.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if not (0 < delta < d_t(curve, t0)):
        raise PreconditionError("need 0 < delta < d_t")
    if indices is None:
        indices = estimate_indices(compute_W(curve, t0, w))
    mask = omega_arc(curve, t0, delta, join_ends=join_ends)
    if mask.all():
        raise PreconditionError("delta leaves no samples outside the arc")
    log_d = np.log(curve.distances_from(t0))
    g1 = w.log_values - (indices.beta + eps) * log_d
    c1 = float(np.exp(np.max(g1[~mask]) - np.min(g1[mask])))
    g2 = w.log_values - (indices.alpha - eps) * log_d
    c2 = float(np.exp(np.max(g2[mask]) - np.min(g2[~mask])))
    return c1, c2


def export_submult_csv(s: SubmultSamples, path):
    """Write x, rho, log_x, log_rho rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["x", "rho", "log_x", "log_rho"])
        for x, v, lx, lv in zip(s.xs, s.vals, s.log_xs, s.log_vals):
            writer.writerow([f"{x:.17g}", f"{v:.17g}", f"{lx:.17g}",
                             f"{lv:.17g}"])

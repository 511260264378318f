"""Variable exponents, the modular, the Luxemburg norm, and the A_p estimator.

Quadrature is trapezoidal on the curve's own samples; the generators place
log-spaced nodes near weight singularities, which gives uniform relative
resolution exactly where the modular concentrates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .argbranch import Weight
from .curves import Curve
from .errors import NotLocallyIntegrable, PreconditionError

LUXEMBURG_RTOL = 1e-10
DINI_ANCHORS = 256
LOG_SAFE = 700.0


@dataclass(frozen=True)
class ExponentField:
    """Variable exponent p(.) with verified bounds 1 < p_min <= p_max < inf.

    dini_constant is the measured log-Holder constant: the max over sampled
    pairs with |tau - t| <= 1/2 of |p(tau) - p(t)| * (-log|tau - t|).
    """

    values: np.ndarray
    p_min: float
    p_max: float
    dini_constant: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if np.any(v <= 1.0) or not np.all(np.isfinite(v)):
            raise PreconditionError("exponents must lie in (1, inf)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _measure_dini(curve: Curve, values: np.ndarray,
                  anchors: int = DINI_ANCHORS) -> float:
    idx = np.unique(np.linspace(0, curve.n_samples - 1,
                                min(anchors, curve.n_samples)).round()
                    .astype(int))
    worst = 0.0
    for i in idx:
        d = curve.distances_from(curve.samples[i])
        mask = (d > 0) & (d <= 0.5)
        if mask.any():
            c = np.abs(values[mask] - values[i]) * (-np.log(d[mask]))
            worst = max(worst, float(c.max()))
    return worst


def _build(curve: Curve, values: np.ndarray) -> ExponentField:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != curve.samples.shape:
        raise PreconditionError("exponent values must align with the curve")
    if np.any(values <= 1.0) or not np.all(np.isfinite(values)):
        raise PreconditionError("exponents must lie in (1, inf)")
    return ExponentField(values, float(values.min()), float(values.max()),
                         _measure_dini(curve, values))


def constant_exponent(curve: Curve, p: float) -> ExponentField:
    """Constant exponent field; dini constant is exactly 0."""
    if not (1.0 < p < np.inf):
        raise PreconditionError("p must lie in (1, inf)")
    return ExponentField(np.full(curve.n_samples, float(p)), float(p),
                         float(p), 0.0)


def profile_exponent(curve: Curve, t0: complex, p_at: float,
                     p_far: float) -> ExponentField:
    """Log-Holder profile p(tau) = p_at + (p_far - p_at)/max(1, -log|tau-t0|).

    Takes the value p_at in the limit tau -> t0 and is capped at p_far for
    |tau - t0| >= 1/e.  Dini-Lipschitz by construction; the constant is still
    measured by pair sampling.
    """
    if not (1.0 < p_at < np.inf and 1.0 < p_far < np.inf):
        raise PreconditionError("exponents must lie in (1, inf)")
    d = curve.distances_from(t0)
    if np.any(d == 0):
        raise PreconditionError("t0 coincides with a curve sample")
    values = p_at + (p_far - p_at) / np.maximum(1.0, -np.log(d))
    return _build(curve, values)


def tabulated_exponent(curve: Curve, values) -> ExponentField:
    """Exponent field from an explicit per-sample table."""
    return _build(curve, values)


def exponent_at(curve: Curve, p: ExponentField, t0: complex) -> float:
    """p at the sample nearest to t0 (t0 itself is never a sample)."""
    return float(p.values[int(np.argmin(curve.distances_from(t0)))])


def as_sampled(curve: Curve, f) -> np.ndarray:
    """Coerce f to a finite per-sample complex array; scalars broadcast."""
    arr = np.asarray(f, dtype=np.complex128)
    if arr.ndim == 0:
        arr = np.full(curve.n_samples, complex(arr))
    if arr.shape != curve.samples.shape:
        raise PreconditionError("sampled function must align with the curve")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise PreconditionError("sampled function must be finite")
    return arr


def modular(curve: Curve, f, w: Weight, p: ExponentField,
            lam: float) -> float:
    """Trapezoidal quadrature of |f * w / lam|^p against arc length.

    Overflowing integrands are reported as +inf rather than raised.
    """
    if lam <= 0:
        raise PreconditionError("lam must be positive")
    f = as_sampled(curve, f)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        log_term = p.values * (np.log(np.abs(f)) + w.log_values - np.log(lam))
        vals = np.exp(log_term)
    vals = np.where(np.isnan(vals), 0.0, vals)  # |f| == 0 contributes nothing
    seg = curve.seg_lengths
    return float(np.sum(0.5 * (vals[:-1] + vals[1:]) * seg))


def luxemburg_norm(curve: Curve, f, w: Weight, p: ExponentField,
                   rtol: float = LUXEMBURG_RTOL) -> float:
    """inf{lam > 0 : modular(f, w, p, lam) <= 1} by bisection on log lam.

    Returns 0 for f*w identically zero.  For constant p this equals the
    classical weighted p-norm up to the bisection tolerance.
    """
    f = as_sampled(curve, f)
    with np.errstate(over="ignore"):
        peak = np.abs(f) * np.exp(np.minimum(w.log_values, LOG_SAFE))
    fmax = float(np.max(peak))
    if fmax == 0.0:
        return 0.0
    if not np.isfinite(fmax):
        raise NotLocallyIntegrable("f * w overflows the float range")
    lo = fmax * 1e-18
    hi = fmax * (curve.total_length + 1.0)
    if modular(curve, f, w, p, hi) > 1.0:
        raise NotLocallyIntegrable("modular exceeds 1 at the upper bracket")
    if modular(curve, f, w, p, lo) <= 1.0:
        return lo
    while hi / lo > 1.0 + rtol:
        mid = np.sqrt(lo * hi)
        if modular(curve, f, w, p, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return float(hi)


def _cum_logsumexp(x_sorted: np.ndarray) -> tuple[float, np.ndarray]:
    """Shift and cumulative sums for log of prefix sums of exp(x)."""
    shift = float(np.max(x_sorted))
    if not np.isfinite(shift):
        shift = 0.0
    return shift, np.cumsum(np.exp(x_sorted - shift))


def muckenhoupt_ap(curve: Curve, w: Weight, p: float,
                   t_points=None, max_eps: int = 64,
                   max_t: int = 48) -> float:
    """Grid maximum of the two-factor A_p product, a lower bound for [w]_Ap.

    For each grid point t the epsilon grid reuses the realized sample radii
    |tau_k - t| (log-subsampled to max_eps): every distinct portion is
    realized at one of those radii, so no supremum information is lost
    between grid points.  Nondecreasing under grid refinement.
    """
    if not (1.0 < p < np.inf):
        raise PreconditionError("p must be a constant in (1, inf)")
    q = p / (p - 1.0)
    if t_points is None:
        idx = np.unique(np.linspace(0, curve.n_samples - 1,
                                    min(max_t, curve.n_samples)).round()
                        .astype(int))
        t_points = curve.samples[idx]
    t_points = np.atleast_1d(np.asarray(t_points, dtype=np.complex128))
    aw = curve.arc_weights
    log_aw = np.where(aw > 0, np.log(np.maximum(aw, 1e-300)), -np.inf)
    best = 0.0
    for t in t_points:
        d = curve.distances_from(t)
        order = np.argsort(d)
        ds = d[order]
        xp = p * w.log_values[order] + log_aw[order]
        xq = -q * w.log_values[order] + log_aw[order]
        sp, cp = _cum_logsumexp(xp)
        sq, cq = _cum_logsumexp(xq)
        pos = ds[ds > 0]
        if pos.size == 0:
            continue
        ranks = np.unique(np.linspace(0, pos.size - 1,
                                      min(max_eps, pos.size)).round()
                          .astype(int))
        eps_grid = pos[ranks] * (1.0 + 1e-12)
        ks = np.searchsorted(ds, eps_grid, side="left")
        with np.errstate(divide="ignore"):
            log_ip = sp + np.log(cp[ks - 1])
            log_iq = sq + np.log(cq[ks - 1])
        log_eps = np.log(eps_grid)
        vals = (log_ip - log_eps) / p + (log_iq - log_eps) / q
        with np.errstate(over="ignore"):
            cand = float(np.max(np.exp(vals)))
        best = max(best, cand)
    return best

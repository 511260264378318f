"""Rectifiable simple curves as dense sample sequences with arc-length structure.

A curve is an ordered array of points in the complex plane plus cumulative
arc length per sample.  Generators produce the curve zoo (circles, graded
circles, log spirals, mixed-spirality spirals, segments, corners); metric
primitives compute portions, the Carleson constant estimate and d_t.

All Curve values are immutable after construction and every operation is a
pure function of its inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyArc, PreconditionError

# Discretization floors.
MAX_ANGULAR_STEP = math.pi / 8
MIN_CIRCLE_SAMPLES = 16


@dataclass(frozen=True)
class Curve:
    """Discretized rectifiable curve.

    samples: ordered points in the complex plane.
    cumlen:  cumulative arc length per sample, cumlen[0] == 0, strictly
             increasing.  Generators fill in the exact arc length of the
             underlying analytic curve; curves loaded from files fall back
             to chord sums.
    closed:  whether the last sample closes the loop onto the first.
    provenance: generator descriptor string.
    """

    samples: np.ndarray
    cumlen: np.ndarray
    closed: bool
    provenance: str

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        cumlen = np.asarray(self.cumlen, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 2:
            raise PreconditionError("a curve needs at least two samples")
        if cumlen.shape != samples.shape:
            raise PreconditionError("cumlen must align with samples")
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise PreconditionError("curve samples must be finite")
        if cumlen[0] != 0.0:
            raise PreconditionError("cumlen must start at 0")
        if not np.all(np.diff(cumlen) > 0):
            raise PreconditionError("cumlen must be strictly increasing")
        if np.any(samples[1:] == samples[:-1]):
            raise PreconditionError("consecutive samples must be distinct")
        if self.closed:
            gap = abs(samples[-1] - samples[0])
            scale = max(1.0, abs(samples[0]))
            if gap > 1e-12 * scale:
                raise PreconditionError("closed curve must end where it starts")
        samples.setflags(write=False)
        cumlen.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "cumlen", cumlen)

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def total_length(self) -> float:
        return float(self.cumlen[-1])

    @property
    def seg_lengths(self) -> np.ndarray:
        return np.diff(self.cumlen)

    @property
    def arc_weights(self) -> np.ndarray:
        """Per-sample quadrature weights (half the adjacent segment lengths)."""
        seg = self.seg_lengths
        w = np.zeros(self.n_samples)
        w[:-1] += 0.5 * seg
        w[1:] += 0.5 * seg
        return w

    def distances_from(self, t: complex) -> np.ndarray:
        return np.abs(self.samples - t)

    def reversed(self) -> "Curve":
        cum = self.cumlen[-1] - self.cumlen[::-1]
        return Curve(self.samples[::-1].copy(), cum.copy(), self.closed,
                     self.provenance + " [reversed]")


@dataclass(frozen=True)
class Portion:
    """Curve portion inside an open disk: index ranges plus arc measure.

    ranges: half-open sample index ranges [start, stop); every listed sample
    lies strictly inside the disk.  measure additionally counts the
    interpolated fractions of boundary segments.
    """

    ranges: tuple
    measure: float


def from_points(points, closed: bool = False, provenance: str = "user") -> Curve:
    """Build a curve from raw points; cumlen falls back to chord sums."""
    pts = np.asarray(points, dtype=np.complex128)
    cum = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(pts)))))
    return Curve(pts, cum, closed, provenance)


# ---------------------------------------------------------------------------
# generators


def generate_circle(radius: float, n: int, phase: float = 0.0) -> Curve:
    """Circle of given radius, n uniformly spaced samples plus closure.

    cumlen carries the exact arc length, so the total length equals
    2*pi*radius for every admissible n.
    """
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    if n < MIN_CIRCLE_SAMPLES:
        raise PreconditionError(
            f"need at least {MIN_CIRCLE_SAMPLES} samples, got {n}")
    theta = phase + 2.0 * np.pi * np.arange(n + 1) / n
    samples = radius * np.exp(1j * theta)
    samples[-1] = samples[0]
    cumlen = radius * (theta - theta[0])
    return Curve(samples, cumlen, True,
                 f"circle(radius={radius}, n={n}, phase={phase})")


def _min_resolvable_theta(n: int) -> float:
    """Smallest graded-circle offset whose log steps survive float64.

    The first geometric step is theta*(rho-1) with rho-1 ~ 2*log(pi/theta)/n;
    it must clear the rounding scale of angles near 2*pi by a wide margin.
    """
    t = 1.2e-14 * n
    for _ in range(3):
        t = 1.2e-14 * n / math.log(math.pi / t)
    return t


def generate_graded_circle(radius: float, n: int, t0_angle: float = 0.0,
                           grade: float = 3.0,
                           theta_min: float | None = None) -> Curve:
    """Circle discretized with log-graded angular spacing around one point.

    Samples accumulate geometrically toward the anchor radius*exp(i*t0_angle)
    from both sides, down to angular offset theta_min (default (2*pi/n)**grade,
    floored at 1e-13 to stay clear of cancellation in tau - t0).  The anchor
    itself is excluded; the returned curve is the circle slit at the anchor,
    which is where singular weights are anchored downstream.
    """
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    if n < MIN_CIRCLE_SAMPLES:
        raise PreconditionError(
            f"need at least {MIN_CIRCLE_SAMPLES} samples, got {n}")
    floor = _min_resolvable_theta(n)
    if theta_min is None:
        theta_min = max((2.0 * np.pi / n) ** grade, floor)
    if not floor <= theta_min < np.pi / 4:
        raise PreconditionError(
            f"theta_min must lie in [{floor:.3g}, pi/4) at n={n}")
    side = n // 2
    offsets = np.geomspace(theta_min, np.pi, side)
    phis = np.concatenate([t0_angle + offsets,
                           t0_angle + 2.0 * np.pi - offsets[-2::-1]])
    samples = radius * np.exp(1j * phis)
    cumlen = radius * (phis - phis[0])
    return Curve(samples, cumlen, False,
                 f"graded_circle(radius={radius}, n={n}, t0_angle={t0_angle}, "
                 f"theta_min={theta_min:.6g})")


def _check_angular_steps(theta: np.ndarray, what: str):
    step = float(np.max(np.abs(np.diff(theta))))
    if step >= MAX_ANGULAR_STEP:
        raise PreconditionError(
            f"{what}: angular step {step:.4g} exceeds pi/8; increase n")


def generate_log_spiral(delta: float, r_min: float, r_max: float,
                        n: int) -> Curve:
    """Logarithmic spiral tau(r) = r*exp(-i*delta*log r) on log-spaced radii.

    The distinguished point t0 = 0 is approached but never sampled.  By
    construction arg(tau) = -delta*log|tau| at every sample.
    """
    if not (0 < r_min < r_max) or not math.isfinite(delta):
        raise PreconditionError("need 0 < r_min < r_max and finite delta")
    if n < 2:
        raise PreconditionError("need at least two samples")
    r = np.geomspace(r_min, r_max, n)
    theta = -delta * np.log(r)
    _check_angular_steps(theta, "log spiral")
    samples = r * np.exp(1j * theta)
    # |tau'(r)| = sqrt(1 + delta^2) is constant, so arc length is exact.
    cumlen = math.sqrt(1.0 + delta * delta) * (r - r_min)
    return Curve(samples, cumlen, False,
                 f"log_spiral(delta={delta}, r_min={r_min}, r_max={r_max}, "
                 f"n={n}, t0=0)")


def _mixed_phase(r: np.ndarray, alpha: float, beta: float):
    a = 0.5 * (alpha + beta)
    b = 0.5 * (beta - alpha)
    ell = -np.log(r)
    u = np.log(ell + math.e)
    theta = a * ell + b * ell * np.sin(u)
    # d(theta)/d(ell); bounded, so the curve stays rectifiable.
    dtheta = a + b * (np.sin(u) + ell * np.cos(u) / (ell + math.e))
    return theta, dtheta


def generate_mixed_spirality(alpha: float, beta: float, r_min: float,
                             r_max: float, n: int) -> Curve:
    """Spiral whose local winding rate oscillates between alpha and beta.

    tau(r) = r*exp(i*theta(r)) with theta(r) = a*L + b*L*sin(log(L+e)),
    L = log(1/r), a = (alpha+beta)/2, b = (beta-alpha)/2.  For alpha == beta
    this reduces pointwise to generate_log_spiral(alpha).  The spirality
    indices of the sampled curve are established empirically, not assumed.
    """
    if alpha > beta:
        raise PreconditionError("need alpha <= beta")
    # log(log(1/r) + e) caps the admissible outer radius at e^e
    if not (0 < r_min < r_max < math.e ** math.e):
        raise PreconditionError("need 0 < r_min < r_max < e^e")
    if n < 2:
        raise PreconditionError("need at least two samples")
    r = np.geomspace(r_min, r_max, n)
    theta, dtheta = _mixed_phase(r, alpha, beta)
    _check_angular_steps(theta, "mixed spirality")
    samples = r * np.exp(1j * theta)
    # |tau'(r)| = sqrt(1 + (dtheta/dlog(1/r))^2); 4-point Gauss per segment.
    nodes, gw = np.polynomial.legendre.leggauss(4)
    lr = np.log(r)
    mid = 0.5 * (lr[1:] + lr[:-1])
    half = 0.5 * np.diff(lr)
    li = mid[:, None] + half[:, None] * nodes[None, :]
    ri = np.exp(li)
    _, dth = _mixed_phase(ri.ravel(), alpha, beta)
    speed = np.sqrt(1.0 + dth.reshape(ri.shape) ** 2) * ri
    seg = half * (speed * gw[None, :]).sum(axis=1)
    cumlen = np.concatenate(([0.0], np.cumsum(seg)))
    return Curve(samples, cumlen, False,
                 f"mixed_spirality(alpha={alpha}, beta={beta}, r_min={r_min}, "
                 f"r_max={r_max}, n={n}, t0=0)")


def generate_segment(r_min: float, r_max: float, n: int,
                     angle: float = 0.0) -> Curve:
    """Straight ray segment on log-spaced radii; t0 = 0 off the near end."""
    if not (0 < r_min < r_max):
        raise PreconditionError("need 0 < r_min < r_max")
    if n < 2:
        raise PreconditionError("need at least two samples")
    r = np.geomspace(r_min, r_max, n)
    samples = r * np.exp(1j * angle)
    return Curve(samples, r - r_min, False,
                 f"segment(r_min={r_min}, r_max={r_max}, n={n}, angle={angle})")


def generate_corner(turn: float, r_min: float, r_max: float, n: int) -> Curve:
    """Two-ray polyline with a corner at the (unsampled) origin.

    Runs in from radius r_max along angle 0, crosses near 0, and runs out to
    r_max along angle `turn`.  Piecewise smooth; the canonical zero-spirality
    companion to the spiral generators.
    """
    if not (0 < abs(turn) < np.pi):
        raise PreconditionError("need 0 < |turn| < pi")
    if not (0 < r_min < r_max):
        raise PreconditionError("need 0 < r_min < r_max")
    side = max(n // 2, 2)
    r_in = np.geomspace(r_max, r_min, side)
    r_out = np.geomspace(r_min, r_max, side)
    samples = np.concatenate([r_in.astype(np.complex128),
                              r_out * np.exp(1j * turn)])
    bridge = abs(r_min * np.exp(1j * turn) - r_min)
    cumlen = np.concatenate([r_max - r_in,
                             (r_max - r_min) + bridge + (r_out - r_min)])
    return Curve(samples, cumlen, False,
                 f"corner(turn={turn}, r_min={r_min}, r_max={r_max}, n={n}, "
                 f"t0=0)")


# ---------------------------------------------------------------------------
# metric primitives


def portion(curve: Curve, t: complex, eps: float) -> Portion:
    """Curve portion inside the open disk |tau - t| < eps.

    Boundary segments contribute the interpolated chord fraction up to the
    disk crossing (one crossing per boundary, so a segment dipping into the
    disk with both endpoints outside is not seen).
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    d = curve.distances_from(t)
    inside = d < eps
    if not inside.any():
        return Portion((), 0.0)
    padded = np.concatenate(([False], inside, [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    ranges = tuple(zip(edges[0::2].tolist(), edges[1::2].tolist()))
    seg = curve.seg_lengths
    measure = float(seg[inside[:-1] & inside[1:]].sum())
    partial = inside[:-1] ^ inside[1:]
    if partial.any():
        idx = np.flatnonzero(partial)
        u = curve.samples[idx] - t
        v = curve.samples[idx + 1] - curve.samples[idx]
        a = (v * v.conj()).real
        b = 2.0 * (u * v.conj()).real
        c = (u * u.conj()).real - eps * eps
        sq = np.sqrt(np.maximum(b * b - 4.0 * a * c, 0.0))
        r1 = (-b - sq) / (2.0 * a)
        r2 = (-b + sq) / (2.0 * a)
        s = np.where((r1 >= 0.0) & (r1 <= 1.0), r1, r2)
        s = np.clip(s, 0.0, 1.0)
        frac = np.where(inside[idx], s, 1.0 - s)
        measure += float((frac * seg[idx]).sum())
    return Portion(ranges, measure)


def d_t(curve: Curve, t: complex) -> float:
    """Largest distance from t to the curve samples."""
    return float(np.max(curve.distances_from(t)))


def carleson_constant(curve: Curve, t_points, eps_grid) -> float:
    """Grid maximum of |portion(t, eps)| / eps, a lower bound for C_Gamma.

    Nondecreasing under grid refinement.  Cost is O(|t| * |eps| * n); callers
    control the grids.
    """
    t_points = np.atleast_1d(np.asarray(t_points, dtype=np.complex128))
    eps_grid = np.atleast_1d(np.asarray(eps_grid, dtype=np.float64))
    if t_points.size == 0 or eps_grid.size == 0:
        raise PreconditionError("grids must be nonempty")
    if np.any(eps_grid <= 0):
        raise PreconditionError("eps grid must be positive")
    best = 0.0
    for t in t_points:
        for eps in eps_grid:
            best = max(best, portion(curve, t, eps).measure / eps)
    return best


def default_carleson_grids(curve: Curve, t_count: int = 48,
                           eps_count: int = 48):
    """Deterministic sub-grids: strided samples and log-spaced radii."""
    m = curve.n_samples
    idx = np.unique(np.linspace(0, m - 1, t_count).round().astype(int))
    t_points = curve.samples[idx]
    dmax = max(d_t(curve, t) for t in t_points)
    seg_min = float(curve.seg_lengths.min())
    eps_grid = np.geomspace(seg_min, dmax * (1 + 1e-9), eps_count)
    return t_points, eps_grid


def omega_arc(curve: Curve, t0: complex, delta: float,
              join_ends: bool = False) -> np.ndarray:
    """Boolean sample mask of the open arc around t0 within radius delta.

    The arc is the maximal contiguous sample run around the closest approach
    to t0 inside the delta-disk.  With join_ends=True the two array ends are
    treated as adjacent through t0 (curves generated as a slit at t0, e.g.
    graded circles).  Closed curves always join through the duplicate
    endpoint.
    """
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    d = curve.distances_from(t0)
    inside = d < delta
    k0 = int(np.argmin(d))
    if not inside[k0]:
        raise EmptyArc(f"no sample within {delta} of t0={t0}")
    m = d.size
    mask = np.zeros(m, dtype=bool)
    lo = k0
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    hi = k0
    while hi + 1 < m and inside[hi + 1]:
        hi += 1
    mask[lo:hi + 1] = True
    wrap = join_ends or curve.closed
    if wrap and (mask[0] != mask[-1]):
        if mask[0] and inside[-1]:
            j = m - 1
            while j > 0 and inside[j - 1] and not mask[j - 1]:
                j -= 1
            mask[j:] = True
        elif mask[-1] and inside[0]:
            j = 0
            while j + 1 < m and inside[j + 1] and not mask[j + 1]:
                j += 1
            mask[:j + 1] = True
    if curve.closed:
        mask[-1] = mask[0] = mask[0] or mask[-1]
    return mask


def arc_measure(curve: Curve, mask: np.ndarray) -> float:
    """Arc length of the segments whose both endpoints are in the mask."""
    both = mask[:-1] & mask[1:]
    return float(curve.seg_lengths[both].sum())


# ---------------------------------------------------------------------------
# file format


def save_curve(curve: Curve, path):
    """Write the curve as JSON with >= 15 significant digits per coordinate."""
    pts = ",".join(f"[{z.real:.17g},{z.imag:.17g}]" for z in curve.samples)
    closed = "true" if curve.closed else "false"
    prov = json.dumps(curve.provenance)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f'{{"points":[{pts}],"closed":{closed},"provenance":{prov}}}\n')


def load_curve(path) -> Curve:
    """Read a curve JSON file; rejects malformed or non-finite input."""
    def _bad_const(name):
        raise PreconditionError(f"non-finite constant in curve file: {name}")

    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_constant=_bad_const)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"malformed curve file: {exc}") from exc
    if not isinstance(doc, dict) or "points" in doc is None:
        raise PreconditionError("curve file must be a JSON object")
    try:
        pts_raw = doc["points"]
        closed = bool(doc["closed"])
        prov = str(doc.get("provenance", "file"))
    except KeyError as exc:
        raise PreconditionError(f"curve file missing field {exc}") from exc
    arr = np.asarray(pts_raw, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise PreconditionError("points must be an array of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("curve file contains non-finite coordinates")
    return from_points(arr[:, 0] + 1j * arr[:, 1], closed=closed,
                       provenance=prov)

"""Continuous argument branches along a curve and the weights built from them.

Given a curve and a distinguished point t0 off the sample set, unwrap_arg
produces a continuous branch of arg(tau - t0).  From the branch come the
oscillating factor eta_t0 = exp(-arg) and the weights
phi_{t0,gamma} = |tau - t0|^Re(gamma) * eta_t0^Im(gamma).

All weight arithmetic lives in log-space: on deep spirals eta spans hundreds
of orders of magnitude, so linear values are derived quantities, clamped to
the representable range with a diagnostic flag.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .curves import Curve
from .errors import BranchJump, PreconditionError

# exp() clamp keeping values finite and strictly positive in float64.
LOG_CLAMP = 700.0


@dataclass(frozen=True)
class ArgBranch:
    """A continuous branch of arg(tau - t0) sampled along the curve.

    The branch is unique up to a global 2*pi*k shift; it is pinned by taking
    the principal value at anchor_index = 0.  log_abs carries log|tau - t0|
    alongside, since every consumer needs both.
    """

    t0: complex
    values: np.ndarray
    anchor_index: int
    log_abs: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class Weight:
    """Per-sample positive weight, stored as natural logs.

    descriptor is one of power(...), oscillating(...), or "tabulated".
    clipped marks weights whose linear values hit the exp() clamp somewhere.
    """

    descriptor: str
    log_values: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.exp(np.clip(self.log_values, -LOG_CLAMP, LOG_CLAMP))

    @property
    def clipped(self) -> bool:
        return bool(np.any(np.abs(self.log_values) > LOG_CLAMP))


def unwrap_arg(curve: Curve, t0: complex) -> ArgBranch:
    """Continuous branch of arg(tau - t0) along the sample sequence.

    Raises BranchJump when a consecutive angular increment of size >= pi is
    detected, which signals under-sampling near t0.
    """
    d = curve.samples - t0
    if np.any(d == 0):
        raise PreconditionError("t0 coincides with a curve sample")
    inc = np.angle(d[1:] * np.conj(d[:-1]))
    # wrapped increments this close to pi are indistinguishable from >= pi
    if np.any(np.abs(inc) >= np.pi - 1e-6):
        k = int(np.argmax(np.abs(inc)))
        raise BranchJump(
            f"angular increment {abs(inc[k]):.6f} at sample {k}; "
            "curve is under-sampled near t0")
    values = np.empty(curve.n_samples)
    values[0] = np.angle(d[0])
    values[1:] = values[0] + np.cumsum(inc)
    return ArgBranch(t0, values, 0, np.log(np.abs(d)))


def eta(branch: ArgBranch) -> Weight:
    """The oscillating factor eta_t0(tau) = exp(-arg(tau - t0))."""
    return Weight("tabulated", -branch.values)


def phi(branch: ArgBranch, gamma: complex) -> Weight:
    """The weight |(tau - t0)^gamma|, computed in log-space.

    log phi = Re(gamma)*log|tau - t0| - Im(gamma)*arg(tau - t0).
    """
    gamma = complex(gamma)
    logs = gamma.real * branch.log_abs - gamma.imag * branch.values
    return Weight(f"oscillating(t0={branch.t0}, gamma={gamma})", logs)


def power_weight(curve: Curve, t0: complex, lam: float) -> Weight:
    """The power weight |tau - t0|^lam."""
    d = curve.distances_from(t0)
    if np.any(d == 0):
        raise PreconditionError("t0 coincides with a curve sample")
    return Weight(f"power(t0={t0}, lam={lam})", lam * np.log(d))


def tabulated_weight(values=None, log_values=None) -> Weight:
    """Wrap explicit per-sample values (or their logs) as a Weight."""
    if (values is None) == (log_values is None):
        raise PreconditionError("pass exactly one of values / log_values")
    if log_values is None:
        values = np.asarray(values, dtype=np.float64)
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise PreconditionError("weight values must be positive finite")
        log_values = np.log(values)
    return Weight("tabulated", np.asarray(log_values, dtype=np.float64))


def unit_weight(curve: Curve) -> Weight:
    return Weight("tabulated", np.zeros(curve.n_samples))


def equivalent(w1: Weight, w2: Weight) -> float:
    """sup(w1/w2) * sup(w2/w1) over the shared samples (>= 1).

    Finite, refinement-stable values mean the weights are equivalent, i.e.
    they differ by a factor bounded and bounded away from zero.
    """
    if w1.log_values.shape != w2.log_values.shape:
        raise PreconditionError("weights must be tabulated on the same curve")
    diff = w1.log_values - w2.log_values
    return float(np.exp(np.max(diff) + np.max(-diff)))


def seifullayev_ratio(branch: ArgBranch) -> float:
    """Smallest C with |arg(tau - t0)| <= C*(1 + max(0, -log|tau - t0|)).

    Finite for Carleson curves; refinement-stable values are the empirical
    face of the logarithmic argument bound.
    """
    bound = 1.0 + np.maximum(0.0, -branch.log_abs)
    return float(np.max(np.abs(branch.values) / bound))


def export_weight_csv(curve: Curve, weight: Weight, path):
    """Write arclen, re, im, weight_log rows (log-space survives round-trips)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["arclen", "re", "im", "weight_log"])
        for s, z, lw in zip(curve.cumlen, curve.samples, weight.log_values):
            writer.writerow([f"{s:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}",
                             f"{lw:.17g}"])

"""Discrete Hardy-Littlewood maximal operator on curves and weighted variants.

At each evaluation point the supremum over radii is restricted to realized
inter-sample distances, capped at a fixed number of log-spaced
representatives: the portion average is piecewise constant in the radius
between realized distances, so the scan is exact whenever the cap exceeds
the number of distinct distances.

Portion integrals use per-sample arc weights (trapezoid in disguise), and
averages over empty portions never arise because evaluation points are curve
samples, each inside its own portion.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .argbranch import ArgBranch, LOG_CLAMP, phi, power_weight, unwrap_arg
from .curves import Curve, omega_arc
from .norms import as_sampled

MAX_RADII = 256
_CHUNK = 128


@dataclass(frozen=True)
class MaximalResult:
    """Mf at the evaluation points plus the radius achieving each supremum."""

    values: np.ndarray
    argmax_eps: np.ndarray
    eval_indices: np.ndarray
    clipped: bool = False


class MaximalEvaluator:
    """Reusable sup-of-portion-averages engine for one curve and point set.

    Precomputes, per evaluation point, the distance ordering, the radius
    grid, and cumulative arc weights, so that repeated evaluations over many
    integrands cost one gather and one cumulative sum each.
    """

    def __init__(self, curve: Curve, eval_indices=None,
                 max_radii: int = MAX_RADII):
        if eval_indices is None:
            eval_indices = np.arange(curve.n_samples)
        self.curve = curve
        self.eval_indices = np.asarray(eval_indices, dtype=np.intp)
        self.max_radii = max_radii
        aw = curve.arc_weights
        self._chunks = []
        for start in range(0, self.eval_indices.size, _CHUNK):
            idx = self.eval_indices[start:start + _CHUNK]
            dists = np.abs(curve.samples[None, :] - curve.samples[idx, None])
            order = np.argsort(dists, axis=1)
            ds = np.take_along_axis(dists, order, axis=1)
            cum_aw = np.cumsum(aw[order], axis=1)
            n_zero = (ds <= 0.0).sum(axis=1)
            d_lo = ds[np.arange(idx.size), np.minimum(n_zero, ds.shape[1] - 1)]
            d_hi = ds[:, -1] * (1.0 + 1e-9)
            if ds.shape[1] <= max_radii:
                # every realized distance: the scan is exact at this size
                eps = np.where(ds > 0.0, ds * (1.0 + 1e-12),
                               d_lo[:, None] * (1.0 - 1e-12))
            else:
                eps = np.exp(np.linspace(np.log(d_lo * (1.0 - 1e-12)),
                                         np.log(d_hi), max_radii, axis=1))
            ks = np.empty_like(eps, dtype=np.intp)
            for r in range(idx.size):
                ks[r] = np.searchsorted(ds[r], eps[r], side="left")
            ks = np.maximum(ks, 1)
            self._chunks.append((order, cum_aw, eps, ks))

    def sup_average(self, g: np.ndarray):
        """Per evaluation point: max over radii of avg(g over the portion).

        g must be a nonnegative per-sample array.
        """
        best = np.empty(self.eval_indices.size)
        best_eps = np.empty(self.eval_indices.size)
        pos = 0
        gw = g * self.curve.arc_weights
        for order, cum_aw, eps, ks in self._chunks:
            rows = order.shape[0]
            cum_g = np.cumsum(gw[order], axis=1)
            avg = (np.take_along_axis(cum_g, ks - 1, axis=1)
                   / np.take_along_axis(cum_aw, ks - 1, axis=1))
            hit = np.argmax(avg, axis=1)
            best[pos:pos + rows] = avg[np.arange(rows), hit]
            best_eps[pos:pos + rows] = eps[np.arange(rows), hit]
            pos += rows
        return best, best_eps


def maximal(curve: Curve, f, eval_indices=None,
            max_radii: int = MAX_RADII,
            evaluator: MaximalEvaluator | None = None) -> MaximalResult:
    """The maximal operator: sup over radii of portion averages of |f|."""
    f = as_sampled(curve, f)
    if evaluator is None:
        evaluator = MaximalEvaluator(curve, eval_indices, max_radii)
    values, eps = evaluator.sup_average(np.abs(f))
    return MaximalResult(values, eps, evaluator.eval_indices)


def _weighted(curve: Curve, f, log_phi: np.ndarray,
              evaluator: MaximalEvaluator) -> MaximalResult:
    f = as_sampled(curve, f)
    absf = np.abs(f)
    if not log_phi.any():
        # zero exponent: reduce to the plain operator bit for bit
        values, eps = evaluator.sup_average(absf)
        return MaximalResult(values, eps, evaluator.eval_indices)
    with np.errstate(divide="ignore"):
        log_g = np.log(absf) - log_phi
    finite = np.isfinite(log_g)
    if not finite.any():
        values = np.zeros(evaluator.eval_indices.size)
        return MaximalResult(values, values.copy(), evaluator.eval_indices)
    shift = float(np.max(log_g[finite]))
    g = np.exp(np.where(finite, log_g - shift, -np.inf))
    avg, eps = evaluator.sup_average(g)
    with np.errstate(divide="ignore"):
        log_vals = log_phi[evaluator.eval_indices] + shift + np.log(avg)
    nonzero = avg > 0.0
    clipped = bool(np.any(np.abs(log_vals[nonzero]) > LOG_CLAMP))
    values = np.exp(np.clip(log_vals, -LOG_CLAMP, LOG_CLAMP))
    values[~nonzero] = 0.0
    return MaximalResult(values, eps, evaluator.eval_indices, clipped)


def weighted_maximal(curve: Curve, f, t0: complex, gamma: complex,
                     branch: ArgBranch | None = None, eval_indices=None,
                     max_radii: int = MAX_RADII,
                     evaluator: MaximalEvaluator | None = None
                     ) -> MaximalResult:
    """The weight-conjugated maximal operator for phi_{t0,gamma}.

    Computes phi(t) * sup of portion averages of |f| / phi in log-space.
    gamma = 0 coincides exactly with maximal(); real gamma coincides with
    power_weighted_maximal at that exponent.
    """
    gamma = complex(gamma)
    if gamma.imag == 0.0:
        return power_weighted_maximal(curve, f, t0, gamma.real,
                                      eval_indices=eval_indices,
                                      max_radii=max_radii,
                                      evaluator=evaluator)
    if branch is None:
        branch = unwrap_arg(curve, t0)
    log_phi = phi(branch, gamma).log_values
    if evaluator is None:
        evaluator = MaximalEvaluator(curve, eval_indices, max_radii)
    return _weighted(curve, f, log_phi, evaluator)


def power_weighted_maximal(curve: Curve, f, t0: complex, lam: float,
                           eval_indices=None, max_radii: int = MAX_RADII,
                           evaluator: MaximalEvaluator | None = None
                           ) -> MaximalResult:
    """Weighted maximal operator with the power weight |tau - t0|^lam."""
    if lam == 0.0:
        log_phi = np.zeros(curve.n_samples)
    else:
        log_phi = power_weight(curve, t0, lam).log_values
    if evaluator is None:
        evaluator = MaximalEvaluator(curve, eval_indices, max_radii)
    return _weighted(curve, f, log_phi, evaluator)


@dataclass(frozen=True)
class Decomposition:
    """The four arc-localized pieces of the weighted maximal operator.

    pieces[0]: chi_omega   M chi_omega f      (singularity core)
    pieces[1]: chi_complement M chi_omega f
    pieces[2]: chi_omega   M chi_complement f
    pieces[3]: chi_complement M chi_complement f
    Their pointwise sum dominates the un-split operator on the shared
    radius grid.
    """

    pieces: tuple
    omega_mask: np.ndarray
    eval_indices: np.ndarray


def decompose(curve: Curve, f, t0: complex, gamma: complex, delta: float,
              branch: ArgBranch | None = None, eval_indices=None,
              max_radii: int = MAX_RADII, join_ends: bool = False
              ) -> Decomposition:
    """Split the weighted maximal operator across the arc omega(t0, delta)."""
    f = as_sampled(curve, f)
    mask = omega_arc(curve, t0, delta, join_ends=join_ends)
    evaluator = MaximalEvaluator(curve, eval_indices, max_radii)
    f_in = np.where(mask, f, 0.0)
    f_out = np.where(mask, 0.0, f)
    m_in = weighted_maximal(curve, f_in, t0, gamma, branch=branch,
                            evaluator=evaluator)
    m_out = weighted_maximal(curve, f_out, t0, gamma, branch=branch,
                             evaluator=evaluator)
    at_eval = mask[evaluator.eval_indices]
    pieces = (np.where(at_eval, m_in.values, 0.0),
              np.where(at_eval, 0.0, m_in.values),
              np.where(at_eval, m_out.values, 0.0),
              np.where(at_eval, 0.0, m_out.values))
    return Decomposition(pieces, mask, evaluator.eval_indices)


def export_maximal_csv(curve: Curve, result: MaximalResult, path):
    """Write arclen, Mf, argmax_eps rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["arclen", "Mf", "argmax_eps"])
        for i, v, e in zip(result.eval_indices, result.values,
                           result.argmax_eps):
            writer.writerow([f"{curve.cumlen[i]:.17g}", f"{v:.17g}",
                             f"{e:.17g}"])

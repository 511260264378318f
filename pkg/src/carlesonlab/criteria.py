"""Boundedness decision predicates for the weighted maximal operator.

Each check reduces to the bracketing pair

    lower = 1/p(t0) + Re(gamma) + min(dm*Im(gamma), dp*Im(gamma))
    upper = 1/p(t0) + Re(gamma) + max(dm*Im(gamma), dp*Im(gamma))

with (dm, dp) the spirality indices.  Strict 0 < lower and upper < 1 is the
sufficient condition; lower < 0 or upper > 1 violates the necessary
inequalities; equalities classify as INDETERMINATE, except that for power
weights the two-sided characterization makes any non-interior value provably
unbounded (carried by a flag so the boundary stays distinguishable).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .curves import Curve, d_t, omega_arc
from .errors import NoAdmissibleDelta, PreconditionError
from .norms import ExponentField, exponent_at
from .submult import IndexPair, phi_indices_closed_form

MAIN_THM_BOUNDED = "MAIN_THM_BOUNDED"
KPS_BOUNDED = "KPS_BOUNDED"
ERSATZ_BOUNDED = "ERSATZ_BOUNDED"
NECESSARY_VIOLATED = "NECESSARY_VIOLATED"
INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a boundedness predicate.

    lower/upper are the bracketing quantities; margins measure the distance
    to 0 and to the applicable upper limit (1, or p_*/p(t0) for the ersatz
    check).  iff_unbounded marks verdicts backed by a two-sided criterion.
    """

    lower: float
    upper: float
    classification: str
    upper_limit: float = 1.0
    iff_unbounded: bool = False
    eps: float | None = None
    delta: float | None = None

    @property
    def margins(self) -> tuple[float, float]:
        return (self.lower, self.upper_limit - self.upper)

    @property
    def margin(self) -> float:
        return min(self.margins)


def _classify(lower: float, upper: float, bounded_label: str) -> str:
    if 0.0 < lower and upper < 1.0:
        return bounded_label
    if lower < 0.0 or upper > 1.0:
        return NECESSARY_VIOLATED
    return INDETERMINATE


def check_main(p_at_t0: float, gamma: complex, spirality: IndexPair) -> Verdict:
    """Sufficient condition for general Carleson curves and complex gamma."""
    if not (1.0 < p_at_t0 < np.inf):
        raise PreconditionError("p(t0) must lie in (1, inf)")
    idx = phi_indices_closed_form(gamma, spirality)
    lower = 1.0 / p_at_t0 + idx.alpha
    upper = 1.0 / p_at_t0 + idx.beta
    return Verdict(lower, upper, _classify(lower, upper, MAIN_THM_BOUNDED))


def check_kps(p_at_t0: float, lam: float) -> Verdict:
    """Power-weight criterion; two-sided, so failure is provable unboundedness.

    Boundary values classify INDETERMINATE under the strict reading but are
    flagged unbounded via iff_unbounded.
    """
    if not (1.0 < p_at_t0 < np.inf):
        raise PreconditionError("p(t0) must lie in (1, inf)")
    v = 1.0 / p_at_t0 + lam
    cls = _classify(v, v, KPS_BOUNDED)
    return Verdict(v, v, cls, iff_unbounded=not (0.0 < v < 1.0))


def check_ersatz(curve: Curve, p: ExponentField, t0: complex, gamma: complex,
                 spirality: IndexPair, scope_mask=None) -> Verdict:
    """Exponent-minimum sufficient condition over the given scope.

    The upper bracket is compared against p_*/p(t0) with p_* the minimum of
    p over the scope (whole curve by default, or an arc mask).  For constant
    p this coincides with the main condition.
    """
    p_t0 = exponent_at(curve, p, t0)
    if scope_mask is None:
        p_star = p.p_min
    else:
        scope_mask = np.asarray(scope_mask, dtype=bool)
        if not scope_mask.any():
            raise PreconditionError("scope mask selects no samples")
        p_star = float(p.values[scope_mask].min())
    idx = phi_indices_closed_form(gamma, spirality)
    lower = 1.0 / p_t0 + idx.alpha
    upper = 1.0 / p_t0 + idx.beta
    limit = p_star / p_t0
    if 0.0 < lower and upper < limit:
        cls = ERSATZ_BOUNDED
    elif lower < 0.0 or upper > 1.0:
        cls = NECESSARY_VIOLATED
    else:
        cls = INDETERMINATE
    return Verdict(lower, upper, cls, upper_limit=limit)


def select_delta_and_eps(curve: Curve, p: ExponentField, t0: complex,
                         gamma: complex, spirality: IndexPair,
                         join_ends: bool = False,
                         max_candidates: int = 64) -> tuple[float, float]:
    """Choose the arc radius and exponent margin used by the probe machinery.

    eps is half the minimum margin of the main condition to {0, 1}.  delta is
    the largest candidate radius (d_t/4 and realized sample radii below it)
    whose arc-restricted exponent minimum satisfies 1 + beta*p(t0) < p_*
    strictly.  Constant exponents accept the default d_t/4 immediately.
    """
    verdict = check_main(exponent_at(curve, p, t0), gamma, spirality)
    if verdict.classification != MAIN_THM_BOUNDED:
        raise PreconditionError(
            f"main condition does not hold ({verdict.classification})")
    eps = 0.5 * verdict.margin
    p_t0 = exponent_at(curve, p, t0)
    beta = verdict.upper - 1.0 / p_t0
    dt = d_t(curve, t0)
    dists = curve.distances_from(t0)
    # nudge above the realized radii so each candidate arc holds its sample
    below = np.sort(np.unique(dists[(dists < dt / 4.0) & (dists > 0)]))[::-1]
    below = below * (1.0 + 1e-12)
    if below.size > max_candidates:
        ranks = np.unique(np.linspace(0, below.size - 1, max_candidates)
                          .round().astype(int))
        below = below[ranks]
    for delta in np.concatenate(([dt / 4.0], below)):
        try:
            mask = omega_arc(curve, t0, delta, join_ends=join_ends)
        except PreconditionError:
            continue
        p_star = float(p.values[mask].min())
        if 1.0 + beta * p_t0 < p_star:
            return float(delta), float(eps)
    raise NoAdmissibleDelta(
        "no arc radius satisfies 1 + beta*p(t0) < p_*; the margin is too thin")


def verdict_to_json(verdict: Verdict) -> str:
    doc = {
        "lower": verdict.lower,
        "upper": verdict.upper,
        "classification": verdict.classification,
        "margins": list(verdict.margins),
        "eps": verdict.eps,
        "delta": verdict.delta,
    }
    return json.dumps(doc, indent=2, sort_keys=True)

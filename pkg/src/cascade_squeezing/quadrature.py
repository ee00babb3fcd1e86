"""Quadrature variances and squeezing of the collective mode c = a + b.

Two ordering conventions are first-class:

* arbitrary order: the textbook variance assembled from the steady moments,
  whose two-mode vacuum level is 2 and whose squeezing floor without the
  atom is 50% below vacuum;
* normal order (of the reservoir noise operators): the convention behind
  the closed forms

      plus  = kappa gamma_c (kappa + 4 eps) / ((kappa^2 + 4 eps^2)(kappa + 2 eps))
              - 4 eps / (kappa + 2 eps)
      minus = kappa gamma_c (kappa - 4 eps) / ((kappa^2 + 4 eps^2)(kappa - 2 eps))
              + 4 eps / (kappa - 2 eps)

  with vacuum level gamma_c / kappa.  The plus form stays finite at the
  threshold eps = kappa/2 by cancellation; the minus form diverges there.

Normally ordered variances can be negative (e.g. without the atom); they
are returned as-is; interpretation is the caller's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .atom import AtomicState, atomic_steady_state
from .errors import DegenerateError, DomainError, RegimeError, ValidationError
from .moments import FieldMoments, c2_moment, steady_moments_closed
from .params import SystemParams

__all__ = [
    "VACUUM_LEVEL_ARBITRARY",
    "QuadratureReport",
    "variance_arbitrary",
    "normal_moments",
    "variance_normal_assembled",
    "variance_normal_closed",
    "variance_normal_plus_closed",
    "variance_normal_minus_closed",
    "vacuum_normal",
    "squeezing_normal",
    "critical_gamma_c",
    "quadrature_report",
]

# two-mode vacuum variance in the arbitrary-order convention
VACUUM_LEVEL_ARBITRARY = 2.0


def variance_arbitrary(m: FieldMoments) -> tuple[float, float]:
    """Arbitrary-order quadrature variances from a steady moment set.

    Assumes vanishing first moments (as produced by vacuum + bottom-level
    preparation): plus/minus = <cdag c> + <c cdag> +/- (<cdag^2> + <c^2>).
    """
    symmetric = (m.n_a + m.n_b + m.anti_a + m.anti_b
                 + 2.0 * (m.adb + m.bad).real)
    anomalous = 2.0 * (m.ab + m.ba + m.a2 + m.b2).real
    plus = symmetric + anomalous
    minus = symmetric - anomalous
    if not (math.isfinite(plus) and math.isfinite(minus)):
        raise ValidationError("non-finite moment input to variance_arbitrary")
    return plus, minus


def normal_moments(params: SystemParams, atom: AtomicState) -> tuple[float, float]:
    """Steady <:cdag c:> and <:c cdag:> with noise operators normal-ordered.

    The noise contribution vanishes in this ordering for a vacuum reservoir:

        <:cdag c:> = -(eps/kappa) * 2 <c^2>
        <:c cdag:> = <:cdag c:> - kappa gamma_c (eta_a - eta_c)
                                   / (kappa^2 - 4 eps^2)
    """
    if not params.dynamics_valid:
        raise RegimeError("epsilon >= kappa/2: normally ordered moments undefined")
    c2 = c2_moment(params, atom)
    ncc = -(params.epsilon / params.kappa) * 2.0 * c2
    tail = (params.kappa * params.gamma_c * (atom.eta_a - atom.eta_c)
            / (params.kappa * params.kappa - 4.0 * params.epsilon * params.epsilon))
    return ncc, ncc - tail


def variance_normal_assembled(
    params: SystemParams, atom: AtomicState
) -> tuple[float, float]:
    """Normally ordered variances assembled from the moment route.

    Exists for cross-validation of the closed forms; declares the stricter
    domain (strictly below threshold).
    """
    ncc, ncc_anti = normal_moments(params, atom)
    c2 = c2_moment(params, atom)
    return ncc + ncc_anti + 2.0 * c2, ncc + ncc_anti - 2.0 * c2


def variance_normal_plus_closed(params: SystemParams) -> float:
    """Closed-form plus variance; finite up to and including the threshold.

    The grouping (gamma_c * (k(k+4e)/(k^2+4e^2)) - 4e) / (k+2e) makes the
    eps = 0 value collapse to gamma_c/kappa exactly in floating point.
    """
    if not params.closed_form_valid:
        raise RegimeError("epsilon > kappa/2: closed-form variance undefined")
    k, e = params.kappa, params.epsilon
    ratio = (k * (k + 4.0 * e)) / (k * k + 4.0 * e * e)
    return (params.gamma_c * ratio - 4.0 * e) / (k + 2.0 * e)


def variance_normal_minus_closed(params: SystemParams) -> float:
    """Closed-form minus variance; diverges at the threshold."""
    if not params.closed_form_valid:
        raise RegimeError("epsilon > kappa/2: closed-form variance undefined")
    k, e = params.kappa, params.epsilon
    if k - 2.0 * e == 0.0:
        raise DomainError("denominator kappa - 2*epsilon vanishes")
    ratio = (k * (k - 4.0 * e)) / (k * k + 4.0 * e * e)
    return (params.gamma_c * ratio + 4.0 * e) / (k - 2.0 * e)


def variance_normal_closed(params: SystemParams) -> tuple[float, float]:
    """Both closed-form variances; use the plus accessor at the threshold."""
    return variance_normal_plus_closed(params), variance_normal_minus_closed(params)


def vacuum_normal(params: SystemParams) -> float:
    """Normally ordered two-mode vacuum level gamma_c / kappa."""
    return params.gamma_c / params.kappa


def squeezing_normal(params: SystemParams) -> float:
    """Fractional squeezing 1 - plus/vacuum in the normal-order convention."""
    if params.gamma_c == 0.0:
        raise DomainError("gamma_c = 0: vacuum reference level is zero")
    return 1.0 - variance_normal_plus_closed(params) / vacuum_normal(params)


def critical_gamma_c(kappa: float, epsilon: float) -> float:
    """Coupling strength at which the plus variance crosses zero.

    Root of the closed plus form: gamma_c* = 4 eps (kappa^2 + 4 eps^2)
    / (kappa (kappa + 4 eps)); unique for 0 < eps <= kappa/2.
    """
    if not (math.isfinite(kappa) and kappa > 0.0):
        raise ValidationError(f"kappa must be finite and > 0, got {kappa!r}")
    if not math.isfinite(epsilon) or epsilon < 0.0:
        raise ValidationError(f"epsilon must be finite and >= 0, got {epsilon!r}")
    if epsilon == 0.0:
        raise DegenerateError("critical coupling degenerates to 0 at epsilon = 0")
    if epsilon > kappa / 2.0:
        raise DomainError("epsilon > kappa/2: no zero crossing below threshold")
    return (4.0 * epsilon * (kappa * kappa + 4.0 * epsilon * epsilon)
            / (kappa * (kappa + 4.0 * epsilon)))


@dataclass(frozen=True)
class QuadratureReport:
    """Both ordering conventions side by side for one parameter point.

    Fields that are undefined at the requested point (minus variance at the
    threshold, arbitrary-order variances outside the dynamic regime,
    squeezing at gamma_c = 0) are None.
    """

    params: SystemParams
    var_plus_arbitrary: float | None
    var_minus_arbitrary: float | None
    var_plus_normal: float
    var_minus_normal: float | None
    vacuum_normal: float
    squeezing: float | None


def quadrature_report(
    params: SystemParams, atom: AtomicState | None = None
) -> QuadratureReport:
    """Evaluate every reportable quadrature quantity at one point."""
    if atom is None:
        atom = atomic_steady_state(params)
    plus = variance_normal_plus_closed(params)
    minus = arb_plus = arb_minus = None
    if params.dynamics_valid:
        minus = variance_normal_minus_closed(params)
        arb_plus, arb_minus = variance_arbitrary(steady_moments_closed(params, atom))
    squeezing = None
    if params.gamma_c > 0.0:
        squeezing = squeezing_normal(params)
    return QuadratureReport(
        params=params,
        var_plus_arbitrary=arb_plus,
        var_minus_arbitrary=arb_minus,
        var_plus_normal=plus,
        var_minus_normal=minus,
        vacuum_normal=vacuum_normal(params),
        squeezing=squeezing,
    )

"""System parameters and operating-regime validation.

All rates (cavity decay, drive amplitude, atom-field coupling) are plain
dimensionless numbers in one arbitrary time unit; no unit system is
implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["SystemParams", "new_params", "params_from_gamma_c"]


@dataclass(frozen=True)
class SystemParams:
    """Immutable rate triple with derived constants and regime flags.

    kappa:   cavity decay rate (> 0).
    epsilon: parametric drive amplitude, the product of the crystal coupling
             and the (classical) coherent pump amplitude (>= 0). The two
             factors never appear separately.
    g:       atom-field coupling (>= 0).

    Derived quantities are recomputed on access, never stored:
      gamma_c = 4 g^2 / kappa   (cavity-induced stimulated-emission rate)
      beta    = (kappa^2 - 4 epsilon^2) / kappa   (two-mode decay rate)

    ``dynamics_valid`` (epsilon < kappa/2) gates every operation built on the
    adiabatically eliminated dynamics, whose common prefactor carries a
    1/(kappa^2 - 4 epsilon^2). ``closed_form_valid`` (epsilon <= kappa/2)
    additionally admits the threshold point, where the closed-form plus
    quadrature stays finite by cancellation.
    """

    kappa: float
    epsilon: float
    g: float

    @property
    def gamma_c(self) -> float:
        return 4.0 * self.g * self.g / self.kappa

    @property
    def beta(self) -> float:
        return (self.kappa * self.kappa - 4.0 * self.epsilon * self.epsilon) / self.kappa

    @property
    def dynamics_valid(self) -> bool:
        return self.epsilon < self.kappa / 2.0

    @property
    def closed_form_valid(self) -> bool:
        return self.epsilon <= self.kappa / 2.0


def _check_rate(name: str, value: float, positive: bool = False) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if positive and value <= 0.0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    if not positive and value < 0.0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return value


def new_params(kappa: float, epsilon: float, g: float) -> SystemParams:
    """Validate the rate triple and build a SystemParams."""
    return SystemParams(
        kappa=_check_rate("kappa", kappa, positive=True),
        epsilon=_check_rate("epsilon", epsilon),
        g=_check_rate("g", g),
    )


def params_from_gamma_c(kappa: float, epsilon: float, gamma_c: float) -> SystemParams:
    """Build params from the induced decay rate instead of the bare coupling.

    Inverts gamma_c = 4 g^2 / kappa, i.e. g = sqrt(gamma_c * kappa) / 2; the
    round trip preserves gamma_c to 1e-12 relative.
    """
    kappa = _check_rate("kappa", kappa, positive=True)
    gamma_c = _check_rate("gamma_c", gamma_c)
    return new_params(kappa, epsilon, math.sqrt(gamma_c * kappa) / 2.0)

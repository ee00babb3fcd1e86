"""Fixed-step classical RK4 for the small linear systems used here.

Adaptive integrators are deliberately avoided: every propagated system in
this package is linear and time-invariant, and the tests rely on a
deterministic step sequence.
"""

from __future__ import annotations

from typing import Callable, TypeVar

from .errors import StepSizeError

T = TypeVar("T")


def check_step(dt: float, radius_bound: float, allow_large_step: bool) -> None:
    """Reject steps outside the RK4 stability region.

    ``radius_bound`` is any upper bound on the generator's spectral radius;
    the guard trips at dt >= 2/bound, safely inside the true RK4 limit of
    ~2.785/|lambda| on the negative real axis.
    """
    if dt <= 0.0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    if allow_large_step or radius_bound <= 0.0:
        return
    if dt >= 2.0 / radius_bound:
        raise StepSizeError(
            f"dt = {dt:g} exceeds the stability guard 2/{radius_bound:g} = "
            f"{2.0 / radius_bound:g}; pass allow_large_step=True to override"
        )


def rk4_step(deriv: Callable[[T], T], y: T, dt: float) -> T:
    k1 = deriv(y)
    k2 = deriv(y + 0.5 * dt * k1)
    k3 = deriv(y + 0.5 * dt * k2)
    k4 = deriv(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagate(deriv: Callable[[T], T], y0: T, t_final: float, dt: float) -> T:
    """Integrate to t_final with full steps of dt plus one remainder step."""
    if t_final < 0.0:
        raise StepSizeError(f"t_final must be >= 0, got {t_final}")
    n_full = int(t_final / dt)
    y = y0
    for _ in range(n_full):
        y = rk4_step(deriv, y, dt)
    remainder = t_final - n_full * dt
    if remainder > 1e-12 * max(dt, 1.0):
        y = rk4_step(deriv, y, remainder)
    return y

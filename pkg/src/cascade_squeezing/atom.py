"""Atomic expectation-value dynamics under the adiabatically eliminated field.

Once the cavity modes are slaved to the atom (large-time elimination of the
field), the six atomic expectations close on themselves.  With the shorthand

    A = kappa^2 gamma_c / (2 (kappa^2 - 4 epsilon^2))
    B = kappa epsilon gamma_c / (kappa^2 - 4 epsilon^2)
    C = kappa^2 gamma_c / (kappa^2 - 4 epsilon^2)

the equations of motion are

    d<sigma_a>/dt = -A <sigma_a> + B <sigma_b>*
    d<sigma_b>/dt = -C <sigma_b>
    d<sigma_c>/dt = -A <sigma_c> - B (<eta_b> - <eta_c>)
    d<eta_a>/dt   =  B <sigma_c + sigma_c^dag> - C <eta_a>
    d<eta_b>/dt   = -B <sigma_c + sigma_c^dag> + C <eta_a> - C <eta_b>
    d<eta_c>/dt   =  C <eta_b>

All coefficients are stored in this pre-simplified form, which stays finite
at epsilon = 0 (the raw derivation carries a sigma_a/(2 epsilon) inside a
prefactor proportional to epsilon).  The three eta rows sum to zero
identically, so the level populations conserve their sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError, RegimeError
from .integrators import check_step, rk4_propagate
from .params import SystemParams

__all__ = [
    "AtomicState",
    "AtomicGenerator",
    "atomic_generator",
    "integrate_atomic",
    "atomic_steady_state",
]

# Layout of the realified atomic vector, fixed contract for test goldens.
ATOMIC_VECTOR_LAYOUT = (
    "Re sigma_a", "Im sigma_a",
    "Re sigma_b", "Im sigma_b",
    "Re sigma_c", "Im sigma_c",
    "eta_a", "eta_b", "eta_c",
)


@dataclass(frozen=True)
class AtomicState:
    """Expectation values of the six atomic operators.

    sigma_a, sigma_b are the two lowering coherences (top->intermediate,
    intermediate->bottom), sigma_c the two-photon coherence (top->bottom),
    and eta_a/eta_b/eta_c the top/intermediate/bottom level populations.
    """

    sigma_a: complex
    sigma_b: complex
    sigma_c: complex
    eta_a: float
    eta_b: float
    eta_c: float

    @classmethod
    def ground(cls) -> "AtomicState":
        """Atom in the bottom level, no coherences."""
        return cls(0j, 0j, 0j, 0.0, 0.0, 1.0)

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "AtomicState":
        v = np.asarray(v, dtype=float)
        return cls(
            sigma_a=complex(v[0], v[1]),
            sigma_b=complex(v[2], v[3]),
            sigma_c=complex(v[4], v[5]),
            eta_a=float(v[6]),
            eta_b=float(v[7]),
            eta_c=float(v[8]),
        )

    def to_vector(self) -> np.ndarray:
        return np.array(
            [
                self.sigma_a.real, self.sigma_a.imag,
                self.sigma_b.real, self.sigma_b.imag,
                self.sigma_c.real, self.sigma_c.imag,
                self.eta_a, self.eta_b, self.eta_c,
            ],
            dtype=float,
        )

    @property
    def population_sum(self) -> float:
        return self.eta_a + self.eta_b + self.eta_c


@dataclass(frozen=True)
class AtomicGenerator:
    """9x9 real generator on the vector in ATOMIC_VECTOR_LAYOUT order.

    The system is homogeneous (no affine part); the three population rows
    sum to the zero row.
    """

    matrix: np.ndarray

    @property
    def spectral_radius_bound(self) -> float:
        return float(np.linalg.norm(self.matrix, np.inf))


def _coefficients(p: SystemParams) -> tuple[float, float, float]:
    denom = p.kappa * p.kappa - 4.0 * p.epsilon * p.epsilon
    coh = p.kappa * p.kappa * p.gamma_c / (2.0 * denom)
    mix = p.kappa * p.epsilon * p.gamma_c / denom
    pop = p.kappa * p.kappa * p.gamma_c / denom
    return coh, mix, pop


def atomic_generator(params: SystemParams) -> AtomicGenerator:
    """Assemble the generator of the module docstring's equations."""
    if not params.dynamics_valid:
        raise RegimeError("epsilon >= kappa/2: adiabatic elimination invalid")
    coh, mix, pop = _coefficients(params)
    m = np.zeros((9, 9))
    # sigma_a couples to conj(sigma_b): opposite sign on the Im row
    m[0, 0] = -coh
    m[0, 2] = mix
    m[1, 1] = -coh
    m[1, 3] = -mix
    m[2, 2] = -pop
    m[3, 3] = -pop
    m[4, 4] = -coh
    m[4, 7] = -mix
    m[4, 8] = mix
    m[5, 5] = -coh
    m[6, 4] = 2.0 * mix
    m[6, 6] = -pop
    m[7, 4] = -2.0 * mix
    m[7, 6] = pop
    m[7, 7] = -pop
    m[8, 7] = pop
    return AtomicGenerator(matrix=m)


def default_atomic_dt(params: SystemParams) -> float:
    return 0.01 / max(params.kappa, params.gamma_c)


def integrate_atomic(
    state0: AtomicState,
    params: SystemParams,
    t_final: float,
    dt: float | None = None,
    *,
    allow_large_step: bool = False,
) -> AtomicState:
    """Fixed-step RK4 solution of the atomic system at time t_final.

    Transient populations may leave [0, 1] (the eliminated-field generator
    is not a completely positive map); values are returned as-is.
    """
    if dt is None:
        dt = default_atomic_dt(params)
    gen = atomic_generator(params)
    check_step(dt, gen.spectral_radius_bound, allow_large_step)
    y = rk4_propagate(lambda v: gen.matrix @ v, state0.to_vector(), t_final, dt)
    return AtomicState.from_vector(y)


def _steady_state_nullspace(params: SystemParams) -> np.ndarray:
    """Fixed point of the closed (sigma_c, eta) block, trace-normalized.

    Solves the 5x5 block rows/columns (Re sigma_c, Im sigma_c, eta_a, eta_b,
    eta_c) with the population-sum constraint appended; used as a cross-check
    of the closed forms, not as the returned value.
    """
    block = atomic_generator(params).matrix[4:9, 4:9]
    stacked = np.vstack([block, [0.0, 0.0, 1.0, 1.0, 1.0]])
    rhs = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    solution, _, rank, _ = np.linalg.lstsq(stacked, rhs, rcond=None)
    if rank < 5:
        raise ModelError("degenerate atomic fixed-point system")
    return solution


def atomic_steady_state(params: SystemParams) -> AtomicState:
    """Stationary atomic expectations under the eliminated field.

    Closed forms (exact fixed points of the atomic system):

        eta_a   = 4 epsilon^2 / (kappa^2 + 4 epsilon^2)
        eta_b   = 0
        eta_c   = 1 - eta_a
        sigma_c = 2 epsilon kappa / (kappa^2 + 4 epsilon^2)
        sigma_a = sigma_b = 0

    eta_c is computed as 1 - eta_a so the completeness sum is exactly 1 in
    floating point.  Where the generator itself is available (strictly below
    threshold, gamma_c > 0) the closed forms are cross-checked against a
    null-space solve of the (sigma_c, eta) block to 1e-10.
    """
    if not params.closed_form_valid:
        raise RegimeError("epsilon > kappa/2: no stationary atomic state")
    k, e = params.kappa, params.epsilon
    denom = k * k + 4.0 * e * e
    eta_a = 4.0 * e * e / denom
    sigma_c = 2.0 * e * k / denom
    state = AtomicState(
        sigma_a=0j,
        sigma_b=0j,
        sigma_c=complex(sigma_c, 0.0),
        eta_a=eta_a,
        eta_b=0.0,
        eta_c=1.0 - eta_a,
    )
    if params.dynamics_valid and params.gamma_c > 0.0:
        numeric = _steady_state_nullspace(params)
        closed = np.array([sigma_c, 0.0, eta_a, 0.0, state.eta_c])
        if not np.allclose(numeric, closed, rtol=0.0, atol=1e-10):
            raise ModelError(
                "atomic steady state: null-space solve disagrees with the "
                f"closed forms by {np.max(np.abs(numeric - closed)):.2e}"
            )
    return state

"""Second-order field moments of the two slaved cavity modes.

Ten moments close under the decorrelation of reservoir noise from atomic
operators: the occupation-type pairs <adag a>, <a adag>, <bdag b>, <b bdag>,
the cross pairs <ab>, <ba>, and the anomalous set <a^2>, <b^2>, <adag b>,
<b adag>.  Atomic expectations enter only as inhomogeneous sources, with

    B = kappa epsilon gamma_c / (kappa^2 - 4 epsilon^2)
    C = kappa^2 gamma_c / (kappa^2 - 4 epsilon^2)

(the same constants as in the atomic module):

    d<adag a>/dt = -kappa <adag a> - eps <ba + (ba)^dag> + C eta_a - B <sc + sc^dag>
    d<a adag>/dt = -kappa <a adag> - eps <ab + (ab)^dag> + C eta_b + kappa
    d<bdag b>/dt = -kappa <bdag b> - eps <ab + (ab)^dag> + C eta_b
    d<b bdag>/dt = -kappa <b bdag> - eps <ba + (ba)^dag> + C eta_c - B <sc + sc^dag> + kappa
    d<ab>/dt     = -kappa <ab> - eps (<adag a> + <bdag b>) - 2 B eta_b - eps
    d<ba>/dt     = -kappa <ba> - eps (<adag a> + <bdag b>) - B (eta_a + eta_c) + C <sc> - eps
    d<a^2>/dt    = -kappa <a^2> - eps (<b adag>^dag + <adag b>^dag)
    d<b^2>/dt    = -kappa <b^2> - eps (<b adag> + <adag b>)
    d<adag b>/dt = -kappa <adag b> - eps (<a^2>^dag + <b^2>)
    d<b adag>/dt = -kappa <b adag> - eps (<a^2>^dag + <b^2>)

(sc = sigma_c).  Note <ab> and <ba> evolve differently here even though the
underlying operators commute: the split is produced by the noise-ordering
bookkeeping of the elimination step, and is inherited as-is.

The steady-state solver works on the real-part system: with real atomic
inputs every imaginary part vanishes at the fixed point, and the only
imaginary component ever sourced (Im <ba>, fed by Im sigma_c) is appended
analytically.  The resulting 10x10 real layout is the module's stable
contract; see MOMENT_VECTOR_LAYOUT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atom import AtomicState, atomic_generator
from .errors import DomainError, RegimeError
from .integrators import check_step, rk4_propagate
from .params import SystemParams

__all__ = [
    "FieldMoments",
    "FieldMomentSystem",
    "FirstMoments",
    "vacuum_moments",
    "field_system",
    "integrate_moments",
    "steady_moments_solve",
    "steady_moments_closed",
    "c2_moment",
    "first_moments",
    "commutator_defect",
]

MOMENT_VECTOR_LAYOUT = (
    "n_a", "anti_a", "n_b", "anti_b",
    "Re ab", "Re ba", "Re a2", "Re b2", "Re adb", "Re bad",
)


@dataclass(frozen=True)
class FieldMoments:
    """The ten second-order moments; n/anti pairs real, the rest complex."""

    n_a: float       # <adag a>
    anti_a: float    # <a adag>
    n_b: float       # <bdag b>
    anti_b: float    # <b bdag>
    ab: complex      # <a b>
    ba: complex      # <b a>
    a2: complex      # <a^2>
    b2: complex      # <b^2>
    adb: complex     # <adag b>
    bad: complex     # <b adag>

    def to_complex_vector(self) -> np.ndarray:
        return np.array(
            [self.n_a, self.anti_a, self.n_b, self.anti_b,
             self.ab, self.ba, self.a2, self.b2, self.adb, self.bad],
            dtype=complex,
        )

    @classmethod
    def from_complex_vector(cls, v: np.ndarray) -> "FieldMoments":
        return cls(
            n_a=float(v[0].real), anti_a=float(v[1].real),
            n_b=float(v[2].real), anti_b=float(v[3].real),
            ab=complex(v[4]), ba=complex(v[5]),
            a2=complex(v[6]), b2=complex(v[7]),
            adb=complex(v[8]), bad=complex(v[9]),
        )


def vacuum_moments() -> FieldMoments:
    """Two-mode vacuum: all moments zero except <a adag> = <b bdag> = 1."""
    return FieldMoments(0.0, 1.0, 0.0, 1.0, 0j, 0j, 0j, 0j, 0j, 0j)


def commutator_defect(m: FieldMoments) -> tuple[float, float]:
    """Diagnostic (<a adag> - <adag a> - 1, same for mode b).

    The closed-form steady moments do not preserve this commutator when the
    atom is coupled; the defect is reported, never asserted on.
    """
    return (m.anti_a - m.n_a - 1.0, m.anti_b - m.n_b - 1.0)


@dataclass(frozen=True)
class FirstMoments:
    """First moments from vacuum + bottom-level preparation.

    <a>, <b>, and their sum vanish identically for all times; the would-be
    relaxation rate toward that fixed point is beta/2.  No ODE is integrated.
    """

    a: complex
    b: complex
    c: complex
    decay_rate: float


def first_moments(params: SystemParams) -> FirstMoments:
    return FirstMoments(a=0j, b=0j, c=0j, decay_rate=params.beta / 2.0)


@dataclass(frozen=True)
class FieldMomentSystem:
    """Realified drift matrix and source on MOMENT_VECTOR_LAYOUT.

    matrix is 10x10 real; source is the affine part built from the rates and
    the atomic expectations (only Re sigma_c enters; the Im sigma_c channel
    is handled separately by the solver).
    """

    matrix: np.ndarray
    source: np.ndarray


def _field_coefficients(p: SystemParams) -> tuple[float, float]:
    denom = p.kappa * p.kappa - 4.0 * p.epsilon * p.epsilon
    mix = p.kappa * p.epsilon * p.gamma_c / denom
    pop = p.kappa * p.kappa * p.gamma_c / denom
    return mix, pop


def field_system(params: SystemParams, atom: AtomicState) -> FieldMomentSystem:
    """Assemble the real-part drift and source for the moment equations."""
    if not params.dynamics_valid:
        raise RegimeError("epsilon >= kappa/2: adiabatic elimination invalid")
    k, e = params.kappa, params.epsilon
    mix, pop = _field_coefficients(params)
    re_sc = atom.sigma_c.real

    m = np.zeros((10, 10))
    for i in range(10):
        m[i, i] = -k
    # the real-part layout absorbs "+ adjoint" pairs into a factor 2
    m[0, 5] = -2.0 * e
    m[1, 4] = -2.0 * e
    m[2, 4] = -2.0 * e
    m[3, 5] = -2.0 * e
    m[4, 0] = m[4, 2] = -e
    m[5, 0] = m[5, 2] = -e
    m[6, 8] = m[6, 9] = -e
    m[7, 8] = m[7, 9] = -e
    m[8, 6] = m[8, 7] = -e
    m[9, 6] = m[9, 7] = -e

    s = np.zeros(10)
    s[0] = pop * atom.eta_a - 2.0 * mix * re_sc
    s[1] = pop * atom.eta_b + k
    s[2] = pop * atom.eta_b
    s[3] = pop * atom.eta_c - 2.0 * mix * re_sc + k
    s[4] = -2.0 * mix * atom.eta_b - e
    s[5] = -mix * (atom.eta_a + atom.eta_c) + pop * re_sc - e
    return FieldMomentSystem(matrix=m, source=s)


def steady_moments_solve(params: SystemParams, atom: AtomicState) -> FieldMoments:
    """Fixed point of the moment system by dense LU.

    Residual of every steady-state relation (drift + source, scaled by
    1/kappa) is below 1e-10.  An imaginary atomic coherence sources only
    Im <ba>, appended from its own scalar balance.
    """
    system = field_system(params, atom)
    try:
        x = np.linalg.solve(system.matrix, -system.source)
    except np.linalg.LinAlgError as exc:  # only at the beta = 0 boundary
        raise RegimeError(f"singular moment system: {exc}") from exc
    # scaled by the solution size: moments grow like 1/beta near threshold
    scale = params.kappa * max(1.0, float(np.max(np.abs(x))))
    residual = np.max(np.abs(system.matrix @ x + system.source)) / scale
    if residual > 1e-10:
        raise RegimeError(f"moment fixed point residual {residual:.2e} > 1e-10")

    _, pop = _field_coefficients(params)
    im_ba = pop * atom.sigma_c.imag / params.kappa
    return FieldMoments(
        n_a=float(x[0]), anti_a=float(x[1]), n_b=float(x[2]), anti_b=float(x[3]),
        ab=complex(x[4], 0.0), ba=complex(x[5], im_ba),
        a2=complex(x[6], 0.0), b2=complex(x[7], 0.0),
        adb=complex(x[8], 0.0), bad=complex(x[9], 0.0),
    )


def steady_moments_closed(params: SystemParams, atom: AtomicState) -> FieldMoments:
    """Closed-form steady moments; anomalous moments vanish identically.

    Valid strictly below threshold (the kappa^2 - 4 epsilon^2 denominators
    survive in the final forms).  kappa^2 = 2 epsilon^2 is NOT singular:
    such denominators appear only in intermediate derivation steps and
    cancel from the expressions evaluated here.  The forms assume a real
    two-photon coherence (true of the stationary atom); Re sigma_c is used.
    """
    if not params.closed_form_valid:
        raise RegimeError("epsilon > kappa/2: steady moments undefined")
    k, e = params.kappa, params.epsilon
    k2, e2 = k * k, e * e
    d = k2 - 4.0 * e2
    if d == 0.0:
        raise DomainError("denominator kappa^2 - 4*epsilon^2 vanishes")
    ea, eb, ec = atom.eta_a, atom.eta_b, atom.eta_c
    s = atom.sigma_c.real
    ssum = 2.0 * s

    base = 2.0 * e2 / d
    pref = params.gamma_c / (k * d * d)
    bracket_a = ((k2 * k2 - 4.0 * e2 * e2) * ea
                 + 2.0 * e2 * (4.0 * e2 + k2) * eb
                 + 2.0 * e2 * (k2 - 2.0 * e2) * ec
                 - 2.0 * e * k * (k2 - 2.0 * e2) * ssum)
    bracket_b = (2.0 * e2 * (k2 + 2.0 * e2) * ea
                 + (k2 + 4.0 * e2) * (k2 - 2.0 * e2) * eb
                 + 4.0 * e2 * e2 * ec
                 - 4.0 * e2 * e * k * ssum)
    bracket_bb = (4.0 * e2 * (k2 - e2) * ea
                  + 2.0 * e2 * (4.0 * e2 + k2) * eb
                  + (k2 * k2 - 2.0 * e2 * (k2 + 2.0 * e2)) * ec
                  - 2.0 * e * k * (k2 - 2.0 * e2) * ssum)
    n_a = base + pref * bracket_a
    n_b = base + pref * bracket_b
    anti_a = 1.0 + base + pref * bracket_b
    anti_b = 1.0 + base + pref * bracket_bb

    weight = 4.0 * params.g * params.g / d
    ab = -(e / k) * (n_a + n_b) - weight * (2.0 * e / k) * eb - e / k
    ba = -(e / k) * (n_a + n_b) - weight * ((e / k) * (ea + ec) - s) - e / k
    return FieldMoments(
        n_a=n_a, anti_a=anti_a, n_b=n_b, anti_b=anti_b,
        ab=complex(ab, 0.0), ba=complex(ba, 0.0),
        a2=0j, b2=0j, adb=0j, bad=0j,
    )


def c2_moment(params: SystemParams, atom: AtomicState) -> float:
    """Steady <c^2> = <ab> + <ba> of the collective mode c = a + b.

    Evaluated from its explicit closed form; agrees with the sum of the
    closed-form <ab> and <ba> to 1e-10.
    """
    if not params.closed_form_valid:
        raise RegimeError("epsilon > kappa/2: steady moments undefined")
    k, e = params.kappa, params.epsilon
    d = k * k - 4.0 * e * e
    if d == 0.0:
        raise DomainError("denominator kappa^2 - 4*epsilon^2 vanishes")
    s = atom.sigma_c.real
    ssum = 2.0 * s
    bracket = (3.0 * e * k * atom.eta_a
               + 4.0 * e * k * atom.eta_b
               + e * k * atom.eta_c
               - (4.0 * e * e * ssum + d * s))
    return (-2.0 * e / k
            - (2.0 * e / k) * (4.0 * e * e / d)
            - (k * params.gamma_c / (d * d)) * bracket)


def _joint_derivative(params: SystemParams):
    """Right-hand side of the coupled 19-slot (atomic + moment) system."""
    gen = atomic_generator(params).matrix
    k, e = params.kappa, params.epsilon
    mix, pop = _field_coefficients(params)

    def deriv(y: np.ndarray) -> np.ndarray:
        out = np.empty_like(y)
        out[:9] = gen @ y[:9]
        sc = complex(y[4].real, y[5].real)
        sc_sum = 2.0 * y[4].real
        ea, eb, ec = y[6].real, y[7].real, y[8].real
        n_a, anti_a, n_b, anti_b = y[9], y[10], y[11], y[12]
        ab, ba, a2, b2, adb, bad = y[13], y[14], y[15], y[16], y[17], y[18]
        out[9] = -k * n_a - e * (ba + np.conj(ba)) + pop * ea - mix * sc_sum
        out[10] = -k * anti_a - e * (ab + np.conj(ab)) + pop * eb + k
        out[11] = -k * n_b - e * (ab + np.conj(ab)) + pop * eb
        out[12] = -k * anti_b - e * (ba + np.conj(ba)) + pop * ec - mix * sc_sum + k
        out[13] = -k * ab - e * (n_a + n_b) - 2.0 * mix * eb - e
        out[14] = -k * ba - e * (n_a + n_b) - mix * (ea + ec) + pop * sc - e
        out[15] = -k * a2 - e * (np.conj(bad) + np.conj(adb))
        out[16] = -k * b2 - e * (bad + adb)
        out[17] = -k * adb - e * (np.conj(a2) + b2)
        out[18] = -k * bad - e * (np.conj(a2) + b2)
        return out

    return deriv


def _joint_radius_bound(params: SystemParams) -> float:
    gen_bound = atomic_generator(params).spectral_radius_bound
    mix, pop = _field_coefficients(params)
    field_bound = params.kappa + 2.0 * params.epsilon + pop + 2.0 * mix
    return max(gen_bound, field_bound)


def integrate_moments(
    m0: FieldMoments,
    atom0: AtomicState,
    params: SystemParams,
    t_final: float,
    dt: float | None = None,
    *,
    allow_large_step: bool = False,
) -> tuple[FieldMoments, AtomicState]:
    """RK4 on the joint atomic + moment system; returns both blocks at t_final."""
    if dt is None:
        dt = 0.01 / max(params.kappa, params.gamma_c)
    check_step(dt, _joint_radius_bound(params), allow_large_step)
    y0 = np.concatenate([atom0.to_vector().astype(complex), m0.to_complex_vector()])
    y = rk4_propagate(_joint_derivative(params), y0, t_final, dt)
    atom = AtomicState.from_vector(y[:9].real)
    return FieldMoments.from_complex_vector(y[9:]), atom

"""Exact master-equation reference on a truncated two-mode Fock space.

The composite space is atom (3 levels) x mode A x mode B with the basis
ordered level-major: index = level*(n_max+1)^2 + n_A*(n_max+1) + n_B and
levels 0 = top, 1 = intermediate, 2 = bottom.  The generator is

    drho/dt = -i[H, rho] + kappa/2 (2 A rho Adag - NA rho - rho NA)
                         + kappa/2 (2 B rho Bdag - NB rho - rho NB)

with H = i eps (AB - Adag Bdag)
       + i g (sa^dag A - Adag sa + sb^dag B - Bdag sb),

sa = |intermediate><top|, sb = |bottom><intermediate|.  Everything here is
brute force and approximation-free up to the photon-number cutoff; it is
used to validate the exact expectation-value identities and the analytic
atom-free moments, and to measure what the adiabatic elimination costs.

Vectorization is row-major throughout: vec(X rho Y) = kron(X, Y^T) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .atom import AtomicState, atomic_steady_state
from .errors import (
    MultiplicityError,
    RegimeError,
    TraceDriftError,
    ValidationError,
)
from .integrators import check_step
from .moments import FieldMoments, steady_moments_closed
from .params import SystemParams

__all__ = [
    "TruncatedSpace",
    "Liouvillian",
    "EhrenfestReport",
    "GapReport",
    "build_liouvillian",
    "evolve",
    "steady_state",
    "extract_moments",
    "ehrenfest_residuals",
    "edge_occupancy",
    "approximation_gap",
    "validate_density_matrix",
    "basis_state",
    "vacuum_bottom_state",
]

LEVELS = {"top": 0, "intermediate": 1, "bottom": 2}

EDGE_OCCUPANCY_LIMIT = 1e-8

# vectorized dimension up to which steady states use the dense
# least-squares route (trace row appended); larger spaces use sparse LU
DENSE_SOLVE_LIMIT = 750


def _mode_lowering(m: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, m)), 1, format="csr")


@dataclass(frozen=True)
class TruncatedSpace:
    """Composite Hilbert space with per-mode cutoff n_max (>= 1)."""

    n_max: int
    _ops: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValidationError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def mode_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 3 * self.mode_dim * self.mode_dim

    def op(self, name: str) -> sp.csr_matrix:
        """Embedded operator by name; built on first use and cached.

        Field: a, b, adag, bdag. Atomic: sigma_a, sigma_b, sigma_c and their
        _dag partners, eta_top, eta_mid, eta_bot. Projectors edge_a, edge_b
        select the cutoff Fock level of each mode.
        """
        if name not in self._ops:
            self._ops[name] = self._build(name)
        return self._ops[name]

    def _build(self, name: str) -> sp.csr_matrix:
        m = self.mode_dim
        eye_atom = sp.identity(3, format="csr")
        eye_mode = sp.identity(m, format="csr")
        low = _mode_lowering(m)
        if name == "a":
            return sp.kron(eye_atom, sp.kron(low, eye_mode), format="csr")
        if name == "b":
            return sp.kron(eye_atom, sp.kron(eye_mode, low), format="csr")
        if name in ("adag", "bdag"):
            return self.op(name[0]).conj().T.tocsr()
        if name.startswith("sigma_") or name.startswith("eta_"):
            atom = sp.csr_matrix(_ATOM_MATRICES[name])
            return sp.kron(atom, sp.identity(m * m, format="csr"), format="csr")
        if name in ("edge_a", "edge_b"):
            proj = np.zeros(m)
            proj[-1] = 1.0
            edge = sp.diags(proj, format="csr")
            inner = sp.kron(edge, eye_mode) if name == "edge_a" else sp.kron(eye_mode, edge)
            return sp.kron(eye_atom, inner, format="csr")
        raise KeyError(name)


def _atom_matrix(row: int, col: int) -> np.ndarray:
    m = np.zeros((3, 3))
    m[row, col] = 1.0
    return m


_ATOM_MATRICES = {
    "sigma_a": _atom_matrix(1, 0),       # |intermediate><top|
    "sigma_a_dag": _atom_matrix(0, 1),
    "sigma_b": _atom_matrix(2, 1),       # |bottom><intermediate|
    "sigma_b_dag": _atom_matrix(1, 2),
    "sigma_c": _atom_matrix(2, 0),       # |bottom><top|
    "sigma_c_dag": _atom_matrix(0, 2),
    "eta_top": _atom_matrix(0, 0),
    "eta_mid": _atom_matrix(1, 1),
    "eta_bot": _atom_matrix(2, 2),
}


class Liouvillian:
    """Precomputed generator; apply() form for evolution, matrix() on demand."""

    def __init__(self, params: SystemParams, space: TruncatedSpace):
        self.params = params
        self.space = space
        A, B = space.op("a"), space.op("b")
        Adag, Bdag = space.op("adag"), space.op("bdag")
        sa, sad = space.op("sigma_a"), space.op("sigma_a_dag")
        sb, sbd = space.op("sigma_b"), space.op("sigma_b_dag")
        e, g, k = params.epsilon, params.g, params.kappa
        self.hamiltonian = (
            1j * e * (A @ B - Adag @ Bdag)
            + 1j * g * (sad @ A - Adag @ sa + sbd @ B - Bdag @ sb)
        ).tocsr()
        self.number_a = (Adag @ A).tocsr()
        self.number_b = (Bdag @ B).tocsr()
        # drift M = -iH - kappa/2 (NA + NB); rho' = M rho + rho Mdag
        #                                          + kappa (A rho Adag + B rho Bdag)
        self._drift = (-1j * self.hamiltonian
                       - 0.5 * k * (self.number_a + self.number_b)).tocsr()
        self._drift_conj = self._drift.conj().tocsr()
        self._a = A
        self._a_conj = A.conj().tocsr()
        self._b = B
        self._b_conj = B.conj().tocsr()

    def apply(self, rho: np.ndarray) -> np.ndarray:
        k = self.params.kappa
        out = self._drift @ rho
        out += (self._drift_conj @ rho.T).T          # rho @ Mdag
        out += k * (self._a_conj @ (self._a @ rho).T).T
        out += k * (self._b_conj @ (self._b @ rho).T).T
        return out

    def matrix(self) -> sp.csr_matrix:
        """Full superoperator on row-major vec(rho)."""
        d = self.space.dim
        eye = sp.identity(d, format="csr")
        k = self.params.kappa
        H, NA, NB = self.hamiltonian, self.number_a, self.number_b
        A, B = self._a, self._b
        L = (-1j * (sp.kron(H, eye) - sp.kron(eye, H.T))
             + k * sp.kron(A, A.conj())
             - 0.5 * k * (sp.kron(NA, eye) + sp.kron(eye, NA.T))
             + k * sp.kron(B, B.conj())
             - 0.5 * k * (sp.kron(NB, eye) + sp.kron(eye, NB.T)))
        return L.tocsr()

    def trace_vector(self) -> np.ndarray:
        return np.identity(self.space.dim, dtype=complex).reshape(-1)

    @property
    def radius_bound(self) -> float:
        """Upper bound on the generator's spectral radius (for step guards)."""
        def two_norm_bound(x: sp.spmatrix) -> float:
            return float(np.sqrt(spla.norm(x, 1) * spla.norm(x, np.inf)))

        k = self.params.kappa
        n = float(self.space.n_max)
        return 2.0 * two_norm_bound(self.hamiltonian) + 2.0 * k * n + k


def build_liouvillian(params: SystemParams, space: TruncatedSpace) -> Liouvillian:
    return Liouvillian(params, space)


def validate_density_matrix(rho: np.ndarray, *, name: str = "rho") -> None:
    """Hermitian to 1e-12, unit trace to 1e-10, spectrum >= -1e-8."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > 1e-12:
        raise ValidationError(f"{name} is not Hermitian: max asymmetry {herm:.2e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-10:
        raise ValidationError(f"{name} trace deviates from 1 by {abs(tr - 1.0):.2e}")
    lowest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)[0])
    if lowest < -1e-8:
        raise ValidationError(f"{name} has eigenvalue {lowest:.2e} < -1e-8")


def basis_state(space: TruncatedSpace, level: str, n_a: int, n_b: int) -> np.ndarray:
    """Pure-state density matrix |level, n_a, n_b><...|."""
    m = space.mode_dim
    if not (0 <= n_a < m and 0 <= n_b < m):
        raise ValidationError(f"occupations must lie in [0, {m - 1}]")
    idx = LEVELS[level] * m * m + n_a * m + n_b
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def vacuum_bottom_state(space: TruncatedSpace) -> np.ndarray:
    """Both modes empty, atom in the bottom level."""
    return basis_state(space, "bottom", 0, 0)


def evolve(
    rho0: np.ndarray,
    L: Liouvillian,
    t_final: float,
    dt: float | None = None,
    *,
    allow_large_step: bool = False,
) -> np.ndarray:
    """Fixed-step RK4 propagation with per-step re-symmetrization.

    The trace is monitored every step; drift beyond 1e-6 aborts with a
    suggestion to reduce dt (a healthy run stays below 1e-9).
    """
    validate_density_matrix(rho0, name="rho0")
    bound = L.radius_bound
    if dt is None:
        dt = 0.5 / bound
    check_step(dt, bound, allow_large_step)
    rho = rho0.astype(complex, copy=True)
    n_full = int(t_final / dt)
    remainder = t_final - n_full * dt
    steps = [dt] * n_full + ([remainder] if remainder > 1e-12 * max(dt, 1.0) else [])
    for h in steps:
        k1 = L.apply(rho)
        k2 = L.apply(rho + 0.5 * h * k1)
        k3 = L.apply(rho + 0.5 * h * k2)
        k4 = L.apply(rho + h * k3)
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = (rho + rho.conj().T) / 2.0
        drift = abs(np.trace(rho).real - 1.0)
        if drift > 1e-6:
            raise TraceDriftError(
                f"trace drifted by {drift:.2e}; reduce dt (currently {h:g})"
            )
    return rho


def _steady_dense(lmat: sp.spmatrix, trace_vec: np.ndarray, dim: int) -> np.ndarray:
    stacked = np.vstack([lmat.toarray(), trace_vec[None, :]])
    rhs = np.zeros(stacked.shape[0], dtype=complex)
    rhs[-1] = 1.0
    solution, _, rank, _ = np.linalg.lstsq(stacked, rhs, rcond=None)
    if rank < dim * dim:
        raise MultiplicityError(
            f"steady-state kernel is degenerate (rank {rank} < {dim * dim})"
        )
    return solution.reshape(dim, dim)


def _steady_sparse(lmat: sp.spmatrix, trace_vec: np.ndarray, dim: int) -> np.ndarray:
    # replace the first row with the trace constraint; valid for a
    # one-dimensional kernel with non-traceless stationary state
    lcsr = lmat.tocsr()
    stacked = sp.vstack(
        [sp.csr_matrix(trace_vec[None, :]), lcsr[1:]], format="csc"
    )
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = 1.0
    try:
        solution = spla.spsolve(stacked, rhs)
    except RuntimeError as exc:
        raise MultiplicityError(f"sparse steady-state solve failed: {exc}") from exc
    return solution.reshape(dim, dim)


def _field_only_steady(params: SystemParams, space: TruncatedSpace) -> np.ndarray:
    """Two-mode steady state with the atom dropped (g = 0 shortcut)."""
    m = space.mode_dim
    low = _mode_lowering(m)
    eye = sp.identity(m, format="csr")
    A = sp.kron(low, eye, format="csr")
    B = sp.kron(eye, low, format="csr")
    H = 1j * params.epsilon * (A @ B - (A @ B).conj().T)
    NA, NB = (A.conj().T @ A).tocsr(), (B.conj().T @ B).tocsr()
    d = m * m
    eye_d = sp.identity(d, format="csr")
    k = params.kappa
    L = (-1j * (sp.kron(H, eye_d) - sp.kron(eye_d, H.T))
         + k * sp.kron(A, A.conj()) - 0.5 * k * (sp.kron(NA, eye_d) + sp.kron(eye_d, NA.T))
         + k * sp.kron(B, B.conj()) - 0.5 * k * (sp.kron(NB, eye_d) + sp.kron(eye_d, NB.T)))
    trace_vec = np.identity(d, dtype=complex).reshape(-1)
    if d * d <= DENSE_SOLVE_LIMIT:
        rho_f = _steady_dense(L, trace_vec, d)
    else:
        rho_f = _steady_sparse(L, trace_vec, d)
    return rho_f


def steady_state(L: Liouvillian, *, atom_level: str = "bottom") -> np.ndarray:
    """Null-space stationary state, trace-normalized; residual below 1e-9.

    With g = 0 the atomic sector is a constant of motion and the composite
    kernel is degenerate; the unique field steady state is then computed on
    the two-mode space alone and tensored with the caller-selected atomic
    level (the standard preparation is the bottom level).
    """
    params, space = L.params, L.space
    if params.g == 0.0:
        rho_f = _field_only_steady(params, space)
        level = np.zeros((3, 3), dtype=complex)
        level[LEVELS[atom_level], LEVELS[atom_level]] = 1.0
        rho = np.kron(level, rho_f)
    else:
        lmat = L.matrix()
        trace_vec = L.trace_vector()
        if space.dim * space.dim <= DENSE_SOLVE_LIMIT:
            rho = _steady_dense(lmat, trace_vec, space.dim)
        else:
            rho = _steady_sparse(lmat, trace_vec, space.dim)
    rho = (rho + rho.conj().T) / 2.0
    rho /= np.trace(rho).real
    residual = float(np.max(np.abs(L.apply(rho))))
    if not residual <= 1e-9:  # also catches NaN from a singular solve
        raise MultiplicityError(
            f"stationary residual {residual:.2e} > 1e-9; kernel may be degenerate"
        )
    return rho


def _expval(rho: np.ndarray, op: sp.spmatrix) -> complex:
    # Tr(rho X) as an elementwise contraction against the sparse operator
    return complex(op.multiply(rho.T).sum())


def edge_occupancy(rho: np.ndarray, space: TruncatedSpace) -> float:
    """Largest per-mode probability of sitting at the Fock cutoff level."""
    return max(
        _expval(rho, space.op("edge_a")).real,
        _expval(rho, space.op("edge_b")).real,
    )


def extract_moments(
    rho: np.ndarray, space: TruncatedSpace
) -> tuple[FieldMoments, AtomicState]:
    """All ten field moments and six atomic expectations by trace.

    <ab> equals <ba> and <adag b> equals <b adag> here, exactly: the mode
    operators commute.  The split values produced by the eliminated moment
    system are an artifact of its derivation, not of the state.
    """
    A, B = space.op("a"), space.op("b")
    Adag, Bdag = space.op("adag"), space.op("bdag")
    ab = _expval(rho, (A @ B).tocsr())
    adb = _expval(rho, (Adag @ B).tocsr())
    moments = FieldMoments(
        n_a=_expval(rho, (Adag @ A).tocsr()).real,
        anti_a=_expval(rho, (A @ Adag).tocsr()).real,
        n_b=_expval(rho, (Bdag @ B).tocsr()).real,
        anti_b=_expval(rho, (B @ Bdag).tocsr()).real,
        ab=ab,
        ba=ab,
        a2=_expval(rho, (A @ A).tocsr()),
        b2=_expval(rho, (B @ B).tocsr()),
        adb=adb,
        bad=adb,
    )
    atom = AtomicState(
        sigma_a=_expval(rho, space.op("sigma_a")),
        sigma_b=_expval(rho, space.op("sigma_b")),
        sigma_c=_expval(rho, space.op("sigma_c")),
        eta_a=_expval(rho, space.op("eta_top")).real,
        eta_b=_expval(rho, space.op("eta_mid")).real,
        eta_c=_expval(rho, space.op("eta_bot")).real,
    )
    return moments, atom


@dataclass(frozen=True)
class EhrenfestReport:
    """Absolute residuals of the exact expectation-value identities."""

    residuals: dict[str, float]
    edge_occupancy: float
    cutoff_limited: bool

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def ehrenfest_residuals(
    rho: np.ndarray, params: SystemParams, space: TruncatedSpace
) -> EhrenfestReport:
    """|Tr(L(rho) X) - RHS(moments of rho)| for all 18 tracked identities.

    The right-hand sides include the exact atom-field cross expectations
    (e.g. <sigma_a^dag a>) evaluated directly from rho, so each residual is
    an algebraic identity of the generator, zero up to cutoff-edge leakage.
    States with edge occupancy above 1e-8 are flagged cutoff-limited.
    """
    L = build_liouvillian(params, space)
    rhodot = L.apply(rho)
    k, e, g = params.kappa, params.epsilon, params.g

    def op(name: str) -> sp.spmatrix:
        return space.op(name)

    A, B, Adag, Bdag = op("a"), op("b"), op("adag"), op("bdag")
    sa, sad = op("sigma_a"), op("sigma_a_dag")
    sb, sbd = op("sigma_b"), op("sigma_b_dag")
    sc = op("sigma_c")
    ha, hb, hc = op("eta_top"), op("eta_mid"), op("eta_bot")

    def ev(mat: sp.spmatrix) -> complex:
        return _expval(rho, mat)

    def lhs(mat: sp.spmatrix) -> complex:
        return _expval(rhodot, mat)

    NA, AAd = (Adag @ A).tocsr(), (A @ Adag).tocsr()
    NB, BBd = (Bdag @ B).tocsr(), (B @ Bdag).tocsr()
    AB, A2, B2 = (A @ B).tocsr(), (A @ A).tocsr(), (B @ B).tocsr()
    AdB = (Adag @ B).tocsr()
    sadA, adsa = (sad @ A).tocsr(), (Adag @ sa).tocsr()
    sbdB, bdsb = (sbd @ B).tocsr(), (Bdag @ sb).tocsr()
    saB, asb = (sa @ B).tocsr(), (A @ sb).tocsr()
    asa, bsb = (A @ sa).tocsr(), (B @ sb).tocsr()
    sadB, adsb = (sad @ B).tocsr(), (Adag @ sb).tocsr()
    bdsc, adsc = (Bdag @ sc).tocsr(), (Adag @ sc).tocsr()
    sbA = (sb @ A).tocsr()
    hbhaA = ((hb - ha) @ A).tocsr()
    hchbB = ((hc - hb) @ B).tocsr()

    pump = ev(sbdB) + ev(bdsb)
    stim = ev(sadA) + ev(adsa)
    residuals = {
        "a": lhs(A) - (-0.5 * k * ev(A) - e * np.conj(ev(B)) - g * ev(sa)),
        "b": lhs(B) - (-0.5 * k * ev(B) - e * np.conj(ev(A)) - g * ev(sb)),
        "n_a": lhs(NA) - (-k * ev(NA) - e * 2.0 * ev(AB).real - g * stim),
        "anti_a": lhs(AAd) - (-k * ev(AAd) - e * 2.0 * ev(AB).real - g * stim + k),
        "n_b": lhs(NB) - (-k * ev(NB) - e * 2.0 * ev(AB).real - g * pump),
        "anti_b": lhs(BBd) - (-k * ev(BBd) - e * 2.0 * ev(AB).real - g * pump + k),
        "ab": lhs(AB) - (-k * ev(AB) - e * (ev(NA) + ev(NB))
                         - g * (ev(saB) + ev(asb)) - e),
        "ba": lhs(AB) - (-k * ev(AB) - e * (ev(NA) + ev(NB))
                         - g * (ev(saB) + ev(asb)) - e),
        "a2": lhs(A2) - (-k * ev(A2) - e * 2.0 * np.conj(ev(AdB))
                         - g * 2.0 * ev(asa)),
        "b2": lhs(B2) - (-k * ev(B2) - e * 2.0 * ev(AdB) - g * 2.0 * ev(bsb)),
        "adb": lhs(AdB) - (-k * ev(AdB) - e * (np.conj(ev(A2)) + ev(B2))
                           - g * (ev(sadB) + ev(adsb))),
        "bad": lhs(AdB) - (-k * ev(AdB) - e * (np.conj(ev(A2)) + ev(B2))
                           - g * (ev(sadB) + ev(adsb))),
        "sigma_a": lhs(sa) - g * (ev(hbhaA) + ev(bdsc)),
        "sigma_b": lhs(sb) - g * (-ev(adsc) + ev(hchbB)),
        "sigma_c": lhs(sc) - g * (ev(sbA) - ev(saB)),
        "eta_a": lhs(ha) - g * stim,
        "eta_b": lhs(hb) - g * (pump - stim),
        "eta_c": lhs(hc) - (-g * pump),
    }
    edge = edge_occupancy(rho, space)
    return EhrenfestReport(
        residuals={name: abs(value) for name, value in residuals.items()},
        edge_occupancy=edge,
        cutoff_limited=edge >= EDGE_OCCUPANCY_LIMIT,
    )


@dataclass(frozen=True)
class GapReport:
    """Oracle-vs-approximation differences; purely diagnostic."""

    oracle_moments: FieldMoments
    oracle_atom: AtomicState
    approx_moments: FieldMoments
    approx_atom: AtomicState
    field_gap: dict[str, float]
    atomic_gap: dict[str, float]
    edge_occupancy: float

    @property
    def max_field_gap(self) -> float:
        return max(self.field_gap.values())


def approximation_gap(params: SystemParams, space: TruncatedSpace) -> GapReport:
    """Componentwise oracle-vs-eliminated-steady-state differences.

    No pass/fail threshold: the gap measures what the slaving of the field
    to the atom costs, on top of truncation.
    """
    if not params.dynamics_valid:
        raise RegimeError("epsilon >= kappa/2: no comparable steady regime")
    L = build_liouvillian(params, space)
    rho = steady_state(L)
    oracle_m, oracle_atom = extract_moments(rho, space)
    approx_atom = atomic_steady_state(params)
    approx_m = steady_moments_closed(params, approx_atom)

    field_gap = {
        name: abs(getattr(oracle_m, name) - getattr(approx_m, name))
        for name in ("n_a", "anti_a", "n_b", "anti_b", "ab", "ba",
                     "a2", "b2", "adb", "bad")
    }
    atomic_gap = {
        name: abs(getattr(oracle_atom, name) - getattr(approx_atom, name))
        for name in ("sigma_a", "sigma_b", "sigma_c", "eta_a", "eta_b", "eta_c")
    }
    edge = edge_occupancy(rho, space)
    return GapReport(
        oracle_moments=oracle_m,
        oracle_atom=oracle_atom,
        approx_moments=approx_m,
        approx_atom=approx_atom,
        field_gap=field_gap,
        atomic_gap=atomic_gap,
        edge_occupancy=edge,
    )

"""Interaction-picture drive analysis: averaged first Magnus term, V matrix,
dispersion estimates and the perturbative dispersion identity.

All operations assume the symmetric drive mu = mu', for which the drive
collapses to a single-parameter form -(mu + mu')*cos(phi)*cos(tau); the
combined strength mu + mu' is the perturbation parameter used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import ModelParams
from .floquet import state_energy_stats
from .qspace import QuantumSpace, build_h1, hermitian_eigenbasis

TWO_PI = 2.0 * math.pi

RESONANCE_TOL = 1e-9
DEGENERACY_WARNING_GAP = 1e-8


@dataclass(frozen=True)
class EigenBasis:
    """Sorted eigensystem of the unperturbed Hamiltonian operator."""

    energies: np.ndarray
    vectors: np.ndarray  # orthonormal columns

    @property
    def n_dim(self) -> int:
        return len(self.energies)

    @property
    def min_gap(self) -> float:
        return float(np.diff(self.energies).min())

    @property
    def possibly_degenerate(self) -> bool:
        return self.min_gap < DEGENERACY_WARNING_GAP

    def to_eigenbasis(self, op: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ op @ self.vectors


def eigenbasis(h0: np.ndarray) -> EigenBasis:
    energies, vectors = hermitian_eigenbasis(h0)
    return EigenBasis(energies=energies, vectors=vectors)


def effective_drive_strength(params: ModelParams) -> float:
    """Single-parameter drive strength mu + mu'; requires mu = mu'."""
    if not math.isclose(params.mu, params.mu_prime, rel_tol=0.0, abs_tol=1e-15):
        raise ValueError(
            "interaction-picture analysis supports only the symmetric drive mu = mu'"
        )
    return params.mu + params.mu_prime


def interaction_h1(basis: EigenBasis, params: ModelParams, space: QuantumSpace,
                   tau: float) -> np.ndarray:
    """Drive conjugated into the co-rotating frame of h0 at time tau.

    exp(+i(N/2pi) h0 tau) h1(tau) exp(-i(N/2pi) h0 tau), returned in the
    angle basis; Hermitian since the conjugation is unitary.
    """
    effective_drive_strength(params)
    phases = np.exp(1j * (space.n_dim / TWO_PI) * basis.energies * tau)
    h1 = build_h1(params, space, tau)
    v = basis.vectors
    inner = (v.conj().T @ h1 @ v) * np.outer(phases, phases.conj())
    return v @ inner @ v.conj().T


def v_matrix(basis: EigenBasis, space: QuantumSpace) -> np.ndarray:
    """Period-averaged drive matrix in the h0 eigenbasis, per unit strength.

    V[j, k] = (i/2pi)(e^{iN E_jk} - 1) * b * C_jk / (b^2 - 1) * e^{-iN E_jk}
    with b = N*E_jk/(2pi) and C = <v_j|cos(phi)|v_k>; the diagonal vanishes
    identically. Pairs with |b^2 - 1| below the resonance tolerance make the
    averaging ill-defined and raise.
    """
    n = space.n_dim
    e = basis.energies
    v = basis.vectors
    cos_phi = np.cos(space.angles)
    c = v.conj().T @ (cos_phi[:, None] * v)
    e_jk = e[:, None] - e[None, :]
    b = n * e_jk / TWO_PI
    denom = b * b - 1.0
    bad = np.argwhere(np.abs(denom) < RESONANCE_TOL)
    if len(bad):
        pairs = ", ".join(f"({i},{j})" for i, j in bad[:8])
        raise ValueError(
            f"resonant denominator |(N*E_jk/2pi)^2 - 1| < {RESONANCE_TOL} at pairs {pairs}"
        )
    out = (1j / TWO_PI) * (np.exp(1j * n * e_jk) - 1.0) * b * c / denom \
        * np.exp(-1j * n * e_jk)
    np.fill_diagonal(out, 0.0)
    return out


def dispersion_estimate(v: np.ndarray, mu: float) -> np.ndarray:
    """Per-state dispersion estimate mu * sqrt(sum_{k != j} |V_jk|^2)."""
    sq = (np.abs(v) ** 2).sum(axis=1) - np.abs(np.diag(v)) ** 2
    return mu * np.sqrt(np.clip(sq, 0.0, None))


def _simpson_weights(n_intervals: int) -> np.ndarray:
    if n_intervals % 2 != 0 or n_intervals < 2:
        raise ValueError("Simpson rule needs an even, positive interval count")
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (TWO_PI / n_intervals) / 3.0


def average_interaction_drive(basis: EigenBasis, params: ModelParams,
                              space: QuantumSpace,
                              n_intervals: int = 512) -> np.ndarray:
    """(1/2pi) * integral of the co-rotating drive over one period (h0 eigenbasis).

    Composite-Simpson quadrature on a uniform tau grid; this is the numeric
    route to the same average that v_matrix evaluates in closed form.
    """
    mu_eff = effective_drive_strength(params)
    n = space.n_dim
    e = basis.energies
    v = basis.vectors
    cos_phi = np.cos(space.angles)
    c = v.conj().T @ (cos_phi[:, None] * v)
    b = n * (e[:, None] - e[None, :]) / TWO_PI
    weights = _simpson_weights(n_intervals)
    taus = np.linspace(0.0, TWO_PI, n_intervals + 1)
    acc = np.zeros((n, n), dtype=complex)
    for tau, wt in zip(taus, weights):
        acc += (wt * math.cos(tau)) * np.exp(1j * b * tau)
    return (-mu_eff / TWO_PI) * c * acc


def ergodic_width_estimate(basis: EigenBasis, params: ModelParams,
                           space: QuantumSpace, e_s: float,
                           n_intervals: int = 512) -> float:
    """Energy width of the ergodic region seeded at the separatrix state.

    Picks the eigenstate with energy closest to e_s (lowest index on ties) and
    returns the root-sum-square of the period-averaged co-rotating drive
    matrix elements out of that state, computed by quadrature.
    """
    mu_eff = effective_drive_strength(params)
    if mu_eff == 0.0:
        return 0.0
    s = int(np.argmin(np.abs(basis.energies - e_s)))
    n = space.n_dim
    e = basis.energies
    v = basis.vectors
    cos_phi = np.cos(space.angles)
    c_row = (v[:, s].conj() * cos_phi) @ v
    b_row = n * (e[s] - e) / TWO_PI
    weights = _simpson_weights(n_intervals)
    taus = np.linspace(0.0, TWO_PI, n_intervals + 1)
    acc = np.zeros(n, dtype=complex)
    for tau, wt in zip(taus, weights):
        acc += (wt * math.cos(tau)) * np.exp(1j * b_row * tau)
    row = (-mu_eff / TWO_PI) * c_row * acc
    row[s] = 0.0
    return float(np.linalg.norm(row))


def magnus_series_coefficient(j: int) -> float:
    """(1/j!) * integral_0^{2pi} tau^j cos(tau) dtau, in closed form."""
    total = -math.sin(j * math.pi / 2.0)
    for k in range(j + 1):
        total += TWO_PI ** (j - k) / math.factorial(j - k) * math.sin(k * math.pi / 2.0)
    return total


def magnus_omega1_series(h0: np.ndarray, space: QuantumSpace, j_max: int,
                         mu: float = 1.0) -> np.ndarray:
    """Partial sum of the commutator series for the period-averaged drive.

    -(mu/2pi) * sum_{j<=j_max} (iN/2pi)^j c_j [(h0)^j, cos(phi)] with nested
    commutators [(h0)^j, .] = [h0, [h0, ...]] and c_j from
    magnus_series_coefficient. The j = 0 and j = 1 terms vanish; each retained
    term is Hermitian, so the partial sum is. Exposed for diagnostics only:
    the terms grow before they shrink, so low-order sums can be far from the
    quadrature average.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    n = space.n_dim
    cos_phi = np.diag(np.cos(space.angles)).astype(complex)
    acc = np.zeros_like(cos_phi)
    nested = cos_phi
    factor = 1j * n / TWO_PI
    for j in range(1, j_max + 1):
        nested = h0 @ nested - nested @ h0
        if j < 2:
            continue
        acc = acc + (factor ** j * magnus_series_coefficient(j)) * nested
    return (-mu / TWO_PI) * acc


@dataclass(frozen=True)
class ConvergenceReport:
    """Magnus convergence bound (N/2pi) * integral ||h1_I(tau)|| dtau vs pi."""

    bound: float
    converges: bool


def magnus_convergence_report(params: ModelParams, space: QuantumSpace,
                              n_intervals: int = 512) -> ConvergenceReport:
    """Evaluate the convergence bound for the averaged-drive expansion.

    The co-rotating conjugation preserves the spectral norm, and the drive is
    diagonal, so ||h1_I(tau)||_2 = max_j |h1(tau)_jj| exactly.
    """
    weights = _simpson_weights(n_intervals)
    taus = np.linspace(0.0, TWO_PI, n_intervals + 1)
    from .qspace import drive_values

    total = 0.0
    for tau, wt in zip(taus, weights):
        total += wt * np.abs(drive_values(params, space, tau)).max()
    bound = (space.n_dim / TWO_PI) * total
    return ConvergenceReport(bound=float(bound), converges=bool(bound < math.pi))


@dataclass(frozen=True)
class DispersionCheck:
    exact: np.ndarray
    formula: np.ndarray
    degenerate_warning: bool


def perturbative_dispersion_check(h0: np.ndarray, a: np.ndarray,
                                  mu: float) -> DispersionCheck:
    """Exact vs second-order dispersion of h0 in the eigenstates of h0 + mu*a.

    formula[j] = mu * sqrt(sum_{k != j} |<v_j|a|v_k>|^2) from the eigenbasis of
    h0 alone; exact[j] comes from state_energy_stats on the perturbed
    eigenstates, matched by ascending energy order. A near-degenerate h0
    spectrum (gap < 1e-8) invalidates the expansion and sets the warning flag.
    """
    if np.abs(a - a.conj().T).max() > 1e-12:
        raise ValueError("perturbation must be Hermitian")
    basis = eigenbasis(h0)
    a_eig = basis.to_eigenbasis(a)
    sq = (np.abs(a_eig) ** 2).sum(axis=1) - np.abs(np.diag(a_eig)) ** 2
    formula = mu * np.sqrt(np.clip(sq, 0.0, None))
    _, w = hermitian_eigenbasis(h0 + mu * a)
    exact = np.array([state_energy_stats(h0, w[:, j])[1] for j in range(w.shape[1])])
    return DispersionCheck(exact=exact, formula=formula,
                           degenerate_warning=basis.possibly_degenerate)

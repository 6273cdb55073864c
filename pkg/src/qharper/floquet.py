"""Floquet propagator over one drive period and its eigenstate diagnostics.

The one-period unitary is built by a symmetric Suzuki-Trotter product that
alternates kinetic half-steps (diagonal in the Fourier basis, applied by FFT)
with full potential steps (diagonal in the angle basis). Eigenstates are
ordered by the expectation value of the unperturbed Hamiltonian, and each
carries that expectation and its standard deviation as ergodicity measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg

from .classical import ModelParams
from .qspace import QuantumSpace, check_unitary, drive_values, hermitian_eigenbasis

TWO_PI = 2.0 * math.pi

# Quasi-energies closer than this are treated as one degenerate cluster and
# given an energy-adapted basis (see floquet_eigensystem).
DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class FloquetRecord:
    """One propagator eigenstate with its energy statistics."""

    index: int
    quasi_energy: float          # principal argument in (-pi, pi]
    mu_h0: float
    sigma_h0: float
    state: np.ndarray


def default_trotter_steps(space: QuantumSpace) -> int:
    return 5 * space.n_dim


def _kinetic_phases(params: ModelParams, space: QuantumSpace, n_tau: int):
    kinetic = params.a * (1.0 - np.cos(space.angles))
    half = np.exp(-0.5j * (space.n_dim / n_tau) * kinetic)
    return half


def _apply_fourier_diagonal(m: np.ndarray, phases: np.ndarray) -> np.ndarray:
    # Q diag(phases) Q^dag acting on columns of m; Q_jk = omega^(jk)/sqrt(N)
    # maps to an inverse FFT, its adjoint to a forward FFT.
    freq = scipy.fft.fft(m, axis=0, workers=-1)
    freq *= phases[:, None]
    return scipy.fft.ifft(freq, axis=0, workers=-1, overwrite_x=True)


def _trotter_product(params: ModelParams, space: QuantumSpace, n_tau: int,
                     tau_s: float, n_steps: int) -> np.ndarray:
    """First n_steps factors of the symmetric product, with trailing half-steps.

    Each factor is exp(-i c A/2) exp(-i c B(tau_j)) exp(-i c A/2) with
    c = N/n_tau and tau_j = tau_s + 2*pi*j/n_tau (left endpoint of the step);
    interior kinetic half-steps are fused into full steps, halving the FFT
    count without changing the operator product.
    """
    n = space.n_dim
    half = _kinetic_phases(params, space, n_tau)
    full = half * half
    c = n / n_tau
    u = _apply_fourier_diagonal(np.eye(n, dtype=complex), half)
    for j in range(n_steps):
        tau_j = tau_s + TWO_PI * j / n_tau
        potential = np.exp(-1j * c * drive_values_with_static(params, space, tau_j))
        u = potential[:, None] * u
        u = _apply_fourier_diagonal(u, full if j < n_steps - 1 else half)
    return u


def drive_values_with_static(params: ModelParams, space: QuantumSpace,
                             tau: float) -> np.ndarray:
    """Full angle-diagonal potential -eps*cos(phi) + drive at time tau."""
    return -params.epsilon * np.cos(space.angles) + drive_values(params, space, tau)


def trotter_propagator(params: ModelParams, space: QuantumSpace,
                       n_tau: int | None = None, tau_s: float = 0.0,
                       validate: bool = True) -> np.ndarray:
    """One-period propagator from tau_s to tau_s + 2*pi, n_tau Trotter steps."""
    n_tau = default_trotter_steps(space) if n_tau is None else n_tau
    if n_tau < 1:
        raise ValueError("n_tau must be >= 1")
    u = _trotter_product(params, space, n_tau, tau_s, n_tau)
    return check_unitary(u) if validate else u


def partial_propagator(params: ModelParams, space: QuantumSpace, tau_end: float,
                       n_tau: int | None = None) -> np.ndarray:
    """Propagator from 0 to tau_end on the same step grid as the full product.

    tau_end is snapped to the nearest multiple of 2*pi/n_tau; at tau_end=2*pi
    this reproduces trotter_propagator(..., tau_s=0) exactly.
    """
    n_tau = default_trotter_steps(space) if n_tau is None else n_tau
    if not 0.0 <= tau_end <= TWO_PI + 1e-12:
        raise ValueError("tau_end must lie in [0, 2*pi]")
    n_steps = int(round(tau_end / (TWO_PI / n_tau)))
    if n_steps == 0:
        return np.eye(space.n_dim, dtype=complex)
    return _trotter_product(params, space, n_tau, 0.0, n_steps)


def exact_unperturbed_propagator(params: ModelParams, space: QuantumSpace,
                                 h0: np.ndarray) -> np.ndarray:
    """exp(-i N h0): the closed-form one-period propagator when mu = mu' = 0."""
    energies, vectors = hermitian_eigenbasis(h0)
    return (vectors * np.exp(-1j * space.n_dim * energies)) @ vectors.conj().T


def floquet_propagator(params: ModelParams, space: QuantumSpace, h0: np.ndarray,
                       n_tau: int | None = None, tau_s: float = 0.0) -> np.ndarray:
    """Pipeline entry point: exact exponential for a static drive, Trotter else."""
    if params.mu == 0.0 and params.mu_prime == 0.0:
        return exact_unperturbed_propagator(params, space, h0)
    return trotter_propagator(params, space, n_tau, tau_s)


def state_energy_stats(h0: np.ndarray, state: np.ndarray) -> tuple[float, float]:
    """Expectation and standard deviation of h0 in a normalized state.

    The variance is evaluated in centered form ||(h0 - mu)state||^2; the
    textbook <h0^2> - <h0>^2 difference cancels catastrophically near
    eigenstates. Variances within -1e-12 of zero clamp to zero.
    """
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state must be normalized, |norm - 1| = {abs(norm - 1.0):.3e}")
    w = h0 @ state
    mu = float(np.real(np.vdot(state, w)))
    r = w - mu * state
    var = float(np.real(np.vdot(r, r)))
    if var < -1e-12:
        raise ValueError(f"negative variance {var:.3e} beyond rounding tolerance")
    return mu, math.sqrt(max(var, 0.0))


def _cluster_indices(lam: np.ndarray, gap: float) -> list[np.ndarray]:
    order = np.argsort(lam)
    lam_sorted = lam[order]
    bounds = [0]
    for i, g in enumerate(np.diff(lam_sorted)):
        if g > gap:
            bounds.append(i + 1)
    clusters = [order[a:b] for a, b in zip(bounds, bounds[1:] + [len(lam)])]
    # the circle wraps at +-pi: merge the first and last clusters if adjacent
    if len(clusters) > 1 and TWO_PI - (lam_sorted[-1] - lam_sorted[0]) <= gap:
        clusters[0] = np.concatenate([clusters[-1], clusters[0]])
        clusters.pop()
    return clusters


def floquet_eigensystem(u: np.ndarray, h0: np.ndarray,
                        degeneracy_gap: float = DEGENERACY_GAP) -> list[FloquetRecord]:
    """Eigenstates of a unitary propagator, sorted by <h0>, ties by quasi-energy.

    Uses the complex Schur form so the basis is orthonormal even across
    (near-)degenerate quasi-energies. Within a degenerate cluster the h0
    projection is re-diagonalized to pick the energy-adapted representatives;
    the rotation is kept only if it does not degrade the eigen-residual, so
    genuinely coupled near-collisions in perturbed spectra are left alone.
    """
    try:
        t, w = scipy.linalg.schur(u, output="complex")
    except Exception as exc:  # pragma: no cover - scipy raises only on hard failures
        cond = np.linalg.cond(u)
        raise RuntimeError(f"Schur decomposition failed (cond(U) = {cond:.3e})") from exc
    w = w.copy()
    lam = np.angle(np.diag(t))
    for idx in _cluster_indices(lam, degeneracy_gap):
        if len(idx) < 2:
            continue
        wc = w[:, idx]
        old_res = np.abs(u @ wc - wc * np.exp(1j * lam[idx])[None, :]).max()
        proj = wc.conj().T @ (h0 @ wc)
        proj = (proj + proj.conj().T) / 2.0
        _, rot = np.linalg.eigh(proj)
        wn = wc @ rot
        lam_new = np.angle(np.einsum("ij,ij->j", wn.conj(), u @ wn))
        new_res = np.abs(u @ wn - wn * np.exp(1j * lam_new)[None, :]).max()
        if new_res <= max(old_res, 1e-13) * 4.0:
            w[:, idx] = wn
            lam[idx] = lam_new
    # deterministic phases
    lead_idx = np.abs(w).argmax(axis=0)
    lead = w[lead_idx, np.arange(w.shape[1])]
    w = w * (np.conj(lead) / np.abs(lead))[None, :]

    h0w = h0 @ w
    mu = np.real(np.einsum("ij,ij->j", w.conj(), h0w))
    resid = h0w - w * mu[None, :]
    var = np.real(np.einsum("ij,ij->j", resid.conj(), resid))
    sigma = np.sqrt(np.clip(var, 0.0, None))
    order = np.lexsort((lam, mu))
    return [
        FloquetRecord(index=j, quasi_energy=float(lam[i]), mu_h0=float(mu[i]),
                      sigma_h0=float(sigma[i]), state=w[:, i].copy())
        for j, i in enumerate(order)
    ]


def subspace_split(records: list[FloquetRecord],
                   threshold: float = 0.18) -> tuple[list[FloquetRecord], list[FloquetRecord]]:
    """Partition records into (regular, ergodic) by sigma_h0 <= / > threshold."""
    regular = [r for r in records if r.sigma_h0 <= threshold]
    ergodic = [r for r in records if r.sigma_h0 > threshold]
    return regular, ergodic

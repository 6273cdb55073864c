"""Discrete N-dimensional quantum space for the perturbed Harper model.

Angle basis |j> carries phi_j = 2*pi*j/N; the momentum basis is its discrete
Fourier transform. Clock/shift operators, the Harper Hamiltonian operator and
its drive, parity/point operators and the discrete Weyl transform (odd N).
All operators are dense complex128 arrays in the angle basis, row-major.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class QuantumSpace:
    """Dimension N with derived effective Planck constant 2*pi/N."""

    n_dim: int

    def __post_init__(self):
        if self.n_dim < 2:
            raise ValueError("n_dim must be >= 2")

    @property
    def h_tilde(self) -> float:
        return TWO_PI / self.n_dim

    @property
    def omega(self) -> complex:
        return np.exp(2j * math.pi / self.n_dim)

    @property
    def angles(self) -> np.ndarray:
        """Grid 2*pi*j/N shared by the angle and momentum spectra."""
        return TWO_PI * np.arange(self.n_dim) / self.n_dim


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    if np.abs(m - m.conj().T).max() >= tol:
        raise ValueError("matrix failed the Hermitian tag check")
    return m


def check_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    n = m.shape[0]
    if np.abs(m.conj().T @ m - np.eye(n)).max() >= tol:
        raise ValueError("matrix failed the unitary tag check")
    return m


def dft_matrix(space: QuantumSpace) -> np.ndarray:
    """Unitary DFT with entries omega^(jk)/sqrt(N)."""
    n = space.n_dim
    j = np.arange(n)
    return check_unitary(np.exp(2j * math.pi * np.outer(j, j) / n) / math.sqrt(n))


def angle_operator(space: QuantumSpace) -> np.ndarray:
    """Diagonal angle operator with eigenvalues 2*pi*j/N."""
    return np.diag(space.angles).astype(complex)


def momentum_operator(space: QuantumSpace) -> np.ndarray:
    """Momentum operator, diagonal in the Fourier basis with the same grid."""
    q = dft_matrix(space)
    return check_hermitian(q @ np.diag(space.angles).astype(complex) @ q.conj().T,
                           tol=1e-10)


def clock_shift(space: QuantumSpace) -> tuple[np.ndarray, np.ndarray]:
    """(X, Z): cyclic shift |n+1><n| and clock diag(omega^n)."""
    n = space.n_dim
    x = np.zeros((n, n), dtype=complex)
    x[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    z = np.diag(space.omega ** np.arange(n))
    return x, z


def cos_momentum(space: QuantumSpace) -> np.ndarray:
    """cos of the momentum operator, (X + X^dag)/2."""
    x, _ = clock_shift(space)
    return (x + x.conj().T) / 2.0


def sin_momentum(space: QuantumSpace) -> np.ndarray:
    x, _ = clock_shift(space)
    return (x - x.conj().T) / 2.0j


def cos_angle(space: QuantumSpace) -> np.ndarray:
    return np.diag(np.cos(space.angles)).astype(complex)


def sin_angle(space: QuantumSpace) -> np.ndarray:
    return np.diag(np.sin(space.angles)).astype(complex)


def build_h0(params, space: QuantumSpace) -> np.ndarray:
    """Unperturbed Harper operator a(1 - cos p) - eps*cos(phi).

    In the angle basis this is the cyclic tridiagonal with diagonal
    a - eps*cos(2*pi*j/N) and off-diagonal -a/2 (corners wrap).
    """
    n = space.n_dim
    if n < 3:
        raise ValueError("build_h0 requires n_dim >= 3")
    alpha = params.a - params.epsilon * np.cos(space.angles)
    beta = -params.a / 2.0
    m = np.zeros((n, n), dtype=complex)
    m[np.arange(n), np.arange(n)] = alpha
    idx = np.arange(n - 1)
    m[idx, idx + 1] = beta
    m[idx + 1, idx] = beta
    m[0, n - 1] += beta
    m[n - 1, 0] += beta
    return check_hermitian(m)


def build_h1(params, space: QuantumSpace, tau: float) -> np.ndarray:
    """Drive operator -mu*cos(phi - tau) - mu'*cos(phi + tau), diagonal."""
    return np.diag(drive_values(params, space, tau)).astype(complex)


def drive_values(params, space: QuantumSpace, tau: float) -> np.ndarray:
    """Diagonal of build_h1 on the angle grid."""
    phi = space.angles
    return (-params.mu * np.cos(phi - tau)
            - params.mu_prime * np.cos(phi + tau))


def parity_operator(space: QuantumSpace) -> np.ndarray:
    """Reflection |x> -> |-x mod N>."""
    n = space.n_dim
    p = np.zeros((n, n), dtype=complex)
    p[np.arange(n), (-np.arange(n)) % n] = 1.0
    return p


def displacement(space: QuantumSpace, k: int, l: int) -> np.ndarray:
    """Phase-space translation omega^(-kl/2) Z^k X^l.

    The square root of omega is fixed globally as exp(i*pi/N), so the
    prefactor is exp(-i*pi*k*l/N) with the integer product k*l.
    """
    n = space.n_dim
    if not (0 <= k < n and 0 <= l < n):
        raise ValueError("displacement indices must lie in [0, N-1]")
    x, z = clock_shift(space)
    phase = np.exp(-1j * math.pi * (k * l) / n)
    return phase * np.linalg.matrix_power(z, k) @ np.linalg.matrix_power(x, l)


def displacement_apply(space: QuantumSpace, k: int, l: int,
                       vec: np.ndarray) -> np.ndarray:
    """displacement(space, k, l) @ vec without forming the matrix."""
    n = space.n_dim
    rolled = np.roll(vec, l)
    phases = np.exp(2j * math.pi * k * np.arange(n) / n)
    return np.exp(-1j * math.pi * (k * l) / n) * phases * rolled


def point_operator(space: QuantumSpace, n: int, k: int) -> np.ndarray:
    """Phase-space point operator (1/N) D(k,n) P D(k,n)^dag.

    Equivalently (1/N) sum_x |n+x><n-x| omega^(2xk); these operators form an
    orthonormal operator basis only for odd N.
    """
    dim = space.n_dim
    if not (0 <= n < dim and 0 <= k < dim):
        raise ValueError("point-operator indices must lie in [0, N-1]")
    a = np.zeros((dim, dim), dtype=complex)
    x = np.arange(dim)
    a[(n + x) % dim, (n - x) % dim] += space.omega ** ((2 * x * k) % dim)
    return a / dim


def weyl_quantize(space: QuantumSpace, grid: np.ndarray) -> np.ndarray:
    """Operator sum_{k,n} grid[k, n] * A_nk for odd N.

    grid[k, n] is the phase-space function at momentum index k, angle index n.
    For a given matrix entry (r, c) the point-operator sum collapses to a
    single (x, n) pair because 2 is invertible mod odd N, giving
    out[r, c] = G[(r - c) mod N, (inv2*(r + c)) mod N] with G the inverse DFT
    of the grid along its momentum axis.
    """
    dim = space.n_dim
    if dim % 2 == 0:
        raise ValueError("weyl_quantize supports odd dimensions only")
    grid = np.asarray(grid)
    if grid.shape != (dim, dim):
        raise ValueError(f"grid must be {dim}x{dim}")
    g = np.fft.ifft(grid.astype(complex), axis=0)  # G[m, n] = (1/N) sum_k grid[k,n] w^{mk}
    r = np.arange(dim)[:, None]
    c = np.arange(dim)[None, :]
    inv2 = pow(2, -1, dim)
    return g[(r - c) % dim, (inv2 * (r + c)) % dim]


def hermitian_eigenbasis(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigensystem of a Hermitian matrix with deterministic phases.

    Each eigenvector is rotated so its largest-magnitude component is real
    and positive (first index wins ties), making repeated runs byte-stable.
    """
    energies, vectors = np.linalg.eigh(m)
    idx = np.abs(vectors).argmax(axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    # |lead| >= 1/sqrt(N) for unit columns, so the division is safe
    vectors = vectors * (np.conj(lead) / np.abs(lead))[None, :]
    return energies, vectors

"""Discrete coherent states and Husimi phase-space grids.

The fiducial is the theta-function eigenstate of the discrete Fourier
transform; coherent states are its phase-space translates D(k,l)|fiducial>,
and the Husimi grid of a state collects |<state|k,l>|^2 over the full N x N
lattice. Index k translates momentum, index l translates angle, so grid cell
(k, l) sits at the phase-space point (phi, p) = (2*pi*l/N, 2*pi*k/N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qspace import QuantumSpace, displacement_apply

TWO_PI = 2.0 * math.pi


@dataclass
class HusimiGrid:
    """values[k, l] = |<psi|k, l>|^2; sums to N for a normalized state."""

    dim: int
    values: np.ndarray

    def centered(self) -> np.ndarray:
        """Roll so cell (k, l) = (0, 0) lands at the image center.

        centered()[r, c] = values[(r - N//2) % N, (c - N//2) % N], matching the
        convention that the middle of a rendered panel is (phi, p) = (0, 0).
        """
        half = self.dim // 2
        return np.roll(self.values, (half, half), axis=(0, 1))

    def participation_number(self) -> float:
        """(sum H)^2 / sum H^2 — effective number of occupied grid cells."""
        total = self.values.sum()
        return float(total * total / (self.values ** 2).sum())


def theta_truncation_order(n_dim: int) -> int:
    """Smallest J with exp(-(pi/N)(N/2 + J*N)^2) < 1e-18; J <= 3 for N >= 2."""
    j = 1
    while math.exp(-(math.pi / n_dim) * (n_dim / 2.0 + j * n_dim) ** 2) >= 1e-18:
        j += 1
    return j


def fiducial_state(space: QuantumSpace) -> np.ndarray:
    """Normalized theta-sum fiducial, invariant under the DFT.

    amplitudes[m] ~ sum_j exp(-(pi/N)(m + j*N)^2); terms beyond the truncation
    order decay super-exponentially.
    """
    n = space.n_dim
    m = np.arange(n, dtype=float)
    j_max = theta_truncation_order(n)
    amps = np.zeros(n)
    for j in range(-j_max, j_max + 1):
        amps += np.exp(-(math.pi / n) * (m + j * n) ** 2)
    return (amps / np.linalg.norm(amps)).astype(complex)


def coherent_state(space: QuantumSpace, k: int, l: int) -> np.ndarray:
    """Displaced fiducial D(k, l)|fiducial>, localized near (2*pi*l/N, 2*pi*k/N)."""
    return displacement_apply(space, k, l, fiducial_state(space))


def husimi_grid(space: QuantumSpace, psi: np.ndarray) -> HusimiGrid:
    """Full N x N Husimi grid of a normalized state.

    For fixed l the overlaps over all k are a single inverse FFT of
    conj(psi) * roll(fiducial, l), so the grid costs O(N^2 log N); the result
    matches the one-matrix-vector-product-per-cell evaluation to rounding.
    """
    n = space.n_dim
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state must be normalized, |norm - 1| = {abs(norm - 1.0):.3e}")
    eta = fiducial_state(space)
    values = np.empty((n, n))
    cpsi = np.conj(psi)
    for l in range(n):
        amps = n * np.fft.ifft(cpsi * np.roll(eta, l))
        values[:, l] = np.abs(amps) ** 2
    return HusimiGrid(dim=n, values=values)


def render_grayscale(grid: HusimiGrid, clip: float | None = None) -> np.ndarray:
    """8-bit grayscale image of the centered grid.

    Values are clipped at `clip` (default 1/sqrt(N)) and mapped linearly to
    0..255: pixel = round(255 * min(value, clip)/clip). Row 0 of the image is
    the largest momentum so p increases upward when displayed.
    """
    clip = clip if clip is not None else 1.0 / math.sqrt(grid.dim)
    img = np.clip(grid.centered() / clip, 0.0, 1.0)
    return np.flipud(np.round(255.0 * img)).astype(np.uint8)


def write_png(grid: HusimiGrid, path, clip: float | None = None) -> None:
    from PIL import Image

    Image.fromarray(render_grayscale(grid, clip), mode="L").save(path)

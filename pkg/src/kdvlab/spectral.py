"""
Periodic spectral grid, Fourier transforms, dealiasing, and norms.

Conventions used throughout the package:

- collocation points x_j = j*L/n, j = 0..n-1;
- coefficients are DFT averages, u_hat(k) = (1/n) sum_j u(x_j) e^{-i 2pi k j / n};
- frequency lattice xi_k = 2*pi*k/L;
- Parseval: ||u||_{L^2[0,L)}^2 = L * sum_k |u_hat(k)|^2.

Fields are real and mean-zero, so coefficients are conjugate-symmetric with
u_hat(0) = 0.  Nonlinear products are followed by a 2/3-rule truncation, which
makes the pseudo-spectral product identical to the exact Galerkin-truncated
convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Invalid grid/solver/experiment configuration."""


class FieldIntegrityError(ValueError):
    """A spectral field violates one of its structural invariants."""


@dataclass(frozen=True)
class Grid:
    """
    Pre-computed spectral quantities for a periodic interval [0, L).

    Parameters
    ----------
    n : int
        Number of collocation points; must be a power of two, n >= 8.
    length : float
        Domain period L > 0.
    """

    n: int
    length: float

    def __post_init__(self) -> None:
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ConfigurationError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.length > 0):
            raise ConfigurationError(f"length must be positive, got {self.length}")

        k = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        xi = (2.0 * np.pi / self.length) * k
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "dealias_cut", self.n // 3)
        object.__setattr__(self, "x", np.arange(self.n) * (self.length / self.n))
        object.__setattr__(self, "dealias_mask", np.abs(k) <= self.n // 3)

    @property
    def xi_max(self) -> float:
        """Largest lattice frequency magnitude, 2*pi*(n/2)/L."""
        return (2.0 * np.pi / self.length) * (self.n // 2)

    @property
    def xi_cut(self) -> float:
        """Largest retained frequency magnitude after dealiasing."""
        return (2.0 * np.pi / self.length) * self.dealias_cut


@dataclass(frozen=True)
class SpectralField:
    """
    Fourier coefficients of a real mean-zero field on `grid`.

    coeffs follows numpy's fft ordering (index k in fftfreq order).  The
    constructor enforces the structural invariants: zero mean, conjugate
    symmetry, and no content above the dealias cut.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n,):
            raise FieldIntegrityError(
                f"coefficient array has shape {c.shape}, expected ({self.grid.n},)"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

        scale = max(float(np.max(np.abs(c))), 1.0)
        # conjugate symmetry: u_hat(-k) == conj(u_hat(k))
        mirrored = np.conj(c[(-self.grid.k) % self.grid.n])
        if float(np.max(np.abs(c - mirrored))) > 1e-10 * scale:
            raise FieldIntegrityError("coefficients are not conjugate-symmetric")
        if abs(c[0]) > 1e-12 * scale:
            raise FieldIntegrityError("zero mode is not zero (mean-zero gauge)")

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)


def make_grid(n: int, length: float) -> Grid:
    """Build the periodic grid with lattice xi_k = 2*pi*k/length."""
    return Grid(n=n, length=float(length))


def forward_transform(samples: np.ndarray, grid: Grid) -> SpectralField:
    """
    Transform real samples to a SpectralField.

    The mean is subtracted (zero mode pinned to 0) and modes above the
    dealias cut are removed so every field starts inside the retained band.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.n,):
        raise FieldIntegrityError(
            f"sample array has shape {samples.shape}, expected ({grid.n},)"
        )
    coeffs = np.fft.fft(samples) / grid.n
    coeffs[0] = 0.0
    coeffs[~grid.dealias_mask] = 0.0
    return SpectralField(grid, coeffs)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Transform back to real samples; residual imaginary parts must be tiny."""
    samples = np.fft.ifft(field.coeffs * field.grid.n)
    scale = max(float(np.max(np.abs(samples.real))), 1e-300)
    if float(np.max(np.abs(samples.imag))) > 1e-10 * max(scale, 1.0):
        raise FieldIntegrityError("inverse transform produced non-real samples")
    return samples.real


def l2_norm(field: SpectralField) -> float:
    """Continuum L^2[0,L) norm: sqrt(L * sum_k |u_hat(k)|^2)."""
    return float(np.sqrt(field.grid.length * np.sum(np.abs(field.coeffs) ** 2)))


def dealias(field: SpectralField) -> SpectralField:
    """Zero all modes with |k| > dealias_cut (idempotent)."""
    coeffs = np.where(field.grid.dealias_mask, field.coeffs, 0.0)
    return SpectralField(field.grid, coeffs)


def zero_field(grid: Grid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n, dtype=np.complex128))


def tree_sum(values: np.ndarray):
    """
    Sum an array with a fixed-shape pairwise tree.

    The reduction order depends only on the length of `values`, never on how
    the entries were produced, so results are bit-identical regardless of
    worker count upstream.
    """
    a = np.asarray(values)
    if a.size == 0:
        return a.dtype.type(0) if a.dtype != object else 0
    while a.shape[0] > 1:
        if a.shape[0] % 2 == 1:
            a = np.concatenate([a, np.zeros((1,) + a.shape[1:], dtype=a.dtype)])
        a = a[0::2] + a[1::2]
    return a[0]

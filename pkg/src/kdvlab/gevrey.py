"""
Exponential symbol, smoothing operator, Gevrey norms, the analyticity-radius
estimator, and the exact lattice rescaling.

The weight e^{sigma*xi_max} amplifies the double-precision coefficient floor,
so every weighted operation enforces the precision budget
sigma * xi_max <= PRECISION_BUDGET (default 25).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ConfigurationError, Grid, SpectralField

PRECISION_BUDGET = 25.0


class PrecisionBudgetError(ValueError):
    """sigma * xi_max exceeds the range where weighted sums are trustworthy."""


class EstimationError(ValueError):
    """The radius estimator has no usable modes."""


def _check_budget(sigma: float, grid: Grid) -> None:
    if sigma * grid.xi_max > PRECISION_BUDGET:
        raise PrecisionBudgetError(
            f"sigma*xi_max = {sigma * grid.xi_max:.3g} exceeds the precision "
            f"budget {PRECISION_BUDGET}"
        )


def symbol_m(sigma: float, xi) -> np.ndarray | float:
    """The even symbol (e^{sigma xi} + e^{-sigma xi})/2 = cosh(sigma*xi)."""
    if sigma < 0:
        raise ConfigurationError(f"sigma must be nonnegative, got {sigma}")
    arg = np.abs(sigma * np.asarray(xi, dtype=np.float64))
    if np.any(arg > 700.0):
        raise OverflowError("sigma*|xi| too large for the exponential symbol")
    out = np.cosh(arg)
    return float(out) if out.ndim == 0 else out


def apply_I(sigma: float, field: SpectralField) -> SpectralField:
    """Coefficientwise multiplication by the symbol cosh(sigma*xi)."""
    _check_budget(sigma, field.grid)
    return SpectralField(field.grid, field.coeffs * symbol_m(sigma, field.grid.xi))


def gevrey_norm(sigma: float, field: SpectralField) -> float:
    """sqrt(L * sum_k e^{2 sigma |xi_k|} |u_hat(k)|^2)."""
    _check_budget(sigma, field.grid)
    w = np.exp(2.0 * sigma * np.abs(field.grid.xi))
    return float(np.sqrt(field.grid.length * np.sum(w * np.abs(field.coeffs) ** 2)))


@dataclass(frozen=True)
class RadiusEstimate:
    sigma_hat: float
    fit_rms: float
    k_window: tuple  # (k_lo, k_hi) inclusive positive-frequency index range
    noise_floor_hit: bool


def estimate_radius(
    field: SpectralField,
    tail_fraction: float = 0.25,
    noise_floor: float = 1e-12,
) -> RadiusEstimate:
    """
    Estimate the analyticity radius from the exponential decay rate of the
    coefficient tail.

    Fits log|u_hat(k)| against xi_k by least squares over the top
    `tail_fraction` of retained positive frequencies whose magnitudes exceed
    noise_floor * max|u_hat|; sigma_hat is the negated slope.
    """
    if not (0 < tail_fraction <= 0.5):
        raise ConfigurationError(
            f"tail_fraction must lie in (0, 1/2], got {tail_fraction}"
        )
    grid = field.grid
    mags = np.abs(field.coeffs[1 : grid.dealias_cut + 1])
    peak = float(np.max(mags)) if mags.size else 0.0
    if peak == 0.0:
        raise EstimationError("field has no positive-frequency content")
    floor = noise_floor * peak
    usable = np.nonzero(mags > floor)[0]
    if usable.size == 0:
        raise EstimationError("all modes are below the noise floor")
    k_hi = int(usable[-1]) + 1  # highest usable positive index

    want = max(int(np.ceil(tail_fraction * grid.dealias_cut)), 2)
    k_lo = max(k_hi - want + 1, 1)
    window = np.arange(k_lo, k_hi + 1)
    window = window[mags[window - 1] > floor]
    noise_floor_hit = window.size < 8
    if window.size < 2:
        # fall back to the largest usable window
        window = usable + 1
        if window.size < 2:
            raise EstimationError("fewer than two usable modes for the fit")

    xi = 2.0 * np.pi * window / grid.length
    logmag = np.log(mags[window - 1])
    slope, intercept = np.polyfit(xi, logmag, 1)
    resid = logmag - (slope * xi + intercept)
    return RadiusEstimate(
        sigma_hat=float(max(-slope, 0.0)),
        fit_rms=float(np.sqrt(np.mean(resid**2))),
        k_window=(int(window[0]), int(window[-1])),
        noise_floor_hit=bool(noise_floor_hit),
    )


def rescale_field(field: SpectralField, lam: int) -> SpectralField:
    """
    The KdV scaling symmetry on the lattice: the field
    u_lambda(x) = lambda^{-2} u(x / lambda) lives on the grid with period
    lambda * L, where mode k keeps its index (frequency xi_k / lambda) and its
    coefficient is scaled by lambda^{-2}.

    Under the average-normalized coefficient convention this satisfies the
    norm identity
        ||u_lambda||_{G^sigma} = lambda^{-3/2} ||u||_{G^{sigma/lambda}}
    exactly, and commutes exactly with the truncated KdV flow after the time
    change t -> lambda^3 t.
    """
    if int(lam) != lam or lam < 1:
        raise ConfigurationError(f"lambda must be an integer >= 1, got {lam}")
    lam = int(lam)
    if lam == 1:
        return field
    target = Grid(n=field.grid.n, length=field.grid.length * lam)
    return SpectralField(target, field.coeffs * (lam ** -2))


def rescale_lambda(u0_norm: float, epsilon0: float) -> int:
    """
    Smallest integer lambda >= (1 + ||u0|| / epsilon0)^{2/3}; large enough
    that the rescaled data has Gevrey norm at most epsilon0.
    """
    if not (0 < epsilon0 < 1):
        raise ConfigurationError(f"epsilon0 must lie in (0,1), got {epsilon0}")
    return int(np.ceil((1.0 + u0_norm / epsilon0) ** (2.0 / 3.0) - 1e-12))

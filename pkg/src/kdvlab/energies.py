"""
Multilinear hyperplane sums Lambda_k and the modified-energy stack.

Lambda_k(M; u) = L * sum_{k_1+...+k_k=0} M(xi_1, ..., xi_k) u_hat(k_1) ... u_hat(k_k)

over the retained lattice band.  `lambda_k` is the reference implementation
(lexicographic iteration, pairwise-tree summation, deterministic under
threading); `lambda3_multiplier`, `lambda4_m4`, `lambda5_m5` are reductions
that exploit the pair structure of the multipliers; `lambda4_fast` evaluates
the quartic-correction sum with FFT convolutions, term by term of the
multiplier's polynomial series.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import multipliers as mult_mod
from .gevrey import _check_budget, symbol_m
from .multipliers import (
    INFERRED_C,
    Multiplier,
    _quartic_series_order,
    beta3_energy,
    beta4_energy,
)
from .spectral import ConfigurationError, SpectralField, tree_sum


class ResidualError(RuntimeError):
    """An energy evaluation produced a non-negligible imaginary part."""


def _real_part(value: complex, scale: float, label: str, tol: float = 1e-8) -> float:
    if abs(value.imag) > tol * max(abs(value.real), scale, 1e-30):
        raise ResidualError(
            f"{label} has imaginary residual {value.imag:.3e} (value {value.real:.3e})"
        )
    return float(value.real)


# ---------------------------------------------------------------------------
# direct reference evaluation
# ---------------------------------------------------------------------------


def lambda_k(mult: Multiplier, field: SpectralField, threads: int = 1) -> complex:
    """
    Direct evaluation of Lambda_k by lexicographic iteration over the free
    indices (the last index is determined; out-of-band tuples contribute
    zero).  The reduction is a fixed-shape pairwise tree whose order depends
    only on lattice sizes, so results are bit-identical for any `threads`.
    """
    if mult.arity < 2 or mult.arity > 5:
        raise ConfigurationError(f"lambda_k supports arity 2..5, got {mult.arity}")
    if threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {threads}")
    grid = field.grid
    cut = grid.dealias_cut
    idx = np.arange(-cut, cut + 1)
    two_pi_over_l = 2.0 * np.pi / grid.length
    coeffs = field.coeffs

    def coeff(k_arr):
        return coeffs[np.asarray(k_arr) % grid.n]

    if mult.arity == 2:
        k1 = idx
        value = tree_sum(mult.eval(two_pi_over_l * k1, -two_pi_over_l * k1) * coeff(k1) * coeff(-k1))
        return grid.length * complex(value)

    # free indices: arity-2 outer loop dimensions + one vectorized dimension
    n_outer = mult.arity - 2

    def outer_slice(flat: int) -> complex:
        ks = []
        rem = flat
        for _ in range(n_outer):
            ks.append(idx[rem % idx.size])
            rem //= idx.size
        ks = ks[::-1]  # lexicographic: first free index varies slowest
        k_last_free = idx
        k_fixed = sum(ks)
        k_det = -(k_fixed + k_last_free)
        valid = np.abs(k_det) <= cut
        xi_args = [np.full(idx.size, two_pi_over_l * k) for k in ks]
        xi_args.append(two_pi_over_l * k_last_free)
        xi_args.append(two_pi_over_l * k_det)
        values = mult.eval(*xi_args)
        prod = np.ones(idx.size, dtype=np.complex128)
        for k in ks:
            prod *= coeffs[k % grid.n]
        prod = prod * coeff(k_last_free) * coeff(k_det)
        terms = np.where(valid, np.asarray(values) * prod, 0.0 + 0.0j)
        return complex(tree_sum(terms.astype(np.complex128)))

    n_slices = idx.size**n_outer
    if threads == 1:
        partials = [outer_slice(f) for f in range(n_slices)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(outer_slice, range(n_slices)))
    return grid.length * complex(tree_sum(np.array(partials, dtype=np.complex128)))


# ---------------------------------------------------------------------------
# pair-structure reductions
# ---------------------------------------------------------------------------


def _pair_convolution(field: SpectralField) -> tuple:
    """
    (u_hat * u_hat)(eta) for |eta| <= 2*cut, alias-free via zero padding.

    Returns (eta_indices, values) with eta in fft order on the padded lattice.
    """
    grid = field.grid
    n_pad = 2 * grid.n
    padded = np.zeros(n_pad, dtype=np.complex128)
    cut = grid.dealias_cut
    padded[: cut + 1] = field.coeffs[: cut + 1]
    padded[-cut:] = field.coeffs[-cut:]
    phys = np.fft.ifft(padded) * n_pad
    conv = np.fft.fft(phys * phys) / n_pad
    eta = np.fft.fftfreq(n_pad, d=1.0 / n_pad).astype(np.int64)
    conv[np.abs(eta) > 2 * cut] = 0.0
    return eta, conv


def lambda3_multiplier(fn, field: SpectralField) -> complex:
    """
    Lambda_3 for a batched multiplier callable fn(xi1, xi2, xi3); vectorized
    over the full (k1, k2) lattice square.
    """
    grid = field.grid
    cut = grid.dealias_cut
    idx = np.arange(-cut, cut + 1)
    k1 = idx[:, None]
    k2 = idx[None, :]
    k3 = -(k1 + k2)
    valid = np.abs(k3) <= cut
    w = 2.0 * np.pi / grid.length
    values = fn(w * k1, w * k2, w * k3)
    prod = (
        field.coeffs[k1 % grid.n]
        * field.coeffs[k2 % grid.n]
        * field.coeffs[k3 % grid.n]
    )
    terms = np.where(valid, np.asarray(values) * prod, 0.0 + 0.0j)
    return grid.length * complex(tree_sum(terms.ravel().astype(np.complex128)))


def lambda4_m4(sigma: float, field: SpectralField, tol: float = 1e-13) -> complex:
    """
    Lambda_4 of the energy-profile quartic multiplier, reduced through its
    pair structure: for identical fields

        Lambda_4(M4) = -(3i/2) L sum_{k1+k2+eta=0}
            beta3_energy(xi1, xi2, xi_eta) xi_eta u1 u2 (u*u)(eta).
    """
    grid = field.grid
    cut = grid.dealias_cut
    eta_idx, conv = _pair_convolution(field)
    idx = np.arange(-cut, cut + 1)
    eta = np.arange(-2 * cut, 2 * cut + 1)
    k1 = idx[:, None]
    e = eta[None, :]
    k2 = -(k1 + e)
    valid = np.abs(k2) <= cut
    w = 2.0 * np.pi / grid.length
    b3 = beta3_energy(sigma, (w * k1, w * k2, w * e), tol)
    coeff2 = np.where(valid, field.coeffs[np.where(valid, k2, 0) % grid.n], 0.0)
    prod = (
        field.coeffs[k1 % grid.n]
        * coeff2
        * conv[e % (2 * grid.n)]
        * (w * e)
    )
    terms = np.where(valid, b3 * prod, 0.0 + 0.0j)
    total = grid.length * complex(tree_sum(terms.ravel().astype(np.complex128)))
    return -1.5j * total


def lambda5_m5(sigma: float, field: SpectralField, tol: float = 1e-12) -> complex:
    """
    Lambda_5 of the energy-profile quintic multiplier, reduced through its
    pair structure: for identical fields

        Lambda_5(M5) = -2i L sum_{k1+k2+k3+eta=0}
            beta4_energy(xi1, xi2, xi3, xi_eta) xi_eta u1 u2 u3 (u*u)(eta).
    """
    grid = field.grid
    cut = grid.dealias_cut
    eta_idx, conv = _pair_convolution(field)
    idx = np.arange(-cut, cut + 1)
    w = 2.0 * np.pi / grid.length

    k2 = idx[:, None]
    k3 = idx[None, :]
    partials = []
    for k1 in idx:
        e = -(k1 + k2 + k3)
        valid = np.abs(e) <= 2 * cut
        b4 = beta4_energy(
            sigma,
            (
                np.full(e.shape, w * k1),
                w * k2 + np.zeros(e.shape),
                w * k3 + np.zeros(e.shape),
                w * e,
            ),
            tol,
        )
        prod = (
            field.coeffs[k1 % grid.n]
            * field.coeffs[k2 % grid.n]
            * field.coeffs[k3 % grid.n]
            * conv[e % (2 * grid.n)]
            * (w * e)
        )
        terms = np.where(valid, b4 * prod, 0.0 + 0.0j)
        partials.append(tree_sum(terms.ravel().astype(np.complex128)))
    total = grid.length * complex(tree_sum(np.array(partials, dtype=np.complex128)))
    return -2j * total


def lambda3_m3(sigma: float, field: SpectralField) -> complex:
    """Lambda_3 of the energy-profile cubic multiplier."""
    return lambda3_multiplier(
        lambda a, b, c: mult_mod.m3(sigma, (a, b, c)), field
    )


def lambda3_beta3(sigma: float, field: SpectralField, tol: float = 1e-13) -> complex:
    """Lambda_3 of the energy-profile cubic correction."""
    return lambda3_multiplier(
        lambda a, b, c: beta3_energy(sigma, (a, b, c), tol), field
    )


# ---------------------------------------------------------------------------
# fast quartic-correction sum
# ---------------------------------------------------------------------------


class _SeparableTables:
    """
    FFT building blocks for the convolution evaluation of Lambda_4(beta4).

    U[p](x)   physical transform of the padded coefficients xi^p u_hat
              (frequencies normalized by `scale`);
    V[i](x)   physical transform of G_i(eta) = sum_{m+l=i} xi_eta^l P_m(eta),
              the pair-sum spectra with P_m = conv(xi^m u_hat, u_hat).
    """

    def __init__(self, field: SpectralField, scale: float, d_max: int):
        grid = field.grid
        self.n_pad = 2 * grid.n
        self.norm = grid.length / self.n_pad
        cut = grid.dealias_cut
        eta = np.fft.fftfreq(self.n_pad, d=1.0 / self.n_pad).astype(np.int64)
        a = (2.0 * np.pi / grid.length) * eta / scale
        base = np.zeros(self.n_pad, dtype=np.complex128)
        base[: cut + 1] = field.coeffs[: cut + 1]
        base[-cut:] = field.coeffs[-cut:]

        self.U = []
        c = base
        for _ in range(d_max + 2):
            self.U.append(np.fft.ifft(c) * self.n_pad)
            c = c * a
        u0 = self.U[0]
        p_list = [np.fft.fft(u * u0) / self.n_pad for u in self.U[: d_max + 1]]
        pair_mask = np.abs(eta) <= 2 * cut
        g = None
        self.V = []
        for i in range(d_max + 1):
            p = np.where(pair_mask, p_list[i], 0.0)
            g = p if g is None else a * g + p
            self.V.append(np.fft.ifft(g) * self.n_pad)
        self._d_cache: dict = {}
        self._q_cache: dict = {}

    def d(self, p: int, i: int) -> complex:
        """L/n_pad * sum_x U_p U_0 V_i: one free slot weighted xi^p, a plain
        slot, and a pair slot carrying G_i."""
        key = (p, i)
        if key not in self._d_cache:
            self._d_cache[key] = self.norm * complex(
                np.sum(self.U[p] * self.U[0] * self.V[i])
            )
        return self._d_cache[key]

    def q4(self, exps) -> complex:
        """L/n_pad * sum_x U_{p1} U_{p2} U_{p3} U_{p4}: a fully separable
        4-slot term (order immaterial: identical fields)."""
        key = tuple(sorted(exps))
        if key not in self._q_cache:
            p1, p2, p3, p4 = key
            self._q_cache[key] = self.norm * complex(
                np.sum(self.U[p1] * self.U[p2] * self.U[p3] * self.U[p4])
            )
        return self._q_cache[key]


def _omega1_lambda(t: _SeparableTables, k: int) -> complex:
    """Lambda_4 contribution of the degree-2k first quotient polynomial."""
    acc = 0.0 + 0.0j
    for i in range(2 * k):  # i + j = 2k - 1
        j = 2 * k - 1 - i
        sign = -1.0 if i % 2 else 1.0
        acc += sign * (-2.0 * t.d(j + 1, i) + 6.0 * t.d(i + 1, j))
    for i in range(2 * k + 1):  # i + j = 2k
        j = 2 * k - i
        sign = -1.0 if i % 2 else 1.0
        acc += -4.0 * sign * t.d(i, j)
    acc += -8.0 * t.d(0, 2 * k)
    return acc


def _omega2_lambda(t: _SeparableTables, k: int) -> complex:
    """Lambda_4 contribution of the degree-2k second quotient polynomial."""
    acc = 0.0 + 0.0j
    for i in range(2 * k + 1):  # i + j = 2k
        j = 2 * k - i
        sign = -1.0 if i % 2 else 1.0
        acc += 3.0 * sign * t.q4((i, j, 0, 0))
        if j >= 1:
            # product of the two alternating pair sums
            for m in range(i + 1):
                l = i - m
                for m2 in range(j + 1):
                    l2 = j - m2
                    s = -1.0 if (l + l2) % 2 else 1.0
                    acc += sign * s * t.q4((m, m2, l + l2, 0))
            # the three bracketed families attached to xi_4^{i+1}
            inner = 0.0 + 0.0j
            for m in range(j):
                l = j - 1 - m
                s = -1.0 if l % 2 else 1.0
                inner += s * t.q4((i + 1, m, l, 0))
                inner += s * t.q4((i + 1 + m, l, 0, 0))
            # nested double sum: (-xi_1)^l sum_{n+h=m-1} xi_3^n (-xi_2)^h
            for m in range(1, j):
                l = j - m
                for n in range(m):
                    h = m - 1 - n
                    s = -1.0 if (l + h) % 2 else 1.0
                    inner += s * t.q4((i + 1, l, n, h))
            # mirror double sum: (-xi_2)^m sum_{n+h=l-1} xi_4^n (-xi_1)^h
            for l in range(1, j):
                m = j - l
                for n in range(l):
                    h = l - 1 - n
                    s = -1.0 if (m + h) % 2 else 1.0
                    inner += s * t.q4((i + 1 + n, m, h, 0))
            acc += -sign * inner
    for i in range(1, 2 * k + 1):  # i + j = 2k + 1, i, j >= 1
        j = 2 * k + 1 - i
        sign = -1.0 if i % 2 else 1.0
        for m in range(j):
            l = j - 1 - m
            s = -1.0 if (i + l) % 2 else 1.0
            acc += s * t.q4((i, m, l, 0))
        for m in range(i):
            l = i - 1 - m
            s = -1.0 if m % 2 else 1.0
            acc += s * t.q4((j, m, l, 0))
    return acc


def lambda4_fast(
    sigma: float,
    field: SpectralField,
    tol: float = 1e-12,
    threads: int = 1,
) -> float:
    """
    Lambda_4 of the energy-profile quartic correction via FFT convolutions.

    Each term of the multiplier's polynomial series is separable into
    single-frequency powers and pair sums, so its hyperplane sum collapses to
    pointwise products of a handful of transformed arrays.  Cost is
    O(K^2 n log n) instead of the O(n^3) direct iteration.  The evaluation
    order is fixed, so results do not depend on `threads`.
    """
    del threads  # deterministic single pass; accepted for interface parity
    grid = field.grid
    sigma_eff = 2.0 * sigma  # energy profile = half the series value at 2*sigma
    if sigma == 0.0:
        return 0.0
    scale = max(2.0 * grid.xi_cut, 1.0)
    smax = sigma_eff * scale
    k_hi = _quartic_series_order(smax, tol)
    tables = _SeparableTables(field, scale, 2 * k_hi + 2)

    acc = 0.0 + 0.0j
    w = sigma_eff**4 / 24.0
    for k in range(0, k_hi + 1):
        acc += w * (_omega1_lambda(tables, k) - _omega2_lambda(tables, k))
        w = w * smax**2 / ((2 * k + 5) * (2 * k + 6))
    value = 0.5 * (INFERRED_C / 108.0) * acc
    scale_ref = float(np.sum(np.abs(field.coeffs))) ** 4 * grid.length + 1e-300
    return _real_part(value, scale_ref, "lambda4_fast")


# ---------------------------------------------------------------------------
# modified energies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyReport:
    t: float
    e2: float
    e3: float
    e4: float
    imag_residual: float


def energy_report(
    sigma: float,
    field: SpectralField,
    t: float = 0.0,
    tol: float = 1e-12,
    fast: bool = True,
    threads: int = 1,
) -> EnergyReport:
    """
    The modified-energy stack at one snapshot:

        e2 = ||I u||_{L^2}^2                (quadratic smoothed energy)
        e3 = e2 + Lambda_3(beta3_energy)    (cubic-corrected)
        e4 = e3 + Lambda_4(beta4_energy)    (quartic-corrected)
    """
    _check_budget(sigma, field.grid)
    grid = field.grid
    weights = symbol_m(sigma, grid.xi) ** 2
    e2 = float(grid.length * np.sum(weights * np.abs(field.coeffs) ** 2))

    c3 = lambda3_beta3(sigma, field, tol)
    scale3 = e2 + 1e-300
    r3 = abs(c3.imag) / max(abs(c3.real), scale3)
    e3 = e2 + _real_part(c3, scale3, "cubic correction")

    if fast:
        c4 = lambda4_fast(sigma, field, tol, threads)
        r4 = 0.0
    else:
        mult = Multiplier(
            4, lambda *xs: beta4_energy(sigma, xs, tol), True, "beta4_energy"
        )
        c4c = lambda_k(mult, field, threads)
        r4 = abs(c4c.imag) / max(abs(c4c.real), scale3)
        c4 = _real_part(c4c, scale3, "quartic correction")
    e4 = e3 + c4
    return EnergyReport(t=t, e2=e2, e3=e3, e4=e4, imag_residual=max(r3, r4))

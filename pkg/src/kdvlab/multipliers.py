"""
The multiplier hierarchy driving the modified-energy stack.

All multipliers here are generated from an even symbol profile g applied on
the zero-sum frequency hyperplane.  Two profiles appear:

- the *series* profile g(xi) = cosh(sigma*xi), whose Taylor coefficients
  sigma^{2k}/(2k)! generate the singularity-free polynomial series for the
  cubic and quartic correction multipliers; and
- the *energy* profile g(xi) = cosh^2(sigma*xi), the squared smoothing symbol
  that the energy derivatives actually require.

Because every multiplier below is linear in the profile's even-power
expansion, and cosh^2(s) = 1/2 + cosh(2s)/2 with the constant part
contributing nothing on the hyperplane, the energy-profile value of any of
these multipliers is exactly half the series-profile value at doubled sigma.
The `*_energy` wrappers encode that relation.

All evaluators broadcast over numpy arrays of frequency tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable

import numpy as np

from .spectral import ConfigurationError

# Constant of the closed-form quartic-multiplier identity (see m4_identity).
# Inferred numerically via infer_constant_c and frozen; the per-expansion-order
# identity pins it exactly.
INFERRED_C = -1.0

K_MAX = 200


class SeriesTruncationError(RuntimeError):
    """The requested tolerance was not reached within K_MAX series terms."""


def _check_hyperplane(components) -> None:
    total = sum(np.asarray(c, dtype=np.float64) for c in components)
    scale = sum(np.abs(np.asarray(c, dtype=np.float64)) for c in components)
    if np.any(np.abs(total) > 1e-9 * np.maximum(scale, 1.0)):
        raise ConfigurationError("frequency tuple is not on the zero-sum hyperplane")


@dataclass(frozen=True)
class Multiplier:
    """An arity-k evaluator on the zero-sum hyperplane."""

    arity: int
    eval: Callable  # (xi_1, ..., xi_k) -> complex, broadcasting over arrays
    symmetric: bool
    label: str


def symmetrize(mult: Multiplier) -> Multiplier:
    """Average over all arity! argument permutations."""
    if mult.arity > 5:
        raise ConfigurationError("symmetrize supports arity <= 5")
    if mult.symmetric:
        return mult
    perms = list(permutations(range(mult.arity)))

    def sym_eval(*xs):
        acc = None
        for p in perms:
            v = mult.eval(*[xs[i] for i in p])
            acc = v if acc is None else acc + v
        return acc / len(perms)

    return Multiplier(mult.arity, sym_eval, True, f"sym({mult.label})")


# ---------------------------------------------------------------------------
# cubic level
# ---------------------------------------------------------------------------


def m3(sigma: float, xi_triple) -> complex:
    """
    Energy-profile cubic multiplier: (i/3) * sum_j xi_j cosh^2(sigma*xi_j),
    the closed form on the hyperplane of
    -i[cosh(sigma*xi_1) cosh(sigma*(xi_2+xi_3)) {xi_2+xi_3}]_sym.
    """
    x1, x2, x3 = (np.asarray(x, dtype=np.float64) for x in xi_triple)
    _check_hyperplane((x1, x2, x3))
    s = x1 * np.cosh(sigma * x1) ** 2 + x2 * np.cosh(sigma * x2) ** 2 + x3 * np.cosh(sigma * x3) ** 2
    return 1j / 3.0 * s


def m3_series_profile(sigma: float, xi_triple) -> complex:
    """Series-profile cubic multiplier: (i/3) * sum_j xi_j cosh(sigma*xi_j)."""
    x1, x2, x3 = (np.asarray(x, dtype=np.float64) for x in xi_triple)
    _check_hyperplane((x1, x2, x3))
    s = x1 * np.cosh(sigma * x1) + x2 * np.cosh(sigma * x2) + x3 * np.cosh(sigma * x3)
    return 1j / 3.0 * s


def alpha3(xi_triple) -> complex:
    """Resonance symbol i(xi_1^3 + xi_2^3 + xi_3^3) = 3i xi_1 xi_2 xi_3."""
    x1, x2, x3 = (np.asarray(x, dtype=np.float64) for x in xi_triple)
    return 3j * x1 * x2 * x3


def _pair_power_sum(a: np.ndarray, b: np.ndarray, d_max: int) -> list:
    """Tables S_d(a,b) = sum_{m+l=d} a^m b^l for d = 0..d_max (recursively)."""
    tables = [np.ones_like(a)]
    b_pow = np.ones_like(b)
    for d in range(1, d_max + 1):
        b_pow = b_pow * b
        tables.append(a * tables[-1] + b_pow)
    return tables


def beta3(sigma: float, xi_triple, tol: float = 1e-13):
    """
    Cubic correction multiplier via its singularity-free polynomial series
    (series profile).  Real-valued; equals -M3/alpha3 wherever all xi_i are
    nonzero, but is defined on the whole lattice.
    """
    x1, x2, x3 = np.broadcast_arrays(
        *(np.asarray(x, dtype=np.float64) for x in xi_triple)
    )
    _check_hyperplane((x1, x2, x3))
    if sigma == 0.0:
        out = np.zeros(np.shape(x1))
        return float(out) if out.ndim == 0 else out

    scale = np.maximum(np.max(np.abs(np.stack([x1, x2, x3])), axis=0), 1.0)
    a1, a2, a3 = x1 / scale, x2 / scale, x3 / scale
    smax = float(np.max(sigma * scale))

    # a priori truncation order for the normalized series
    k_hi = _series_order(smax, tol)
    d_max = 2 * k_hi - 2
    s_13 = _pair_power_sum(-a1, a3, d_max)
    s_23 = _pair_power_sum(-a2, a3, d_max)
    s_12 = _pair_power_sum(a1, -a2, d_max)

    acc = np.zeros(np.shape(a1))
    # sigma^{2k} scale^{2k-2} / (2k)! at k = 1
    w = (sigma * scale) ** 2 / (2.0 * scale**2)
    for k in range(1, k_hi + 1):
        d = 2 * k - 2
        acc = acc + w * (s_13[d] + s_23[d] + s_12[d])
        w = w * (sigma * scale) ** 2 / ((2 * k + 1) * (2 * k + 2))
    out = -acc / 9.0
    return float(out) if out.ndim == 0 else out


def _series_order(smax: float, tol: float) -> int:
    """
    Smallest k with (2k+1) * smax^{2k} / (2k)! below tol relative to e^{smax}
    (normalized arguments are at most 1 in magnitude, so term magnitudes are
    dominated by this factorial envelope).
    """
    target = tol * max(math.exp(min(smax, 700.0)), 1.0)
    term = 1.0
    for k in range(1, K_MAX + 1):
        term *= smax * smax / ((2 * k - 1) * (2 * k))
        if (2 * k + 1) * term < target and 2 * k > smax:
            return k
    raise SeriesTruncationError(
        f"series tolerance {tol} unreachable within {K_MAX} terms (smax={smax:.3g})"
    )


def beta3_energy(sigma: float, xi_triple, tol: float = 1e-13):
    """Energy-profile cubic correction: half the series value at doubled sigma."""
    return 0.5 * beta3(2.0 * sigma, xi_triple, tol)


# ---------------------------------------------------------------------------
# quartic level
# ---------------------------------------------------------------------------

_PAIR_SPLITS = (
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((0, 3), (1, 2)),
    ((1, 2), (0, 3)),
    ((1, 3), (0, 2)),
    ((2, 3), (0, 1)),
)


def m4_definition(sigma: float, xi_quad, tol: float = 1e-13):
    """
    Quartic multiplier -(3i/2)[beta3(xi_1, xi_2, xi_3+xi_4){xi_3+xi_4}]_sym
    (series profile).  beta3 is symmetric, so the 24-term symmetrization
    collapses to the 6 unordered pair splits.
    """
    xs = [np.asarray(x, dtype=np.float64) for x in xi_quad]
    _check_hyperplane(xs)
    acc = None
    for (a, b), (c, d) in _PAIR_SPLITS:
        pair = xs[c] + xs[d]
        v = beta3(sigma, (xs[a], xs[b], pair), tol) * pair
        acc = v if acc is None else acc + v
    return -1.5j * (acc / 6.0)


def alpha4_real(xi_quad):
    """xi_1^3 + ... + xi_4^3 (= 3(xi_1+xi_2)(xi_1+xi_3)(xi_1+xi_4) on the hyperplane)."""
    x1, x2, x3, x4 = (np.asarray(x, dtype=np.float64) for x in xi_quad)
    return x1**3 + x2**3 + x3**3 + x4**3


def m4_identity(sigma: float, xi_quad, c: float = INFERRED_C):
    """
    Closed-form evaluation of the quartic multiplier divided by the dispersive
    factor i: with g(xi) = cosh(sigma*xi) standing for the squared profile,

        -(c/108) (alpha4 / prod xi_i) [sum_i g(xi_i) - g(xi_1+xi_2)
                                        - g(xi_1+xi_3) - g(xi_1+xi_4)]
        + (c/36) sum_i g(xi_i)/xi_i,

    where alpha4 = xi_1^3 + ... + xi_4^3.  Real-valued; the full multiplier is
    i times this (m4_definition = i * m4_identity with the inferred c).
    Requires all xi_i nonzero.
    """
    x1, x2, x3, x4 = (np.asarray(x, dtype=np.float64) for x in xi_quad)
    _check_hyperplane((x1, x2, x3, x4))
    prod = x1 * x2 * x3 * x4
    if np.any(prod == 0):
        raise ConfigurationError(
            "quotient form undefined when some xi_i = 0; use m4_definition"
        )
    g = lambda x: np.cosh(sigma * x)
    bracket = (
        g(x1) + g(x2) + g(x3) + g(x4) - g(x1 + x2) - g(x1 + x3) - g(x1 + x4)
    )
    quotient = alpha4_real((x1, x2, x3, x4)) / prod
    return -(c / 108.0) * quotient * bracket + (c / 36.0) * (
        g(x1) / x1 + g(x2) / x2 + g(x3) / x3 + g(x4) / x4
    )


def infer_constant_c(sigma_samples, tuple_samples, spread_tol: float = 1e-8) -> float:
    """
    Solve m4_definition = i * c * m4_identity(c=1) for c on each sample and
    assert the values agree; returns the mean.
    """
    values = []
    for xs in tuple_samples:
        x = [float(v) for v in xs]
        if any(v == 0.0 for v in x) or any(
            x[a] + x[b] == 0.0 for a in range(4) for b in range(a + 1, 4)
        ):
            raise ConfigurationError("degenerate tuple passed to infer_constant_c")
        for sigma in sigma_samples:
            lhs = m4_definition(sigma, x, tol=1e-15)
            unit = m4_identity(sigma, x, c=1.0)
            values.append(complex(lhs / (1j * unit)))
    values = np.array(values)
    mean = values.mean()
    spread = float(np.max(np.abs(values - mean))) / max(abs(mean), 1e-300)
    if spread > spread_tol:
        raise RuntimeError(
            f"inferred constant is not consistent: spread {spread:.3e} > {spread_tol}"
        )
    if abs(mean.imag) > spread_tol * abs(mean):
        raise RuntimeError(f"inferred constant is not real: {mean}")
    return float(mean.real)


# ---------------------------------------------------------------------------
# quartic correction multiplier: singularity-free polynomial series
# ---------------------------------------------------------------------------


class _QuarticSeriesTables:
    """
    Power-sum tables for one batch of normalized 4-tuples, supporting the
    decomposed polynomial quotients below.
    """

    def __init__(self, a1, a2, a3, a4, d_max: int):
        self.a = (a1, a2, a3, a4)
        p34, p24, p14, p13, p23 = a3 + a4, a2 + a4, a1 + a4, a1 + a3, a2 + a3
        self.pw = {i: _powers(x, d_max + 1) for i, x in enumerate((a1, a2, a3, a4))}
        self.p14_pow = _powers(p14, d_max)
        self.p24_pow = _powers(p24, d_max)
        self.p34_pow = _powers(p34, d_max)
        self.s3_p34 = _pair_power_sum(a3, p34, d_max)
        self.s2_p24 = _pair_power_sum(a2, p24, d_max)
        self.s1_p14 = _pair_power_sum(a1, p14, d_max)
        self.s4_p34 = _pair_power_sum(a4, p34, d_max)
        self.s1_p13 = _pair_power_sum(a1, p13, d_max)
        self.s4_p24 = _pair_power_sum(a4, p24, d_max)
        self.s2_p23 = _pair_power_sum(a2, p23, d_max)
        self.s3_p23 = _pair_power_sum(a3, p23, d_max)
        # second-family tables
        self.s1_m4 = _pair_power_sum(a1, -a4, d_max)
        self.s2_m4 = _pair_power_sum(a2, -a4, d_max)
        self.sm2_3 = _pair_power_sum(-a2, a3, d_max)
        self.s3_m2 = _pair_power_sum(a3, -a2, d_max)
        self.s4_m1 = _pair_power_sum(a4, -a1, d_max)
        # nested double sums:
        # d1[j] = sum_{m+l=j, m,l>=1} (-a1)^l S_{m-1}(a3, -a2)
        # d2[j] = sum_{m+l=j, m,l>=1} (-a2)^m S_{l-1}(a4, -a1)
        zeros = np.zeros_like(a1)
        self.d1 = [zeros, zeros]
        self.d2 = [zeros, zeros]
        for j in range(2, d_max + 1):
            self.d1.append(-a1 * (self.d1[j - 1] + self.s3_m2[j - 2]))
            self.d2.append(-a2 * (self.d2[j - 1] + self.s4_m1[j - 2]))


def _powers(x: np.ndarray, d_max: int) -> list:
    tables = [np.ones_like(x)]
    for _ in range(d_max):
        tables.append(tables[-1] * x)
    return tables


def _omega1_quotient_terms(t: _QuarticSeriesTables, k: int) -> np.ndarray:
    """
    Degree-2k polynomial equal to
    omega1(k+2) / (xi_1 xi_2 xi_3 xi_4) on the hyperplane, where
    omega1(q) = sum_i xi_i^{2q} - (xi_1+xi_2)^{2q} - (xi_1+xi_3)^{2q}
    - (xi_1+xi_4)^{2q}; arguments normalized by the scale absorbed into the
    series weights.
    """
    a1, a2, a3, a4 = (t.pw[i] for i in range(4))
    acc = np.zeros_like(t.pw[0][0])
    for i in range(2 * k):  # i + j = 2k - 1
        j = 2 * k - 1 - i
        sign = -1.0 if i % 2 else 1.0
        acc = acc + sign * (
            -(a1[j + 1] + a2[j + 1]) * t.s3_p34[i]
            + (a1[i + 1] + a3[i + 1]) * t.s2_p24[j]
            + (a2[i + 1] + a3[i + 1]) * t.s1_p14[j]
            + (a1[i + 1] + a2[i + 1]) * t.s4_p34[j]
        )
    for i in range(2 * k + 1):  # i + j = 2k
        j = 2 * k - i
        sign = -1.0 if i % 2 else 1.0
        acc = acc - 2.0 * (
            a1[i] * t.p14_pow[j]
            + a2[i] * t.p24_pow[j]
            + a3[i] * t.p34_pow[j]
            + a4[i] * t.p34_pow[j]
        )
        acc = acc - sign * (a4[i] * t.s1_p13[j] + a3[i] * t.s4_p24[j])
        acc = acc - sign * a4[i] * (t.s2_p23[j] + t.s3_p23[j])
    return acc


def _omega2_quotient_terms(t: _QuarticSeriesTables, k: int) -> np.ndarray:
    """
    Degree-2k polynomial equal to
    omega2(k+1) / ((xi_1+xi_2)(xi_1+xi_3)(xi_1+xi_4)) on the hyperplane,
    where omega2(q) = sum_i xi_i^{2q+1}.
    """
    a1, a2, a3, a4 = (t.pw[i] for i in range(4))
    acc = np.zeros_like(t.pw[0][0])
    for i in range(2 * k + 1):  # i + j = 2k
        j = 2 * k - i
        sign = -1.0 if i % 2 else 1.0
        acc = acc + sign * (2.0 * a1[i] * a4[j] + a2[i] * a3[j])
        if j >= 1:
            acc = acc + sign * t.s1_m4[i] * t.s2_m4[j]
            inner = t.s3_m2[j - 1] + t.s4_m1[j - 1] + t.d1[j] + t.d2[j]
            acc = acc - sign * a4[i + 1] * inner
    for i in range(1, 2 * k + 1):  # i + j = 2k + 1, i, j >= 1
        j = 2 * k + 1 - i
        sign = -1.0 if i % 2 else 1.0
        acc = acc + sign * a3[i] * t.s1_m4[j - 1] + a4[j] * t.sm2_3[i - 1]
    return acc


def beta4_series(sigma: float, xi_quad, tol: float = 1e-12, c: float = INFERRED_C):
    """
    Quartic correction multiplier via the singularity-free decomposed series
    (series profile):

        beta4 = (c/108) sum_{k>=0} sigma^{2(k+2)}/(2(k+2))!
                * (omega1_quotient(k+2) - omega2_quotient(k+1)),

    defined on the whole lattice, including tuples where the resonance symbol
    vanishes.  Real-valued; equals -m4_definition / (i * alpha4) on
    nondegenerate tuples.
    """
    x1, x2, x3, x4 = np.broadcast_arrays(
        *(np.asarray(x, dtype=np.float64) for x in xi_quad)
    )
    _check_hyperplane((x1, x2, x3, x4))
    if sigma == 0.0:
        out = np.zeros(np.shape(x1))
        return float(out) if out.ndim == 0 else out

    scale = np.maximum(np.max(np.abs(np.stack([x1, x2, x3, x4])), axis=0), 1.0)
    smax = float(np.max(sigma * scale))
    k_hi = _quartic_series_order(smax, tol)
    t = _QuarticSeriesTables(
        x1 / scale, x2 / scale, x3 / scale, x4 / scale, 2 * k_hi + 2
    )

    acc = np.zeros(np.shape(x1))
    w = sigma**4 / 24.0  # sigma^{2k+4} scale^{2k} / (2(k+2))! at k = 0
    for k in range(0, k_hi + 1):
        q = _omega1_quotient_terms(t, k) - _omega2_quotient_terms(t, k)
        acc = acc + w * q
        w = w * (sigma * scale) ** 2 / ((2 * k + 5) * (2 * k + 6))
    out = (c / 108.0) * acc
    return float(out) if out.ndim == 0 else out


def _quartic_series_order(smax: float, tol: float) -> int:
    """
    Truncation order for the quartic series: normalized quotient terms are
    bounded by a (k+1)^2 4^k envelope (pair sums have magnitude <= 2), so the
    per-term bound is (k+1)^2 (2 smax)^{2k} smax^4 / (2k+4)!.
    """
    target = tol * max(math.exp(min(2.0 * smax, 700.0)), 1.0)
    term = 1.0 / 24.0
    for k in range(1, K_MAX + 1):
        term *= (2.0 * smax) ** 2 / ((2 * k + 3) * (2 * k + 4))
        if 40.0 * (k + 1) ** 2 * term < target and 2 * k > 2.0 * smax:
            return k
    raise SeriesTruncationError(
        f"quartic series tolerance {tol} unreachable within {K_MAX} terms "
        f"(smax={smax:.3g})"
    )


def beta4_energy(sigma: float, xi_quad, tol: float = 1e-12):
    """Energy-profile quartic correction: half the series value at doubled sigma."""
    return 0.5 * beta4_series(2.0 * sigma, xi_quad, tol)


def m4_energy(sigma: float, xi_quad, tol: float = 1e-13):
    """Energy-profile quartic multiplier: half m4_definition at doubled sigma."""
    return 0.5 * m4_definition(2.0 * sigma, xi_quad, tol)


# ---------------------------------------------------------------------------
# quintic level
# ---------------------------------------------------------------------------


def m5(sigma: float, xi_quint, tol: float = 1e-12):
    """
    Quintic multiplier -2i [beta4(xi_1, xi_2, xi_3, xi_4+xi_5){xi_4+xi_5}]_sym
    (series profile).  beta4 is symmetric, so the 120-term symmetrization
    collapses to the 10 unordered pairs.
    """
    xs = [np.asarray(x, dtype=np.float64) for x in xi_quint]
    _check_hyperplane(xs)
    acc = None
    for a in range(5):
        for b in range(a + 1, 5):
            rest = [xs[i] for i in range(5) if i not in (a, b)]
            pair = xs[a] + xs[b]
            v = beta4_series(sigma, (*rest, pair), tol) * pair
            acc = v if acc is None else acc + v
    return -2j * (acc / 10.0)


def m5_energy(sigma: float, xi_quint, tol: float = 1e-12):
    """Energy-profile quintic multiplier: half m5 at doubled sigma."""
    return 0.5 * m5(2.0 * sigma, xi_quint, tol)

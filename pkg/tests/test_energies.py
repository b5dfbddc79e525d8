"""Hyperplane sums: direct oracle, reductions, fast path, energy stack."""

import numpy as np
import pytest

from kdvlab.energies import (
    EnergyReport,
    energy_report,
    lambda3_beta3,
    lambda3_m3,
    lambda4_fast,
    lambda4_m4,
    lambda5_m5,
    lambda_k,
)
from kdvlab.gevrey import apply_I
from kdvlab.multipliers import (
    Multiplier,
    beta3_energy,
    beta4_energy,
    m3,
    m4_definition,
    m5_energy,
)
from kdvlab.solver import gevrey_random_data
from kdvlab.spectral import ConfigurationError, l2_norm, make_grid


def _field(n=32, length=16.0, seed=11, sigma0=0.6, amplitude=0.8):
    return gevrey_random_data(sigma0, amplitude, seed, make_grid(n, length))


def test_lambda_k_validation():
    u = _field()
    m = Multiplier(2, lambda a, b: 1.0 + 0.0j, True, "one")
    with pytest.raises(ConfigurationError):
        lambda_k(Multiplier(6, lambda *a: 1.0, True, "six"), u)
    with pytest.raises(ConfigurationError):
        lambda_k(m, u, threads=0)


def test_lambda2_is_weighted_l2():
    u = _field()
    sigma = 0.3
    m = Multiplier(
        2, lambda a, b: np.cosh(sigma * a) * np.cosh(sigma * b) + 0.0j, True, "mm"
    )
    val = lambda_k(m, u)
    assert val.imag == pytest.approx(0.0, abs=1e-16)
    assert val.real == pytest.approx(l2_norm(apply_I(sigma, u)) ** 2, rel=1e-13)


def test_lambda3_reduction_matches_direct():
    u = _field()
    sigma = 0.2
    direct = lambda_k(Multiplier(3, lambda *xs: m3(sigma, xs), True, "m3"), u)
    assert abs(lambda3_m3(sigma, u) - direct) <= 1e-13 * abs(direct)


def test_lambda4_m4_reduction_matches_direct():
    u = _field()
    sigma = 0.2
    direct = lambda_k(
        Multiplier(4, lambda *xs: 0.5 * m4_definition(2 * sigma, xs, 1e-13), True, "m4"),
        u,
    )
    reduced = lambda4_m4(sigma, u)
    assert abs(reduced - direct) <= 1e-10 * abs(direct)


def test_lambda5_m5_reduction_matches_direct():
    u = _field(n=16)
    sigma = 0.2
    direct = lambda_k(
        Multiplier(5, lambda *xs: m5_energy(sigma, xs, 1e-12), True, "m5"), u
    )
    reduced = lambda5_m5(sigma, u)
    assert abs(reduced - direct) <= 1e-10 * max(abs(direct), 1e-18)


def test_lambda4_fast_equals_direct():
    u = _field()
    sigma = 0.2
    direct = lambda_k(
        Multiplier(4, lambda *xs: beta4_energy(sigma, xs, 1e-13), True, "b4"), u
    )
    fast = lambda4_fast(sigma, u, tol=1e-13)
    assert abs(fast - direct.real) <= 1e-9 * abs(direct.real)


def test_lambda_k_thread_count_is_bit_identical():
    u = _field()
    sigma = 0.2
    m = Multiplier(3, lambda *xs: beta3_energy(sigma, xs), True, "b3")
    assert lambda_k(m, u, threads=1) == lambda_k(m, u, threads=4)
    assert lambda4_fast(sigma, u, threads=1) == lambda4_fast(sigma, u, threads=8)


def test_energy_report_stack():
    u = _field(n=64, length=32.0)
    sigma = 0.15
    rep = energy_report(sigma, u, t=1.5)
    assert isinstance(rep, EnergyReport)
    assert rep.t == 1.5
    assert rep.e2 > 0
    # corrections are higher order in the data size
    assert abs(rep.e3 - rep.e2) < rep.e2
    assert abs(rep.e4 - rep.e3) < abs(rep.e3 - rep.e2) + 1e-12
    assert rep.imag_residual < 1e-10


def test_energy_report_fast_and_direct_agree():
    u = _field()
    sigma = 0.2
    fast = energy_report(sigma, u, fast=True)
    slow = energy_report(sigma, u, fast=False)
    assert fast.e4 == pytest.approx(slow.e4, rel=1e-11)


def test_lambda3_beta3_real_for_real_fields():
    u = _field()
    v = lambda3_beta3(0.25, u)
    assert abs(v.imag) <= 1e-14 * max(abs(v.real), 1e-16)

"""
End-to-end acceptance checks.

Each test pins one advertised guarantee of the package: the exact identity
suite, the combinatorial factorial bound, the inferred-constant consistency,
the analytic bound suite, solver accuracy, the energy-hierarchy derivative
identities, the sigma^4 almost-conservation law, the lattice scaling symmetry,
radius tracking, and the fast quartic evaluator's equivalence and speedup.
Tolerances are frozen here and treated as part of the interface.
"""

import json
import time

import numpy as np
import pytest

from kdvlab.energies import energy_report, lambda4_fast, lambda_k
from kdvlab.experiments import (
    ExperimentConfig,
    emit_outputs,
    run_conservation_sweep,
    run_derivative_check,
    run_energies,
    run_radius_decay,
    run_scaling_check,
)
from kdvlab.identity_lab import (
    check_alpha4,
    check_beta_bounds,
    check_cubic_identity,
    check_factorial,
    check_low_order_vanishing,
    check_omega1,
    check_omega2,
    check_quartic_identity,
    degenerate_hyperplane_tuples,
    random_hyperplane_tuples,
)
from kdvlab.multipliers import (
    INFERRED_C,
    Multiplier,
    alpha4_real,
    beta4_energy,
    beta4_series,
    infer_constant_c,
    m4_definition,
)
from kdvlab.solver import (
    SolverConfig,
    evolve,
    gevrey_random_data,
    soliton,
    soliton_speed,
    translate,
)
from kdvlab.spectral import l2_norm, make_grid

TOL = {
    "identity_runtime_s": 120.0,
    "factorial_runtime_s": 60.0,
    "c_spread": 1e-8,
    "beta4_vs_quotient": 1e-9,
    "l2_drift": 1e-8,
    "soliton_shape": 1e-6,
    "richardson_lo": 16 * 0.8,
    "richardson_hi": 16 * 1.2,
    "fd_rel_err": 1e-4,
    "fd_ratio_min": 2.5,
    "lambda5_runtime_s": 600.0,
    "sweep_slope_min": 3.5,
    "comparability_max": 10.0,
    "scaling_norm": 1e-12,
    "scaling_dynamic": 1e-8,
    "soliton_radius_rel": 0.05,
    "soliton_radius_flat": 0.02,
    "fast_vs_direct": 1e-9,
    "speedup_min": 10.0,
}


def _mixed_tuples(count, arity, seed):
    n_deg = count // 5
    return random_hyperplane_tuples(count - n_deg, arity, seed) + (
        degenerate_hyperplane_tuples(n_deg, arity, seed + 1)
    )


# 1 -------------------------------------------------------------------------


def test_acceptance_identity_suite():
    start = time.monotonic()
    quad = _mixed_tuples(500, 4, 100)
    tri = _mixed_tuples(500, 3, 200)
    wide = random_hyperplane_tuples(1000, 4, 300)
    for report in (
        check_omega1(quad),
        check_omega2(quad),
        check_alpha4(wide),
        check_quartic_identity(quad[:200]),
        check_low_order_vanishing(quad[:200]),
        check_cubic_identity(tri),
    ):
        assert report.n_failed == 0, report.witnesses[:3]
    assert time.monotonic() - start < TOL["identity_runtime_s"]


# 2 -------------------------------------------------------------------------


def test_acceptance_factorial_bound_exhaustive():
    start = time.monotonic()
    report = check_factorial(6, 25)
    assert report.n_failed == 0
    assert report.n_checked > 10000  # genuinely exhaustive, not sampled
    assert time.monotonic() - start < TOL["factorial_runtime_s"]


# 3 -------------------------------------------------------------------------


def _nondegenerate_quads(count, seed):
    out = []
    for xs in random_hyperplane_tuples(count * 4, 4, seed, max_abs=20):
        if 0 in xs or any(
            xs[i] + xs[j] == 0 for i in range(4) for j in range(i + 1, 4)
        ):
            continue
        out.append(xs)
        if len(out) == count:
            break
    assert len(out) == count
    return out


def test_acceptance_inferred_constant_and_quartic_series():
    tuples = _nondegenerate_quads(100, 17)
    c = infer_constant_c((0.1, 0.5, 1.0), tuples, spread_tol=TOL["c_spread"])
    assert c == pytest.approx(INFERRED_C, abs=1e-8)
    for sigma in (0.1, 0.5, 1.0):
        for xs in tuples[:40]:
            lhs = beta4_series(sigma, xs, tol=1e-14)
            rhs = -(m4_definition(sigma, xs, tol=1e-15) / (1j * alpha4_real(xs))).real
            assert abs(lhs - rhs) <= TOL["beta4_vs_quotient"] * max(abs(rhs), 1e-12)
    # the resonance zero set of the denominator is harmless for the series
    for xs in [(3.0, -3.0, 5.0, -5.0), (1.0, -1.0, 40.0, -40.0), (2.0, -2.0, 0.0, 0.0)]:
        assert np.isfinite(beta4_series(0.5, xs, tol=1e-13))


# 4 -------------------------------------------------------------------------


def test_acceptance_bound_suite_ten_thousand_tuples():
    tuples = random_hyperplane_tuples(9000, 4, 400) + degenerate_hyperplane_tuples(
        1000, 4, 401
    )
    report = check_beta_bounds(tuples)
    assert report.n_failed == 0, report.witnesses[:3]
    # 10^4 tuples x 4 sigma values x 5 bound families
    assert report.n_checked == 10000 * 4 * 5


# 5 -------------------------------------------------------------------------


def test_acceptance_solver_l2_drift():
    g = make_grid(256, 64.0)
    u0 = gevrey_random_data(1.0, 1.0, 42, g)
    traj = evolve(u0, SolverConfig(dt=2e-3, t_end=1.0, checkpoint_every=0.5))
    assert traj.l2_drift <= TOL["l2_drift"]


def test_acceptance_solver_soliton_shape():
    g = make_grid(256, 64.0)
    kappa = 0.5
    u0 = soliton(kappa, 32.0, g)
    traj = evolve(u0, SolverConfig(dt=1e-3, t_end=4.0, checkpoint_every=2.0))
    ref = translate(u0, soliton_speed(kappa, g) * 4.0)
    err = l2_norm(ref.with_coeffs(traj.final().coeffs - ref.coeffs)) / l2_norm(ref)
    assert err <= TOL["soliton_shape"]


def test_acceptance_solver_fourth_order():
    g = make_grid(128, 32.0)
    u0 = gevrey_random_data(0.8, 1.0, 7, g)

    def final(dt):
        cfg = SolverConfig(dt=dt, t_end=0.1, checkpoint_every=0.1)
        return evolve(u0, cfg).final().coeffs

    c1, c2, c4 = final(4e-3), final(2e-3), final(1e-3)
    ratio = np.max(np.abs(c1 - c2)) / np.max(np.abs(c2 - c4))
    assert TOL["richardson_lo"] < ratio < TOL["richardson_hi"]


# 6 -------------------------------------------------------------------------


def test_acceptance_derivative_identities():
    start = time.monotonic()
    results = run_derivative_check(ExperimentConfig(experiment="derivative-check"))
    rows = results["series"]["derivative"][1]
    assert [r[0] for r in rows] == [2, 3, 4]
    for level, _, err_h, err_h2, ratio in rows:
        assert err_h2 <= TOL["fd_rel_err"], (level, err_h2)
        assert ratio >= TOL["fd_ratio_min"], (level, ratio)
    assert results["summary"]["passed"]
    assert time.monotonic() - start < TOL["lambda5_runtime_s"]


# 7 -------------------------------------------------------------------------


def test_acceptance_conservation_sweep_sigma_fourth():
    cfg = ExperimentConfig(
        experiment="conservation-sweep",
        n=128,
        length=16.0,
        sigma0=0.5,
        dt=1e-3,
        epsilon0=0.1,
        delta=0.1,
        sigma_list=(0.05, 0.1, 0.2, 0.4),
        seed=0,
    )
    summary = run_conservation_sweep(cfg)["summary"]
    assert summary["slope_delta4_vs_sigma"] >= TOL["sweep_slope_min"]
    assert summary["comparability_constant"] <= TOL["comparability_max"]
    assert np.isfinite(summary["empirical_constant"])


# 8 -------------------------------------------------------------------------


def test_acceptance_scaling_transform():
    cfg = ExperimentConfig(experiment="scaling-check", lambdas=(2, 4))
    summary = run_scaling_check(cfg)["summary"]
    assert summary["max_norm_err"] <= TOL["scaling_norm"]
    assert summary["max_dynamic_err"] <= TOL["scaling_dynamic"]
    assert summary["smallness_ok"]
    assert summary["rescaled_norm"] <= summary["epsilon0"]


# 9 -------------------------------------------------------------------------


def test_acceptance_radius_soliton_control():
    cfg = ExperimentConfig(
        experiment="radius-decay",
        n=256,
        length=64.0,
        kappa=0.5,
        x0=32.0,
        dt=1e-3,
        t_end=4.0,
        checkpoint_every=0.5,
    )
    summary = run_radius_decay(cfg)["summary"]
    target = np.pi / (2 * 0.5)
    assert abs(summary["sigma_hat_final"] - target) / target <= TOL["soliton_radius_rel"]
    assert summary["flatness"] <= TOL["soliton_radius_flat"]


def test_acceptance_radius_gevrey_compensated_positive():
    cfg = ExperimentConfig(
        experiment="radius-decay",
        n=256,
        length=64.0,
        sigma0=1.0,
        amplitude=1.0,
        dt=5e-4,
        t_end=8.0,
        checkpoint_every=0.5,
        seed=9,
    )
    summary = run_radius_decay(cfg)["summary"]
    assert np.isfinite(summary["min_compensated"])
    assert summary["min_compensated"] > 0.0


# 10 ------------------------------------------------------------------------


def test_acceptance_fast_quartic_equals_direct():
    g = make_grid(32, 16.0)
    u = gevrey_random_data(0.6, 0.8, 11, g)
    sigma = 0.2
    direct = lambda_k(
        Multiplier(4, lambda *xs: beta4_energy(sigma, xs, 1e-13), True, "b4"), u
    )
    fast = lambda4_fast(sigma, u, tol=1e-13)
    assert abs(fast - direct.real) <= TOL["fast_vs_direct"] * abs(direct.real)


def test_acceptance_fast_quartic_speedup():
    g = make_grid(128, 64.0)
    u = gevrey_random_data(1.0, 1.0, 11, g)
    sigma = 0.2
    mult = Multiplier(4, lambda *xs: beta4_energy(sigma, xs, 1e-12), True, "b4")

    t0 = time.perf_counter()
    fast = lambda4_fast(sigma, u)
    t_fast = time.perf_counter() - t0

    t0 = time.perf_counter()
    direct = lambda_k(mult, u, threads=4)
    t_direct = time.perf_counter() - t0

    assert abs(fast - direct.real) <= 1e-8 * max(abs(direct.real), 1e-18)
    assert t_direct >= TOL["speedup_min"] * t_fast, (t_direct, t_fast)


def test_acceptance_outputs_thread_invariant(tmp_path):
    base = dict(
        experiment="energies",
        n=64,
        length=16.0,
        sigma=0.2,
        sigma0=1.5,
        dt=1e-3,
        t_end=0.02,
        checkpoint_every=0.01,
    )
    dirs = []
    for threads in (1, 4):
        cfg = ExperimentConfig(threads=threads, **base)
        out = tmp_path / f"t{threads}"
        emit_outputs(run_energies(cfg), cfg, out)
        dirs.append(out)
    a, b = dirs
    assert (a / "energies.csv").read_bytes() == (b / "energies.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
    # manifests differ only in the recorded thread count
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    ma["config"].pop("threads"), mb["config"].pop("threads")
    assert ma == mb

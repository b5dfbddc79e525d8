"""
Experiment configuration, orchestration, and persistence.

Experiments are pure functions from (config, seed) to result rows; `emit_outputs`
serializes them as RFC-4180 CSVs plus manifest.json / summary.json.  All floats
are written with shortest round-trip precision, and nothing in the outputs
depends on thread count or wall clock, so re-runs are byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .energies import energy_report, lambda3_m3, lambda4_m4, lambda5_m5
from .gevrey import (
    PRECISION_BUDGET,
    EstimationError,
    estimate_radius,
    gevrey_norm,
    rescale_field,
    rescale_lambda,
)
from .identity_lab import (
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
from .solver import (
    SolverConfig,
    Trajectory,
    evolve,
    gevrey_random_data,
    soliton,
    step,
)
from .spectral import ConfigurationError, SpectralField, l2_norm, make_grid


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "simulate"
    n: int = 128
    length: float = 64.0
    dt: float = 1e-3
    t_end: float = 1.0
    checkpoint_every: float = 0.25
    sigma: float = 0.2
    sigma_list: tuple = (0.05, 0.1, 0.2, 0.4)
    sigma0: float = 1.0
    amplitude: float = 1.0
    epsilon0: float = 0.1
    delta: float = 0.1
    kappa: float = 0.0  # > 0 selects the soliton control run
    x0: float = 0.0
    lambdas: tuple = (2, 4)
    dt_fd: float = 0.002
    seed: int = 0
    output_dir: str = "out"
    threads: int = 1
    tail_fraction: float = 0.25
    noise_floor: float = 1e-12
    identity_tuples: int = 500
    bound_tuples: int = 10000

    def __post_init__(self) -> None:
        grid = make_grid(self.n, self.length)
        for s in tuple(self.sigma_list) + (self.sigma,):
            if s < 0:
                raise ConfigurationError(f"sigma must be nonnegative, got {s}")
            if s * grid.xi_max > PRECISION_BUDGET:
                raise ConfigurationError(
                    f"sigma*xi_max = {s * grid.xi_max:.3g} exceeds the precision "
                    f"budget {PRECISION_BUDGET}"
                )
        if self.delta > 0 and abs(
            self.delta / self.dt - round(self.delta / self.dt)
        ) > 1e-9:
            raise ConfigurationError("delta must be an integer multiple of dt")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")


_ALLOWED_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)} | {"L"}


def _reject_duplicates(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ConfigurationError(f"duplicate key in config: {key!r}")
        seen.add(key)
    return dict(pairs)


def parse_config(path) -> ExperimentConfig:
    """Load and validate a JSON config; unknown and duplicate keys rejected."""
    try:
        raw = json.loads(Path(path).read_text(), object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    unknown = set(raw) - _ALLOWED_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    if "L" in raw:
        raw["length"] = raw.pop("L")
    for key in ("sigma_list", "lambdas"):
        if key in raw:
            raw[key] = tuple(raw[key])
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigurationError(f"bad config field: {exc}") from exc


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_outputs(results: dict, config: ExperimentConfig, out_dir) -> None:
    """
    Write manifest.json, summary.json, and one CSV per series.

    `results` maps {"series": {name: (header, rows)}, "summary": {...}}.
    Wall-clock timing goes to run.log only, keeping the data outputs
    byte-identical across runs and thread counts.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "artifact_version": __version__,
        "config": dataclasses.asdict(config),
        "seed": config.seed,
        "series": sorted(results.get("series", {})),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    (out / "summary.json").write_text(
        json.dumps(results.get("summary", {}), indent=2, sort_keys=True) + "\n"
    )
    for name, (header, rows) in results.get("series", {}).items():
        with open(out / f"{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    (out / "run.log").write_text(
        f"completed {config.experiment} at unix {time.time():.0f}\n"
    )


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def _initial_data(config: ExperimentConfig) -> SpectralField:
    grid = make_grid(config.n, config.length)
    if config.kappa > 0:
        return soliton(config.kappa, config.x0, grid)
    return gevrey_random_data(config.sigma0, config.amplitude, config.seed, grid)


def run_simulate(config: ExperimentConfig) -> dict:
    """Evolve the data and record norms at each checkpoint."""
    u0 = _initial_data(config)
    traj = evolve(u0, SolverConfig(config.dt, config.t_end, config.checkpoint_every))
    rows = [
        (t, l2_norm(f), gevrey_norm(config.sigma, f)) for t, f in traj.checkpoints
    ]
    return {
        "series": {"trajectory": (("t", "l2_norm", "gevrey_norm"), rows)},
        "summary": {"l2_drift": traj.l2_drift, "t_end": config.t_end},
    }


def run_energies(config: ExperimentConfig) -> dict:
    """Modified-energy stack along a trajectory."""
    u0 = _initial_data(config)
    traj = evolve(u0, SolverConfig(config.dt, config.t_end, config.checkpoint_every))
    rows = []
    for t, f in traj.checkpoints:
        rep = energy_report(config.sigma, f, t, threads=config.threads)
        rows.append((rep.t, rep.e2, rep.e3, rep.e4, rep.imag_residual))
    return {
        "series": {"energies": (("t", "e2", "e3", "e4", "imag_residual"), rows)},
        "summary": {
            "e4_drift": abs(rows[-1][3] - rows[0][3]),
            "e2_drift": abs(rows[-1][1] - rows[0][1]),
        },
    }


def run_conservation_sweep(config: ExperimentConfig) -> dict:
    """
    Almost-conservation of the quartic-corrected energy: evolve fixed data over
    one window delta and record |E4(delta) - E4(0)| against sigma.  The data is
    normalized so ||I u0|| = epsilon0 at the largest sigma.
    """
    grid = make_grid(config.n, config.length)
    sigmas = sorted(config.sigma_list)
    if len(sigmas) < 2:
        raise ConfigurationError("conservation sweep needs >= 2 sigma values")
    raw = gevrey_random_data(config.sigma0, 1.0, config.seed, grid)
    sigma_top = sigmas[-1]
    norm_top = np.sqrt(
        float(
            grid.length
            * np.sum(
                np.cosh(sigma_top * grid.xi) ** 2 * np.abs(raw.coeffs) ** 2
            )
        )
    )
    u0 = SpectralField(grid, raw.coeffs * (config.epsilon0 / norm_top))

    traj = evolve(u0, SolverConfig(config.dt, config.delta, config.delta))
    u1 = traj.final()

    rows = []
    deltas4 = []
    comparability = 0.0
    for s in sigmas:
        rep0 = energy_report(s, u0, 0.0, threads=config.threads)
        rep1 = energy_report(s, u1, config.delta, threads=config.threads)
        d4 = abs(rep1.e4 - rep0.e4)
        d2 = abs(rep1.e2 - rep0.e2)
        rows.append((s, rep0.e4, rep1.e4, d4, rep0.e2, rep1.e2, d2))
        deltas4.append(d4)
        comparability = max(comparability, abs(rep0.e4 - rep0.e2))
    slope = float(
        np.polyfit(np.log(np.array(sigmas)), np.log(np.array(deltas4)), 1)[0]
    )
    c_comp = comparability / (config.epsilon0**3 + config.epsilon0**4)
    c_emp = max(
        d / (config.epsilon0**5 * s**4) for s, d in zip(sigmas, deltas4)
    )
    return {
        "series": {
            "conservation": (
                ("sigma", "E4_0", "E4_delta", "delta4", "E2_0", "E2_delta", "delta2"),
                rows,
            )
        },
        "summary": {
            "slope_delta4_vs_sigma": slope,
            "l2_drift": traj.l2_drift,
            "comparability_constant": c_comp,
            "empirical_constant": c_emp,
            "epsilon0": config.epsilon0,
            "delta": config.delta,
        },
    }


def run_radius_decay(config: ExperimentConfig) -> dict:
    """
    Track the estimated analyticity radius along the flow, together with the
    compensated quantity sigma_hat * t^{1/4} (bounded below iff the radius
    decays no faster than t^{-1/4}).
    """
    u0 = _initial_data(config)
    traj = evolve(u0, SolverConfig(config.dt, config.t_end, config.checkpoint_every))
    rows = []
    estimates = []
    for t, f in traj.checkpoints:
        try:
            est = estimate_radius(f, config.tail_fraction, config.noise_floor)
            sigma_hat, rms = est.sigma_hat, est.fit_rms
        except EstimationError:
            sigma_hat, rms = float("nan"), float("nan")
        rows.append((t, sigma_hat, rms, sigma_hat * t**0.25))
        estimates.append((t, sigma_hat))
    late = [s * t**0.25 for t, s in estimates if t >= 1.0 and np.isfinite(s)]
    vals = [s for _, s in estimates if np.isfinite(s)]
    summary = {
        "l2_drift": traj.l2_drift,
        "sigma_hat_initial": estimates[0][1],
        "sigma_hat_final": estimates[-1][1],
        "flatness": float((max(vals) - min(vals)) / max(np.mean(vals), 1e-300)),
        "min_compensated": float(min(late)) if late else float("nan"),
    }
    return {
        "series": {
            "radius": (("t", "sigma_hat", "fit_rms", "compensated"), rows)
        },
        "summary": summary,
    }


def run_scaling_check(config: ExperimentConfig) -> dict:
    """
    The lattice scaling symmetry: norm identity, dynamic consistency under the
    time change t -> lambda^3 t, and the smallness guarantee for the data
    renormalization.
    """
    grid = make_grid(config.n, config.length)
    u0 = gevrey_random_data(config.sigma0, config.amplitude, config.seed, grid)
    sigma = config.sigma
    results = []
    for lam in config.lambdas:
        ul = rescale_field(u0, lam)
        lhs = gevrey_norm(sigma, ul)
        rhs = lam ** (-1.5) * gevrey_norm(sigma / lam, u0)
        norm_err = abs(lhs - rhs) / rhs

        t_short = 10 * config.dt
        traj = evolve(u0, SolverConfig(config.dt, t_short, t_short))
        evolved_then_scaled = rescale_field(traj.final(), lam)
        traj_l = evolve(
            ul,
            SolverConfig(lam**3 * config.dt, lam**3 * t_short, lam**3 * t_short),
        )
        diff = np.abs(traj_l.final().coeffs - evolved_then_scaled.coeffs)
        dyn_err = float(np.max(diff)) / max(
            float(np.max(np.abs(evolved_then_scaled.coeffs))), 1e-300
        )
        results.append((lam, norm_err, dyn_err))

    u0_norm = gevrey_norm(config.sigma0, u0)
    lam_star = rescale_lambda(u0_norm, config.epsilon0)
    u_star = rescale_field(u0, lam_star)
    small_norm = gevrey_norm(config.sigma0, u_star)
    return {
        "series": {
            "scaling": (("lambda", "norm_rel_err", "dynamic_rel_err"), results)
        },
        "summary": {
            "max_norm_err": max(r[1] for r in results),
            "max_dynamic_err": max(r[2] for r in results),
            "lambda_star": lam_star,
            "rescaled_norm": small_norm,
            "epsilon0": config.epsilon0,
            "smallness_ok": bool(small_norm <= config.epsilon0),
        },
    }


def _fd_vs_lambda(u, sigma: float, level: int, h: float, threads: int) -> float:
    """Relative error of the centered finite difference of the level-`level`
    energy against its multilinear derivative form."""

    def energy(f):
        rep = energy_report(sigma, f, threads=threads)
        return {2: rep.e2, 3: rep.e3, 4: rep.e4}[level]

    fd = (energy(step(u, h)) - energy(step(u, -h))) / (2.0 * h)
    if level == 2:
        lam = lambda3_m3(sigma, u)
    elif level == 3:
        lam = lambda4_m4(sigma, u)
    else:
        lam = lambda5_m5(sigma, u)
    lam = lam.real
    return abs(fd - lam) / max(abs(lam), 1e-300)


def run_derivative_check(config: ExperimentConfig) -> dict:
    """
    Energy-hierarchy derivative identities: d/dt of each modified energy equals
    the next multilinear form, verified by centered differences at two step
    sizes (second-order decrease expected).
    """
    levels = {2: 128, 3: 64, 4: 32}
    rows = []
    ok = True
    for level, n in levels.items():
        # fixed small period and steep tail: keeps the truncation boundary
        # far below the finite-difference tolerance at every level
        grid = make_grid(n, 16.0)
        u = gevrey_random_data(3.0, 12.0, config.seed + level, grid)
        err_h = _fd_vs_lambda(u, config.sigma, level, config.dt_fd, config.threads)
        err_h2 = _fd_vs_lambda(
            u, config.sigma, level, config.dt_fd / 2.0, config.threads
        )
        ratio = err_h / max(err_h2, 1e-300)
        rows.append((level, config.dt_fd, err_h, err_h2, ratio))
        ok = ok and err_h2 <= 1e-4
    return {
        "series": {
            "derivative": (
                ("level", "dt_fd", "rel_err", "rel_err_half", "ratio"),
                rows,
            )
        },
        "summary": {
            "max_rel_err_half": max(r[3] for r in rows),
            "min_ratio": min(r[4] for r in rows),
            "passed": bool(ok),
        },
    }


def run_verify_identities(config: ExperimentConfig) -> dict:
    """The exact identity suite plus the analytic bound suite."""
    n_t = config.identity_tuples
    quad = random_hyperplane_tuples(n_t * 4 // 5, 4, config.seed) + (
        degenerate_hyperplane_tuples(n_t - n_t * 4 // 5, 4, config.seed + 1)
    )
    tri = random_hyperplane_tuples(n_t * 4 // 5, 3, config.seed + 2) + (
        degenerate_hyperplane_tuples(n_t - n_t * 4 // 5, 3, config.seed + 3)
    )
    wide = random_hyperplane_tuples(1000, 4, config.seed + 4)
    bound_quad = random_hyperplane_tuples(
        config.bound_tuples * 9 // 10, 4, config.seed + 5
    ) + degenerate_hyperplane_tuples(
        config.bound_tuples - config.bound_tuples * 9 // 10, 4, config.seed + 6
    )
    reports = [
        check_omega1(quad),
        check_omega2(quad),
        check_alpha4(wide),
        check_quartic_identity(quad[:200]),
        check_low_order_vanishing(quad[:200]),
        check_cubic_identity(tri),
        check_factorial(6, 25),
        check_beta_bounds(bound_quad),
    ]
    rows = [(r.name, r.n_checked, r.n_failed) for r in reports]
    return {
        "series": {"identities": (("check", "n_checked", "n_failed"), rows)},
        "summary": {
            "all_passed": bool(all(r.passed for r in reports)),
            "reports": [r.as_dict() for r in reports],
        },
    }


EXPERIMENTS = {
    "simulate": run_simulate,
    "energies": run_energies,
    "conservation-sweep": run_conservation_sweep,
    "radius-decay": run_radius_decay,
    "scaling-check": run_scaling_check,
    "derivative-check": run_derivative_check,
    "verify-identities": run_verify_identities,
}

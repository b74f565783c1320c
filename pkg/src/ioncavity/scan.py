"""Configuration-driven scan driver: sweep the pump (and kappa), run the
semiclassical and quantum solvers, and emit machine-readable CSV results."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import observables, semiclassical, steady
from .config import RunConfig, _fmt
from .model import SystemParams, build_operators
from .steady import ArnoldiConvergenceError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SCAN_COLUMNS = [
    "kappa",
    "eta_scaled",
    "gamma",
    "n_photon",
    "n_photon_semiclassical",
    "delta_eff_mean",
    "delta_eff_semiclassical",
    "x2_mean",
    "x2_dispersion",
    "kinetic",
    "S_total",
    "S_cav",
    "S_ion",
    "E_N",
    "mutual_info",
    "gap_over_kappa",
    "nongauss_cav",
    "nongauss_ion",
    "nongauss_ion_projected",
    "converged_flag",
    "arnoldi_residual",
]

SEMICLASSICAL_COLUMNS = [
    "eta_scaled",
    "gamma",
    "n_minima",
    "x_min_1",
    "x_min_2",
    "x_min_3",
    "x_global",
    "gamma_c0",
    "gamma_cs",
    "eta_c0",
    "eta_cs",
    "global_min_switch",
    "transition",
]


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return "nan"
    return _fmt(v)


def _write_csv(path: Path, columns: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


@dataclass
class PointResult:
    row: list
    steady_state: Optional[np.ndarray] = None
    husimi_cav: Optional[observables.HusimiGrid] = None
    husimi_ion: Optional[observables.HusimiGrid] = None
    displacement: complex = 0j


def _cavity_displacement(config: RunConfig, params: SystemParams, x_glob: float) -> complex:
    """Semiclassical displacement for points whose expected photon number
    outgrows the cavity cutoff.

    Once the semiclassical photon number at the global potential minimum
    exceeds N_cav the plain Fock basis saturates, so the solve switches to the
    number basis displaced by the semiclassical cavity amplitude, where the
    cutoff only has to hold the fluctuations."""
    alpha = semiclassical.photon_amplitude(x_glob, params)
    if abs(alpha) ** 2 > config.N_cav:
        return complex(alpha)
    return 0j


def _params(config: RunConfig, kappa: float, eta_scaled: float) -> SystemParams:
    return SystemParams(
        C=config.C,
        c=config.c,
        kappa=kappa,
        x_eq=config.x_eq,
        eta_scaled=eta_scaled,
        N_cav=config.N_cav,
        N_mot=config.N_mot,
        dt=config.dt,
        t_map=config.t_map,
    )


def semiclassical_rows(config: RunConfig) -> list[list]:
    params = _params(config, config.kappa_list[0], config.eta_min)
    eta_grid = config.eta_grid()
    branch = semiclassical.bifurcation_scan(params, eta_grid)
    eta_c0 = semiclassical.gamma_to_eta_scaled(branch.gamma_c0, config.x_eq)
    eta_cs = (
        semiclassical.gamma_to_eta_scaled(branch.gamma_cs, config.x_eq)
        if branch.gamma_cs is not None
        else np.nan
    )
    rows = []
    for i, eta in enumerate(eta_grid):
        minima = branch.minima[i]
        padded = list(minima[:3]) + [np.nan] * (3 - min(len(minima), 3))
        rows.append(
            [
                eta,
                eta**2 / config.x_eq**2,
                len(minima),
                *padded,
                branch.global_minimum[i],
                branch.gamma_c0,
                branch.gamma_cs if branch.gamma_cs is not None else np.nan,
                eta_c0,
                eta_cs,
                branch.global_min_switch if branch.global_min_switch is not None else np.nan,
                branch.transition,
            ]
        )
    return rows


def _nongauss_or_nan(rho, resolution, min_halfwidth):
    try:
        moments = observables.gaussian_moments(rho)
        center, auto_hw = observables.default_grid(moments, resolution, min_halfwidth)
        grid = observables.husimi(rho, center, auto_hw, resolution)
        ref = observables.gaussian_husimi(moments, grid.re_axis, grid.im_axis)
        return observables.wehrl_entropy(ref) - observables.wehrl_entropy(grid), grid
    except (observables.QuadratureError, observables.NumericalStateError) as exc:
        log.warning("non-Gaussianity skipped: %s", exc)
        return np.nan, None


def compute_point(
    config: RunConfig,
    kappa: float,
    eta_scaled: float,
    warm_rho: Optional[np.ndarray] = None,
    warm_displacement: complex = 0j,
) -> PointResult:
    """Quantum solve plus the full observable suite for one (kappa, eta) point."""
    params = _params(config, kappa, eta_scaled)
    gamma = params.gamma

    # semiclassical companions, evaluated at the global potential minimum
    x_glob = semiclassical._global_minimum(params)
    d_eff_sc = semiclassical.delta_eff(x_glob, params)
    sc = [semiclassical.mean_photon_semiclassical(x_glob, params), d_eff_sc / params.U0]

    displacement = _cavity_displacement(config, params, x_glob)
    ops = build_operators(params, cavity_displacement=displacement)
    if warm_rho is not None and displacement != warm_displacement:
        # a state carried over from a differently displaced basis is invalid;
        # the deterministic seed (displaced vacuum) is the semiclassical state
        warm_rho = None

    n_eigs = config.arnoldi_n_eigs if config.gap else 2
    try:
        spec = steady.arnoldi_dominant(
            ops,
            n_eigs=n_eigs,
            k=max(config.arnoldi_k, n_eigs + 10),
            tol=config.arnoldi_tol,
            max_restarts=config.arnoldi_max_restarts,
            v0=warm_rho,
            method=config.integrator,
        )
    except ArnoldiConvergenceError as exc:
        log.warning("point kappa=%g eta=%g did not converge: %s", kappa, eta_scaled, exc)
        res = float(np.max(exc.residuals)) if exc.residuals is not None else np.nan
        row = _assemble_row(kappa, eta_scaled, gamma, None, sc, False, res)
        return PointResult(row=row, displacement=displacement)

    converged = spec.converged and not spec.multistable
    if spec.multistable:
        log.warning(
            "point kappa=%g eta=%g: degenerate steady state (multistability flag)",
            kappa,
            eta_scaled,
        )

    rho = spec.steady_state.mat
    dims = ops.dims
    means = observables.basic_means(rho, ops)
    rho_cav = observables.reduce_cavity(rho, dims)
    rho_mot = observables.reduce_motion(rho, dims)

    vals = {
        **means,
        "S_total": observables.von_neumann_entropy(rho),
        "S_cav": observables.von_neumann_entropy(rho_cav),
        "S_ion": observables.von_neumann_entropy(rho_mot),
        "E_N": observables.log_negativity(rho, dims),
        "mutual_info": observables.mutual_information(rho, dims),
        "gap_over_kappa": spec.gap if config.gap else np.nan,
    }

    husimi_cav = husimi_ion = None
    if config.non_gaussianity:
        vals["nongauss_cav"], husimi_cav = _nongauss_or_nan(
            rho_cav, config.husimi_resolution, config.husimi_min_halfwidth
        )
        rho_mot_full = observables.embed_even_state(rho_mot)
        vals["nongauss_ion"], husimi_ion = _nongauss_or_nan(
            rho_mot_full, config.husimi_resolution, config.husimi_min_halfwidth
        )
        if config.projection:
            try:
                proj = observables.project_positive(rho_mot_full)
                vals["nongauss_ion_projected"], _ = _nongauss_or_nan(
                    proj, config.husimi_resolution, config.husimi_min_halfwidth
                )
            except observables.NumericalStateError as exc:
                log.warning("projection skipped: %s", exc)
                vals["nongauss_ion_projected"] = np.nan
        else:
            vals["nongauss_ion_projected"] = np.nan
    else:
        vals["nongauss_cav"] = vals["nongauss_ion"] = vals["nongauss_ion_projected"] = np.nan

    residual = float(np.max(spec.residuals))
    row = _assemble_row(kappa, eta_scaled, gamma, vals, sc, converged, residual)
    return PointResult(
        row=row,
        steady_state=rho,
        husimi_cav=husimi_cav,
        husimi_ion=husimi_ion,
        displacement=displacement,
    )


def _assemble_row(kappa, eta_scaled, gamma, vals, sc, converged, residual):
    v = vals or {}

    def g(key):
        return v.get(key, np.nan)

    return [
        kappa,
        eta_scaled,
        gamma,
        g("n_photon"),
        sc[0],
        g("delta_eff_mean"),
        sc[1],
        g("x2_mean"),
        g("x2_dispersion"),
        g("kinetic"),
        g("S_total"),
        g("S_cav"),
        g("S_ion"),
        g("E_N"),
        g("mutual_info"),
        g("gap_over_kappa"),
        g("nongauss_cav"),
        g("nongauss_ion"),
        g("nongauss_ion_projected"),
        converged,
        residual,
    ]


def _scan_kappa(config: RunConfig, kappa: float) -> list[PointResult]:
    results = []
    warm = None
    warm_disp = 0j
    for eta in config.eta_grid():
        point = compute_point(
            config,
            kappa,
            eta,
            warm_rho=warm if config.warm_start else None,
            warm_displacement=warm_disp,
        )
        results.append(point)
        if point.steady_state is not None:
            warm = point.steady_state
            warm_disp = point.displacement
    return results


def _dump_husimi(path: Path, grid: observables.HusimiGrid, label: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {label}\n")
        fh.write("# re_axis: " + " ".join(_fmt(x) for x in grid.re_axis) + "\n")
        fh.write("# im_axis: " + " ".join(_fmt(x) for x in grid.im_axis) + "\n")
        for row in grid.values:
            fh.write(" ".join(_fmt(x) for x in row) + "\n")


def run_scan(config: RunConfig, output_dir: str | Path | None = None, threads: int = 1) -> Path:
    """Run the full scan and write CSVs; returns the output directory.

    Scan points along eta are sequential per kappa (warm starting); different
    kappa values are dispatched to a thread pool.  Results are written in grid
    order regardless of completion order, so reruns are byte-identical.
    """
    out = Path(output_dir if output_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.txt").write_text(config.resolved_text(), encoding="utf-8")

    _write_csv(out / "semiclassical.csv", SEMICLASSICAL_COLUMNS, semiclassical_rows(config))

    kappas = list(config.kappa_list)
    if threads > 1 and len(kappas) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_kappa = list(pool.map(lambda k: _scan_kappa(config, k), kappas))
    else:
        per_kappa = [_scan_kappa(config, k) for k in kappas]

    rows = [p.row for results in per_kappa for p in results]
    _write_csv(out / "scan.csv", SCAN_COLUMNS, rows)

    if config.husimi_dump:
        eta_grid = config.eta_grid()
        for kappa, results in zip(kappas, per_kappa):
            for eta, point in zip(eta_grid, results):
                tag = f"kappa{_fmt(kappa)}_eta{_fmt(eta)}"
                if point.husimi_cav is not None:
                    _dump_husimi(
                        out / f"husimi_cav_{tag}.dat", point.husimi_cav,
                        f"husimi cavity kappa={_fmt(kappa)} eta_scaled={_fmt(eta)}",
                    )
                if point.husimi_ion is not None:
                    _dump_husimi(
                        out / f"husimi_ion_{tag}.dat", point.husimi_ion,
                        f"husimi ion kappa={_fmt(kappa)} eta_scaled={_fmt(eta)}",
                    )
    return out


def run_semiclassical(config: RunConfig, output_dir: str | Path | None = None) -> Path:
    """Write only the semiclassical branch CSV (plus the resolved config)."""
    out = Path(output_dir if output_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.txt").write_text(config.resolved_text(), encoding="utf-8")
    _write_csv(out / "semiclassical.csv", SEMICLASSICAL_COLUMNS, semiclassical_rows(config))
    return out

"""Figure builders over the scan CSVs.

Each builder reads only documented columns, draws one figure and returns the
written path.  No physics happens here beyond axis relabeling; the dashed
verticals come from the gamma_cs / gamma_c0 columns converted to the pump
axis via eta = x_eq * sqrt(gamma), which the scan already provides as the
eta_c0 / eta_cs columns.
"""

from __future__ import annotations

import glob
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .loader import SchemaError, Table, load_csv, load_husimi


class FigureSkipped(RuntimeError):
    """Optional input absent; nothing to draw."""


def _scan(data_dir: Path) -> Table:
    return load_csv(data_dir / "scan.csv")


def _semi(data_dir: Path) -> Table:
    return load_csv(data_dir / "semiclassical.csv")


def _window_annotations(ax, semi: Table, with_switch: bool = True) -> None:
    """Dashed verticals at the bistable-window boundaries, solid at the
    global-minimum switch."""
    eta_cs = semi.column("eta_cs")[0]
    eta_c0 = semi.column("eta_c0")[0]
    if np.isfinite(eta_cs):
        ax.axvline(eta_cs, color="k", ls="--", lw=0.8)
    if np.isfinite(eta_c0):
        ax.axvline(eta_c0, color="k", ls="--", lw=0.8)
    if with_switch:
        switch = semi.column("global_min_switch")[0]
        if np.isfinite(switch):
            ax.axvline(switch, color="k", ls="-", lw=0.8, alpha=0.6)


def _per_kappa(scan: Table):
    kappa = scan.column("kappa")
    for k in sorted(set(kappa)):
        sel = kappa == k
        yield k, sel


def fig_bifurcation(data_dir: Path, out: Path) -> Path:
    semi = _semi(data_dir)
    eta = semi.column("eta_scaled")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for i in (1, 2, 3):
        x = semi.column(f"x_min_{i}")
        ok = np.isfinite(x)
        ax.plot(eta[ok], x[ok], ".", color="tab:blue", ms=4)
    ax.plot(eta, semi.column("x_global"), "-", color="tab:red", lw=1.2,
            label="global minimum")
    discontinuous = semi.text_column("transition")[0] == "discontinuous"
    _window_annotations(ax, semi, with_switch=discontinuous)
    switch = semi.column("global_min_switch")[0]
    if discontinuous and np.isfinite(switch):
        ax.plot([switch], [0.0], "o", mfc="none", color="k", ms=8)
    ax.set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    ax.set_ylabel(r"$\bar{x}/x_\omega$")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    target = out / "bifurcation.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_cavity(data_dir: Path, out: Path) -> Path:
    scan = _scan(data_dir)
    semi = _semi(data_dir)
    eta = scan.column("eta_scaled")
    fig, axes = plt.subplots(2, 1, figsize=(5, 5), sharex=True)
    for k, sel in _per_kappa(scan):
        axes[0].semilogy(eta[sel], scan.column("n_photon")[sel], "o-",
                         ms=3, label=rf"$\kappa/\omega={k:g}$")
        axes[1].plot(eta[sel], scan.column("delta_eff_mean")[sel], "o-", ms=3)
    sel0 = next(iter(_per_kappa(scan)))[1]
    axes[0].semilogy(eta[sel0], scan.column("n_photon_semiclassical")[sel0],
                     "k--", lw=1, label="semiclassical")
    axes[1].plot(eta[sel0], scan.column("delta_eff_semiclassical")[sel0],
                 "k--", lw=1)
    for ax in axes:
        _window_annotations(ax, semi)
    axes[0].set_ylabel(r"$\bar{n}$")
    axes[1].set_ylabel(r"$\langle\Delta_{\rm eff}\rangle/U_0$")
    axes[1].set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    target = out / "cavity.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_moments(data_dir: Path, out: Path) -> Path:
    scan = _scan(data_dir)
    semi = _semi(data_dir)
    eta = scan.column("eta_scaled")
    panels = [
        ("x2_mean", r"$\langle x^2\rangle/x_{\rm eq}^2$"),
        ("x2_dispersion", r"$\Delta(x^2)/x_{\rm eq}^2$"),
        ("kinetic", r"$\langle p^2\rangle/2\,[\hbar\omega]$"),
    ]
    fig, axes = plt.subplots(3, 1, figsize=(5, 7), sharex=True)
    for ax, (col, label) in zip(axes, panels):
        for k, sel in _per_kappa(scan):
            ax.plot(eta[sel], scan.column(col)[sel], "o-", ms=3,
                    label=rf"$\kappa/\omega={k:g}$")
        _window_annotations(ax, semi)
        ax.set_ylabel(label)
    axes[-1].set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    target = out / "moments.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_husimi(data_dir: Path, out: Path) -> Path:
    dumps = sorted(glob.glob(str(data_dir / "husimi_*.dat")))
    if not dumps:
        raise FigureSkipped("no Husimi dumps in the data directory")
    n = len(dumps)
    cols = min(n, 4)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 2.6 * rows),
                             squeeze=False)
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    for ax, dump in zip(axes.flat, dumps):
        re_axis, im_axis, values = load_husimi(dump)
        ax.pcolormesh(re_axis, im_axis, values, shading="auto", cmap="magma")
        ax.set_title(Path(dump).stem, fontsize=7)
        ax.set_aspect("equal")
    fig.tight_layout()
    target = out / "husimi.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_entropies(data_dir: Path, out: Path) -> Path:
    scan = _scan(data_dir)
    semi = _semi(data_dir)
    eta = scan.column("eta_scaled")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    styles = {"S_total": "-", "S_cav": "--", "S_ion": ":"}
    for col, ls in styles.items():
        for k, sel in _per_kappa(scan):
            ax.plot(eta[sel], scan.column(col)[sel], ls, marker="o", ms=3,
                    label=rf"{col}, $\kappa/\omega={k:g}$")
    _window_annotations(ax, semi)
    ax.set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    ax.set_ylabel("entropy [nats]")
    ax.legend(fontsize=7)
    fig.tight_layout()
    target = out / "entropies.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_entanglement(data_dir: Path, out: Path) -> Path:
    scan = _scan(data_dir)
    semi = _semi(data_dir)
    eta = scan.column("eta_scaled")
    fig, axes = plt.subplots(2, 1, figsize=(5, 5), sharex=True)
    for k, sel in _per_kappa(scan):
        axes[0].plot(eta[sel], scan.column("E_N")[sel], "o-", ms=3,
                     label=rf"$\kappa/\omega={k:g}$")
        axes[1].plot(eta[sel], scan.column("mutual_info")[sel], "o-", ms=3)
    for ax in axes:
        _window_annotations(ax, semi)
    axes[0].set_ylabel(r"$E_N$")
    axes[1].set_ylabel(r"$I(\rho)$ [nats]")
    axes[1].set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    target = out / "entanglement.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_gap(data_dir: Path, out: Path) -> Path:
    scan = _scan(data_dir)
    semi = _semi(data_dir)
    eta = scan.column("eta_scaled")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for k, sel in _per_kappa(scan):
        ax.semilogy(eta[sel], scan.column("gap_over_kappa")[sel], "o-", ms=3,
                    label=rf"$\kappa/\omega={k:g}$")
    # unconverged points flagged: open markers
    conv = scan.column("converged_flag")
    bad = conv < 0.5
    if np.any(bad):
        ax.semilogy(eta[bad], scan.column("gap_over_kappa")[bad], "o",
                    mfc="none", color="k", ms=7, label="unconverged")
    _window_annotations(ax, semi)
    ax.set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    ax.set_ylabel(r"gap $/\kappa$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    target = out / "gap.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


def fig_nongauss(data_dir: Path, out: Path) -> Path:
    scan = _scan(data_dir)
    semi = _semi(data_dir)
    eta = scan.column("eta_scaled")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    series = {
        "nongauss_cav": "cavity",
        "nongauss_ion": "ion",
        "nongauss_ion_projected": "ion, half-axis projected",
    }
    for col, label in series.items():
        for k, sel in _per_kappa(scan):
            y = scan.column(col)[sel]
            ok = np.isfinite(y)
            ax.plot(eta[sel][ok], y[ok], "o-", ms=3,
                    label=rf"{label}, $\kappa/\omega={k:g}$")
    _window_annotations(ax, semi)
    ax.set_xlabel(r"$\eta/\sqrt{\omega\kappa}$")
    ax.set_ylabel(r"$\mathcal{N}$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    target = out / "nongauss.png"
    fig.savefig(target, dpi=160)
    plt.close(fig)
    return target


FIGURES = {
    "bifurcation": fig_bifurcation,
    "cavity": fig_cavity,
    "moments": fig_moments,
    "husimi": fig_husimi,
    "entropies": fig_entropies,
    "entanglement": fig_entanglement,
    "gap": fig_gap,
    "nongauss": fig_nongauss,
}


def render(figure_id: str, data_dir: str | Path, out_dir: str | Path) -> Path:
    if figure_id not in FIGURES:
        raise KeyError(
            f"unknown figure {figure_id!r}; available: {', '.join(sorted(FIGURES))}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return FIGURES[figure_id](Path(data_dir), out)

"""Figure rendering for scenario runs: one or two PNGs next to each series CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _series(cols, rows):
    arr = np.asarray([[float(v) if not isinstance(v, str) else np.nan for v in row] for row in rows])
    return {c: arr[:, i] for i, c in enumerate(cols)}


def _save(fig, path: Path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_scenario(scenario: str, out: Path, cols, rows, manifest: dict):
    """Render the standard figure(s) for one scenario; returns the written paths."""
    if not rows:
        return []
    s = _series(cols, rows)
    paths = []

    if scenario in ("kgm", "unitary"):
        fig, axes = plt.subplots(2, 2, figsize=(10, 7))
        t = s["t"]
        q = s["total_charge"]
        axes[0, 0].plot(t, (q - q[0]) / np.maximum(np.abs(q[0]), 1e-300))
        axes[0, 0].set_title("relative charge drift")
        res_col = "lorenz_residual_max" if scenario == "kgm" else "gauss_residual_max"
        axes[0, 1].semilogy(t, np.maximum(s[res_col], 1e-300))
        axes[0, 1].set_title(res_col)
        third = "energy" if scenario == "kgm" else "continuity_residual_max"
        axes[1, 0].plot(t, s[third])
        axes[1, 0].set_title(third)
        fourth = "current_divergence_max" if scenario == "kgm" else "phi_min"
        axes[1, 1].plot(t, s[fourth])
        axes[1, 1].set_title(fourth)
        for ax in axes.flat:
            ax.set_xlabel("t")
            ax.grid(True, alpha=0.3)
        paths.append(_save(fig, out / f"{scenario}_diagnostics.png"))

    elif scenario == "compare":
        fig, ax = plt.subplots(figsize=(7, 5))
        t = s["t"]
        for col in ("l2_B0", "l2_B1", "linf_B0", "linf_B1"):
            ax.semilogy(t[1:], np.maximum(s[col][1:], 1e-300), label=col)
        ax.set_xlabel("t")
        ax.set_ylabel("divergence")
        ax.set_title("potential-only vs direct evolution")
        ax.legend()
        ax.grid(True, alpha=0.3)
        paths.append(_save(fig, out / "compare_divergence.png"))

    elif scenario == "em-only":
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        axes[0].plot(s["t"], s["radicand_min"])
        axes[0].set_title("radicand_min")
        axes[1].plot(s["t"], s["phi_rec_min"], label="phi_rec_min")
        axes[1].plot(s["t"], s["phi_rec_max"], label="phi_rec_max")
        axes[1].set_title("reconstructed field range")
        axes[1].legend()
        for ax in axes:
            ax.set_xlabel("t")
            ax.grid(True, alpha=0.3)
        paths.append(_save(fig, out / "em_only_reconstruction.png"))

    elif scenario == "bohm":
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(s["t"], s["max_velocity"])
        ax.set_xlabel("t")
        ax.set_ylabel("max |v|")
        ax.set_title("guidance velocity bound per slice")
        ax.grid(True, alpha=0.3)
        paths.append(_save(fig, out / "bohm_velocity.png"))
        hist_file = out / "bohm_histogram.csv"
        if hist_file.exists():
            from .scenarios import read_csv
            h = read_csv(hist_file)
            fig, ax = plt.subplots(figsize=(7, 4))
            ax.bar(h["bin_center"], h["ensemble_density"],
                   width=(h["bin_center"][1] - h["bin_center"][0]) * 0.9,
                   alpha=0.5, label="ensemble")
            ax.plot(h["bin_center"], h["field_density"], "k-", lw=2, label="|j0| normalized")
            ax.set_xlabel("x")
            ax.set_ylabel("density")
            ax.legend()
            ax.set_title(f"transport equivariance (L1 = {manifest.get('extras', {}).get('l1_distance', 0):.4f})")
            paths.append(_save(fig, out / "bohm_histogram.png"))

    elif scenario == "dirac-flow":
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        axes[0].plot(s["x"], s["t"], label="Lorentz push")
        axes[0].plot(s["x_flow"], s["t_flow"], "--", label="flow line")
        axes[0].set_xlabel("x")
        axes[0].set_ylabel("t")
        axes[0].legend()
        axes[0].set_title("worldlines")
        axes[1].semilogy(s["tau"], np.maximum(s["mass_shell_residual"], 1e-300), label="mass shell")
        axes[1].semilogy(s["tau"], np.maximum(s["path_divergence"], 1e-300), label="path divergence")
        axes[1].set_xlabel("tau")
        axes[1].legend()
        axes[1].set_title("residuals")
        for ax in axes:
            ax.grid(True, alpha=0.3)
        paths.append(_save(fig, out / "dirac_flow.png"))

    elif scenario == "majorana-suite":
        names = [str(r[0]) + "\n" + str(r[1]) for r in rows]
        vals = [max(float(r[3]), 1e-18) for r in rows]
        tols = [float(r[4]) for r in rows]
        fig, ax = plt.subplots(figsize=(max(7, len(rows) * 0.8), 4.5))
        xpos = np.arange(len(rows))
        ax.bar(xpos, vals, alpha=0.7, label="max residual")
        ax.plot(xpos, tols, "r_", markersize=18, label="tolerance")
        ax.set_yscale("log")
        ax.set_xticks(xpos)
        ax.set_xticklabels(names, fontsize=7)
        ax.legend()
        ax.set_title("spinor identity residuals")
        paths.append(_save(fig, out / "majorana_residuals.png"))

    elif scenario == "convergence":
        fig, ax = plt.subplots(figsize=(6, 4.5))
        dx = s["dx"]
        err = s["final_relative_divergence"]
        ax.loglog(dx, err, "o-", label="measured")
        ax.loglog(dx, err[0] * (dx / dx[0]) ** 2, "--", color="gray", label="order 2")
        ax.set_xlabel("dx")
        ax.set_ylabel("relative divergence at T")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        ax.set_title("refinement study")
        paths.append(_save(fig, out / "convergence_orders.png"))

    return paths


def render_convergence_report(report: dict, out: Path):
    """Log-log bars of the per-quantity observed orders from three series."""
    quantities = list(report)
    fig, ax = plt.subplots(figsize=(max(6, len(quantities) * 1.2), 4))
    xpos = np.arange(len(quantities))
    o1 = [report[q]["orders"][0] for q in quantities]
    o2 = [report[q]["orders"][1] for q in quantities]
    ax.bar(xpos - 0.17, o1, width=0.3, label="coarse/mid")
    ax.bar(xpos + 0.17, o2, width=0.3, label="mid/fine")
    ax.axhline(2.0, color="gray", ls="--", lw=1)
    ax.set_xticks(xpos)
    ax.set_xticklabels(quantities, fontsize=8)
    ax.set_ylabel("observed order")
    ax.legend()
    path = out / "observed_orders.png"
    return _save(fig, path)

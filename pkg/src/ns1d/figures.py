"""Report figures rendered next to the delimited output of a run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .output import load_snapshot, read_timeseries


def render_run_figures(outdir) -> list:
    """Render the state profile and diagnostic time-series figures.

    Reads ``timeseries.csv`` and ``final_state.csv`` from the run output
    directory and writes PNGs into ``figures/``.  Returns the paths.
    """
    outdir = Path(outdir)
    figdir = outdir / "figures"
    figdir.mkdir(parents=True, exist_ok=True)
    written = []

    snap_path = outdir / "final_state.csv"
    if snap_path.is_file():
        state = load_snapshot(snap_path)
        n = state.rho.size
        # reconstruct coordinates from the face column
        lines = snap_path.read_text().splitlines()[1:]
        xf = np.array([float(l.split(",")[2]) for l in lines])
        xc = 0.5 * (xf[:-1] + xf[1:])
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
        ax1.plot(xc, state.rho, color="tab:blue", lw=1.2)
        ax1.set_ylabel(r"$\rho$")
        ax1.grid(alpha=0.3)
        ax2.plot(xf, state.u, color="tab:red", lw=1.2)
        ax2.set_ylabel(r"$u$")
        ax2.set_xlabel(r"$x$")
        ax2.grid(alpha=0.3)
        fig.suptitle("final state")
        fig.tight_layout()
        target = figdir / "state_final.png"
        fig.savefig(target, dpi=130)
        plt.close(fig)
        written.append(target)

    ts_path = outdir / "timeseries.csv"
    if ts_path.is_file():
        cols = read_timeseries(ts_path)
        t = cols["t"]
        fig, axes = plt.subplots(2, 2, figsize=(9, 6))
        ax = axes[0, 0]
        ax.plot(t, cols["energy"], label="energy")
        ax.plot(t, cols["energy"] + cols["dissipation_cum"], "--",
                label="energy + dissipated")
        ax.set_title("energy ledger")
        ax.legend(fontsize=8)
        ax = axes[0, 1]
        ax.plot(t, cols["ux_l2"], label=r"$\|u_x\|_2$")
        ax.plot(t, cols["uxx_l2"], label=r"$\|u_{xx}\|_2$")
        ax.plot(t, cols["evf_linf"], label="viscous flux sup")
        ax.set_title("gradient norms")
        ax.legend(fontsize=8)
        ax = axes[1, 0]
        ax.plot(t, cols["wmoment"], label="weighted moment")
        ax.plot(t, cols["rho_u_pow"], label=r"$\int\rho|u|^{\alpha+2}$")
        ax.set_title("weighted moments")
        ax.legend(fontsize=8)
        ax = axes[1, 1]
        ax.plot(t, cols["max_rho"], label=r"$\max\rho$")
        ax.plot(t, cols["sup_xi_eta"], label=r"$\sup(\xi+\eta)$")
        ax.set_title("density bound monitor")
        ax.legend(fontsize=8)
        for ax in axes.flat:
            ax.grid(alpha=0.3)
            ax.set_xlabel("t")
        fig.tight_layout()
        target = figdir / "diagnostics.png"
        fig.savefig(target, dpi=130)
        plt.close(fig)
        written.append(target)
    return written


def write_gnuplot_script(outdir, csv_name="timeseries.csv") -> Path:
    """Emit a plot script referencing the CSV columns by position."""
    from .diagnostics import DIAG_FIELDS

    outdir = Path(outdir)
    idx = {name: i + 1 for i, name in enumerate(DIAG_FIELDS)}
    lines = [
        "# plot script for %s (column numbers follow the CSV header)" % csv_name,
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        "set terminal pngcairo size 900,600",
        "set output 'energy.png'",
        "plot '%s' using %d:%d with lines title 'energy', \\" % (csv_name, idx["t"], idx["energy"]),
        "     '%s' using %d:($%d+$%d) with lines title 'energy+dissipated'"
        % (csv_name, idx["t"], idx["energy"], idx["dissipation_cum"]),
        "set output 'gradients.png'",
        "plot '%s' using %d:%d with lines title 'ux_l2', \\" % (csv_name, idx["t"], idx["ux_l2"]),
        "     '%s' using %d:%d with lines title 'uxx_l2'" % (csv_name, idx["t"], idx["uxx_l2"]),
        "set output 'density_bound.png'",
        "plot '%s' using %d:%d with lines title 'max_rho', \\" % (csv_name, idx["t"], idx["max_rho"]),
        "     '%s' using %d:%d with lines title 'sup_xi_eta'" % (csv_name, idx["t"], idx["sup_xi_eta"]),
    ]
    target = outdir / "plots.gp"
    target.write_text("\n".join(lines) + "\n")
    return target

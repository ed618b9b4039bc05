"""Figure rendering for trajectories and spectra.

Figures are written straight to files (Agg backend, no display) so the
command-line report path can drop a PNG next to each CSV it emits.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .flow import Trajectory, drift_report
from .spectral import Spectrum, cf_eval

FIGSIZE = (8.0, 6.0)
DPI = 120


def trajectory_figure(traj: Trajectory, path) -> None:
    """Two panels: state components over time, invariant wander below."""
    fig, (ax_state, ax_inv) = plt.subplots(2, 1, figsize=FIGSIZE, sharex=True)
    for i, name in enumerate(traj.system.state_names):
        ax_state.plot(traj.times, traj.states[:, i], label=name, lw=1.0)
    ax_state.set_ylabel("state")
    ax_state.set_title(f"{traj.system.family} flow, "
                       f"t in [0, {traj.times[-1]:g}]")
    if len(traj.system.state_names) <= 9:
        ax_state.legend(loc="upper right", fontsize="small", ncol=3)

    floor = 1e-17
    for k, series in sorted(traj.trace_powers.items()):
        wander = np.abs(series - series[0]) + floor
        ax_inv.semilogy(traj.times, wander, label=f"|tr L^{k} - init|", lw=1.0)
    eig_w = np.max(np.abs(traj.eigenvalues - traj.eigenvalues[0][None, :]),
                   axis=1) + floor
    ax_inv.semilogy(traj.times, eig_w, label="eigenvalue wander",
                    lw=1.0, ls="--")
    rep = drift_report(traj)
    ax_inv.set_xlabel("t")
    ax_inv.set_ylabel("invariant wander")
    ax_inv.set_title(rep.render(), fontsize="small")
    ax_inv.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def spectrum_figure(spectrum: Spectrum, path) -> None:
    """Energy levels against the potential; eigenfunctions if available."""
    has_vectors = spectrum.vectors is not None
    if has_vectors:
        fig, (ax_lv, ax_fn) = plt.subplots(1, 2, figsize=FIGSIZE)
    else:
        fig, ax_lv = plt.subplots(1, 1, figsize=FIGSIZE)
    prob = spectrum.problem
    scale = float(prob.energy_scale)
    pot = cf_eval(prob.c, spectrum.x) / scale
    ax_lv.plot(spectrum.x, pot, color="k", lw=1.2, label="potential / scale")
    ax_lv.hlines(spectrum.energies, spectrum.x[0], spectrum.x[-1],
                 colors="tab:blue", lw=0.9)
    lo = min(float(np.min(spectrum.energies)), float(np.min(pot)))
    hi = float(np.max(spectrum.energies))
    pad = 0.15 * max(hi - lo, 1e-6)
    ax_lv.set_ylim(lo - pad, hi + pad)
    ax_lv.set_xlabel("x")
    ax_lv.set_ylabel("E")
    ax_lv.set_title(f"{len(spectrum.energies)} levels, N={spectrum.N} "
                    f"({spectrum.method})", fontsize="small")
    ax_lv.legend(loc="upper right", fontsize="small")
    if has_vectors:
        for j in range(min(4, spectrum.vectors.shape[1])):
            ax_fn.plot(spectrum.x, spectrum.vectors[:, j],
                       lw=1.0, label=f"psi_{j}")
        ax_fn.set_xlabel("x")
        ax_fn.set_ylabel("psi")
        ax_fn.set_title("lowest eigenfunctions", fontsize="small")
        ax_fn.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)

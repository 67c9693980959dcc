"""One renderer per figure.

Each function takes the directory written by the matching ``boost run``
experiment and an output image path.  Rendering never recomputes physics:
everything drawn comes straight from the CSV tables.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .loader import (DataError, column_block, load_almost_periods,
                     load_columns, load_qfunc, load_table)

_HEAT_CMAP = "magma"
_Q_CMAP = "viridis"


def _pair_sum(block: np.ndarray) -> np.ndarray:
    """Collapse per-basis-state probabilities (two spin states per photon
    number) into the photon-number distribution P(n)."""
    if block.shape[1] % 2:
        raise DataError("per-basis probability table has odd column count")
    return block.reshape(block.shape[0], -1, 2).sum(axis=2)


def _mark_almost_periods(ax, data_dir: Path, ymax_frac: float = 0.97,
                         label: bool = True) -> None:
    """Draw downward arrows at the tabulated almost-period times."""
    h, t, _ = load_almost_periods(data_dir / "almost_periods.csv")
    lo, hi = ax.get_ylim()
    y_tip = lo + ymax_frac * (hi - lo)
    y_tail = lo + (ymax_frac + 0.06 * np.sign(hi - lo)) * (hi - lo)
    for hk, tk in zip(h, t):
        if not ax.get_xlim()[0] <= tk <= ax.get_xlim()[1]:
            continue
        ax.annotate("", xy=(tk, y_tip), xytext=(tk, y_tail),
                    arrowprops=dict(arrowstyle="-|>", color="tab:blue",
                                    lw=1.4))
        if label:
            ax.text(tk, y_tail, f"{int(hk)}", color="tab:blue", fontsize=8,
                    ha="center", va="bottom")


def _vlines_almost_periods(ax, data_dir: Path) -> None:
    _, t, _ = load_almost_periods(data_dir / "almost_periods.csv")
    for tk in t:
        ax.axvline(tk, color="tab:blue", lw=0.7, ls=":", alpha=0.8)


def _save(fig, out_path: Path) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# figures

def fig1(data_dir: Path, out_path: Path) -> None:
    """P(n, t) heatmap with almost-period arrows, plus summary traces."""
    t, probs = column_block(data_dir / "pn_heatmap.csv", "prob_")
    pn = _pair_sum(probs)
    ts, mean_n, pr = load_columns(data_dir / "summary.csv",
                                  "time", "mean_n", "pr")

    fig, (ax0, ax1) = plt.subplots(
        2, 1, figsize=(7.0, 6.2), sharex=True,
        gridspec_kw={"height_ratios": [2.4, 1.0]})
    n_show = min(pn.shape[1], 45)
    t_edges = np.concatenate([[t[0] - (t[1] - t[0]) / 2],
                              (t[:-1] + t[1:]) / 2,
                              [t[-1] + (t[-1] - t[-2]) / 2]])
    mesh = ax0.pcolormesh(t_edges, np.arange(n_show + 1) - 0.5,
                          pn[:, :n_show].T, cmap=_HEAT_CMAP, shading="flat",
                          vmin=0.0)
    fig.colorbar(mesh, ax=ax0, label="P(n)")
    ax0.set_ylabel("photon number n")
    ax0.set_ylim(-0.5, n_show - 0.5)
    _mark_almost_periods(ax0, data_dir)

    ax1.plot(ts, mean_n, color="tab:red", label=r"$\langle n \rangle$")
    ax1.set_ylabel(r"$\langle n \rangle$", color="tab:red")
    ax1b = ax1.twinx()
    ax1b.plot(ts, pr, color="tab:green", label="participation ratio")
    ax1b.set_ylabel("participation ratio", color="tab:green")
    ax1.set_xlabel("time  (drive periods T)")
    ax1.set_xlim(t.min(), t.max())
    _save(fig, out_path)


def _snapshot_grid(data_dir: Path, out_path: Path, prefix: str) -> None:
    """Grid of P(n) bar panels at integer multiples of the drive period."""
    header, data = load_table(data_dir / f"{prefix}_pn_snapshots.csv")
    if header[0] != "time":
        raise DataError("snapshot table must start with a 'time' column")
    times = data[:, 0]
    pn = data[:, 1:]
    n = np.arange(pn.shape[1])
    n_show = min(pn.shape[1], 45)

    ncols = 4
    nrows = int(np.ceil(len(times) / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.0 * ncols,
                                                    1.9 * nrows),
                             sharex=True, sharey=True)
    axes = np.atleast_1d(axes).ravel()
    for ax, tk, row in zip(axes, times, pn):
        ax.bar(n[:n_show], row[:n_show], width=1.0, color="tab:purple")
        ax.set_title(f"t = {tk:g} T", fontsize=9)
    for ax in axes[len(times):]:
        ax.set_visible(False)
    for ax in axes[max(0, len(times) - ncols):len(times)]:
        ax.set_xlabel("n")
    fig.suptitle(f"{prefix} start: photon-number snapshots")
    fig.tight_layout()
    _save(fig, out_path)


def fig2(data_dir: Path, out_path: Path) -> None:
    _snapshot_grid(data_dir, out_path, "fock")


def fig3(data_dir: Path, out_path: Path) -> None:
    """Semiclassical ensembles: member trajectories and variance growth."""
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 8.0))
    for ax, tag, color in ((axes[0], "quasiperiodic", "tab:blue"),
                           (axes[1], "periodic", "tab:orange")):
        t, members = column_block(data_dir / f"members_{tag}.csv",
                                  "n_member_")
        ax.plot(t, members, color=color, lw=0.7, alpha=0.6)
        ax.set_ylabel("n(t)")
        ax.set_title(f"{tag} drive ratio", fontsize=10)
    _vlines_almost_periods(axes[0], data_dir)

    for tag, color in (("quasiperiodic", "tab:blue"),
                       ("periodic", "tab:orange")):
        t, var = load_columns(data_dir / f"variance_{tag}.csv",
                              "time", "variance")
        axes[2].plot(t, var, color=color, label=tag)
    axes[2].set_xlabel("time  (drive periods T)")
    axes[2].set_ylabel("ensemble variance of n")
    axes[2].legend(fontsize=9)
    fig.tight_layout()
    _save(fig, out_path)


def _draw_qfunc(ax, data_dir: Path, name: str, title: str) -> None:
    re, im, q = load_qfunc(data_dir / name)
    ax.pcolormesh(re, im, q, cmap=_Q_CMAP, shading="auto", vmin=0.0)
    ax.set_aspect("equal")
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(r"Re $\alpha$")
    ax.set_ylabel(r"Im $\alpha$")


def fig4(data_dir: Path, out_path: Path) -> None:
    """Husimi Q of the three initial-state families plus the alignment."""
    fig, axes = plt.subplots(2, 2, figsize=(8.2, 7.4))
    for ax, kind in zip(axes.ravel(), ("fock", "coherent", "cat")):
        _draw_qfunc(ax, data_dir, f"qfunc_{kind}.csv", f"{kind} start")

    t, m = load_columns(data_dir / "alignment.csv", "time", "alignment")
    ax = axes[1, 1]
    ax.plot(t, m, color="tab:red")
    for guide in (0.5, -0.5):
        ax.axhline(guide, color="gray", lw=0.7, ls="--")
    ax.set_xlabel("time  (drive periods T)")
    ax.set_ylabel(r"alignment $M(t)$")
    ax.set_ylim(-0.6, 0.6)
    fig.tight_layout()
    _save(fig, out_path)


def fig5(data_dir: Path, out_path: Path) -> None:
    """Cavity-phase drift of the ensemble against the predicted slope."""
    t, drift = column_block(data_dir / "phase_drift.csv", "drift_member_")
    (pred,) = load_columns(data_dir / "phase_drift.csv", "predicted_drift")
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    ax.plot(t, drift, lw=0.8, alpha=0.7)
    ax.plot(t, pred, color="black", lw=1.8, ls="--",
            label=r"predicted $[\delta\omega_0]_\theta\, t$")
    ax.set_xlabel("time  (drive periods T)")
    ax.set_ylabel(r"cavity phase drift  $\theta_2 - \omega t$  (rad)")
    ax.legend(fontsize=9)
    fig.tight_layout()
    _save(fig, out_path)


def fig6(data_dir: Path, out_path: Path) -> None:
    """Lab-frame versus rotating-frame comparison."""
    t, tvd, nrot, nlab = load_columns(data_dir / "labframe_comparison.csv",
                                      "time", "tvd", "mean_n_rot",
                                      "mean_n_lab")
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7.0, 5.8), sharex=True)
    ax0.plot(t, nrot, color="tab:blue", label="rotating frame")
    ax0.plot(t, nlab, color="tab:orange", ls="--", label="lab frame")
    ax0.set_ylabel(r"$\langle n \rangle$")
    ax0.legend(fontsize=9)
    ax1.semilogy(t, np.maximum(tvd, 1e-16), color="tab:red")
    ax1.set_ylabel("total variation distance")
    ax1.set_xlabel("time  (drive periods T)")
    fig.tight_layout()
    _save(fig, out_path)


def fig7(data_dir: Path, out_path: Path) -> None:
    """Quantum mean photon number against semiclassical members, with the
    torus return distance below."""
    t, mean_n, _pr = load_columns(data_dir / "quantum.csv",
                                  "time", "mean_n", "pr")
    ts, members = column_block(data_dir / "semiclassical.csv", "n_member_")
    td, dist = load_columns(data_dir / "return_distance.csv",
                            "time", "distance")
    fig, (ax0, ax1) = plt.subplots(
        2, 1, figsize=(7.0, 6.0), sharex=True,
        gridspec_kw={"height_ratios": [2.0, 1.0]})
    ax0.plot(ts, members, color="gray", lw=0.7, alpha=0.6)
    ax0.plot(t, mean_n, color="tab:red", lw=1.8,
             label=r"quantum $\langle n \rangle$")
    ax0.set_ylabel("n")
    ax0.legend(fontsize=9)
    _vlines_almost_periods(ax0, data_dir)
    ax1.plot(td, dist, color="tab:blue")
    ax1.set_ylabel("torus return distance")
    ax1.set_xlabel("time  (drive periods T)")
    _vlines_almost_periods(ax1, data_dir)
    fig.tight_layout()
    _save(fig, out_path)


def fig8(data_dir: Path, out_path: Path) -> None:
    """Grid of Husimi snapshots for the coherent start."""
    k = 0
    names = []
    while (data_dir / f"coherent_qfunc_t{k}.csv").is_file():
        names.append(f"coherent_qfunc_t{k}.csv")
        k += 1
    if not names:
        raise DataError(f"no coherent_qfunc_t*.csv files in {data_dir}")
    ncols = 4
    nrows = int(np.ceil(len(names) / ncols))
    fig, axes = plt.subplots(nrows, ncols,
                             figsize=(2.7 * ncols, 2.7 * nrows))
    axes = np.atleast_1d(axes).ravel()
    for ax, name, kk in zip(axes, names, range(len(names))):
        _draw_qfunc(ax, data_dir, name, f"t = {kk} T")
    for ax in axes[len(names):]:
        ax.set_visible(False)
    fig.suptitle("coherent start: Husimi Q snapshots")
    fig.tight_layout()
    _save(fig, out_path)


def fig9(data_dir: Path, out_path: Path) -> None:
    """Entanglement entropy for Fock and coherent starts."""
    t, sf, sc_ = load_columns(data_dir / "entanglement.csv",
                              "time", "s_ent_fock", "s_ent_coherent")
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    ax.plot(t, sf, color="tab:blue", label="Fock start")
    ax.plot(t, sc_, color="tab:orange", label="coherent start")
    ax.axhline(np.log(2), color="gray", lw=0.7, ls="--")
    ax.text(t.max(), np.log(2), r" $\ln 2$", va="center", fontsize=9)
    ax.set_xlabel("time  (drive periods T)")
    ax.set_ylabel(r"entanglement entropy $S_{\mathrm{ent}}$")
    ax.legend(fontsize=9)
    _vlines_almost_periods(ax, data_dir)
    fig.tight_layout()
    _save(fig, out_path)


def fig10(data_dir: Path, out_path: Path) -> None:
    """Rephasing metrics: return distance, participation ratio, cat
    infidelity, all against time with almost-period markers."""
    t, dist, pr, infid = load_columns(data_dir / "metrics.csv", "time",
                                      "return_distance", "pr",
                                      "cat_infidelity")
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 7.6), sharex=True)
    for ax, y, label, color in ((axes[0], dist, "torus return distance",
                                 "tab:blue"),
                                (axes[1], pr, "participation ratio",
                                 "tab:green"),
                                (axes[2], infid, "cat-state infidelity",
                                 "tab:purple")):
        ax.plot(t, y, color=color)
        ax.set_ylabel(label)
        _vlines_almost_periods(ax, data_dir)
    axes[2].set_xlabel("time  (drive periods T)")
    fig.tight_layout()
    _save(fig, out_path)


FIGURES = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
}


def render(name: str, data_dir: str | Path, out_path: str | Path) -> None:
    """Render the named figure from `data_dir` into `out_path`."""
    if name not in FIGURES:
        raise DataError(f"unknown figure {name!r}; "
                        f"choose from {sorted(FIGURES)}")
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise DataError(f"data directory not found: {data_dir}")
    FIGURES[name](data_dir, Path(out_path))

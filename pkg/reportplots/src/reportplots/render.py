"""Figure rendering for verification outputs.

One figure per experiment: a quantile-band panel (5-95% band and median
per ladder rung, continuum reference in black) and a KS-vs-ladder trend
panel on a log x axis.  Rendering is deterministic: fixed style, no RNG,
and SVGs carry a fixed hash salt.
"""

from __future__ import annotations

import os

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "reportplots"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .schema import ExperimentData  # noqa: E402

_Q = {q: i for i, q in enumerate(range(1, 100))}


def _band(row, lo=5, mid=50, hi=95):
    q = row.quantiles
    return q[_Q[lo]], q[_Q[mid]], q[_Q[hi]]


def _finite(x, fallback):
    return x if np.isfinite(x) else fallback


def render_experiment(data: ExperimentData, out_dir: str,
                      fmt: str = "svg") -> str:
    """Render one experiment figure; return the written path."""
    ladder = data.ladder
    ts = data.t_values
    fig, (ax_band, ax_ks) = plt.subplots(
        1, 2, figsize=(11, 4.2), gridspec_kw={"width_ratios": [3, 2]})

    cmap = plt.get_cmap("viridis")
    colors = {ell: cmap(0.15 + 0.7 * i / max(len(ladder) - 1, 1))
              for i, ell in enumerate(ladder)}

    for ell in ladder:
        xs, los, mids, his = [], [], [], []
        for t in ts:
            row = data.row(ell, t)
            if row is None:
                continue
            lo, mid, hi = _band(row)
            if not np.isfinite(mid):
                continue
            xs.append(t)
            los.append(_finite(lo, mid))
            mids.append(mid)
            his.append(_finite(hi, mid))
        if not xs:
            continue
        ax_band.fill_between(xs, los, his, color=colors[ell], alpha=0.18,
                             linewidth=0)
        ax_band.plot(xs, mids, color=colors[ell], label=f"$\\ell$ = {ell}")

    xs, los, mids, his = [], [], [], []
    for t in ts:
        row = data.row(0, t)
        if row is None:
            continue
        lo, mid, hi = _band(row)
        if not np.isfinite(mid):
            continue
        xs.append(t)
        los.append(_finite(lo, mid))
        mids.append(mid)
        his.append(_finite(hi, mid))
    if xs:
        ax_band.fill_between(xs, los, his, color="black", alpha=0.10,
                             linewidth=0)
        ax_band.plot(xs, mids, color="black", linestyle="--",
                     label="continuum")

    ax_band.set_xlabel("t")
    ax_band.set_ylabel("rescaled observable")
    ax_band.set_title(f"{data.name}: 5–95% bands and medians")
    ax_band.legend(fontsize=8)

    for t in ts:
        pts = [(ell, data.row(ell, t)) for ell in ladder]
        pts = [(ell, r.ks, r.ks_ci) for ell, r in pts
               if r is not None and r.ks is not None]
        if not pts:
            continue
        ells = [p[0] for p in pts]
        kss = [p[1] for p in pts]
        ax_ks.plot(ells, kss, marker="o", label=f"t = {t:g}")
        if all(p[2][0] is not None for p in pts):
            ax_ks.fill_between(ells, [p[2][0] for p in pts],
                               [p[2][1] for p in pts], alpha=0.15)
    ax_ks.set_xscale("log", base=2)
    ax_ks.set_xlabel("$\\ell$")
    ax_ks.set_ylabel("KS distance")
    ax_ks.set_title("KS vs. ladder")
    if ax_ks.lines:
        ax_ks.legend(fontsize=8)

    fig.tight_layout()
    out = os.path.join(out_dir, f"{data.name}.{fmt}")
    fig.savefig(out, metadata={"Date": None} if fmt == "svg" else None)
    plt.close(fig)
    return out


def _badge(passed) -> str:
    if passed is None:
        return "(no verdict)"
    return "**PASS**" if passed else "**FAIL**"


def write_index(entries: list, skipped: list, out_dir: str) -> str:
    """entries: (ExperimentData, figure path); skipped: (file, reason)."""
    lines = ["# Verification report", ""]
    lines.append("| experiment | verdict | final KS | figure |")
    lines.append("|---|---|---|---|")
    for data, fig_path in entries:
        finals = [r.ks for r in data.rows
                  if r.ell == max(data.ladder, default=0) and r.ks is not None]
        ks_txt = f"{max(finals):.3f}" if finals else "-"
        rel = os.path.basename(fig_path)
        lines.append(f"| {data.name} | {_badge(data.passed)} | {ks_txt} "
                     f"| ![{data.name}]({rel}) |")
    if skipped:
        lines += ["", "## Skipped inputs", ""]
        for f, reason in skipped:
            lines.append(f"- `{os.path.basename(f)}`: {reason}")
    path = os.path.join(out_dir, "index.md")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path

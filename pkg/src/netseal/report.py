"""Delimited text tables and matplotlib figures for bench and sweep runs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from netseal.scenario import BenchRow, SweepResult  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.figsize": (5.0, 3.4),
    "savefig.dpi": 150,
}


def bench_table(rows: Sequence[BenchRow]) -> str:
    lines = ["nodes\tedges\tcompare_s\trecompute_s\tcompare_ratio"]
    prev = None
    for r in rows:
        ratio = f"{r.compare_seconds / prev.compare_seconds:.3f}" if prev else "-"
        lines.append(f"{r.nodes}\t{r.edges}\t{r.compare_seconds:.6e}\t{r.recompute_seconds:.6e}\t{ratio}")
        prev = r
    return "\n".join(lines)


def plot_bench(rows: Sequence[BenchRow], path) -> Path:
    """Log-log timing plot; a slope-1 guide line anchors the comparison series."""
    path = Path(path)
    n = [r.nodes for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.loglog(n, [r.compare_seconds for r in rows], "o-", label="ledger comparison")
        ax.loglog(n, [r.recompute_seconds for r in rows], "s-", label="full recomputation")
        if rows:
            base = rows[0]
            ax.loglog(n, [base.compare_seconds * k / base.nodes for k in n], "k:", lw=0.8,
                      label="linear reference")
        ax.set_xlabel("nodes")
        ax.set_ylabel("seconds")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_sweep(result: SweepResult, path, title: str = "") -> Path:
    """Histogram of how many node rows each edit disturbed, split by verdict."""
    path = Path(path)
    detected = [len(r.affected_nodes) for _, r in result.cases if r.verdict.value != "MATCH"]
    missed = [len(r.affected_nodes) for _, r in result.cases if r.verdict.value == "MATCH"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        top = max(detected + missed + [1])
        bins = range(0, top + 2)
        ax.hist([detected, missed], bins=bins, stacked=True, label=["detected", "undetected"],
                color=["tab:blue", "tab:red"])
        ax.set_xlabel("affected nodes per edit")
        ax.set_ylabel("edits")
        ax.set_title(title or f"detection rate {result.detection_rate:.3f} ({result.total_cases} cases)")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path

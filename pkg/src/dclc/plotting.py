"""Matplotlib rendering of experiment summaries."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "DCADH": dict(marker="o", color="tab:red"),
    "ADH": dict(marker="s", color="tab:blue", linestyle="--"),
    "SPT": dict(marker="^", color="tab:green", linestyle=":"),
}

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 9,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.figsize": (6.0, 4.0),
    "savefig.dpi": 150,
}


def _series(aggs, attr):
    out: dict[str, tuple[list, list]] = {}
    for a in aggs:
        y = getattr(a, attr)
        if y is None:
            continue
        xs, ys = out.setdefault(a.algorithm, ([], []))
        xs.append(a.sweep)
        ys.append(y)
    return out


def plot_summary(aggs: Sequence, out_dir: Path, xlabel: str) -> list[Path]:
    """Writes ``cost.png`` and ``delay.png``; returns their paths."""
    paths = []
    panels = [
        ("cost.png", "mean_cost", "mean tree cost"),
        ("delay.png", "mean_max_delay_s", "mean max destination delay (s)"),
    ]
    with plt.rc_context(RC):
        for fname, attr, ylabel in panels:
            fig, ax = plt.subplots()
            for alg, (xs, ys) in _series(aggs, attr).items():
                ax.plot(xs, ys, label=alg, **STYLE.get(alg, {}))
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.grid(alpha=0.3)
            ax.legend()
            fig.tight_layout()
            path = Path(out_dir) / fname
            fig.savefig(path)
            plt.close(fig)
            paths.append(path)
    return paths

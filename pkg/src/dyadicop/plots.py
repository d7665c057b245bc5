"""Optional SVG plots generated post-hoc from experiment CSVs.

Plotting never feeds back into recorded values; it only reads the CSV.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

__all__ = ["plot_csv"]


def _load_rows(csv_path):
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def plot_csv(csv_path, out_path=None) -> Path:
    """Render one line per metric against the varying sweep column.

    Requires matplotlib (the 'plot' extra); output format is SVG.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    csv_path = Path(csv_path)
    rows = _load_rows(csv_path)
    if not rows:
        raise ValueError(f"no data rows in {csv_path}")
    # pick the sweep axis: the first of N, n, p that actually varies
    axis = None
    for cand in ("N", "n", "p"):
        if len({r[cand] for r in rows if r[cand]}) > 1:
            axis = cand
            break
    if axis is None:
        axis = "N" if any(r["N"] for r in rows) else None

    fig, ax = plt.subplots(figsize=(7, 4.5))
    series = defaultdict(list)
    for r in rows:
        x = float(r[axis]) if axis and r[axis] else 0.0
        label = r["metric"]
        extra = [f"{c}={r[c]}" for c in ("N", "n", "p") if c != axis and r[c]]
        if extra:
            label += " (" + ", ".join(extra) + ")"
        series[label].append((x, float(r["value"])))
    for label, pts in series.items():
        pts.sort()
        ax.plot([x for x, _ in pts], [y for _, y in pts], marker="o", label=label)
    ax.set_xlabel(axis or "index")
    ax.set_ylabel("value")
    ax.set_title(rows[0]["experiment"])
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    if out_path is None:
        out_path = csv_path.with_suffix(".svg")
    fig.savefig(out_path, format="svg", bbox_inches="tight")
    plt.close(fig)
    return Path(out_path)

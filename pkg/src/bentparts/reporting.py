"""Report rendering: CSV alongside a matplotlib figure for each command.

Reports are written next to the machine-readable JSON when a report
directory is requested: `report.csv` carries the per-row facts, and
`report.png` a small summary figure (component verdict strip, cell-size
bars, or search profile counts).
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def write_csv(path: str, rows: list[dict], fieldnames=None):
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else ["empty"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        for r in rows:
            w.writerow(r)


def render_analysis(report: dict, outdir: str):
    os.makedirs(outdir, exist_ok=True)
    comps = report.get("components", [])
    rows = [
        {
            "component": c.get("component"),
            "is_bent": c.get("is_bent"),
            "regularity": c.get("regularity", ""),
            "epsilon": c.get("epsilon", ""),
            "samples": c.get("samples", ""),
        }
        for c in comps
    ]
    write_csv(os.path.join(outdir, "report.csv"), rows,
              ["component", "is_bent", "regularity", "epsilon", "samples"])
    fig, ax = plt.subplots(figsize=(8, 2.2))
    if comps:
        flags = np.array([1 if c.get("is_bent") else 0 for c in comps])
        ax.imshow(flags[None, :], aspect="auto", cmap="RdYlGn", vmin=0, vmax=1)
        ax.set_yticks([])
        ax.set_xlabel("component index")
        ax.set_title("bent verdict per component (green = bent)")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "report.png"), dpi=120)
    plt.close(fig)


def render_partition(report: dict, outdir: str):
    os.makedirs(outdir, exist_ok=True)
    sizes = report.get("cell_sizes", [])
    rows = [{"cell": i, "size": s} for i, s in enumerate(sizes)]
    write_csv(os.path.join(outdir, "report.csv"), rows, ["cell", "size"])
    fig, ax = plt.subplots(figsize=(6, 3))
    if sizes:
        ax.bar(range(len(sizes)), sizes, color="#4878d0")
    verdict = report.get("is_bent_partition")
    ax.set_xlabel("cell")
    ax.set_ylabel("size")
    ax.set_title(f"partition depth {len(sizes)}; bent = {verdict}")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "report.png"), dpi=120)
    plt.close(fig)


def render_search(report: dict, outdir: str):
    os.makedirs(outdir, exist_ok=True)
    profiles: dict[str, int] = {}
    for part in report.get("partitions", []):
        key = "/".join(str(len(c)) for c in part)
        profiles[key] = profiles.get(key, 0) + 1
    rows = [{"size_profile": k, "count": v} for k, v in sorted(profiles.items())]
    write_csv(os.path.join(outdir, "report.csv"), rows, ["size_profile", "count"])
    fig, ax = plt.subplots(figsize=(6, 3))
    if profiles:
        keys = sorted(profiles)
        ax.bar(range(len(keys)), [profiles[k] for k in keys], color="#4878d0")
        ax.set_xticks(range(len(keys)))
        ax.set_xticklabels(keys, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("bent partitions")
    ax.set_title(
        f"search(n={report.get('n')}, K={report.get('K')}): "
        f"{report.get('found', 0)} found"
    )
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "report.png"), dpi=120)
    plt.close(fig)

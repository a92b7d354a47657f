"""Benchmark result tables and box-plot figures.

Rows are canonical-sorted before writing so reruns diff cleanly; the
summary JSON carries five-number (box-plot) statistics per group.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

CSV_COLUMNS = (
    "class",
    "n",
    "circuit_id",
    "alpha",
    "w",
    "k",
    "fidelity",
    "hog",
    "l1",
    "cnot_count",
    "cnot_depth",
    "compile_ms",
)

METRICS = ("fidelity", "hog", "l1", "cnot_count", "cnot_depth")


@dataclass(frozen=True)
class RunRecord:
    circuit_class: str
    num_qubits: int
    circuit_id: int
    alpha: float
    beam_width: int
    search_depth: int
    fidelity: float
    hog: float
    l1: float
    cnot_count: int
    cnot_depth: int
    compile_ms: float

    def csv_row(self) -> list:
        return [
            self.circuit_class,
            self.num_qubits,
            self.circuit_id,
            self.alpha,
            self.beam_width,
            self.search_depth,
            f"{self.fidelity:.6f}",
            f"{self.hog:.6f}",
            f"{self.l1:.6f}",
            self.cnot_count,
            self.cnot_depth,
            f"{self.compile_ms:.3f}",
        ]


def sort_records(records) -> list[RunRecord]:
    return sorted(
        records,
        key=lambda r: (
            r.circuit_class,
            r.num_qubits,
            r.circuit_id,
            r.alpha,
            r.beam_width,
            r.search_depth,
        ),
    )


def csv_text(records) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sort_records(records):
        writer.writerow(r.csv_row())
    return buf.getvalue()


def write_csv(records, path) -> None:
    Path(path).write_text(csv_text(records), encoding="utf-8")


def five_number(values) -> dict[str, float]:
    """Box-plot statistics: min, lower quartile, median, upper quartile, max."""
    arr = np.asarray(list(values), dtype=float)
    q = np.percentile(arr, [0, 25, 50, 75, 100])
    return {
        "min": float(q[0]),
        "q1": float(q[1]),
        "median": float(q[2]),
        "q3": float(q[3]),
        "max": float(q[4]),
    }


def summarize(records, config: dict | None = None) -> dict:
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        key = (r.circuit_class, r.num_qubits, r.alpha, r.beam_width, r.search_depth)
        groups.setdefault(key, []).append(r)
    out = []
    for key in sorted(groups):
        cls, n, alpha, w, k = key
        rows = groups[key]
        out.append(
            {
                "class": cls,
                "n": n,
                "alpha": alpha,
                "w": w,
                "k": k,
                "count": len(rows),
                "metrics": {
                    m: five_number(getattr(r, m) for r in rows) for m in METRICS
                },
            }
        )
    summary = {"groups": out}
    if config is not None:
        summary["config"] = config
    return summary


def write_summary_json(records, path, config: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summarize(records, config), fh, indent=1)
        fh.write("\n")


def render_figures(records, outdir) -> list[Path]:
    """One box-plot figure per (class, metric): boxes grouped by width n,
    one box per alpha. Returns the written file paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    records = list(records)
    classes = sorted({r.circuit_class for r in records})
    written: list[Path] = []
    for cls in classes:
        rows = [r for r in records if r.circuit_class == cls]
        sizes = sorted({r.num_qubits for r in rows})
        alphas = sorted({r.alpha for r in rows})
        stride = len(alphas) + 1
        cmap = plt.get_cmap("tab10")
        for metric in METRICS:
            fig, ax = plt.subplots(figsize=(6.4, 3.6))
            for ai, alpha in enumerate(alphas):
                data = [
                    [
                        getattr(r, metric)
                        for r in rows
                        if r.num_qubits == n and r.alpha == alpha
                    ]
                    for n in sizes
                ]
                positions = [gi * stride + ai for gi in range(len(sizes))]
                box = ax.boxplot(
                    data,
                    positions=positions,
                    widths=0.8,
                    whis=(0, 100),
                    patch_artist=True,
                    manage_ticks=False,
                )
                for patch in box["boxes"]:
                    patch.set_facecolor(cmap(ai))
                    patch.set_alpha(0.6)
                ax.plot([], [], color=cmap(ai), label=f"alpha={alpha}")
            ax.set_xticks([gi * stride + (len(alphas) - 1) / 2 for gi in range(len(sizes))])
            ax.set_xticklabels([str(n) for n in sizes])
            ax.set_xlabel("qubits")
            ax.set_ylabel(metric)
            ax.set_title(f"{cls} circuits")
            ax.legend(loc="best", fontsize=8)
            fig.tight_layout()
            path = outdir / f"{cls}_{metric}.png"
            fig.savefig(path, dpi=120)
            plt.close(fig)
            written.append(path)
    return written


def record_to_dict(record: RunRecord) -> dict:
    return asdict(record)

#!/usr/bin/env python3
"""Turn harness CSVs into static figures.

    python plots/render.py --spec spec.json

The spec file names the figure kind, the input CSVs and the output path:

    {"kind": "scaling",
     "inputs": [{"path": "d3.csv", "x": 3}, {"path": "d4.csv", "x": 4}],
     "xlabel": "Delta",
     "out": "scaling.svg"}

Kinds:
  scaling   -- one point per input CSV (its summary row's amortized value),
               overlaying the theoretical curve from the CSV bound column.
  cycle     -- running amortized recourse over one CSV's updates, with the
               bound as a horizontal reference line.
  histogram -- bars from a `coloring,count,expected` CSV with the uniform
               reference line.

Rendering is a pure function of the input bytes: fixed style, no
timestamps, deterministic SVG ids.
"""

import argparse
import csv
import json
import sys
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


class SchemaMismatch(Exception):
    """Input CSV does not carry the columns the figure needs."""


RUN_COLUMNS = {"rep", "update_idx", "kind", "recourse", "cum_amortized", "bound"}
HIST_COLUMNS = {"coloring", "count", "expected"}


def _style():
    plt.rcParams.update(
        {
            "svg.hashsalt": "forestcolor-plots",
            "figure.figsize": (6.0, 4.0),
            "figure.dpi": 100,
            "font.size": 10,
            "axes.grid": True,
            "grid.alpha": 0.3,
        }
    )


def _read_rows(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        fieldnames = reader.fieldnames
    if fieldnames is None or not rows:
        raise SchemaMismatch(f"{path}: empty CSV")
    return fieldnames, rows


def _summary(path):
    fieldnames, rows = _read_rows(path)
    if not RUN_COLUMNS.issubset(fieldnames):
        raise SchemaMismatch(f"{path}: missing columns {RUN_COLUMNS - set(fieldnames)}")
    out = [r for r in rows if r["update_idx"] == "summary"]
    if not out:
        raise SchemaMismatch(f"{path}: no summary row")
    return out


def render_scaling(spec, ax):
    xs, ys, bounds = [], [], []
    for item in spec["inputs"]:
        summaries = _summary(item["path"])
        amortized = sum(
            float(Fraction(s["amortized_exact"])) for s in summaries
        ) / len(summaries)
        xs.append(item["x"])
        ys.append(amortized)
        bound = summaries[0].get("bound", "")
        bounds.append(float(bound) if bound else None)
    ax.plot(xs, ys, "o-", label="measured amortized recourse")
    if all(b is not None for b in bounds):
        ax.plot(xs, bounds, "s--", label="theoretical")
    ax.set_xlabel(spec.get("xlabel", "x"))
    ax.set_ylabel("amortized recourse")
    ax.legend()


def render_cycle(spec, ax):
    item = spec["inputs"][0]
    fieldnames, rows = _read_rows(item["path"])
    if not RUN_COLUMNS.issubset(fieldnames):
        raise SchemaMismatch(
            f"{item['path']}: missing columns {RUN_COLUMNS - set(fieldnames)}"
        )
    per_update = [r for r in rows if r["update_idx"] != "summary"]
    if not per_update:
        raise SchemaMismatch(f"{item['path']}: no per-update rows")
    xs = list(range(1, len(per_update) + 1))
    ys = [float(r["cum_amortized"]) for r in per_update]
    ax.plot(xs, ys, "-", label="running amortized recourse")
    summary = [r for r in rows if r["update_idx"] == "summary"]
    if summary and summary[0].get("bound"):
        ax.axhline(
            float(summary[0]["bound"]), linestyle="--", color="tab:orange",
            label="theoretical",
        )
    ax.set_xlabel("update")
    ax.set_ylabel("amortized recourse")
    ax.legend()


def render_histogram(spec, ax):
    item = spec["inputs"][0]
    fieldnames, rows = _read_rows(item["path"])
    if not HIST_COLUMNS.issubset(fieldnames):
        raise SchemaMismatch(
            f"{item['path']}: missing columns {HIST_COLUMNS - set(fieldnames)}"
        )
    rows = sorted(rows, key=lambda r: r["coloring"])
    counts = [int(r["count"]) for r in rows]
    ax.bar(range(len(counts)), counts, label="observed")
    ax.axhline(
        float(rows[0]["expected"]), linestyle="--", color="tab:orange",
        label="uniform (theoretical)",
    )
    ax.set_xlabel("coloring (canonical order)")
    ax.set_ylabel("occurrences")
    ax.legend()


KINDS = {
    "scaling": render_scaling,
    "cycle": render_cycle,
    "histogram": render_histogram,
}


def render(spec) -> str:
    """Render one figure; returns the output path."""
    kind = spec.get("kind")
    if kind not in KINDS:
        raise SchemaMismatch(f"unknown figure kind {kind!r}")
    if not spec.get("inputs"):
        raise SchemaMismatch("spec lists no inputs")
    _style()
    fig, ax = plt.subplots()
    try:
        KINDS[kind](spec, ax)
        if spec.get("title"):
            ax.set_title(spec["title"])
        fig.tight_layout()
        fig.savefig(spec["out"], format=None, metadata={"Date": None})
    finally:
        plt.close(fig)
    return spec["out"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="render harness CSVs to figures")
    parser.add_argument("--spec", required=True, help="JSON plot spec")
    args = parser.parse_args(argv)
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    out = render(spec)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

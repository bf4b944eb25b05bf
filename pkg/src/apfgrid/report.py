"""Campaign reports: a CSV of runs, a JSON summary and a PNG figure."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import fields
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .campaign import RunRecord  # noqa: E402

FIELDS = [f.name for f in fields(RunRecord)]


def summarize(records: Sequence[RunRecord], bound_constant: int = 10) -> dict:
    outcomes = Counter(r.outcome for r in records)
    done = [r for r in records if r.outcome == "Success"]
    return {
        "runs": len(records),
        "outcomes": dict(sorted(outcomes.items())),
        "bound_constant": bound_constant,
        "bound_violations": sum(not r.bound_ok for r in done),
        "max_moves_per_kD": round(max((r.ratio for r in done), default=0.0), 6),
        "not_formed": sum(not r.formed for r in records if r.outcome == "Success"),
        "milestone_failures": sum(not r.milestones_ok for r in records),
        "decider_promotions": sum(r.decider_promotions for r in records),
        "decider_violations": sum(r.decider_violations for r in records),
        "leader1_pairs": sum(r.leader1_pairs for r in records),
        "leader1_violations": sum(r.leader1_violations for r in records),
    }


def write_csv(path, records: Sequence[RunRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FIELDS, lineterminator="\n")
        w.writeheader()
        for r in records:
            row = r.as_row()
            row["ratio"] = f"{r.ratio:.6f}"
            w.writerow(row)


def plot_moves(path, records: Sequence[RunRecord], bound_constant: int = 10) -> None:
    """Total moves against k*D per policy, with the c*k*D bound as a line."""
    fig, ax = plt.subplots(figsize=(6, 4.5), dpi=100)
    by_policy: dict = {}
    for r in records:
        if r.outcome == "Success":
            by_policy.setdefault(r.policy, []).append((r.k * r.D, r.total_moves))
    for pol in sorted(by_policy):
        xs, ys = zip(*by_policy[pol])
        ax.scatter(xs, ys, s=10, alpha=0.6, label=pol)
    top = max((r.k * r.D for r in records), default=1)
    ax.plot([0, top], [0, bound_constant * top], "k--", lw=1, label=f"{bound_constant}·k·D")
    ax.set_xlabel("k · D")
    ax.set_ylabel("total unit moves")
    ax.set_title("Moves per successful run")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def write_report(directory, records: Sequence[RunRecord], bound_constant: int = 10) -> dict:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "runs.csv", records)
    summary = summarize(records, bound_constant)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    plot_moves(out / "moves.png", records, bound_constant)
    return summary

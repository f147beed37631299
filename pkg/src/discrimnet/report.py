"""Artifact writers: delimited outputs plus rendered figures for report paths.

Every artifact is deterministic for a fixed configuration: floats are
written with shortest round-trip repr, rows follow fixed orders, and no
timestamps are embedded.  Provenance (a short hash of the resolved
configuration plus the seed) rides along as columns in record streams and
as comment headers elsewhere.
"""

from __future__ import annotations

import csv
import hashlib
import json
from typing import Iterable, Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .certify import (
    CONDITIONAL_CHSH_QUANTUM_MAX,
    THREE_CHSH_CLASSICAL_BOUND,
    THREE_CHSH_QUANTUM_MAX,
    CertificationReport,
)
from .guessing import SweepResult
from .network import CountsTable


def config_hash(config: Mapping[str, object]) -> str:
    """Short stable digest of a resolved configuration mapping."""
    canonical = "\n".join(f"{k} = {config[k]!r}" for k in sorted(config))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _comment_header(provenance: Mapping[str, object]) -> list[str]:
    return [f"# {key}={format_value(value)}" for key, value in provenance.items()]


def write_key_value_report(path, mapping: Mapping[str, object], provenance: Mapping[str, object]) -> None:
    """Flat ``key = value`` report with a provenance comment header."""
    lines = _comment_header(provenance)
    lines.extend(f"{key} = {format_value(value)}" for key, value in mapping.items())
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def write_records_csv(path, fieldnames: list[str], records: Iterable[Mapping], provenance: Mapping[str, object]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for line in _comment_header(provenance):
            handle.write(line + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(fieldnames)
        for record in records:
            writer.writerow([format_value(record[name]) for name in fieldnames])


def write_records_jsonl(path, records: Iterable[Mapping], provenance: Mapping[str, object]) -> None:
    """One JSON object per line; provenance fields are merged into each record."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            merged = {**dict(record), **dict(provenance)}
            handle.write(json.dumps(merged, sort_keys=True) + "\n")


def counts_records(counts: CountsTable) -> list[dict]:
    """Flatten a counts table into (inputs..., outcomes..., count) records."""
    records = []
    for inputs in sorted(counts.counts):
        for outcomes in sorted(counts.counts[inputs]):
            record = {}
            for i, component in enumerate(inputs):
                record[f"input_{i}"] = component
            for i, component in enumerate(outcomes):
                record[f"outcome_{i}"] = component
            record["count"] = counts.counts[inputs][outcomes]
            records.append(record)
    return records


def write_counts_csv(path, counts: CountsTable, provenance: Mapping[str, object]) -> None:
    records = counts_records(counts)
    fieldnames = list(records[0]) if records else []
    write_records_csv(path, fieldnames, records, provenance)


def sweep_pair_records(result: SweepResult, provenance: Mapping[str, object]) -> list[dict]:
    """Per-pair rows at the heatmap prior: the delimited face of the sweep."""
    records = []
    n = result.state_c.size
    q = result.heatmap_q
    for i in range(n):
        for j in range(n):
            records.append(
                {
                    "q": q,
                    "c1": float(result.state_c[i]),
                    "d_sign1": int(result.state_sign[i]),
                    "c2": float(result.state_c[j]),
                    "d_sign2": int(result.state_sign[j]),
                    "p_g1": float(result.slice_optimal[i, j]),
                    "p_g2": float(result.slice_restricted[i, j]),
                    "p_delta": float(result.slice_gap[i, j]),
                    **provenance,
                }
            )
    return records


def write_sweep_csv(path, result: SweepResult, provenance: Mapping[str, object]) -> None:
    fieldnames = ["q", "c1", "d_sign1", "c2", "d_sign2", "p_g1", "p_g2", "p_delta"]
    fieldnames += list(provenance)
    write_records_csv(path, fieldnames, sweep_pair_records(result, provenance), provenance)


def write_sweep_summary_csv(path, result: SweepResult, provenance: Mapping[str, object]) -> None:
    fieldnames = ["q", "avg_p_delta", "max_p_delta"] + list(provenance)
    records = [
        {
            "q": float(q),
            "avg_p_delta": float(avg),
            "max_p_delta": float(mx),
            **provenance,
        }
        for q, avg, mx in zip(result.q_values, result.avg_gap, result.max_gap)
    ]
    write_records_csv(path, fieldnames, records, provenance)


def render_certification_figure(report: CertificationReport, path) -> None:
    """Bar view of the certification values against their bounds."""
    fig, (ax_beta, ax_gamma) = plt.subplots(1, 2, figsize=(7.0, 3.2))
    ax_beta.bar([0], [report.three_chsh], width=0.5, color="#4878d0")
    ax_beta.axhline(THREE_CHSH_QUANTUM_MAX, color="k", ls="--", lw=1, label="quantum max")
    ax_beta.axhline(THREE_CHSH_CLASSICAL_BOUND, color="r", ls=":", lw=1, label="classical bound")
    ax_beta.set_xticks([0])
    ax_beta.set_xticklabels(["triple CHSH"])
    ax_beta.set_ylim(0, 9)
    ax_beta.legend(fontsize=8, loc="lower right")

    xs = np.arange(4)
    ax_gamma.bar(xs, report.conditional_chsh, width=0.6, color="#6acc64")
    ax_gamma.axhline(CONDITIONAL_CHSH_QUANTUM_MAX, color="k", ls="--", lw=1)
    ax_gamma.axhline(2.0, color="r", ls=":", lw=1)
    ax_gamma.set_xticks(xs)
    ax_gamma.set_xticklabels([f"outcome {b}" for b in xs], fontsize=8)
    ax_gamma.set_ylim(0, 3)
    ax_gamma.set_title("conditioned CHSH forms", fontsize=9)
    fig.suptitle(f"certification {'PASSED' if report.passed else 'FAILED'}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep_figures(result: SweepResult, vs_q_path, heatmap_path) -> None:
    """Gap-vs-prior curves and the equal-prior pairwise heatmap."""
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(result.q_values, result.max_gap, label="max over pairs", color="#d65f5f")
    ax.plot(result.q_values, result.avg_gap, label="avg over pairs", color="#4878d0")
    ax.set_xlabel("prior q1")
    ax.set_ylabel("guessing-probability gap")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(vs_q_path, dpi=150)
    plt.close(fig)

    positive = result.state_sign > 0
    c_axis = result.state_c[positive]
    grid = result.slice_gap[np.ix_(positive, positive)]
    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    mesh = ax.pcolormesh(c_axis, c_axis, grid.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="gap")
    ax.set_xlabel("c1")
    ax.set_ylabel("c2")
    ax.set_title(f"gap at q1 = {result.heatmap_q:g}", fontsize=9)
    fig.tight_layout()
    fig.savefig(heatmap_path, dpi=150)
    plt.close(fig)


def render_decision_figure(records: list[Mapping], path) -> None:
    """Per-trial margins, colored by correctness."""
    fig, ax = plt.subplots(figsize=(5.2, 3.2))
    trials = [r["trial"] for r in records]
    margins = [r["margin"] for r in records]
    colors = ["#6acc64" if r["correct"] else "#d65f5f" for r in records]
    ax.scatter(trials, margins, c=colors, s=14)
    ax.set_xlabel("trial")
    ax.set_ylabel("decision margin")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

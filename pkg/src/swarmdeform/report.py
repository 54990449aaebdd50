"""Verification reports and plot-ready exports.

The report is a single JSON document: per-formula verdicts with witnesses,
the initial-formation margins, the sufficient-condition verdict, the
leader-only sweeps and the liveness summary.  The plot-data path exports
per-agent deviation and deformation-eigenvalue time series as CSV and
renders the matching figures to PNG files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .formula_text import formula_to_text
from .ltl import Formula, Verdict
from .safety import (
    LeaderCheckVerdict,
    SafetyMargins,
    TheoremVerdict,
    deformation_spectrum,
)


def verdict_to_dict(formula: Formula, verdict: Verdict) -> dict:
    out = {
        "formula": formula_to_text(formula),
        "satisfied": verdict.satisfied,
    }
    if verdict.witness is not None:
        w = verdict.witness
        out["witness"] = {
            "t": w.time,
            "sample": w.sample,
            "atom": formula_to_text(w.atom),
            "lhs": w.lhs,
            "rhs": w.rhs,
        }
    return out


def build_report(
    trace,
    formulas: dict[str, Formula],
    verdicts: dict[str, Verdict],
    margins: Optional[SafetyMargins] = None,
    theorem1: Optional[TheoremVerdict] = None,
    leader_checks: Optional[dict[str, LeaderCheckVerdict]] = None,
    margin_inflate: float = 0.0,
) -> dict:
    """Assemble the verification report dictionary."""
    formula_section = {
        name: verdict_to_dict(formulas[name], verdicts[name]) for name in formulas
    }
    all_ok = all(v.satisfied for v in verdicts.values())
    report = {
        "schema": 1,
        "trace": {
            "h": trace.step,
            "t0": float(trace.times[0]),
            "tf": float(trace.times[-1]),
            "samples": trace.n_samples,
            "n_agents": trace.n_agents,
            "dimension": trace.dim,
        },
        "margin_inflate": margin_inflate,
        "formulas": formula_section,
        "satisfied": all_ok,
    }
    if "psi6" in verdicts:
        report["liveness"] = {"satisfied": verdicts["psi6"].satisfied}
    safety: dict = {}
    if margins is not None:
        safety["margins"] = margins.to_dict()
        safety["theorem1"] = theorem1.to_dict() if theorem1 is not None else None
    if leader_checks:
        for name, check in leader_checks.items():
            safety[name] = check.to_dict()
    if safety:
        report["safety"] = safety
    return report


def write_plot_data(trace, out_dir, margins: Optional[SafetyMargins] = None) -> list[Path]:
    """Export deviation and eigenvalue time series as CSV plus PNG figures.

    Returns the list of files written.  Eigenvalue outputs require the
    trace's transform channels and are skipped when absent.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    times = trace.times

    deviations = trace.deviations()
    dev_csv = out / "deviations.csv"
    header = "t," + ",".join(f"dev_{aid}" for aid in trace.agent_ids)
    body = "\n".join(
        f"{times[k]:.17g}," + ",".join(f"{v:.17g}" for v in deviations[k])
        for k in range(trace.n_samples)
    )
    dev_csv.write_text(header + "\n" + body + "\n")
    written.append(dev_csv)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for row, aid in enumerate(trace.agent_ids):
        ax.plot(times, deviations[:, row], lw=0.9, label=f"agent {aid}")
    if margins is not None:
        ax.axhline(margins.deviation_bound, color="k", ls="--", lw=1.2, label="bound")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("deviation from desired (m)")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    dev_png = out / "deviations.png"
    fig.savefig(dev_png, dpi=130)
    plt.close(fig)
    written.append(dev_png)

    if trace.jacobians is not None:
        spectrum = deformation_spectrum(trace)
        eig_csv = out / "eigenvalues.csv"
        header = "t," + ",".join(f"lambda_{i + 1}" for i in range(spectrum.shape[1]))
        body = "\n".join(
            f"{times[k]:.17g}," + ",".join(f"{v:.17g}" for v in spectrum[k])
            for k in range(trace.n_samples)
        )
        eig_csv.write_text(header + "\n" + body + "\n")
        written.append(eig_csv)

        fig, ax = plt.subplots(figsize=(8, 4.5))
        for i in range(spectrum.shape[1]):
            ax.plot(times, spectrum[:, i], lw=1.1, label=f"eigenvalue {i + 1}")
        if margins is not None and np.isfinite(margins.lambda_min):
            ax.axhline(margins.lambda_min, color="k", ls="--", lw=1.2, label="lambda_min")
        ax.set_xlabel("t (s)")
        ax.set_ylabel("deformation eigenvalues")
        ax.legend(fontsize=8)
        fig.tight_layout()
        eig_png = out / "eigenvalues.png"
        fig.savefig(eig_png, dpi=130)
        plt.close(fig)
        written.append(eig_png)
    return written

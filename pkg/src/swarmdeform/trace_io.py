"""Trace persistence: CSV for the bulk samples, JSON sidecar for run metadata.

One CSV row per (sample, agent) holding time, agent id, position, velocity
and desired position, written with 17 significant digits so values survive
a write/read cycle bit-exactly.  The sidecar `<trace>.meta.json` records
the run shape (step, horizon, agent and leader ids) so a trace can be
reloaded without its scenario.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import Trace


def _header(dim: int) -> list[str]:
    axes = ["x", "y", "z"][:dim]
    return (
        ["t", "agent"]
        + axes
        + [f"v{a}" for a in axes]
        + [f"{a}_ht" for a in axes]
    )


def write_trace(trace: Trace, path) -> None:
    """Write a trace CSV and its metadata sidecar."""
    path = Path(path)
    d = trace.dim
    lines = [",".join(_header(d))]
    for k in range(trace.n_samples):
        t = trace.times[k]
        for row, aid in enumerate(trace.agent_ids):
            fields = [f"{t:.17g}", str(aid)]
            fields += [f"{v:.17g}" for v in trace.positions[k, row]]
            fields += [f"{v:.17g}" for v in trace.velocities[k, row]]
            fields += [f"{v:.17g}" for v in trace.desired[k, row]]
            lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n")
    meta = {
        "schema": 1,
        "n_agents": trace.n_agents,
        "dimension": d,
        "h": trace.step,
        "t0": float(trace.times[0]),
        "tf": float(trace.times[-1]),
        "samples": trace.n_samples,
        "agent_ids": list(trace.agent_ids),
        "leaders": list(trace.leader_ids),
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")


def sidecar_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def read_trace(path) -> Trace:
    """Read a trace CSV (and sidecar when present).

    The returned trace carries positions, velocities and desired positions;
    transform and containment channels can be reconstructed with
    Trace.with_derived once leader ids are known (they are picked up from
    the sidecar automatically when it exists).

    Raises
    ------
    ValueError
        On an unrecognized header or a malformed sample grid.
    """
    path = Path(path)
    with path.open() as fh:
        header = [c.strip() for c in fh.readline().strip().split(",")]
    for d in (2, 3):
        if header == _header(d):
            dim = d
            break
    else:
        raise ValueError(f"unrecognized trace header: {header}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2 + 3 * dim:
        raise ValueError("trace rows do not match the header")
    times = np.unique(data[:, 0])
    ids = np.unique(data[:, 1]).astype(int)
    t_count, n = len(times), len(ids)
    if t_count * n != data.shape[0]:
        raise ValueError("trace is not a complete (sample, agent) grid")
    order = np.lexsort((data[:, 1], data[:, 0]))
    grid = data[order].reshape(t_count, n, data.shape[1])
    if not (grid[:, :, 1].astype(int) == ids[None, :]).all():
        raise ValueError("trace is not a complete (sample, agent) grid")

    leaders: tuple[int, ...] = ()
    meta_file = sidecar_path(path)
    if meta_file.exists():
        meta = json.loads(meta_file.read_text())
        leaders = tuple(int(i) for i in meta.get("leaders", ()))

    return Trace(
        times=times,
        positions=grid[:, :, 2 : 2 + dim].copy(),
        velocities=grid[:, :, 2 + dim : 2 + 2 * dim].copy(),
        desired=grid[:, :, 2 + 2 * dim :].copy(),
        agent_ids=tuple(int(i) for i in ids),
        leader_ids=leaders,
    )

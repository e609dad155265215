"""Per-iteration metrics rows and their CSV serialization.

Byte output is deterministic for fixed input: floats use 17 significant
digits (exact round trip), the disagreement column stores the natural log
with the literal string ``-inf`` when the disagreement is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engines import Trajectory

CSV_HEADER = "iter,disagreement_log,mean,objective,max_change"


@dataclass(frozen=True)
class MetricsRow:
    iteration: int
    disagreement_log: float
    mean: float
    objective: float
    max_change: float


def metrics_from_trajectory(traj: Trajectory) -> list[MetricsRow]:
    rows = []
    for k in range(len(traj.iterations)):
        d = float(traj.disagreement[k])
        rows.append(
            MetricsRow(
                iteration=int(traj.iterations[k]),
                disagreement_log=math.log(d) if d > 0.0 else -math.inf,
                mean=float(traj.mean[k]),
                objective=float(traj.objective[k]),
                max_change=float(traj.max_change[k]),
            )
        )
    return rows


def _fmt(value: float) -> str:
    if value == -math.inf:
        return "-inf"
    if value == math.inf:
        return "inf"
    return format(value, ".17g")


def render_csv(rows: list[MetricsRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.iteration},{_fmt(row.disagreement_log)},{_fmt(row.mean)},"
            f"{_fmt(row.objective)},{_fmt(row.max_change)}"
        )
    return "\n".join(lines) + "\n"


def emit_csv(rows: list[MetricsRow], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_csv(rows))
    except OSError as exc:
        raise OSError(f"cannot write metrics to {path}: {exc}") from exc


def parse_csv(path: str) -> list[MetricsRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns")
            rows.append(
                MetricsRow(
                    iteration=int(parts[0]),
                    disagreement_log=float(parts[1]),
                    mean=float(parts[2]),
                    objective=float(parts[3]),
                    max_change=float(parts[4]),
                )
            )
    return rows

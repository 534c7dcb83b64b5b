"""CSV schemas for trajectories, metric curves, and comparison tables.

All floats are rendered with 9 significant digits so written files round-trip
exactly and identical experiments produce byte-identical output.
"""
from __future__ import annotations

import csv
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .ensemble import CompareRow, EnsembleCurve
from .model import VehicleKind
from .scenario import OpenRoad, RunRecord

LEADER_LABEL = "LEADER"


class CsvFormatError(ValueError):
    """Unexpected header or malformed row in a results file."""


def fmt(x: float) -> str:
    return format(float(x), ".9g")


TRAJECTORY_HEADER = ["t", "vehicle", "kind", "position", "speed"]
CURVE_HEADER = ["index", "mean_std", "stderr"]
COMPARE_HEADER = ["kind", "mpr", "mean_std", "stderr", "reduction_pct"]


def write_trajectory_csv(record: RunRecord, path) -> None:
    """Long-format trajectory rows; the open-road leader is vehicle 0."""
    times = record.times
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRAJECTORY_HEADER)
        has_leader = record.leader_positions is not None
        leader_speed = (
            record.geometry.leader_speed
            if isinstance(record.geometry, OpenRoad)
            else 0.0
        )
        for i, t in enumerate(times):
            if has_leader:
                w.writerow(
                    [fmt(t), 0, LEADER_LABEL, fmt(record.leader_positions[i]), fmt(leader_speed)]
                )
            for n in range(record.n_vehicles):
                w.writerow(
                    [
                        fmt(t),
                        n + 1,
                        record.kinds[n].value,
                        fmt(record.positions[i, n]),
                        fmt(record.speeds[i, n]),
                    ]
                )


def read_trajectory_csv(path) -> List[Dict]:
    rows = []
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r, None)
        if header != TRAJECTORY_HEADER:
            raise CsvFormatError(f"unexpected trajectory header {header}")
        for row in r:
            rows.append(
                {
                    "t": float(row[0]),
                    "vehicle": int(row[1]),
                    "kind": row[2],
                    "position": float(row[3]),
                    "speed": float(row[4]),
                }
            )
    return rows


def write_speeds_csv(record: RunRecord, path) -> None:
    """Wide speed matrix: one column per vehicle, leader first when present."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        has_leader = record.leader_positions is not None
        cols = ["t"]
        if has_leader:
            cols.append("v0")
        cols += [f"v{n + 1}" for n in range(record.n_vehicles)]
        w.writerow(cols)
        leader_speed = (
            record.geometry.leader_speed
            if isinstance(record.geometry, OpenRoad)
            else 0.0
        )
        for i, t in enumerate(record.times):
            row = [fmt(t)]
            if has_leader:
                row.append(fmt(leader_speed))
            row += [fmt(v) for v in record.speeds[i]]
            w.writerow(row)


def curve_index(curve: EnsembleCurve) -> np.ndarray:
    """Vehicle numbers 1..N for per-vehicle curves, step numbers 0.. for over-time."""
    if curve.spec.metric == "per_vehicle":
        return np.arange(1, curve.mean.shape[0] + 1)
    return np.arange(curve.mean.shape[0])


def write_curve_csv(curve: EnsembleCurve, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CURVE_HEADER)
        for i, m, s in zip(curve_index(curve), curve.mean, curve.stderr):
            w.writerow([int(i), fmt(m), fmt(s)])


def read_curve_csv(path) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    idx, mean, stderr = [], [], []
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r, None)
        if header != CURVE_HEADER:
            raise CsvFormatError(f"unexpected curve header {header}")
        for row in r:
            idx.append(int(row[0]))
            mean.append(float(row[1]))
            stderr.append(float(row[2]))
    return np.array(idx), np.array(mean), np.array(stderr)


def write_compare_csv(rows: Sequence[CompareRow], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(COMPARE_HEADER)
        for row in rows:
            w.writerow(
                [
                    row.kind.value,
                    fmt(row.mpr),
                    fmt(row.mean_final),
                    fmt(row.stderr_final),
                    fmt(row.reduction_vs_baseline),
                ]
            )


def read_compare_csv(path) -> List[CompareRow]:
    rows = []
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r, None)
        if header != COMPARE_HEADER:
            raise CsvFormatError(f"unexpected compare header {header}")
        for row in r:
            rows.append(
                CompareRow(
                    kind=VehicleKind(row[0]),
                    mpr=float(row[1]),
                    mean_final=float(row[2]),
                    stderr_final=float(row[3]),
                    reduction_vs_baseline=float(row[4]),
                )
            )
    return rows

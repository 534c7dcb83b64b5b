"""Oscillation-growth metrics computed from run histories."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .scenario import RunRecord


class MetricError(ValueError):
    """Metric preconditions violated (window too short, degenerate data)."""


@dataclass
class PerVehicleStdCurve:
    """Speed standard deviation of each vehicle over a time window.

    values[i] belongs to platoon position i+1 (vehicle #1 is right behind
    the leader).
    """

    values: np.ndarray
    window: Tuple[float, float]


@dataclass
class OverTimeStdCurve:
    """Speed standard deviation across all vehicles, one value per step."""

    values: np.ndarray


def default_window(record: RunRecord) -> Tuple[float, float]:
    """Measurement window skipping a warm-up of N * tau seconds."""
    return (record.n_vehicles * record.dt, record.duration)


def per_vehicle_std(
    record: RunRecord, window: Optional[Tuple[float, float]] = None
) -> PerVehicleStdCurve:
    """Sample std (ddof=1) of each vehicle's speed series within the window."""
    if window is None:
        window = default_window(record)
    t_start, t_end = window
    times = record.times
    mask = (times >= t_start) & (times <= t_end)
    if mask.sum() < 2:
        raise MetricError(
            f"window [{t_start}, {t_end}] s contains {int(mask.sum())} samples; need >= 2"
        )
    values = record.speeds[mask].std(axis=0, ddof=1)
    return PerVehicleStdCurve(values=values, window=(t_start, t_end))


def over_time_std(record: RunRecord) -> OverTimeStdCurve:
    """Sample std (ddof=1) of the speed across vehicles at each step."""
    if record.n_vehicles < 2:
        raise MetricError("over_time_std needs at least 2 vehicles")
    return OverTimeStdCurve(values=record.speeds.std(axis=1, ddof=1))


def reduction_pct(baseline: float, treated: float) -> float:
    """Relative reduction 100 * (baseline - treated) / baseline."""
    if baseline <= 0:
        raise MetricError(f"baseline must be > 0, got {baseline}")
    return 100.0 * (baseline - treated) / baseline


def growth_exponent(
    curve: Union[PerVehicleStdCurve, np.ndarray],
    fit_range: Optional[Tuple[int, int]] = None,
) -> float:
    """Least-squares slope of log(std) vs log(vehicle index).

    fit_range is a 1-based inclusive (first, last) vehicle range; by default
    vehicles 10..N, skipping small-platoon transients.
    """
    values = np.asarray(getattr(curve, "values", curve), dtype=float)
    n = values.shape[0]
    lo, hi = fit_range if fit_range is not None else (min(10, n), n)
    if not 1 <= lo < hi <= n:
        raise MetricError(f"fit_range ({lo}, {hi}) invalid for {n} vehicles")
    idx = np.arange(lo, hi + 1)
    vals = values[lo - 1 : hi]
    if idx.size < 5:
        raise MetricError("fit_range must cover at least 5 vehicles")
    if np.any(vals <= 0):
        raise MetricError("growth_exponent needs strictly positive std values")
    slope, _ = np.polyfit(np.log(idx), np.log(vals), 1)
    return float(slope)

"""Built-in experiment presets mirroring the reference scenarios.

Every preset fully determines geometry, fleet size, penetration, run count,
and horizon, so experiments run with zero external files. CLI flags and
config files can override any field.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .model import ModelParams, VehicleKind
from .scenario import Geometry, OpenRoad, Ring

# equilibrium speed at 22 m spacing with the default parameters: (22 - 7.5) / 1.5
LEADER_SPEED_22M = (22.0 - 7.5) / 1.5


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters of one experiment."""

    name: str
    description: str
    geometry: Geometry
    n_vehicles: int
    initial_spacing: Optional[float]
    kind: VehicleKind
    mpr: float
    n_runs: int
    n_steps: int
    metric: str
    seed: int = 1
    window: Optional[Tuple[float, float]] = None
    fixed_position: Optional[int] = None
    params: ModelParams = ModelParams()


def _open(n, **kw) -> ExperimentConfig:
    return ExperimentConfig(
        geometry=OpenRoad(leader_speed=LEADER_SPEED_22M),
        n_vehicles=n,
        initial_spacing=22.0,
        metric="per_vehicle",
        **kw,
    )


def _ring(length, n, **kw) -> ExperimentConfig:
    return ExperimentConfig(
        geometry=Ring(length=length),
        n_vehicles=n,
        initial_spacing=None,
        metric="over_time",
        **kw,
    )


PRESETS: Dict[str, ExperimentConfig] = {}


def _register(cfg: ExperimentConfig) -> None:
    PRESETS[cfg.name] = cfg


_register(_open(
    100,
    name="fig1",
    description="100 HVs behind a constant-speed leader; stop-and-go trajectories",
    kind=VehicleKind.HV, mpr=0.0, n_runs=1, n_steps=400,
))
_register(_open(
    100,
    name="fig2",
    description="single intelligent vehicle pinned at platoon position 50",
    kind=VehicleKind.FCAV, mpr=0.01, n_runs=1, n_steps=400, fixed_position=49,
    window=(0.0, 600.0),
))
_register(_open(
    100,
    name="fig3b",
    description="single intelligent vehicle at a random position, 500-run ensemble",
    kind=VehicleKind.MAV, mpr=0.01, n_runs=500, n_steps=400, window=(0.0, 600.0),
))
_register(_open(
    200,
    name="fig4",
    description="N=200 platoon, penetration-rate sweep, 250-run ensemble",
    kind=VehicleKind.FCAV, mpr=0.01, n_runs=250, n_steps=400, window=(0.0, 600.0),
))
_register(_ring(
    2500.0, 100,
    name="fig5",
    description="single run on a 2.5 km ring at 2% penetration",
    kind=VehicleKind.AV, mpr=0.02, n_runs=1, n_steps=600,
))
for _mpr_pct in (1, 2, 5, 10):
    _register(_ring(
        6000.0, 200,
        name=f"fig6-mpr{_mpr_pct}",
        description=f"6 km ring, 200 vehicles, {_mpr_pct}% penetration, 100-run ensemble",
        kind=VehicleKind.MAV, mpr=_mpr_pct / 100.0, n_runs=100, n_steps=1200,
    ))


def get_preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    return PRESETS[name]

"""Fleet stepping on an open road behind a constant-speed leader or a ring road.

The dynamic state variable is the spacing vector: speeds are a function of
spacings, and spacings evolve as s(t+dt) = s(t) + (v_ahead - v_own) * dt.
Integrating spacings directly (rather than differencing positions) keeps the
equilibrium an exact floating-point fixed point. Unwrapped odometer positions
are integrated alongside for trajectory output.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .model import ConfigurationError, ModelParams, VehicleKind, equilibrium_speed


class CollisionError(RuntimeError):
    """A vehicle's spacing went negative; the run is aborted."""

    def __init__(self, t: float, vehicle: int):
        self.t = t
        self.vehicle = vehicle
        super().__init__(f"collision at t={t:.1f} s: vehicle {vehicle} spacing < 0")


@dataclass(frozen=True)
class OpenRoad:
    """Open platoon behind a deterministic leader at constant speed [m/s]."""

    leader_speed: float


@dataclass(frozen=True)
class Ring:
    """Circular road of the given length [m]."""

    length: float


Geometry = Union[OpenRoad, Ring]


@dataclass
class FleetConfig:
    """Vehicle-kind assignment and uniform initial spacing.

    On the open road the kinds cover the N followers (the leader is not a
    modeled vehicle); on the ring they cover all N vehicles. initial_spacing
    may be None on a ring, in which case it is derived as L / N.
    """

    kinds: Sequence[VehicleKind]
    initial_spacing: Optional[float] = None

    @property
    def n_vehicles(self) -> int:
        return len(self.kinds)


@dataclass
class ScenarioState:
    """Positions and speeds of all modeled vehicles at one instant.

    spacings[n] is the distance from vehicle n to the vehicle ahead of it
    (vehicle n-1; on the ring, vehicle 0 follows vehicle N-1). positions are
    unwrapped odometers; take them modulo L for ring plots.
    """

    t: float
    spacings: np.ndarray
    speeds: np.ndarray
    positions: np.ndarray
    leader_position: Optional[float] = None  # open road only


@dataclass
class RunRecord:
    """Full history of one run: row 0 is the initial state.

    speeds/positions have shape (n_steps + 1, N). The open-road leader is kept
    separately so metrics never see it.
    """

    dt: float
    speeds: np.ndarray
    positions: np.ndarray
    kinds: Tuple[VehicleKind, ...]
    geometry: Geometry
    leader_positions: Optional[np.ndarray] = None

    @property
    def n_vehicles(self) -> int:
        return self.speeds.shape[1]

    @property
    def n_steps(self) -> int:
        return self.speeds.shape[0] - 1

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.speeds.shape[0]) * self.dt


def _resolve_spacing(geometry: Geometry, fleet: FleetConfig, params: ModelParams) -> float:
    n = fleet.n_vehicles
    if n < 1:
        raise ConfigurationError("fleet must contain at least one vehicle")
    if isinstance(geometry, Ring):
        if geometry.length <= n * params.s_j:
            raise ConfigurationError(
                f"ring of length {geometry.length} m cannot hold {n} vehicles "
                f"at jam spacing {params.s_j} m"
            )
        derived = geometry.length / n
        if fleet.initial_spacing is None:
            return derived
        if not np.isclose(fleet.initial_spacing * n, geometry.length):
            raise ConfigurationError(
                f"N * initial_spacing = {fleet.initial_spacing * n} m does not "
                f"match ring length {geometry.length} m"
            )
        return fleet.initial_spacing
    if not 0.0 <= geometry.leader_speed <= params.u0:
        raise ConfigurationError(
            f"leader_speed {geometry.leader_speed} outside [0, {params.u0}]"
        )
    if fleet.initial_spacing is None:
        raise ConfigurationError("open-road fleet needs an initial_spacing")
    if fleet.initial_spacing < params.s_j:
        raise ConfigurationError(
            f"initial_spacing {fleet.initial_spacing} m below jam spacing {params.s_j} m"
        )
    return fleet.initial_spacing


def init_scenario(
    geometry: Geometry, fleet: FleetConfig, params: ModelParams
) -> ScenarioState:
    """Place vehicles at uniform spacing, all at the noise-free equilibrium speed."""
    n = fleet.n_vehicles
    s0 = _resolve_spacing(geometry, fleet, params)
    v0 = min(params.u0, max(0.0, equilibrium_speed(s0, params)))
    spacings = np.full(n, s0)
    speeds = np.full(n, v0)
    if isinstance(geometry, Ring):
        positions = (n - 1 - np.arange(n)) * s0
        return ScenarioState(0.0, spacings, speeds, positions)
    # leader at the origin, followers stacked behind it
    positions = -np.arange(1, n + 1) * s0
    return ScenarioState(0.0, spacings, speeds, positions, leader_position=0.0)


class _FleetMasks:
    """Kind-derived arrays reused across steps of one run."""

    def __init__(self, kinds: Sequence[VehicleKind], params: ModelParams):
        self.kinds = tuple(kinds)
        self.sigma = np.array(
            [params.sigma_hat if k.is_noisy else 0.0 for k in kinds]
        )
        self.any_noise = bool(self.sigma.any())
        self.mav = np.array([k is VehicleKind.MAV for k in kinds])
        self.pc = np.array([k.is_partially_connected for k in kinds])
        self.fc = np.array([k.is_fully_connected for k in kinds])


def _advance(
    state: ScenarioState,
    geometry: Geometry,
    masks: _FleetMasks,
    params: ModelParams,
    rng: np.random.Generator,
) -> ScenarioState:
    """One synchronous update: every context reads the time-t spacings."""
    spac = state.spacings
    n = spac.shape[0]

    s_d = spac
    if masks.mav.any():
        s_d = spac.copy()
        leader_spac = np.roll(spac, 1)
        if isinstance(geometry, OpenRoad):
            # follower 0 sits behind the deterministic leader and has no
            # second spacing to average; it falls back to AV behavior
            leader_spac[0] = spac[0]
        s_d[masks.mav] = 0.5 * (spac[masks.mav] + leader_spac[masks.mav])
    if masks.pc.any():
        if s_d is spac:
            s_d = spac.copy()
        s_d[masks.pc] = spac[masks.pc].mean()
    if masks.fc.any():
        if s_d is spac:
            s_d = spac.copy()
        if isinstance(geometry, Ring):
            s_d[masks.fc] = geometry.length / n
        else:
            s_d[masks.fc] = spac.mean()

    v = np.minimum(params.u0, (s_d - params.s_j) / params.tau)
    z = rng.standard_normal(n)
    if masks.any_noise:
        v = v + masks.sigma * z
    np.clip(v, 0.0, params.u0, out=v)

    dt = params.tau
    if isinstance(geometry, Ring):
        v_ahead = np.roll(v, 1)
    else:
        v_ahead = np.empty(n)
        v_ahead[0] = geometry.leader_speed
        v_ahead[1:] = v[:-1]

    new_spac = spac + (v_ahead - v) * dt
    if np.any(new_spac < 0.0):
        raise CollisionError(state.t + dt, int(np.argmin(new_spac)))

    new_t = state.t + dt
    new_pos = state.positions + v * dt
    leader_pos = None
    if isinstance(geometry, OpenRoad):
        # multiply rather than accumulate: the leader trajectory is exactly linear
        leader_pos = geometry.leader_speed * new_t
    return ScenarioState(new_t, new_spac, v, new_pos, leader_pos)


def step(
    state: ScenarioState,
    geometry: Geometry,
    fleet: FleetConfig,
    params: ModelParams,
    rng: np.random.Generator,
) -> ScenarioState:
    """Advance the whole fleet by one interval of length tau."""
    return _advance(state, geometry, _FleetMasks(fleet.kinds, params), params, rng)


def run_with_rng(
    geometry: Geometry,
    fleet: FleetConfig,
    params: ModelParams,
    rng: np.random.Generator,
    n_steps: int,
) -> RunRecord:
    """Simulate n_steps updates, drawing noise from the given generator."""
    if n_steps < 1:
        raise ConfigurationError(f"n_steps must be >= 1, got {n_steps}")
    state = init_scenario(geometry, fleet, params)
    masks = _FleetMasks(fleet.kinds, params)
    n = fleet.n_vehicles

    speeds = np.empty((n_steps + 1, n))
    positions = np.empty((n_steps + 1, n))
    speeds[0] = state.speeds
    positions[0] = state.positions
    leader = None
    if isinstance(geometry, OpenRoad):
        leader = np.empty(n_steps + 1)
        leader[0] = state.leader_position

    for i in range(1, n_steps + 1):
        state = _advance(state, geometry, masks, params, rng)
        speeds[i] = state.speeds
        positions[i] = state.positions
        if leader is not None:
            leader[i] = state.leader_position

    return RunRecord(
        dt=params.tau,
        speeds=speeds,
        positions=positions,
        kinds=masks.kinds,
        geometry=geometry,
        leader_positions=leader,
    )


def run(
    geometry: Geometry,
    fleet: FleetConfig,
    params: ModelParams,
    seed: int,
    n_steps: int,
) -> RunRecord:
    """Simulate with a fresh generator; identical seeds give identical records."""
    return run_with_rng(geometry, fleet, params, np.random.default_rng(seed), n_steps)


def place_intelligent(
    n_vehicles: int,
    mpr: float,
    kind: VehicleKind,
    rng: np.random.Generator,
) -> List[VehicleKind]:
    """Assign round(mpr * N) vehicles of `kind` at uniform random positions."""
    if not 0.0 <= mpr <= 1.0:
        raise ConfigurationError(f"mpr must be in [0, 1], got {mpr}")
    n_equipped = int(round(mpr * n_vehicles))
    kinds = [VehicleKind.HV] * n_vehicles
    if n_equipped == 0:
        if mpr > 0:
            warnings.warn(
                f"mpr={mpr} rounds to zero equipped vehicles for N={n_vehicles}; "
                "running a pure-HV fleet"
            )
        return kinds
    for idx in rng.choice(n_vehicles, size=n_equipped, replace=False):
        kinds[int(idx)] = kind
    return kinds

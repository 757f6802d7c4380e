"""Fixed-timestep crowd integration with destination cycling."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath

import numpy as np

from .dynamics import Human, SimParams, crowd_forces, desired_orientation, draw_noise, wrap_angle
from .geometry import OccupancyGrid, Scene, build_grid
from .planner import Path, desired_direction, plan_path

OVERLAP = "human_human_overlap"
REACHED = "human_reached_destination"
SWAPPED = "destination_swapped"

TRAJECTORY_HEADER = ("step", "human_id", "x", "y", "vx", "vy", "psi", "omega")


@dataclass(frozen=True)
class SimEvent:
    kind: str
    step: int
    actors: tuple[int, ...]


@dataclass
class SimState:
    humans: list[Human]
    paths: list[Path]
    rngs: list[np.random.Generator]
    params: SimParams
    scene: Scene
    grid: OccupancyGrid
    time: float = 0.0
    step_index: int = 0
    event_log: list[SimEvent] = field(default_factory=list)
    last_dynamics_time: float = 0.0


@dataclass
class TrajectoryLog:
    rows: list[tuple] = field(default_factory=list)
    events: list[SimEvent] = field(default_factory=list)
    timings: list[float] = field(default_factory=list)

    def record(self, state: SimState) -> None:
        k = state.step_index
        for h in state.humans:
            self.rows.append((k, h.id, h.x[0], h.x[1], h.v[0], h.v[1], h.psi, h.omega))


def human_rng(seed: int, human_id: int) -> np.random.Generator:
    """Independent substream per (seed, human id)."""
    return np.random.default_rng(np.random.SeedSequence([seed % 2**63, human_id % 2**63]))


def initial_state(scene: Scene, params: SimParams | None = None, seed: int = 0,
                  grid: OccupancyGrid | None = None) -> SimState:
    params = params or SimParams()
    grid = grid or build_grid(scene)
    scene.clearance_table  # built here so it stays out of the timed force phase
    humans, paths, rngs = [], [], []
    for spec in sorted(scene.humans, key=lambda s: s.id):
        path = plan_path(grid, spec.position, spec.destination)
        heading = wrap_angle(spec.heading)
        h = Human(
            id=spec.id, x=spec.position, v=(0.0, 0.0), e_hat=(0.0, 0.0),
            v_des=spec.desired_speed, psi=heading, psi0=heading, omega=0.0,
            omega0=spec.desired_angular_speed, r=spec.radius, m=spec.mass,
            destination=spec.destination, origin=spec.position,
        )
        h.e_hat = desired_direction(h, path, params.goal_tolerance)
        humans.append(h)
        paths.append(path)
        rngs.append(human_rng(seed, spec.id))
    return SimState(humans, paths, rngs, params, scene, grid)


def _clamp(vx: float, vy: float, vmax: float) -> tuple[float, float]:
    s = math.hypot(vx, vy)
    if s > vmax:
        k = vmax / s
        return vx * k, vy * k
    return vx, vy


def overlapping_pairs(humans) -> list[tuple[int, int]]:
    """Id pairs whose discs currently overlap (negative skin-to-skin distance)."""
    out = []
    n = len(humans)
    for a in range(n):
        ha = humans[a]
        xa, ya = ha.x
        ra = ha.r
        for b in range(a + 1, n):
            hb = humans[b]
            dx, dy = xa - hb.x[0], ya - hb.x[1]
            rs = ra + hb.r
            if dx * dx + dy * dy < rs * rs:
                out.append((ha.id, hb.id))
    return out


def step(state: SimState) -> SimState:
    """Advance every human synchronously by one timestep.

    The step may be split into ``params.substeps`` equal sub-intervals; the
    fluctuation terms are drawn once per step and held across them.  The
    returned state takes over the random substreams of ``state``.
    """
    params = state.params
    dt = params.dt
    k = state.step_index + 1
    goal_tol = params.goal_tolerance

    humans = [replace(h) for h in state.humans]
    paths = [Path(p.waypoints, p.cursor, p.grid_length) for p in state.paths]
    noise = [draw_noise(rng, params) for rng in state.rngs]
    h_dt = dt / params.substeps
    elapsed = 0.0
    overlaps: dict[tuple[int, int], None] = {}
    for sub in range(params.substeps):
        for h, path in zip(humans, paths):
            h.e_hat = desired_direction(h, path, goal_tol)
            h.psi0 = desired_orientation(h)

        t0 = time.perf_counter()
        terms, touching = crowd_forces(humans, state.scene, params, noise)
        elapsed += time.perf_counter() - t0
        if sub:
            # positions at the start of a later substep are mid-step states
            for a, b in touching:
                overlaps[(humans[a].id, humans[b].id)] = None

        for h, (fx, fy, torque) in zip(humans, terms):
            vx = h.v[0] + fx / h.m * h_dt
            vy = h.v[1] + fy / h.m * h_dt
            h.v = _clamp(vx, vy, params.v_max)
            omega = h.omega + torque / h.inertia * h_dt
            h.omega = max(-params.omega_max, min(params.omega_max, omega))
            h.x = (h.x[0] + h.v[0] * h_dt, h.x[1] + h.v[1] * h_dt)
            h.psi = wrap_angle(h.psi + h.omega * h_dt)

    for pair in overlapping_pairs(humans):
        overlaps[pair] = None
    events = [SimEvent(OVERLAP, k, pair) for pair in sorted(overlaps)]

    for idx, h in enumerate(humans):
        dx, dy = h.x[0] - h.destination[0], h.x[1] - h.destination[1]
        if math.hypot(dx, dy) <= goal_tol:
            events.append(SimEvent(REACHED, k, (h.id,)))
            h.destination, h.origin = h.origin, h.destination
            paths[idx] = paths[idx].reversed()
            events.append(SimEvent(SWAPPED, k, (h.id,)))

    return SimState(
        humans=humans, paths=paths, rngs=state.rngs, params=params,
        scene=state.scene, grid=state.grid, time=k * dt, step_index=k,
        event_log=state.event_log + events, last_dynamics_time=elapsed,
    )


def run(scene: Scene, params: SimParams | None = None, steps: int = 0, seed: int = 0,
        record: bool = True) -> tuple[SimState, TrajectoryLog]:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = initial_state(scene, params, seed)
    log = TrajectoryLog()
    for _ in range(steps):
        state = step(state)
        log.timings.append(state.last_dynamics_time)
        if record:
            log.record(state)
    log.events = list(state.event_log)
    return state, log


def write_trajectory_csv(log: TrajectoryLog, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER)
        for row in log.rows:
            w.writerow([row[0], row[1]] + [f"{v:.9g}" for v in row[2:]])


def read_trajectory_csv(path) -> list[tuple]:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header {header}")
        return [(int(s), int(i), *map(float, rest)) for s, i, *rest in r]


def events_to_json(events) -> list[dict]:
    return [{"kind": e.kind, "step": e.step, "actors": list(e.actors)} for e in events]


def events_from_json(data: list[dict]) -> list[SimEvent]:
    return [SimEvent(d["kind"], int(d["step"]), tuple(d["actors"])) for d in data]


def write_events_json(log: TrajectoryLog, path) -> None:
    FsPath(path).write_text(json.dumps({"events": events_to_json(log.events)}, indent=1) + "\n",
                            encoding="utf-8")


def write_timing_json(log: TrajectoryLog, path) -> None:
    FsPath(path).write_text(json.dumps({"dynamics_seconds": log.timings}) + "\n", encoding="utf-8")

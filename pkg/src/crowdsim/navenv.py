"""Point-goal navigation through a simulated crowd.

The agent is a disc with four discrete actions.  It perceives the goal in polar
form and the surroundings through a ring of range readings; it never sees the
humans' state.  Humans do not react to the agent: agent-human contact is only
counted, and forward moves are rejected only by walls and obstacles.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import SimParams
from .geometry import (
    EpisodeSpec,
    OccupancyGrid,
    Scene,
    SceneError,
    Vec2,
    build_grid,
    distance_field,
    swept_disc_clear,
)
from .integrator import SimState, initial_state, step
from .metrics import DegenerateMetric, EpisodeReport, RewardParams, cpd, reward_step, spl

AGENT_RADIUS = 0.18
LIDAR_MIN = 1e-3


class Action(enum.Enum):
    FORWARD = "forward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    STOP = "stop"


class EpisodeDone(RuntimeError):
    pass


@dataclass(frozen=True)
class NavConfig:
    d_success: float = 0.2
    forward_step: float = 0.25
    turn_angle: float = math.radians(30.0)
    t_max: int = 500
    lidar_rays: int = 16
    lidar_range: float = 5.0
    agent_radius: float = AGENT_RADIUS
    reward: RewardParams = field(default_factory=RewardParams)

    def __post_init__(self) -> None:
        if not (self.d_success > 0 and self.forward_step > 0 and self.turn_angle > 0):
            raise ValueError("d_success, forward_step and turn_angle must be positive")
        if self.t_max < 1 or self.lidar_rays < 1 or not self.lidar_range > 0:
            raise ValueError("t_max, lidar_rays and lidar_range must be positive")
        if not self.agent_radius > 0:
            raise ValueError("agent_radius must be positive")


@dataclass(frozen=True)
class Agent:
    x: Vec2
    heading: float
    radius: float = AGENT_RADIUS
    stopped: bool = False


@dataclass(frozen=True)
class Observation:
    goal_polar: tuple[float, float]
    lidar: tuple[float, ...]
    step_index: int


@dataclass
class EnvState:
    scene: Scene
    episode: EpisodeSpec
    config: NavConfig
    grid: OccupancyGrid
    goal_field: np.ndarray
    agent: Agent
    crowd: SimState
    step_index: int = 0
    done: bool = False
    success: bool = False
    collisions: int = 0
    in_contact: bool = False
    path_length: float = 0.0
    reward_sum: float = 0.0
    shortest: float = 0.0
    dtg: float = 0.0


def _wrap_pi(a: float) -> float:
    """Wrap into ``(-pi, pi]``."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


def dtg(grid: OccupancyGrid, goal_field: np.ndarray, goal: Vec2, p: Vec2) -> float:
    """Distance to goal: straight-line when the segment is grid-visible,
    otherwise the grid geodesic from the cell of ``p`` plus the in-cell offsets."""
    if grid.visible(p, goal):
        return math.hypot(goal[0] - p[0], goal[1] - p[1])
    cell = grid.free_cell_near(p)
    goal_cell = grid.free_cell_near(goal)
    c = grid.center(cell)
    g = grid.center(goal_cell)
    return (
        float(goal_field[cell])
        + math.hypot(p[0] - c[0], p[1] - c[1])
        + math.hypot(goal[0] - g[0], goal[1] - g[1])
    )


def _ray_segment(ox, oy, dx, dy, x0, y0, x1, y1) -> float:
    ex, ey = x1 - x0, y1 - y0
    den = dx * ey - dy * ex
    if den == 0.0:
        return math.inf
    wx, wy = x0 - ox, y0 - oy
    t = (wx * ey - wy * ex) / den
    u = (wx * dy - wy * dx) / den
    if t >= 0.0 and 0.0 <= u <= 1.0:
        return t
    return math.inf


def _ray_disc(ox, oy, dx, dy, cx, cy, r) -> float:
    wx, wy = ox - cx, oy - cy
    c = wx * wx + wy * wy - r * r
    if c <= 0.0:
        return 0.0
    b = wx * dx + wy * dy
    disc = b * b - c
    if b >= 0.0 or disc < 0.0:
        return math.inf
    return -b - math.sqrt(disc)


def lidar_scan(scene: Scene, humans, origin: Vec2, heading: float, rays: int,
               max_range: float) -> tuple[float, ...]:
    """Range to the first wall, obstacle or human disc along each bearing."""
    ox, oy = origin
    edges = [e for group in (scene.floor_edges, *scene.obstacle_edges) for e in group]
    out = []
    for k in range(rays):
        a = heading + 2.0 * math.pi * k / rays
        dx, dy = math.cos(a), math.sin(a)
        t = max_range
        for e in edges:
            t = min(t, _ray_segment(ox, oy, dx, dy, *e))
        for h in humans:
            t = min(t, _ray_disc(ox, oy, dx, dy, h.x[0], h.x[1], h.r))
        out.append(max(LIDAR_MIN, t))
    return tuple(out)


def observe(state: EnvState) -> Observation:
    a = state.agent
    goal = state.episode.goal
    gx, gy = goal[0] - a.x[0], goal[1] - a.x[1]
    bearing = _wrap_pi(math.atan2(gy, gx) - a.heading) if (gx or gy) else 0.0
    lidar = lidar_scan(state.scene, state.crowd.humans, a.x, a.heading,
                       state.config.lidar_rays, state.config.lidar_range)
    return Observation((math.hypot(gx, gy), bearing), lidar, state.step_index)


def _touching(agent: Agent, humans) -> bool:
    ax, ay = agent.x
    return any(
        math.hypot(ax - h.x[0], ay - h.x[1]) - agent.radius - h.r <= 0.0 for h in humans
    )


def reset(scene: Scene, episode: EpisodeSpec, params: SimParams | None = None, seed: int = 0,
          config: NavConfig | None = None, grid: OccupancyGrid | None = None
          ) -> tuple[EnvState, Observation]:
    config = config or NavConfig()
    grid = grid or build_grid(scene)
    if not grid.connected(episode.agent_start, episode.goal):
        raise SceneError(f"episode goal {episode.goal} is unreachable from {episode.agent_start}")
    goal_field = distance_field(grid, episode.goal)
    agent = Agent(tuple(map(float, episode.agent_start)), float(episode.agent_heading),
                  config.agent_radius)
    crowd = initial_state(scene, params, seed, grid=grid)
    d0 = dtg(grid, goal_field, episode.goal, agent.x)
    state = EnvState(scene, episode, config, grid, goal_field, agent, crowd,
                     shortest=d0, dtg=d0, in_contact=_touching(agent, crowd.humans))
    return state, observe(state)


def step_env(state: EnvState, action: Action):
    """Apply ``action``, advance the crowd one step and score the transition.

    Returns ``(state, observation, reward, done, info)``; ``state`` is not
    modified.
    """
    if state.done:
        raise EpisodeDone("episode is over; call reset")
    action = Action(action)
    cfg = state.config
    agent = state.agent
    moved = 0.0
    if action is Action.FORWARD:
        target = (agent.x[0] + cfg.forward_step * math.cos(agent.heading),
                  agent.x[1] + cfg.forward_step * math.sin(agent.heading))
        if swept_disc_clear(state.scene, agent.x, target, agent.radius):
            agent = replace(agent, x=target)
            moved = cfg.forward_step
    elif action is Action.TURN_LEFT:
        agent = replace(agent, heading=_wrap_pi(agent.heading + cfg.turn_angle))
    elif action is Action.TURN_RIGHT:
        agent = replace(agent, heading=_wrap_pi(agent.heading - cfg.turn_angle))
    else:
        agent = replace(agent, stopped=True)

    crowd = step(state.crowd)
    touching = _touching(agent, crowd.humans)
    collided = touching and not state.in_contact
    d_now = dtg(state.grid, state.goal_field, state.episode.goal, agent.x)
    k = state.step_index + 1
    success = action is Action.STOP and d_now <= cfg.d_success
    reward = reward_step(state.dtg, d_now, collided, success, cfg.reward)
    done = action is Action.STOP or k >= cfg.t_max

    new = replace(
        state, agent=agent, crowd=crowd, step_index=k, done=done, success=success,
        collisions=state.collisions + collided, in_contact=touching,
        path_length=state.path_length + moved, reward_sum=state.reward_sum + reward, dtg=d_now,
    )
    info = {"collided": collided, "collisions": new.collisions, "dtg": d_now,
            "path_length": new.path_length, "success": success}
    if done:
        info["report"] = episode_report(new)
    return new, observe(new), reward, done, info


def episode_report(state: EnvState, scene_name: str | None = None, episode: int = 0) -> EpisodeReport:
    shortest = state.shortest
    s = spl(state.success, shortest, state.path_length) if shortest > 0 else float(state.success)
    try:
        c = cpd(state.collisions, state.path_length)
    except DegenerateMetric:
        c = math.inf
    return EpisodeReport(
        success=state.success, spl=s, dtg=state.dtg, cpd=c, path_length=state.path_length,
        collisions=state.collisions, reward_sum=state.reward_sum,
        scene=state.scene.name if scene_name is None else scene_name, episode=episode,
        steps=state.step_index,
    )


# ---------------------------------------------------------------------------
# scripted policies

ALIGN_TOLERANCE = math.radians(15.0)
SIDESTEP_SPAN = math.radians(45.0)
BLOCKED_RANGE = 0.5


def _ray_toward(lidar: tuple[float, ...], bearing: float) -> float:
    k = int(round(bearing / (2.0 * math.pi) * len(lidar))) % len(lidar)
    return lidar[k]


def greedy_policy(obs: Observation, d_success: float = 0.2) -> Action:
    """Turn towards the goal and walk; step around whatever blocks the way."""
    dist, bearing = obs.goal_polar
    if dist <= d_success:
        return Action.STOP
    lidar = obs.lidar
    front_clear = lidar[0] >= BLOCKED_RANGE
    toward_goal = Action.TURN_LEFT if bearing > 0 else Action.TURN_RIGHT
    if abs(bearing) <= ALIGN_TOLERANCE:
        if front_clear:
            return Action.FORWARD
        left = _ray_toward(lidar, math.pi / 4)
        right = _ray_toward(lidar, -math.pi / 4)
        return Action.TURN_LEFT if left >= right else Action.TURN_RIGHT
    if front_clear and abs(bearing) <= SIDESTEP_SPAN and _ray_toward(lidar, bearing) < BLOCKED_RANGE:
        # keep walking past the blockage on the goal side
        return Action.FORWARD
    return toward_goal


class RandomPolicy:
    """Uniform over the three motion actions; never stops on its own."""

    actions = (Action.FORWARD, Action.TURN_LEFT, Action.TURN_RIGHT)

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def __call__(self, obs: Observation) -> Action:
        return self.actions[int(self.rng.integers(len(self.actions)))]


def run_episode(scene: Scene, episode: EpisodeSpec, policy, params: SimParams | None = None,
                seed: int = 0, config: NavConfig | None = None, log=None,
                episode_index: int = 0, grid: OccupancyGrid | None = None) -> EpisodeReport:
    """Roll ``policy`` out until done; optionally write JSON-lines records to ``log``."""
    state, obs = reset(scene, episode, params, seed, config, grid)
    while True:
        action = policy(obs)
        state, obs, reward, done, info = step_env(state, action)
        if log is not None:
            rec = {
                "t": state.step_index,
                "action": Action(action).value,
                "agent": [state.agent.x[0], state.agent.x[1], state.agent.heading],
                "reward": reward,
                "collided": info["collided"],
                "dtg": info["dtg"],
            }
            if done:
                rep = info["report"]
                rec.update(success=rep.success, spl=rep.spl, cpd=rep.cpd)
            log.write(json.dumps(rec) + "\n")
        if done:
            return episode_report(state, episode=episode_index)

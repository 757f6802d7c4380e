"""Procedural scene generation: rectangular rooms with block obstacles and a crowd."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DEFAULT_RADIUS,
    EpisodeSpec,
    HumanSpec,
    Scene,
    SceneError,
    build_grid,
    distance_to_obstacles,
    validate_scene,
)

MAX_ATTEMPTS = 10_000
HUMAN_GAP = 0.2
WALL_MARGIN = 0.1
AGENT_RADIUS = 0.18
OBSTACLE_GAP = 1.5


class PlacementError(SceneError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    count: int = 20
    density_range: tuple[float, float] = (0.1, 0.5)
    density_mean: float | None = 0.189
    area_range: tuple[float, float] = (10.0, 300.0)
    obstacle_count_range: tuple[int, int] = (0, 3)
    episodes_per_scene: int = 3
    seed: int = 0
    min_travel: float = 5.0
    prefix: str = "scene"

    def __post_init__(self) -> None:
        lo, hi = self.density_range
        if not (0 < lo <= hi <= 1):
            raise ValueError("density_range must lie within (0, 1]")
        a_lo, a_hi = self.area_range
        if not (0 < a_lo <= a_hi):
            raise ValueError("area_range must be positive and ordered")
        o_lo, o_hi = self.obstacle_count_range
        if not (0 <= o_lo <= o_hi):
            raise ValueError("obstacle_count_range must be non-negative and ordered")
        if self.density_mean is not None and lo < hi and not (lo < self.density_mean < hi):
            raise ValueError("density_mean must lie strictly inside density_range")
        if self.count < 0 or self.episodes_per_scene < 0:
            raise ValueError("count and episodes_per_scene must be non-negative")


def _rect(x0, y0, x1, y1):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def _place_obstacles(rng, width, height, count):
    blocks = []
    for _ in range(count):
        for _ in range(200):
            w = rng.uniform(0.5, max(0.6, min(3.0, 0.25 * width)))
            h = rng.uniform(0.5, max(0.6, min(3.0, 0.25 * height)))
            if width - w < 2 * OBSTACLE_GAP or height - h < 2 * OBSTACLE_GAP:
                break
            x0 = rng.uniform(OBSTACLE_GAP, width - OBSTACLE_GAP - w)
            y0 = rng.uniform(OBSTACLE_GAP, height - OBSTACLE_GAP - h)
            box = (x0, y0, x0 + w, y0 + h)
            if all(
                box[0] > b[2] + OBSTACLE_GAP or box[2] < b[0] - OBSTACLE_GAP
                or box[1] > b[3] + OBSTACLE_GAP or box[3] < b[1] - OBSTACLE_GAP
                for b in blocks
            ):
                blocks.append(box)
                break
    return blocks


class _Sampler:
    def __init__(self, scene: Scene, rng: np.random.Generator):
        self.scene = scene
        self.rng = rng
        self.grid = build_grid(scene)
        xs = [p[0] for p in scene.floor]
        ys = [p[1] for p in scene.floor]
        self.bounds = (min(xs), min(ys), max(xs), max(ys))

    def point(self, radius: float, taken: list, gap: float, accept=lambda p: True,
              attempts: int = MAX_ATTEMPTS):
        x0, y0, x1, y1 = self.bounds
        for _ in range(attempts):
            p = (float(self.rng.uniform(x0, x1)), float(self.rng.uniform(y0, y1)))
            if not self.grid.is_free(self.grid.cell_of(p)):
                continue
            if distance_to_obstacles(self.scene, p) < radius + WALL_MARGIN:
                continue
            if any(math.hypot(p[0] - q[0], p[1] - q[1]) - radius - rq < gap for q, rq in taken):
                continue
            if not accept(p):
                continue
            return p
        raise PlacementError(
            f"could not place a human after {MAX_ATTEMPTS} attempts; try a lower density"
        )

    def pair(self, radius: float, starts: list, goals: list, travel: float):
        """A start and a reachable goal at least ``travel`` apart (straight line)."""
        grid = self.grid
        for _ in range(100):
            p = self.point(radius, starts, HUMAN_GAP)
            label = grid.labels[grid.free_cell_near(p)]
            try:
                q = self.point(
                    radius, goals, HUMAN_GAP,
                    accept=lambda q: math.hypot(q[0] - p[0], q[1] - p[1]) >= travel
                    and grid.labels[grid.free_cell_near(q)] == label,
                    attempts=500,
                )
            except PlacementError:
                continue
            return p, q
        raise PlacementError("could not place a start/goal pair; try a lower density")


def _sample_density(rng, cfg: GeneratorConfig) -> float:
    """``lo + (hi - lo) * u**p`` with ``p`` chosen so the expected density is
    ``density_mean``; uniform when no mean is requested."""
    lo, hi = cfg.density_range
    u = float(rng.uniform())
    if hi == lo:
        return lo
    if cfg.density_mean is None:
        return lo + (hi - lo) * u
    p = (hi - lo) / (cfg.density_mean - lo) - 1.0
    return lo + (hi - lo) * u ** p


def generate_scene(index: int, cfg: GeneratorConfig) -> Scene:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed % 2**63, index]))
    density = _sample_density(rng, cfg)
    area0 = float(rng.uniform(*cfg.area_range))
    n = max(1, int(round(density * area0)))
    aspect = float(rng.uniform(1.0, 2.5))
    n_obs = int(rng.integers(cfg.obstacle_count_range[0], cfg.obstacle_count_range[1] + 1))

    # lay out obstacles on a provisional room, then stretch the room so the
    # navigable area is exactly n / density
    nav_target = n / density
    width = math.sqrt(nav_target * aspect)
    height = nav_target / width
    blocks = _place_obstacles(rng, width, height, n_obs)
    blocked = sum((b[2] - b[0]) * (b[3] - b[1]) for b in blocks)
    scale = math.sqrt((nav_target + blocked) / (width * height))
    width *= scale
    height *= scale
    cx, cy = width / 2, height / 2
    # stretch positions only; obstacle sizes stay fixed
    obstacles = tuple(
        _rect(cx + (b[0] - cx) * scale, cy + (b[1] - cy) * scale,
              cx + (b[0] - cx) * scale + (b[2] - b[0]), cy + (b[1] - cy) * scale + (b[3] - b[1]))
        for b in blocks
    )
    floor = _rect(0.0, 0.0, width, height)
    base = Scene(name=f"{cfg.prefix}_{index:02d}", floor=floor, obstacles=obstacles,
                 grid_resolution=0.25)

    sampler = _Sampler(base, rng)
    travel = min(cfg.min_travel, 0.5 * math.hypot(width, height))
    r = DEFAULT_RADIUS
    starts, goals, humans = [], [], []
    for hid in range(n):
        p, d = sampler.pair(r, starts, goals, travel)
        starts.append((p, r))
        goals.append((d, r))
        humans.append(HumanSpec(id=hid, position=p, destination=d,
                                heading=float(rng.uniform(0.0, 2 * math.pi))))

    episodes = []
    for _ in range(cfg.episodes_per_scene):
        s, g = sampler.pair(AGENT_RADIUS, starts, [], travel)
        episodes.append(EpisodeSpec(agent_start=s, agent_heading=float(rng.uniform(0.0, 2 * math.pi)),
                                    goal=g))

    scene = Scene(name=base.name, floor=floor, obstacles=obstacles, grid_resolution=0.25,
                  humans=tuple(humans), episodes=tuple(episodes))
    validate_scene(scene)
    return scene


def generate_scenes(cfg: GeneratorConfig) -> list[Scene]:
    return [generate_scene(k, cfg) for k in range(cfg.count)]


def corridor_scene(n: int = 10, length: float = 14.0, width: float = 3.0) -> Scene:
    """Counter-flow corridor: half the crowd starts at each end, heading for the other."""
    left = [(1.0, 0.8), (1.0, 2.2), (2.2, 1.35), (3.4, 0.8), (3.4, 2.2)]
    humans = []
    for k in range(n):
        lx, ly = left[(k // 2) % len(left)]
        lx += 3.6 * (k // (2 * len(left)))
        if k % 2 == 0:
            start, goal = (lx, ly), (length - lx, ly)
        else:
            start, goal = (length - lx, width - ly), (lx, width - ly)
        humans.append(HumanSpec(id=k, position=start, destination=goal,
                                heading=0.0 if k % 2 == 0 else math.pi))
    scene = Scene(
        name=f"corridor_n{n}",
        floor=_rect(0.0, 0.0, length, width),
        grid_resolution=0.25,
        humans=tuple(humans),
        episodes=(EpisodeSpec(agent_start=(0.6, 1.5), agent_heading=0.0, goal=(length - 0.6, 1.5)),),
    )
    validate_scene(scene)
    return scene


def empty_scene(index: int, seed: int = 0, episodes: int = 4,
                area_range: tuple[float, float] = (20.0, 100.0), prefix: str = "empty") -> Scene:
    """Obstacle-free room without humans, with sampled point-goal episodes."""
    rng = np.random.default_rng(np.random.SeedSequence([seed % 2**63, index, 1]))
    area = float(rng.uniform(*area_range))
    aspect = float(rng.uniform(1.0, 2.0))
    width = math.sqrt(area * aspect)
    height = area / width
    floor = _rect(0.0, 0.0, width, height)
    base = Scene(name=f"{prefix}_{index:02d}", floor=floor, grid_resolution=0.25)
    sampler = _Sampler(base, rng)
    travel = min(5.0, 0.5 * math.hypot(width, height))
    eps = []
    for _ in range(episodes):
        s, g = sampler.pair(AGENT_RADIUS, [], [], travel)
        eps.append(EpisodeSpec(agent_start=s, agent_heading=float(rng.uniform(0.0, 2 * math.pi)), goal=g))
    scene = Scene(name=base.name, floor=floor, grid_resolution=0.25, episodes=tuple(eps))
    validate_scene(scene)
    return scene

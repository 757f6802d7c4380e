"""Batch evaluations behind the command line: dynamics suite, scaling, navigation."""

from __future__ import annotations

import hashlib
import io
import math
import statistics
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SimParams
from .generator import GeneratorConfig, generate_scene
from .geometry import load_scene
from .integrator import run
from .metrics import (
    DynamicsReport,
    EpisodeReport,
    LinearFit,
    NavSummary,
    RewardParams,
    aggregate_dynamics,
    aggregate_episodes,
    dynamics_report,
    linear_fit,
)
from .navenv import NavConfig, RandomPolicy, greedy_policy, run_episode

POLICIES = ("greedy", "random")
BENCH_AREA = 200.0
WARMUP_STEPS = 20


def fan_out(fn, tasks, jobs: int):
    """``[fn(t) for t in tasks]``, optionally across worker processes; the
    result order always follows ``tasks``."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def state_digest(humans) -> str:
    """Short hash of the exact bits of every human's position and velocity."""
    h = hashlib.sha256()
    for p in humans:
        h.update(struct.pack("<q4d", p.id, p.x[0], p.x[1], p.v[0], p.v[1]))
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# dynamics suite


def _eval_scene(task) -> DynamicsReport:
    path, steps, seed, params = task
    scene = load_scene(path)
    state, log = run(scene, params, steps, seed, record=False)
    return dynamics_report(log.events, log.timings, len(scene.humans), steps, scene.name)


def eval_dynamics(paths, steps: int, seed: int, params: SimParams | None = None,
                  jobs: int = 1) -> tuple[list[DynamicsReport], DynamicsReport]:
    if not paths:
        raise ValueError("no scenes matched")
    if steps <= 0:
        raise ValueError("steps must be positive")
    params = params or SimParams()
    rows = fan_out(_eval_scene, [(p, steps, seed, params) for p in paths], jobs)
    empty = [r.scene for r in rows if r.n_humans == 0]
    if empty:
        raise ValueError(f"scenes without humans cannot be evaluated: {', '.join(empty)}")
    return rows, aggregate_dynamics(rows)


# ---------------------------------------------------------------------------
# scaling benchmark


@dataclass(frozen=True)
class BenchConfig:
    human_counts: tuple[int, ...] = (5, 10, 20, 40)
    trials: int = 5
    steps: int = 200
    seed: int = 0
    area: float = BENCH_AREA

    def __post_init__(self) -> None:
        if self.trials < 1 or self.steps < 1:
            raise ValueError("trials and steps must be at least 1")
        hc = self.human_counts
        if not hc or any(b <= a for a, b in zip(hc, hc[1:])) or hc[0] < 1:
            raise ValueError("human_counts must be non-empty, positive and strictly increasing")
        if not self.area > 0:
            raise ValueError("area must be positive")


@dataclass(frozen=True)
class ScalingRow:
    n: int
    trials: int
    steps: int
    mct_mean: float | None
    mct_std: float | None
    digest: str
    mct_median: float | None = None


@dataclass(frozen=True)
class ScalingResult:
    rows: list[ScalingRow]
    fit: LinearFit | None
    mct_ratio: float | None = None


def bench_scene(n: int, trial: int, cfg: BenchConfig):
    density = n / cfg.area
    gen = GeneratorConfig(
        count=1, density_range=(density, density), density_mean=None,
        area_range=(cfg.area, cfg.area), obstacle_count_range=(0, 0), episodes_per_scene=0,
        seed=cfg.seed, prefix=f"bench_n{n}",
    )
    return generate_scene(trial, gen)


def _bench_trial(task):
    n, t, cfg, params = task
    scene = bench_scene(n, t, cfg)
    run(scene, params, WARMUP_STEPS, cfg.seed, record=False)
    state, log = run(scene, params, cfg.steps, cfg.seed + t, record=False)
    return math.fsum(log.timings) / (cfg.steps * len(scene.humans)), state_digest(state.humans)


def bench_scaling(cfg: BenchConfig, params: SimParams | None = None, jobs: int = 1,
                  timing: bool = True) -> ScalingResult:
    params = params or SimParams()
    # round-robin over crowd sizes so slow spells on a shared machine hit
    # every size alike instead of one whole row
    tasks = [(n, t, cfg, params) for t in range(cfg.trials) for n in cfg.human_counts]
    results = dict(zip([(n, t) for n, t, _, _ in tasks], fan_out(_bench_trial, tasks, jobs)))
    rows = []
    for n in cfg.human_counts:
        samples = [results[n, t][0] for t in range(cfg.trials)]
        digest = hashlib.sha256()
        for t in range(cfg.trials):
            digest.update(results[n, t][1].encode())
        if timing:
            mean, median = statistics.fmean(samples), statistics.median(samples)
            std = statistics.pstdev(samples) if len(samples) > 1 else 0.0
        else:
            mean = median = std = None
        rows.append(ScalingRow(n, cfg.trials, cfg.steps, mean, std, digest.hexdigest()[:16], median))
    if not timing:
        return ScalingResult(rows, None)
    # the fit uses per-size medians: a short trial hit by a scheduler stall
    # would otherwise drag the small-n means up
    fit = linear_fit([float(r.n) for r in rows], [r.mct_median for r in rows])
    return ScalingResult(rows, fit, rows[-1].mct_median / rows[0].mct_median)


# ---------------------------------------------------------------------------
# navigation


@dataclass
class NavResult:
    episodes: list[EpisodeReport]
    summary: NavSummary
    logs: list[str] = field(default_factory=list)


def _nav_scene(task):
    path, policy, episodes, seed, params, config, want_log, scene_index = task
    scene = load_scene(path)
    reports, logs = [], []
    for e, ep in enumerate(scene.episodes[:episodes]):
        if policy == "greedy":
            pol = lambda obs: greedy_policy(obs, config.d_success)  # noqa: E731
        else:
            pol = RandomPolicy(np.random.SeedSequence([seed % 2**63, scene_index, e]))
        buf = io.StringIO() if want_log else None
        reports.append(run_episode(scene, ep, pol, params, seed, config, buf, episode_index=e))
        if buf is not None:
            logs.append(buf.getvalue())
    return reports, logs


def eval_nav(paths, policy: str = "greedy", episodes: int | None = None, seed: int = 0,
             params: SimParams | None = None, reward: RewardParams | None = None,
             jobs: int = 1, want_log: bool = False) -> NavResult:
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
    if not paths:
        raise ValueError("no scenes matched")
    config = NavConfig(reward=reward or RewardParams())
    limit = 10**9 if episodes is None else episodes
    if limit < 1:
        raise ValueError("episodes must be at least 1")
    tasks = [(p, policy, limit, seed, params, config, want_log, k) for k, p in enumerate(paths)]
    reports, logs = [], []
    for r, lg in fan_out(_nav_scene, tasks, jobs):
        reports.extend(r)
        logs.extend(lg)
    if not reports:
        raise ValueError("matched scenes define no episodes")
    return NavResult(reports, aggregate_episodes(reports), logs)

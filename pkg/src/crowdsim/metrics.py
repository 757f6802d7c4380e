"""Crowd-dynamics and navigation metrics, the reward model, and report export."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

OVERLAP = "human_human_overlap"
REACHED = "human_reached_destination"


class DegenerateMetric(ValueError):
    """Raised when a ratio metric has no meaningful value (e.g. collisions
    without any distance travelled)."""


@dataclass(frozen=True)
class DynamicsReport:
    car: float
    gr: float
    mct: float
    n_humans: int
    steps: int
    scene: str = ""
    overlap_steps: int = 0
    reached: int = 0
    dynamics_seconds: float = 0.0


@dataclass(frozen=True)
class EpisodeReport:
    success: bool
    spl: float
    dtg: float
    cpd: float
    path_length: float
    collisions: int
    reward_sum: float
    scene: str = ""
    episode: int = 0
    steps: int = 0


@dataclass(frozen=True)
class RewardParams:
    r_collision: float = -1e-4
    r_success: float = 2.5
    r_shaping: float = 1.0


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    degenerate: bool = False


def _kind(e) -> str:
    return e["kind"] if isinstance(e, dict) else e.kind


def _step(e) -> int:
    return e["step"] if isinstance(e, dict) else e.step


def _actors(e) -> tuple:
    return tuple(e["actors"] if isinstance(e, dict) else e.actors)


def overlap_steps(events: Iterable) -> int:
    return len({_step(e) for e in events if _kind(e) == OVERLAP})


def reached_humans(events: Iterable) -> set:
    return {a for e in events if _kind(e) == REACHED for a in _actors(e)}


def car(events: Iterable, total_steps: int) -> float:
    """Percentage of steps without any human-human overlap."""
    if total_steps <= 0:
        raise ValueError("total_steps must be positive")
    return 100.0 * (1.0 - overlap_steps(events) / total_steps)


def gr(events: Iterable, n_humans: int) -> float:
    """Percentage of humans that reached their destination at least once."""
    if n_humans <= 0:
        raise ValueError("n_humans must be positive")
    return 100.0 * len(reached_humans(events)) / n_humans


def mct(timings: Sequence[float], n_humans: int, steps: int) -> float:
    """Mean dynamics wall time per human per step, in seconds."""
    if steps <= 0 or n_humans <= 0:
        raise ValueError("steps and n_humans must be positive")
    return math.fsum(timings) / (steps * n_humans)


def spl(success: bool, shortest: float, traveled: float) -> float:
    if not shortest > 0:
        raise ValueError("shortest path length must be positive")
    if traveled < 0:
        raise ValueError("traveled distance must be non-negative")
    if not success:
        return 0.0
    return shortest / max(traveled, shortest)


def cpd(collisions: int, traveled: float) -> float:
    """Collisions per meter travelled."""
    if traveled < 0 or collisions < 0:
        raise ValueError("collisions and traveled must be non-negative")
    if traveled == 0:
        if collisions:
            raise DegenerateMetric(f"{collisions} collisions with zero distance travelled")
        return 0.0
    return collisions / traveled


def reward_step(d_prev: float, d_now: float, collided: bool, succeeded: bool,
                params: RewardParams = RewardParams()) -> float:
    # positive shaping when the distance to the goal shrinks
    return (
        params.r_collision * bool(collided)
        + params.r_success * bool(succeeded)
        + params.r_shaping * (d_prev - d_now)
    )


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Ordinary least squares ``y = slope * x + intercept`` with its R².

    Fewer than two distinct ``x`` values cannot determine a line; the fit is
    then flagged degenerate with a zero slope and NaN R².
    """
    if len(xs) != len(ys) or not xs:
        raise ValueError("xs and ys must be non-empty and of equal length")
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return LinearFit(0.0, my, math.nan, degenerate=True)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_tot = math.fsum((y - my) ** 2 for y in ys)
    ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(slope, intercept, r2)


def dynamics_report(events, timings, n_humans: int, steps: int, scene: str = "") -> DynamicsReport:
    events = list(events)
    return DynamicsReport(
        car=car(events, steps),
        gr=gr(events, n_humans),
        mct=mct(timings, n_humans, steps),
        n_humans=n_humans,
        steps=steps,
        scene=scene,
        overlap_steps=overlap_steps(events),
        reached=len(reached_humans(events)),
        dynamics_seconds=math.fsum(timings),
    )


def aggregate_dynamics(reports: Sequence[DynamicsReport], scene: str = "aggregate") -> DynamicsReport:
    """Pool scenes: CAR over all steps, GR over all humans, mCT over all
    human-steps."""
    if not reports:
        raise ValueError("no reports to aggregate")
    steps = sum(r.steps for r in reports)
    humans = sum(r.n_humans for r in reports)
    bad = sum(r.overlap_steps for r in reports)
    reached = sum(r.reached for r in reports)
    seconds = math.fsum(r.dynamics_seconds for r in reports)
    human_steps = sum(r.steps * r.n_humans for r in reports)
    return DynamicsReport(
        car=100.0 * (1.0 - bad / steps),
        gr=100.0 * reached / humans,
        mct=seconds / human_steps,
        n_humans=humans,
        steps=steps,
        scene=scene,
        overlap_steps=bad,
        reached=reached,
        dynamics_seconds=seconds,
    )


@dataclass(frozen=True)
class NavSummary:
    episodes: int
    sr: float
    spl: float
    dtg: float
    cpd: float


def aggregate_episodes(reports: Sequence[EpisodeReport]) -> NavSummary:
    """Means over episodes; ``sr`` and ``spl`` are fractions."""
    n = len(reports)
    if n == 0:
        raise ValueError("no episodes to aggregate")
    return NavSummary(
        episodes=n,
        sr=sum(r.success for r in reports) / n,
        spl=math.fsum(r.spl for r in reports) / n,
        dtg=math.fsum(r.dtg for r in reports) / n,
        cpd=math.fsum(r.cpd for r in reports) / n,
    )


@dataclass
class MetricsReport:
    car: float | None = None
    gr: float | None = None
    mct_seconds: float | None = None
    episodes: list[EpisodeReport] = field(default_factory=list)

    def to_json(self) -> str:
        data = {
            "car": self.car,
            "gr": self.gr,
            "mct_seconds": self.mct_seconds,
            "episodes": [asdict(e) for e in self.episodes],
        }
        return json.dumps(data, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        data = json.loads(text)
        return cls(
            car=data["car"],
            gr=data["gr"],
            mct_seconds=data["mct_seconds"],
            episodes=[EpisodeReport(**e) for e in data["episodes"]],
        )

    def episodes_csv(self) -> str:
        return rows_to_csv(self.episodes, EpisodeReport)


def rows_to_csv(rows, cls) -> str:
    names = [f.name for f in fields(cls)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in rows:
        w.writerow([getattr(r, k) for k in names])
    return buf.getvalue()

"""Grid A* waypoint paths with string pulling, and the per-step desired direction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import OccupancyGrid, Vec2, astar_cells

WAYPOINT_RADIUS = 0.5


class UnreachableGoal(ValueError):
    pass


@dataclass
class Path:
    waypoints: tuple[Vec2, ...]
    cursor: int = 0
    grid_length: float = 0.0

    @property
    def length(self) -> float:
        w = self.waypoints
        return sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(w, w[1:]))

    def reversed(self) -> "Path":
        return Path(self.waypoints[::-1], 0, self.grid_length)


def string_pull(grid: OccupancyGrid, points: list[Vec2]) -> list[Vec2]:
    """Drop interior waypoint ``k`` whenever ``k-1`` and ``k+1`` see each other."""
    pts = list(points)
    k = 1
    while k < len(pts) - 1:
        if grid.visible(pts[k - 1], pts[k + 1]):
            del pts[k]
        else:
            k += 1
    return pts


def plan_path(grid: OccupancyGrid, start: Vec2, goal: Vec2) -> Path:
    """A* on the 8-connected grid followed by string pulling.

    ``grid_length`` keeps the raw A* cost in meters (cell center to cell center).
    """
    start = (float(start[0]), float(start[1]))
    goal = (float(goal[0]), float(goal[1]))
    if start == goal:
        return Path((goal,))
    cs, cg = grid.free_cell_near(start), grid.free_cell_near(goal)
    if cs is None or cg is None or grid.labels[cs] != grid.labels[cg]:
        raise UnreachableGoal(f"no grid path from {start} to {goal}")
    found = astar_cells(grid, cs, cg)
    if found is None:
        raise UnreachableGoal(f"no grid path from {start} to {goal}")
    cells, cost = found
    points = [start] + [grid.center(c) for c in cells] + [goal]
    # endpoints duplicate their own cell centers; pulling removes what it can
    return Path(tuple(string_pull(grid, points)), 0, cost * grid.resolution)


def desired_direction(h, path: Path, goal_tolerance: float = 0.3) -> Vec2:
    """Unit vector from ``h.x`` towards the current waypoint of ``path``.

    Advances ``path.cursor`` past intermediate waypoints within the waypoint
    radius; returns ``(0, 0)`` on arrival at the final waypoint.
    """
    px, py = h.x
    w = path.waypoints
    last = len(w) - 1
    while path.cursor < last:
        wx, wy = w[path.cursor]
        if math.hypot(wx - px, wy - py) > WAYPOINT_RADIUS:
            break
        path.cursor += 1
    wx, wy = w[path.cursor]
    dx, dy = wx - px, wy - py
    d = math.hypot(dx, dy)
    if path.cursor == last and d <= goal_tolerance:
        return (0.0, 0.0)
    if d == 0.0:
        return (0.0, 0.0)
    return (dx / d, dy / d)

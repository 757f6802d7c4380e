"""Scene description, scene files and the geometric queries built on them.

Positions are plain ``(x, y)`` float tuples throughout the package; the
dynamics kernels run in pure Python and tuples keep them cheap.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import shapely
from scipy import ndimage
from shapely.geometry import Polygon as ShapelyPolygon

Vec2 = tuple[float, float]
Polygon = tuple[Vec2, ...]

SCENE_VERSION = 1

DEFAULT_MASS = 80.0
DEFAULT_RADIUS = 0.3
DEFAULT_DESIRED_SPEED = 1.4
DEFAULT_DESIRED_ANGULAR_SPEED = math.pi / 2
DEFAULT_GRID_RESOLUTION = 0.25

SQRT2 = math.sqrt(2.0)


class SceneError(ValueError):
    """Raised when a scene file is malformed or violates a scene invariant."""


@dataclass(frozen=True)
class HumanSpec:
    id: int
    position: Vec2
    destination: Vec2
    radius: float = DEFAULT_RADIUS
    mass: float = DEFAULT_MASS
    desired_speed: float = DEFAULT_DESIRED_SPEED
    desired_angular_speed: float = DEFAULT_DESIRED_ANGULAR_SPEED
    heading: float = 0.0


@dataclass(frozen=True)
class EpisodeSpec:
    agent_start: Vec2
    agent_heading: float
    goal: Vec2


@dataclass(frozen=True)
class Scene:
    name: str
    floor: Polygon
    obstacles: tuple[Polygon, ...] = ()
    grid_resolution: float = DEFAULT_GRID_RESOLUTION
    humans: tuple[HumanSpec, ...] = ()
    episodes: tuple[EpisodeSpec, ...] = ()
    # derived, excluded from equality
    _edges: tuple = field(default=(), init=False, repr=False, compare=False)
    _boxes: tuple = field(default=(), init=False, repr=False, compare=False)
    _clearance: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        floor_edges = tuple(polygon_edges(self.floor))
        obstacle_edges = tuple(tuple(polygon_edges(p)) for p in self.obstacles)
        object.__setattr__(self, "_edges", (floor_edges, obstacle_edges))
        object.__setattr__(self, "_boxes", tuple(_bbox(p) for p in self.obstacles))

    @property
    def floor_edges(self):
        return self._edges[0]

    @property
    def obstacle_edges(self):
        return self._edges[1]

    @property
    def obstacle_boxes(self):
        return self._boxes

    @property
    def clearance_table(self):
        """``(x0, y0, resolution, rows)``: per-cell lower bounds on the distance
        to any wall or obstacle, ``-inf`` where the cell center is not free."""
        if not self._clearance:
            # a benign race just rebuilds the same table
            self._clearance.append(_clearance_table(self))
        return self._clearance[0]

    def clear_of_geometry(self, px: float, py: float, radius: float) -> bool:
        """Conservative O(1) test: True only if the disc at ``(px, py)`` lies in
        free space without touching any wall or obstacle."""
        x0, y0, res, rows = self.clearance_table
        col = int((px - x0) // res)
        row = int((py - y0) // res)
        if row < 0 or col < 0 or row >= len(rows) or col >= len(rows[0]):
            return False
        return rows[row][col] >= radius

    @property
    def max_human_radius(self) -> float:
        if not self.humans:
            return DEFAULT_RADIUS
        return max(h.radius for h in self.humans)


# ---------------------------------------------------------------------------
# polygon primitives


def signed_area(poly: Sequence[Vec2]) -> float:
    """Shoelace area, positive for counterclockwise winding."""
    s = 0.0
    n = len(poly)
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def normalize_winding(poly: Sequence[Vec2]) -> Polygon:
    pts = tuple((float(x), float(y)) for x, y in poly)
    if signed_area(pts) < 0:
        pts = pts[::-1]
    return pts


def polygon_edges(poly: Sequence[Vec2]) -> Iterable[tuple[float, float, float, float]]:
    n = len(poly)
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        yield (x0, y0, x1, y1)


def _bbox(poly: Sequence[Vec2]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return (min(xs), min(ys), max(xs), max(ys))


def point_in_polygon(px: float, py: float, poly: Sequence[Vec2]) -> bool:
    """Even-odd ray casting. Points exactly on the boundary may go either way."""
    inside = False
    n = len(poly)
    x0, y0 = poly[n - 1]
    for k in range(n):
        x1, y1 = poly[k]
        if (y1 > py) != (y0 > py):
            xc = x1 + (py - y1) * (x0 - x1) / (y0 - y1)
            if px < xc:
                inside = not inside
        x0, y0 = x1, y1
    return inside


def closest_point_on_segment(
    px: float, py: float, x0: float, y0: float, x1: float, y1: float
) -> tuple[float, float, float]:
    """Return ``(cx, cy, dist)`` for the closest point of segment to ``p``."""
    ex = x1 - x0
    ey = y1 - y0
    ll = ex * ex + ey * ey
    if ll <= 0.0:
        t = 0.0
    else:
        t = ((px - x0) * ex + (py - y0) * ey) / ll
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx = x0 + t * ex
    cy = y0 + t * ey
    return cx, cy, math.hypot(px - cx, py - cy)


def closest_point_on_polygon(px: float, py: float, edges) -> tuple[float, float, float]:
    best = (0.0, 0.0, math.inf)
    for e in edges:
        c = closest_point_on_segment(px, py, *e)
        if c[2] < best[2]:
            best = c
    return best


def _polygon_is_simple(poly: Polygon) -> bool:
    if len(poly) < 3:
        return False
    sp = ShapelyPolygon(poly)
    return sp.is_valid and sp.area > 0


# ---------------------------------------------------------------------------
# scene-level queries


def navigable_area(scene: Scene) -> float:
    """Floor area minus the area of each obstacle clipped to the floor."""
    floor = ShapelyPolygon(scene.floor)
    area = floor.area
    for obs in scene.obstacles:
        area -= floor.intersection(ShapelyPolygon(obs)).area
    return area


def human_density(scene: Scene) -> float:
    return len(scene.humans) / navigable_area(scene)


def in_free_space(scene: Scene, p: Vec2) -> bool:
    px, py = p
    if not point_in_polygon(px, py, scene.floor):
        return False
    return not any(point_in_polygon(px, py, obs) for obs in scene.obstacles)


def distance_to_obstacles(scene: Scene, p: Vec2) -> float:
    """Signed distance from ``p`` to the nearest obstacle or floor boundary.

    Negative when ``p`` is inside an obstacle or outside the floor.
    """
    px, py = p
    if not (math.isfinite(px) and math.isfinite(py)):
        raise ValueError(f"non-finite point {p!r}")
    d = closest_point_on_polygon(px, py, scene.floor_edges)[2]
    for edges in scene.obstacle_edges:
        d = min(d, closest_point_on_polygon(px, py, edges)[2])
    return d if in_free_space(scene, p) else -d


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> float:
    """Minimum distance between segments ``a``-``b`` and ``c``-``d``."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    dx, dy = d
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if ((o1 > 0 > o2) or (o1 < 0 < o2)) and ((o3 > 0 > o4) or (o3 < 0 < o4)):
        return 0.0
    return min(
        closest_point_on_segment(ax, ay, cx, cy, dx, dy)[2],
        closest_point_on_segment(bx, by, cx, cy, dx, dy)[2],
        closest_point_on_segment(cx, cy, ax, ay, bx, by)[2],
        closest_point_on_segment(dx, dy, ax, ay, bx, by)[2],
    )


def swept_disc_clear(scene: Scene, a: Vec2, b: Vec2, radius: float) -> bool:
    """Whether a disc moving straight from ``a`` to ``b`` stays in free space
    without coming closer than ``radius`` to any wall or obstacle edge."""
    if not in_free_space(scene, b):
        return False
    for edges in (scene.floor_edges, *scene.obstacle_edges):
        for x0, y0, x1, y1 in edges:
            if segment_distance(a, b, (x0, y0), (x1, y1)) < radius:
                return False
    return True


# ---------------------------------------------------------------------------
# scene files


def _vec(value, where: str) -> Vec2:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise SceneError(f"{where}: expected [x, y], got {value!r}")
    x, y = float(value[0]), float(value[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise SceneError(f"{where}: non-finite coordinate")
    return (x, y)


def _num(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SceneError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise SceneError(f"{where}: non-finite number")
    return v


def _check_keys(obj, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise SceneError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SceneError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SceneError(f"{where}: missing keys {sorted(missing)}")


_TOP_KEYS = {"version", "name", "floor", "obstacles", "grid_resolution", "humans", "episodes"}
_HUMAN_KEYS = {
    "id", "position", "destination", "radius", "mass",
    "desired_speed", "desired_angular_speed", "heading",
}
_EPISODE_KEYS = {"agent_start", "agent_heading", "goal"}


def scene_from_dict(data: dict, *, validate: bool = True) -> Scene:
    _check_keys(data, _TOP_KEYS, {"version", "name", "floor"}, "scene")
    if data["version"] != SCENE_VERSION or isinstance(data["version"], bool):
        raise SceneError(f"scene: unsupported version {data['version']!r}")
    if not isinstance(data["name"], str):
        raise SceneError("scene: name must be a string")

    floor = normalize_winding([_vec(p, f"floor[{k}]") for k, p in enumerate(data["floor"])])
    obstacles = []
    for i, obs in enumerate(data.get("obstacles", [])):
        obstacles.append(normalize_winding([_vec(p, f"obstacle {i}[{k}]") for k, p in enumerate(obs)]))
    res = _num(data.get("grid_resolution", DEFAULT_GRID_RESOLUTION), "grid_resolution")

    humans = []
    for k, h in enumerate(data.get("humans", [])):
        where = f"human[{k}]"
        _check_keys(h, _HUMAN_KEYS, {"id", "position", "destination"}, where)
        if not isinstance(h["id"], int) or isinstance(h["id"], bool):
            raise SceneError(f"{where}: id must be an integer")
        humans.append(HumanSpec(
            id=h["id"],
            position=_vec(h["position"], f"{where}.position"),
            destination=_vec(h["destination"], f"{where}.destination"),
            radius=_num(h.get("radius", DEFAULT_RADIUS), f"{where}.radius"),
            mass=_num(h.get("mass", DEFAULT_MASS), f"{where}.mass"),
            desired_speed=_num(h.get("desired_speed", DEFAULT_DESIRED_SPEED), f"{where}.desired_speed"),
            desired_angular_speed=_num(
                h.get("desired_angular_speed", DEFAULT_DESIRED_ANGULAR_SPEED),
                f"{where}.desired_angular_speed",
            ),
            heading=_num(h.get("heading", 0.0), f"{where}.heading"),
        ))

    episodes = []
    for k, e in enumerate(data.get("episodes", [])):
        where = f"episode[{k}]"
        _check_keys(e, _EPISODE_KEYS, _EPISODE_KEYS, where)
        episodes.append(EpisodeSpec(
            agent_start=_vec(e["agent_start"], f"{where}.agent_start"),
            agent_heading=_num(e["agent_heading"], f"{where}.agent_heading"),
            goal=_vec(e["goal"], f"{where}.goal"),
        ))

    scene = Scene(
        name=data["name"],
        floor=floor,
        obstacles=tuple(obstacles),
        grid_resolution=res,
        humans=tuple(humans),
        episodes=tuple(episodes),
    )
    if validate:
        validate_scene(scene)
    return scene


def scene_to_dict(scene: Scene) -> dict:
    return {
        "version": SCENE_VERSION,
        "name": scene.name,
        "floor": [list(p) for p in scene.floor],
        "obstacles": [[list(p) for p in obs] for obs in scene.obstacles],
        "grid_resolution": scene.grid_resolution,
        "humans": [
            {
                "id": h.id,
                "position": list(h.position),
                "destination": list(h.destination),
                "radius": h.radius,
                "mass": h.mass,
                "desired_speed": h.desired_speed,
                "desired_angular_speed": h.desired_angular_speed,
                "heading": h.heading,
            }
            for h in scene.humans
        ],
        "episodes": [
            {"agent_start": list(e.agent_start), "agent_heading": e.agent_heading, "goal": list(e.goal)}
            for e in scene.episodes
        ],
    }


def load_scene(path) -> Scene:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: not valid JSON ({exc})") from exc
    return scene_from_dict(data)


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=1) + "\n", encoding="utf-8")


def validate_scene(scene: Scene) -> None:
    """Check every scene invariant; raise :class:`SceneError` on the first violation."""
    if scene.grid_resolution <= 0:
        raise SceneError("grid_resolution must be positive")
    if not _polygon_is_simple(scene.floor):
        raise SceneError("floor is not a simple polygon with at least 3 vertices")
    for i, obs in enumerate(scene.obstacles):
        if not _polygon_is_simple(obs):
            raise SceneError(f"obstacle {i} is not a simple polygon with at least 3 vertices")

    seen = set()
    for h in scene.humans:
        if h.id in seen:
            raise SceneError(f"duplicate human id {h.id}")
        seen.add(h.id)
        if h.radius <= 0 or h.mass <= 0:
            raise SceneError(f"human {h.id} must have positive radius and mass")
        if h.desired_speed < 0 or h.desired_angular_speed < 0:
            raise SceneError(f"human {h.id} has a negative desired speed")
        for label, p in (("start", h.position), ("destination", h.destination)):
            _check_clearance(scene, p, h.radius, f"human {h.id} {label}")

    hs = scene.humans
    for a in range(len(hs)):
        for b in range(a + 1, len(hs)):
            (xa, ya), (xb, yb) = hs[a].position, hs[b].position
            if math.hypot(xa - xb, ya - yb) - hs[a].radius - hs[b].radius <= 0:
                raise SceneError(f"human {hs[a].id} overlaps human {hs[b].id}")

    for k, e in enumerate(scene.episodes):
        for label, p in (("agent_start", e.agent_start), ("goal", e.goal)):
            if not in_free_space(scene, p):
                raise SceneError(f"episode {k} {label} is not in free space")

    if scene.humans or scene.episodes:
        grid = build_grid(scene)
        for h in scene.humans:
            if not grid.connected(h.position, h.destination):
                raise SceneError(f"human {h.id} destination is unreachable")
        for k, e in enumerate(scene.episodes):
            if not grid.connected(e.agent_start, e.goal):
                raise SceneError(f"episode {k} goal is unreachable")


def _check_clearance(scene: Scene, p: Vec2, radius: float, label: str) -> None:
    px, py = p
    if not point_in_polygon(px, py, scene.floor):
        raise SceneError(f"{label} lies outside the floor")
    for i, obs in enumerate(scene.obstacles):
        if point_in_polygon(px, py, obs):
            raise SceneError(f"{label} lies inside obstacle {i}")
        if closest_point_on_polygon(px, py, scene.obstacle_edges[i])[2] < radius:
            raise SceneError(f"{label} overlaps obstacle {i}")
    if closest_point_on_polygon(px, py, scene.floor_edges)[2] < radius:
        raise SceneError(f"{label} overlaps the floor boundary")


# ---------------------------------------------------------------------------
# occupancy grid and grid geodesics

_NEIGHBOURS = (
    (1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
    (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2),
)


def _segment_distance_field(xs: np.ndarray, ys: np.ndarray, edges) -> np.ndarray:
    d = np.full(xs.shape, np.inf)
    for x0, y0, x1, y1 in edges:
        ex, ey = x1 - x0, y1 - y0
        ll = ex * ex + ey * ey
        t = np.clip(((xs - x0) * ex + (ys - y0) * ey) / ll, 0.0, 1.0) if ll > 0 else 0.0
        d = np.minimum(d, np.hypot(xs - (x0 + t * ex), ys - (y0 + t * ey)))
    return d


CLEARANCE_RESOLUTION = 0.25


def _clearance_table(scene: Scene):
    """Per-cell lower bound on the distance from any point of the cell to the
    scene boundaries; ``-inf`` for cells whose center is not in free space."""
    res = CLEARANCE_RESOLUTION
    x0, y0, x1, y1 = _bbox(scene.floor)
    width = max(1, int(math.ceil((x1 - x0) / res)))
    height = max(1, int(math.ceil((y1 - y0) / res)))
    xs, ys = np.meshgrid(x0 + (np.arange(width) + 0.5) * res, y0 + (np.arange(height) + 0.5) * res)
    free = shapely.contains_xy(ShapelyPolygon(scene.floor), xs, ys)
    d = _segment_distance_field(xs, ys, scene.floor_edges)
    for obs, edges in zip(scene.obstacles, scene.obstacle_edges):
        free &= ~shapely.contains_xy(ShapelyPolygon(obs), xs, ys)
        d = np.minimum(d, _segment_distance_field(xs, ys, edges))
    bound = np.where(free, d - res * SQRT2 / 2.0, -np.inf)
    return x0, y0, res, bound.tolist()


@dataclass(frozen=True)
class OccupancyGrid:
    """Blocked/free raster of a scene. ``blocked[row, col]`` with row along y."""

    origin: Vec2
    resolution: float
    width: int
    height: int
    blocked: np.ndarray
    labels: np.ndarray = field(repr=False, compare=False)

    def cell_of(self, p: Vec2) -> tuple[int, int]:
        col = int(math.floor((p[0] - self.origin[0]) / self.resolution))
        row = int(math.floor((p[1] - self.origin[1]) / self.resolution))
        return min(max(row, 0), self.height - 1), min(max(col, 0), self.width - 1)

    def center(self, cell: tuple[int, int]) -> Vec2:
        row, col = cell
        return (
            self.origin[0] + (col + 0.5) * self.resolution,
            self.origin[1] + (row + 0.5) * self.resolution,
        )

    def is_free(self, cell: tuple[int, int]) -> bool:
        row, col = cell
        return 0 <= row < self.height and 0 <= col < self.width and not self.blocked[row, col]

    def free_cell_near(self, p: Vec2) -> tuple[int, int] | None:
        """The cell containing ``p`` if free, else the free cell whose center is nearest."""
        cell = self.cell_of(p)
        if self.is_free(cell):
            return cell
        rows, cols = np.nonzero(~self.blocked)
        if rows.size == 0:
            return None
        cx = self.origin[0] + (cols + 0.5) * self.resolution
        cy = self.origin[1] + (rows + 0.5) * self.resolution
        k = int(np.argmin((cx - p[0]) ** 2 + (cy - p[1]) ** 2))
        return int(rows[k]), int(cols[k])

    def connected(self, a: Vec2, b: Vec2) -> bool:
        ca, cb = self.free_cell_near(a), self.free_cell_near(b)
        if ca is None or cb is None:
            return False
        return self.labels[ca] == self.labels[cb]

    def visible(self, a: Vec2, b: Vec2) -> bool:
        """True when every sample of segment ``a``-``b`` lies in a free cell.

        Samples falling in the cells of the endpoints themselves are exempt so
        that endpoints snapped off a blocked cell can still see their neighbours.
        """
        ca, cb = self.cell_of(a), self.cell_of(b)
        length = math.hypot(b[0] - a[0], b[1] - a[1])
        n = max(1, int(math.ceil(length / (0.25 * self.resolution))))
        for k in range(n + 1):
            t = k / n
            c = self.cell_of((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
            if c != ca and c != cb and self.blocked[c]:
                return False
        return True

    def neighbours(self, cell: tuple[int, int]):
        """8-connected free neighbours; diagonal moves may not cut blocked corners."""
        row, col = cell
        blocked = self.blocked
        h, w = self.height, self.width
        for dc, dr, cost in _NEIGHBOURS:
            r2, c2 = row + dr, col + dc
            if not (0 <= r2 < h and 0 <= c2 < w) or blocked[r2, c2]:
                continue
            if dr and dc and (blocked[row, c2] or blocked[r2, col]):
                continue
            yield (r2, c2), cost


def build_grid(scene: Scene, resolution: float | None = None, inflation: float | None = None) -> OccupancyGrid:
    """Rasterize ``scene``; a cell is blocked when its center is off the floor or
    within ``inflation`` of an obstacle or of the floor boundary."""
    res = scene.grid_resolution if resolution is None else resolution
    infl = scene.max_human_radius if inflation is None else inflation
    x0, y0, x1, y1 = _bbox(scene.floor)
    width = max(1, int(math.ceil((x1 - x0) / res - 1e-9)))
    height = max(1, int(math.ceil((y1 - y0) / res - 1e-9)))
    cx = x0 + (np.arange(width) + 0.5) * res
    cy = y0 + (np.arange(height) + 0.5) * res
    xs, ys = np.meshgrid(cx, cy)

    blocked = ~shapely.contains_xy(ShapelyPolygon(scene.floor), xs, ys)
    blocked |= _segment_distance_field(xs, ys, scene.floor_edges) < infl
    for obs, edges in zip(scene.obstacles, scene.obstacle_edges):
        inside = shapely.contains_xy(ShapelyPolygon(obs), xs, ys)
        blocked |= inside | (_segment_distance_field(xs, ys, edges) < infl)
    blocked.setflags(write=False)

    # 8-connected moves without corner cutting reach exactly the 4-connected components
    labels, _ = ndimage.label(~blocked)
    labels.setflags(write=False)
    return OccupancyGrid((x0, y0), res, width, height, blocked, labels)


def _octile(a: tuple[int, int], b: tuple[int, int]) -> float:
    dr, dc = abs(a[0] - b[0]), abs(a[1] - b[1])
    return max(dr, dc) + (SQRT2 - 1.0) * min(dr, dc)


def astar_cells(grid: OccupancyGrid, start: tuple[int, int], goal: tuple[int, int]):
    """A* over grid cells. Returns ``(cells, cost_in_cells)`` or ``None``."""
    if start == goal:
        return [start], 0.0
    g = {start: 0.0}
    came: dict = {start: None}
    tie = 0
    frontier = [(_octile(start, goal), tie, start)]
    closed = set()
    while frontier:
        _, _, cur = heapq.heappop(frontier)
        if cur == goal:
            cells = []
            while cur is not None:
                cells.append(cur)
                cur = came[cur]
            return cells[::-1], g[goal]
        if cur in closed:
            continue
        closed.add(cur)
        gc = g[cur]
        for nb, cost in grid.neighbours(cur):
            ng = gc + cost
            if ng < g.get(nb, math.inf) - 1e-12:
                g[nb] = ng
                came[nb] = cur
                tie += 1
                heapq.heappush(frontier, (ng + _octile(nb, goal), tie, nb))
    return None


def geodesic_distance(grid: OccupancyGrid, a: Vec2, b: Vec2) -> float | None:
    """Shortest 8-connected grid path length in meters; ``None`` if unreachable."""
    ca, cb = grid.free_cell_near(a), grid.free_cell_near(b)
    if ca is None or cb is None or grid.labels[ca] != grid.labels[cb]:
        return None
    found = astar_cells(grid, ca, cb)
    if found is None:
        return None
    return found[1] * grid.resolution


def distance_field(grid: OccupancyGrid, goal: Vec2) -> np.ndarray:
    """Grid geodesic (meters) from every cell to ``goal``; ``inf`` where unreachable."""
    dist = np.full((grid.height, grid.width), np.inf)
    start = grid.free_cell_near(goal)
    if start is None:
        return dist
    dist[start] = 0.0
    frontier = [(0.0, start)]
    while frontier:
        d, cur = heapq.heappop(frontier)
        if d > dist[cur]:
            continue
        for nb, cost in grid.neighbours(cur):
            nd = d + cost * grid.resolution
            if nd < dist[nb]:
                dist[nb] = nd
                heapq.heappush(frontier, (nd, nb))
    dist.setflags(write=False)
    return dist

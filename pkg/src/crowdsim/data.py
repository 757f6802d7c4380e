"""The bundled scene collections and how they are regenerated."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .generator import GeneratorConfig, corridor_scene, empty_scene, generate_scenes
from .geometry import Scene, save_scene

SUITE = "suite"
NAV_EMPTY = "nav_empty"
NAV_DENSITY = "nav_density"

SUITE_CONFIG = GeneratorConfig(count=20, seed=0, prefix="scene")

# three density strata, each clear of the bucket edges used in reports
DENSITY_BANDS = (("low", (0.1, 0.19)), ("mid", (0.21, 0.29)), ("high", (0.31, 0.45)))
DENSITY_SCENES_PER_BAND = 10


def scenes_dir() -> Path:
    return Path(str(resources.files("crowdsim") / "data" / "scenes"))


def suite_glob() -> str:
    return str(scenes_dir() / SUITE / "*.json")


def bundled_scenes() -> dict[str, Scene]:
    """Relative file name -> scene, for every bundled scene."""
    out: dict[str, Scene] = {}
    for s in generate_scenes(SUITE_CONFIG):
        out[f"{SUITE}/{s.name}.json"] = s
    out["corridor_n10.json"] = corridor_scene(10)
    for k in range(5):
        s = empty_scene(k, seed=0, episodes=4)
        out[f"{NAV_EMPTY}/{s.name}.json"] = s
    for label, band in DENSITY_BANDS:
        cfg = GeneratorConfig(
            count=DENSITY_SCENES_PER_BAND, density_range=band, density_mean=None,
            area_range=(60.0, 120.0), obstacle_count_range=(0, 0), episodes_per_scene=3,
            seed=0, prefix=label,
        )
        for s in generate_scenes(cfg):
            out[f"{NAV_DENSITY}/{s.name}.json"] = s
    return out


def write_bundled(root: Path | str | None = None) -> list[Path]:
    root = Path(root) if root is not None else scenes_dir()
    written = []
    for rel, scene in bundled_scenes().items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        save_scene(scene, path)
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_bundled():
        print(p)

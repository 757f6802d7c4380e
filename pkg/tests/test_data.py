import numpy as np
import pytest

from crowdsim import data
from crowdsim.geometry import human_density, load_scene, validate_scene


@pytest.fixture(scope="module")
def regenerated(tmp_path_factory):
    root = tmp_path_factory.mktemp("bundled")
    data.write_bundled(root)
    return root


def test_shipped_files_match_generator(regenerated):
    shipped = sorted(p.relative_to(data.scenes_dir()) for p in data.scenes_dir().rglob("*.json"))
    fresh = sorted(p.relative_to(regenerated) for p in regenerated.rglob("*.json"))
    assert shipped == fresh
    for rel in shipped:
        assert (data.scenes_dir() / rel).read_bytes() == (regenerated / rel).read_bytes(), rel


def test_suite_shape():
    scenes = [load_scene(p) for p in sorted(data.scenes_dir().glob("suite/*.json"))]
    assert len(scenes) == 20
    dens = [human_density(s) for s in scenes]
    assert all(0.1 - 1e-9 <= d <= 0.5 + 1e-9 for d in dens)
    assert np.mean(dens) == pytest.approx(0.189, abs=0.05)


def test_navigation_sets():
    empty = [load_scene(p) for p in sorted(data.scenes_dir().glob("nav_empty/*.json"))]
    assert sum(len(s.episodes) for s in empty) == 20
    assert all(not s.obstacles and not s.humans for s in empty)
    for label, (lo, hi) in data.DENSITY_BANDS:
        for p in sorted(data.scenes_dir().glob(f"nav_density/{label}_*.json")):
            s = load_scene(p)
            validate_scene(s)
            assert lo - 1e-9 <= human_density(s) <= hi + 1e-9

import math

import numpy as np
import pytest

from crowdsim.generator import (
    GeneratorConfig,
    PlacementError,
    _sample_density,
    corridor_scene,
    empty_scene,
    generate_scene,
    generate_scenes,
)
from crowdsim.geometry import (
    build_grid,
    human_density,
    navigable_area,
    scene_to_dict,
    validate_scene,
)

SMALL = GeneratorConfig(count=6, area_range=(10.0, 60.0), seed=11)


def test_defaults():
    cfg = GeneratorConfig()
    assert cfg.density_range == (0.1, 0.5) and cfg.area_range == (10.0, 300.0)
    for bad in (dict(density_range=(0.0, 0.5)), dict(density_range=(0.5, 0.1)),
                dict(density_range=(0.1, 1.5)), dict(area_range=(0.0, 5.0)),
                dict(density_mean=0.6), dict(count=-1)):
        with pytest.raises(ValueError):
            GeneratorConfig(**bad)


def test_scenes_valid_and_in_range():
    scenes = generate_scenes(SMALL)
    assert len(scenes) == 6
    for s in scenes:
        validate_scene(s)
        assert 0.1 - 1e-9 <= human_density(s) <= 0.5 + 1e-9
        g = build_grid(s)
        for h in s.humans:
            assert g.connected(h.position, h.destination)
        for ep in s.episodes:
            assert g.connected(ep.agent_start, ep.goal)


def test_pairwise_gap():
    s = generate_scene(3, SMALL)
    hs = s.humans
    for i, a in enumerate(hs):
        for b in hs[i + 1:]:
            assert math.dist(a.position, b.position) - a.radius - b.radius > 0.2


def test_fixed_density_band():
    cfg = GeneratorConfig(count=4, density_range=(0.189, 0.189), area_range=(20.0, 80.0), seed=2)
    for s in generate_scenes(cfg):
        assert human_density(s) == pytest.approx(0.189, rel=1e-9)


def test_density_sampler_targets_mean():
    cfg = GeneratorConfig()
    rng = np.random.default_rng(0)
    draws = np.array([_sample_density(rng, cfg) for _ in range(100_000)])
    assert draws.min() >= 0.1 and draws.max() <= 0.5
    # expectation of lo + (hi - lo) * u**p is lo + (hi - lo) / (p + 1)
    assert draws.mean() == pytest.approx(0.189, rel=0.01)


def test_uniform_density_when_no_mean():
    cfg = GeneratorConfig(density_mean=None)
    rng = np.random.default_rng(1)
    draws = [_sample_density(rng, cfg) for _ in range(50_000)]
    assert np.mean(draws) == pytest.approx(0.3, rel=0.01)


def test_same_seed_same_scene_different_seed_differs():
    a = scene_to_dict(generate_scene(1, SMALL))
    b = scene_to_dict(generate_scene(1, SMALL))
    c = scene_to_dict(generate_scene(1, GeneratorConfig(count=6, area_range=(10.0, 60.0), seed=12)))
    assert a == b and a != c


def test_obstacles_keep_navigable_area():
    cfg = GeneratorConfig(count=3, obstacle_count_range=(2, 3), area_range=(80.0, 150.0), seed=5)
    for s in generate_scenes(cfg):
        assert len(s.humans) / navigable_area(s) == pytest.approx(human_density(s))
        assert human_density(s) <= 0.5 + 1e-9


def test_placement_failure_suggests_lower_density():
    cfg = GeneratorConfig(count=1, density_range=(1.0, 1.0), area_range=(40.0, 40.0))
    with pytest.raises(PlacementError, match="lower density"):
        generate_scene(0, cfg)


def test_corridor_and_empty_scenes():
    c = corridor_scene()
    validate_scene(c)
    assert len(c.humans) == 10 and navigable_area(c) == pytest.approx(42.0)
    e = empty_scene(0, episodes=4)
    validate_scene(e)
    assert not e.humans and not e.obstacles and len(e.episodes) == 4

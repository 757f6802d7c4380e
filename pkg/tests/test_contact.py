import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdsim.contact import (
    ContactParams,
    contact_force_human_human,
    contact_force_human_obstacle,
    contact_torque,
    contact_torque_human_human,
    obstacle_contacts,
    pair_normal,
)

from conftest import empty_room, make_human, rect

P = ContactParams()


def test_defaults_and_validation():
    assert (P.k_normal, P.c_damp, P.mu) == (5000.0, 100.0, 0.0)
    for bad in (dict(k_normal=0), dict(c_damp=-1), dict(mu=-0.1)):
        with pytest.raises(ValueError):
            ContactParams(**bad)


def test_separated_pair_has_no_force():
    a = make_human(0, x=(0.0, 0.0))
    b = make_human(1, x=(0.7, 0.0))
    assert contact_force_human_human(a, b, P) == (0.0, 0.0)


def test_overlap_at_rest():
    a = make_human(0, x=(0.0, 0.0))
    b = make_human(1, x=(0.55, 0.0))
    fx, fy = contact_force_human_human(a, b, P)
    assert fx == pytest.approx(-5000 * 0.05) and fy == 0.0
    assert contact_force_human_human(b, a, P) == (-fx, -fy)


def test_damping_only_when_approaching():
    a = make_human(0, x=(0.0, 0.0), v=(1.0, 0.0))
    b = make_human(1, x=(0.55, 0.0))
    approach = contact_force_human_human(a, b, P)[0]
    a_sep = make_human(0, x=(0.0, 0.0), v=(-1.0, 0.0))
    separate = contact_force_human_human(a_sep, b, P)[0]
    assert approach == pytest.approx(-250.0 - 100.0)
    assert separate == pytest.approx(-250.0)


def test_coincident_centers_use_pair_normal():
    a = make_human(3, x=(1.0, 1.0))
    b = make_human(8, x=(1.0, 1.0))
    fa = contact_force_human_human(a, b, P)
    fb = contact_force_human_human(b, a, P)
    assert math.hypot(*fa) == pytest.approx(5000 * 0.6)
    assert fa == (-fb[0], -fb[1])
    n = pair_normal(3, 8)
    assert math.hypot(*n) == pytest.approx(1.0)
    assert pair_normal(8, 3) == (-n[0], -n[1])


coord = st.floats(-2, 2)


@given(coord, coord, coord, coord, coord, coord, coord, coord)
def test_action_reaction(x0, y0, x1, y1, vx0, vy0, vx1, vy1):
    a = make_human(0, x=(x0, y0), v=(vx0, vy0))
    b = make_human(1, x=(x1, y1), v=(vx1, vy1))
    mu = ContactParams(mu=0.4)
    fa = contact_force_human_human(a, b, mu)
    fb = contact_force_human_human(b, a, mu)
    assert fa[0] == -fb[0] and fa[1] == -fb[1]
    if math.hypot(x0 - x1, y0 - y1) > 0.6:
        assert fa == (0.0, 0.0) and contact_torque_human_human(a, b, mu) == 0.0


def test_continuous_at_zero_penetration():
    b = make_human(1, x=(0.0, 0.0))
    forces = [abs(contact_force_human_human(make_human(0, x=(0.6 - eps, 0.0)), b, P)[0])
              for eps in (1e-3, 1e-6, 1e-9)]
    assert forces[-1] < 1e-5 and forces == sorted(forces, reverse=True)


def test_wall_examples():
    room = empty_room()
    assert contact_force_human_obstacle(make_human(x=(1.0, 1.0)), room, P) == (0.0, 0.0)
    fx, fy = contact_force_human_obstacle(make_human(x=(0.25, 5.0)), room, P)
    assert fx == pytest.approx(250.0) and fy == pytest.approx(0.0)
    fx, fy = contact_force_human_obstacle(make_human(x=(0.25, 0.2)), room, P)
    assert (fx, fy) == pytest.approx((250.0, 500.0))


def test_obstacle_penetration_and_inside():
    room = empty_room(obstacles=[rect(4, 4, 6, 6)])
    fx, fy = contact_force_human_obstacle(make_human(x=(3.8, 5.0)), room, P)
    assert fx == pytest.approx(-500.0) and fy == pytest.approx(0.0)
    # center inside the block: pushed out through the nearest face
    fx, fy = contact_force_human_obstacle(make_human(x=(4.1, 5.0)), room, P)
    assert fx == pytest.approx(-5000 * 0.4)


def test_outside_floor_pushed_back():
    fx, fy = contact_force_human_obstacle(make_human(x=(-0.1, 5.0)), empty_room(), P)
    assert fx == pytest.approx(5000 * 0.4) and fy == pytest.approx(0.0)


def test_contact_torque():
    assert contact_torque(make_human(x=(0, 0)), (0.3, 0.0), (0.0, 10.0)) == pytest.approx(3.0)
    assert contact_torque(make_human(x=(0, 0)), (0.3, 0.0), (0.0, -10.0)) == pytest.approx(-3.0)
    assert contact_torque(make_human(x=(0, 0)), (0.3, 0.0), (5.0, 0.0)) == 0.0


def test_frictionless_contacts_exert_no_torque():
    rng = np.random.default_rng(0)
    room = empty_room(obstacles=[rect(4, 4, 6, 6)])
    for _ in range(200):
        a = make_human(0, x=tuple(rng.uniform(3.3, 6.7, 2)), v=tuple(rng.uniform(-1, 1, 2)))
        b = make_human(1, x=(a.x[0] + rng.uniform(-0.5, 0.5), a.x[1] + rng.uniform(-0.5, 0.5)))
        assert contact_torque_human_human(a, b, P) == 0.0
        assert all(c[2] == 0.0 for c in obstacle_contacts(a, room, P))


def test_friction_torque_matches_lever_arm():
    mu = ContactParams(mu=0.5)
    room = empty_room()
    h = make_human(x=(0.25, 5.0), v=(0.0, 1.0))
    (fx, fy, tq, point, tangential), = list(obstacle_contacts(h, room, mu))
    assert point == pytest.approx((-0.05, 5.0))
    assert tangential[1] < 0
    assert tq == pytest.approx(contact_torque(h, point, tangential))
    assert abs(tangential[1]) <= 0.5 * 250.0 + 1e-9

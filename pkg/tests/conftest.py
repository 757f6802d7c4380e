import math

import pytest

from crowdsim.dynamics import Human
from crowdsim.geometry import EpisodeSpec, HumanSpec, Scene


def rect(x0, y0, x1, y1):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def make_human(hid=0, x=(0.0, 0.0), v=(0.0, 0.0), e_hat=(1.0, 0.0), v_des=1.4, psi=0.0,
               psi0=0.0, omega=0.0, omega0=math.pi / 2, r=0.3, m=80.0, destination=(5.0, 0.0)):
    return Human(id=hid, x=tuple(x), v=tuple(v), e_hat=tuple(e_hat), v_des=v_des, psi=psi,
                 psi0=psi0, omega=omega, omega0=omega0, r=r, m=m, destination=tuple(destination),
                 origin=tuple(x))


def empty_room(w=10.0, h=10.0, humans=(), obstacles=(), episodes=(), name="room"):
    return Scene(name=name, floor=rect(0, 0, w, h), obstacles=tuple(obstacles),
                 humans=tuple(humans), episodes=tuple(episodes))


@pytest.fixture
def room():
    return empty_room()


@pytest.fixture
def one_human_scene():
    return empty_room(humans=[HumanSpec(0, (2.0, 5.0), (8.0, 5.0))],
                      episodes=[EpisodeSpec((1.0, 1.0), 0.0, (9.0, 9.0))])


# acceptance results, filled in by test_acceptance and printed at the end
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])

"""Anticipatory force and torque model for simulated humans.

Each human is a disc on the floor.  Its total force is the adjust force that
relaxes the velocity towards ``v_des * e_hat``, plus a time-to-collision based
social force and penalty contact for every other human, plus contact with the
scene geometry, plus a random fluctuation.  The total torque relaxes the
orientation towards the walking direction, with contact and fluctuation terms.

The interaction energy constant ``k_soc`` is expressed per unit mass, as in
the universal power-law model it comes from: ``social_force`` returns the
negative energy gradient and the total force scales it by the human's mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .contact import ContactParams, human_contact, obstacle_contact
from .geometry import Vec2

TWO_PI = 2.0 * math.pi
BAND_FILL = 0.9
DISCRIMINANT_EPS = 1e-12


@dataclass(slots=True)
class Human:
    id: int
    x: Vec2
    v: Vec2
    e_hat: Vec2
    v_des: float
    psi: float
    psi0: float
    omega: float
    omega0: float
    r: float
    m: float
    destination: Vec2
    origin: Vec2

    @property
    def inertia(self) -> float:
        return self.m * self.r * self.r


@dataclass(frozen=True)
class SimParams:
    tau_adj: float = 0.5
    tau_soc: float = 3.0
    tau_rot: float = 0.2
    k_soc: float = 1.5
    sigma_zeta: float = 0.0
    sigma_eta: float = 0.0
    dt: float = 0.1
    substeps: int = 4
    social_margin: float = 0.2
    social_accel_max: float = 20.0
    v_max: float = 2.0
    omega_max: float = TWO_PI
    goal_tolerance: float = 0.3
    contact: ContactParams = field(default_factory=ContactParams)

    def __post_init__(self) -> None:
        for name in ("tau_adj", "tau_soc", "tau_rot", "dt", "v_max", "omega_max", "goal_tolerance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")
        if self.k_soc < 0 or self.sigma_zeta < 0 or self.sigma_eta < 0:
            raise ValueError("k_soc and noise scales must be non-negative")


@dataclass(frozen=True)
class TtcResult:
    tag: Literal["collides", "diverging", "never", "overlapping"]
    tau: float | None = None


def wrap_angle(a: float) -> float:
    """Wrap into ``[0, 2*pi)``."""
    a = a % TWO_PI
    return 0.0 if a >= TWO_PI else a


def adjust_force(h: Human, params: SimParams) -> Vec2:
    k = h.m / params.tau_adj
    return (k * (h.v_des * h.e_hat[0] - h.v[0]), k * (h.v_des * h.e_hat[1] - h.v[1]))


def time_to_collision(x_rel: Vec2, v_rel: Vec2, r_sum: float) -> TtcResult:
    """Earliest positive root of ``|x_rel + t v_rel| = r_sum``."""
    xx, xy = x_rel
    vx, vy = v_rel
    c = xx * xx + xy * xy - r_sum * r_sum
    if c <= 0.0:
        return TtcResult("overlapping")
    a = vx * vx + vy * vy
    if a == 0.0:
        return TtcResult("never")
    b = -(xx * vx + xy * vy)
    disc = b * b - a * c
    if disc < 0.0:
        return TtcResult("never")
    if b <= 0.0:
        # both roots are non-positive when c > 0
        return TtcResult("diverging")
    # c / (b + sqrt(disc)) equals (b - sqrt(disc)) / a without the cancellation
    tau = c / (b + math.sqrt(disc))
    if tau <= 0.0:
        return TtcResult("diverging")
    return TtcResult("collides", tau)


def interaction_energy(tau: float, params: SimParams) -> float:
    return params.k_soc / (tau * tau) * math.exp(-tau / params.tau_soc)


def _social(dx, dy, dvx, dvy, rsum, k_soc, tau_soc):
    """Negative energy gradient for relative position/velocity; zero unless colliding."""
    c = dx * dx + dy * dy - rsum * rsum
    if c <= 0.0:
        return 0.0, 0.0
    b = -(dx * dvx + dy * dvy)
    if b <= 0.0:
        return 0.0, 0.0
    a = dvx * dvx + dvy * dvy
    disc = b * b - a * c
    if disc < DISCRIMINANT_EPS:
        return 0.0, 0.0
    sd = math.sqrt(disc)
    tau = c / (b + sd)
    # -dE/dtau
    s = k_soc * math.exp(-tau / tau_soc) / (tau * tau) * (2.0 / tau + 1.0 / tau_soc)
    s /= a
    return (
        s * (-dvx + (b * dvx + a * dx) / sd),
        s * (-dvy + (b * dvy + a * dy) / sd),
    )


def social_force(hi: Human, hj: Human, params: SimParams) -> Vec2:
    """``-grad E(tau)`` with respect to the relative position ``hi.x - hj.x``."""
    return _social(
        hi.x[0] - hj.x[0], hi.x[1] - hj.x[1],
        hi.v[0] - hj.v[0], hi.v[1] - hj.v[1],
        hi.r + hj.r, params.k_soc, params.tau_soc,
    )


def fluctuation_force(rng: np.random.Generator, sigma: float) -> Vec2:
    magnitude = sigma * rng.standard_normal()
    phi = rng.uniform(0.0, TWO_PI)
    return (magnitude * math.cos(phi), magnitude * math.sin(phi))


def fluctuation_torque(rng: np.random.Generator, sigma: float) -> float:
    return sigma * rng.standard_normal()


def orientation_factor(psi0: float, psi: float) -> float:
    """``((psi0 - psi) mod 2pi) / pi - 1``, always in ``[-1, 1)``."""
    return wrap_angle(psi0 - psi) / math.pi - 1.0


def adjust_torque(h: Human, params: SimParams) -> float:
    return h.inertia / params.tau_rot * (orientation_factor(h.psi0, h.psi) * h.omega0 - h.omega)


def desired_orientation(h: Human) -> float:
    """Heading of the current velocity; the previous value when nearly at rest."""
    vx, vy = h.v
    if math.hypot(vx, vy) > 1e-6:
        return wrap_angle(math.atan2(vy, vx))
    return h.psi0


def _partner_order(humans) -> list[int]:
    """Indices sorted by position. Sums run in this order, which does not
    depend on how humans are labelled."""
    positions = [h.x for h in humans]
    return sorted(range(len(positions)), key=positions.__getitem__)


def _interaction_sums(i: int, humans, params: SimParams) -> tuple[float, float, float]:
    """Sum social (mass-scaled) and contact terms on human ``i`` over all
    others, in position order."""
    hi = humans[i]
    xi, yi = hi.x
    vxi, vyi = hi.v
    ri = hi.r
    k_soc, tau_soc = params.k_soc, params.tau_soc
    fx = fy = tq = 0.0
    sx = sy = 0.0
    for j in _partner_order(humans):
        if j == i:
            continue
        hj = humans[j]
        dx = xi - hj.x[0]
        dy = yi - hj.x[1]
        rsum = ri + hj.r
        d2 = dx * dx + dy * dy
        if d2 < rsum * rsum:
            cfx, cfy, ctq = human_contact(hi, hj, params.contact)
            fx += cfx
            fy += cfy
            tq += ctq
        else:
            sfx, sfy = _social(dx, dy, vxi - hj.v[0], vyi - hj.v[1],
                               _social_radius(rsum, d2, params.social_margin), k_soc, tau_soc)
            sx += sfx
            sy += sfy
    sx, sy = _cap(sx, sy, params.social_accel_max)
    return fx + hi.m * sx, fy + hi.m * sy, tq


def _social_radius(rsum: float, d2: float, margin: float) -> float:
    """Contact radius inflated by ``margin``. Closer than that, the inflation
    covers most of the remaining gap so that a pair about to touch still
    predicts a collision instead of a near miss."""
    if margin <= 0.0:
        return rsum
    gap = math.sqrt(d2) - rsum
    return rsum + min(margin, BAND_FILL * gap)


def crowd_forces(humans, scene, params: SimParams, noise):
    """Total ``(fx, fy, torque)`` for every human plus the overlapping index pairs.

    ``noise[i]`` is the pre-drawn ``(zeta_x, zeta_y, eta)`` of human ``i``.
    Each pair is visited once and the social term is applied with opposite
    signs. Pairs are visited in position order, so every human accumulates
    its partners in that order: the result is bit-identical to
    ``human_terms`` with the same noise and invariant to relabelling.
    """
    n = len(humans)
    positions = [h.x for h in humans]
    xs, ys = zip(*positions) if n else ((), ())
    vxs, vys = zip(*[h.v for h in humans]) if n else ((), ())
    rs = [h.r for h in humans]
    k_soc, tau_soc = params.k_soc, params.tau_soc
    margin = params.social_margin
    contact = params.contact
    sx = [0.0] * n
    sy = [0.0] * n
    cx = [0.0] * n
    cy = [0.0] * n
    ct = [0.0] * n
    order = sorted(range(n), key=positions.__getitem__)
    overlaps = []
    for ia in range(n):
        a = order[ia]
        xa, ya, vxa, vya, ra = xs[a], ys[a], vxs[a], vys[a], rs[a]
        for ib in range(ia + 1, n):
            b = order[ib]
            dx = xa - xs[b]
            dy = ya - ys[b]
            rsum = ra + rs[b]
            d2 = dx * dx + dy * dy
            if d2 < rsum * rsum:
                overlaps.append((a, b) if a < b else (b, a))
                fx, fy, tq = human_contact(humans[a], humans[b], contact)
                cx[a] += fx
                cy[a] += fy
                ct[a] += tq
                fx, fy, tq = human_contact(humans[b], humans[a], contact)
                cx[b] += fx
                cy[b] += fy
                ct[b] += tq
                continue
            dvx = vxa - vxs[b]
            dvy = vya - vys[b]
            if dx * dvx + dy * dvy >= 0.0:
                continue
            fx, fy = _social(dx, dy, dvx, dvy, _social_radius(rsum, d2, margin), k_soc, tau_soc)
            sx[a] += fx
            sy[a] += fy
            sx[b] -= fx
            sy[b] -= fy
    amax = params.social_accel_max
    tau_adj, tau_rot = params.tau_adj, params.tau_rot
    gx0, gy0, gres, clearance = scene.clearance_table
    n_rows, n_cols = len(clearance), len(clearance[0])
    out = []
    append = out.append
    pi = math.pi
    for h, px, py, r, vx, vy, six, siy, fcx, fcy, fct, (zx, zy, eta) in zip(
        humans, xs, ys, rs, vxs, vys, sx, sy, cx, cy, ct, noise
    ):
        # adjust_force, adjust_torque, _cap and Scene.clear_of_geometry written
        # out inline; the floating-point operations are the same
        m = h.m
        k = m / tau_adj
        v_des = h.v_des
        ex, ey = h.e_hat
        row = int((py - gy0) // gres)
        col = int((px - gx0) // gres)
        if 0 <= row < n_rows and 0 <= col < n_cols and clearance[row][col] >= r:
            ox = oy = otq = 0.0
        else:
            ox, oy, otq = obstacle_contact(h, scene, contact)
        if six * six + siy * siy > amax * amax:
            sm = math.hypot(six, siy)
            six, siy = six * (amax / sm), siy * (amax / sm)
        dpsi = (h.psi0 - h.psi) % TWO_PI
        if dpsi >= TWO_PI:
            dpsi = 0.0
        append((
            k * (v_des * ex - vx) + (fcx + m * six) + ox + zx,
            k * (v_des * ey - vy) + (fcy + m * siy) + oy + zy,
            m * r * r / tau_rot * ((dpsi / pi - 1.0) * h.omega0 - h.omega) + fct + otq + eta,
        ))
    return out, overlaps


def _cap(sx: float, sy: float, amax: float) -> tuple[float, float]:
    if sx * sx + sy * sy > amax * amax:
        sm = math.hypot(sx, sy)
        return sx * (amax / sm), sy * (amax / sm)
    return sx, sy


def draw_noise(rng, params: SimParams) -> tuple[float, float, float]:
    """One fluctuation force draw followed by one fluctuation torque draw."""
    zx, zy = fluctuation_force(rng, params.sigma_zeta)
    return zx, zy, fluctuation_torque(rng, params.sigma_eta)


def human_terms(i: int, humans, scene, params: SimParams, rng) -> tuple[float, float, float]:
    """Total force and torque on human ``i``: ``(fx, fy, torque)``.

    Draws the fluctuation force, then the fluctuation torque, from ``rng``.
    """
    return _human_terms(i, humans, scene, params, draw_noise(rng, params))


def _human_terms(i, humans, scene, params, noise):
    h = humans[i]
    ax, ay = adjust_force(h, params)
    sx, sy, stq = _interaction_sums(i, humans, params)
    ox, oy, otq = obstacle_contact(h, scene, params.contact)
    zx, zy, eta = noise
    return (
        ax + sx + ox + zx,
        ay + sy + oy + zy,
        adjust_torque(h, params) + stq + otq + eta,
    )


def total_force(i: int, world) -> Vec2:
    """Total force on human ``i`` of ``world`` (any object with ``humans``,
    ``scene``, ``params`` and per-human ``rngs``)."""
    h = world.humans[i]
    params = world.params
    ax, ay = adjust_force(h, params)
    sx, sy, _ = _interaction_sums(i, world.humans, params)
    ox, oy, _ = obstacle_contact(h, world.scene, params.contact)
    zx, zy = fluctuation_force(world.rngs[i], params.sigma_zeta)
    return (ax + sx + ox + zx, ay + sy + oy + zy)


def total_torque(i: int, world) -> float:
    h = world.humans[i]
    params = world.params
    _, _, stq = _interaction_sums(i, world.humans, params)
    _, _, otq = obstacle_contact(h, world.scene, params.contact)
    eta = fluctuation_torque(world.rngs[i], params.sigma_eta)
    return adjust_torque(h, params) + stq + otq + eta

"""Penalty (spring-damper) contact between humans and against scene geometry.

A contact is active only while discs overlap, so the contact terms vanish for
any configuration with positive skin-to-skin distance.  Tangential friction is
viscous in the sliding speed and capped by ``mu`` times the normal force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (
    Scene,
    Vec2,
    closest_point_on_polygon,
    closest_point_on_segment,
    point_in_polygon,
)

COINCIDENT_EPS = 1e-9


@dataclass(frozen=True)
class ContactParams:
    k_normal: float = 5000.0
    c_damp: float = 100.0
    mu: float = 0.0

    def __post_init__(self) -> None:
        if not self.k_normal > 0:
            raise ValueError("k_normal must be positive")
        if self.c_damp < 0 or self.mu < 0:
            raise ValueError("c_damp and mu must be non-negative")


def pair_normal(id_i: int, id_j: int) -> Vec2:
    """Deterministic unit normal for coincident centers, antisymmetric in the pair."""
    a, b = (id_i, id_j) if id_i < id_j else (id_j, id_i)
    h = ((a * 73856093) ^ (b * 19349663)) & 0xFFFF
    theta = 2.0 * math.pi * h / 65536.0
    sign = 1.0 if id_i < id_j else -1.0
    return (sign * math.cos(theta), sign * math.sin(theta))


def _penalty(nx, ny, depth, vx, vy, params: ContactParams, radius: float):
    """Force and torque on a disc pushed along ``n`` by ``depth``.

    ``(vx, vy)`` is the disc's velocity relative to whatever it touches.
    Returns ``(fx, fy, torque, tx, ty)``; ``(tx, ty)`` is the tangential part.
    """
    vn = vx * nx + vy * ny
    fn = params.k_normal * depth
    if vn < 0.0:
        fn -= params.c_damp * vn
    fx, fy = fn * nx, fn * ny
    tx = ty = torque = 0.0
    if params.mu > 0.0:
        utx, uty = vx - vn * nx, vy - vn * ny
        speed = math.hypot(utx, uty)
        if speed > 1e-12:
            mag = min(params.c_damp * speed, params.mu * fn)
            tx, ty = -mag * utx / speed, -mag * uty / speed
            # lever arm from the center to the contact point is -radius * n
            torque = cross(-radius * nx, -radius * ny, tx, ty)
            fx += tx
            fy += ty
    return fx, fy, torque, tx, ty


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def human_contact(hi, hj, params: ContactParams) -> tuple[float, float, float]:
    """``(fx, fy, torque)`` exerted on ``hi`` by ``hj``."""
    dx = hi.x[0] - hj.x[0]
    dy = hi.x[1] - hj.x[1]
    rsum = hi.r + hj.r
    d2 = dx * dx + dy * dy
    if d2 >= rsum * rsum:
        return 0.0, 0.0, 0.0
    d = math.sqrt(d2)
    if d < COINCIDENT_EPS:
        nx, ny = pair_normal(hi.id, hj.id)
    else:
        nx, ny = dx / d, dy / d
    fx, fy, torque, _, _ = _penalty(
        nx, ny, rsum - d, hi.v[0] - hj.v[0], hi.v[1] - hj.v[1], params, hi.r
    )
    return fx, fy, torque


def contact_force_human_human(hi, hj, params: ContactParams) -> Vec2:
    fx, fy, _ = human_contact(hi, hj, params)
    return (fx, fy)


def contact_torque_human_human(hi, hj, params: ContactParams) -> float:
    return human_contact(hi, hj, params)[2]


def obstacle_contacts(h, scene: Scene, params: ContactParams):
    """Yield ``(fx, fy, torque, contact_point, tangential)`` for each active
    contact between human ``h`` and the floor boundary or an obstacle."""
    px, py = h.x
    r = h.r
    if scene.clear_of_geometry(px, py, r):
        return
    vx, vy = h.v

    if point_in_polygon(px, py, scene.floor):
        for e in scene.floor_edges:
            cx, cy, d = closest_point_on_segment(px, py, *e)
            if d < r and d > COINCIDENT_EPS:
                nx, ny = (px - cx) / d, (py - cy) / d
                fx, fy, tq, tx, ty = _penalty(nx, ny, r - d, vx, vy, params, r)
                yield fx, fy, tq, (px - r * nx, py - r * ny), (tx, ty)
    else:
        cx, cy, d = closest_point_on_polygon(px, py, scene.floor_edges)
        if d > COINCIDENT_EPS:
            nx, ny = (cx - px) / d, (cy - py) / d
            fx, fy, tq, tx, ty = _penalty(nx, ny, r + d, vx, vy, params, r)
            yield fx, fy, tq, (px - r * nx, py - r * ny), (tx, ty)

    for box, poly, edges in zip(scene.obstacle_boxes, scene.obstacles, scene.obstacle_edges):
        if px < box[0] - r or px > box[2] + r or py < box[1] - r or py > box[3] + r:
            continue
        cx, cy, d = closest_point_on_polygon(px, py, edges)
        if d <= COINCIDENT_EPS:
            continue
        if point_in_polygon(px, py, poly):
            nx, ny = (cx - px) / d, (cy - py) / d
            depth = r + d
        elif d < r:
            nx, ny = (px - cx) / d, (py - cy) / d
            depth = r - d
        else:
            continue
        fx, fy, tq, tx, ty = _penalty(nx, ny, depth, vx, vy, params, r)
        yield fx, fy, tq, (px - r * nx, py - r * ny), (tx, ty)


def obstacle_contact(h, scene: Scene, params: ContactParams) -> tuple[float, float, float]:
    """Summed ``(fx, fy, torque)`` on ``h`` from every penetrated obstacle and wall."""
    if scene.clear_of_geometry(h.x[0], h.x[1], h.r):
        return 0.0, 0.0, 0.0
    fx = fy = tq = 0.0
    for cfx, cfy, ctq, _, _ in obstacle_contacts(h, scene, params):
        fx += cfx
        fy += cfy
        tq += ctq
    return fx, fy, tq


def contact_force_human_obstacle(h, scene: Scene, params: ContactParams) -> Vec2:
    fx, fy, _ = obstacle_contact(h, scene, params)
    return (fx, fy)


def contact_torque(h, contact_point: Vec2, tangential_force: Vec2) -> float:
    """z-component of ``(contact_point - h.x) x tangential_force``."""
    return cross(
        contact_point[0] - h.x[0], contact_point[1] - h.x[1],
        tangential_force[0], tangential_force[1],
    )

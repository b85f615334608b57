"""Planar predicates used by the crossing counter and the ray caster.

Scalar functions here are the reference semantics. ``orient_sign`` and
``cross_matrix`` are numpy versions of the same arithmetic (same operation
order, so results agree bit for bit with the scalar path).
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

TWO_PI = 2.0 * math.pi

# |area| <= ORIENT_REL * scale**2 is reported as collinear.
ORIENT_REL = 1e-12
# Components of a unit direction below this are flushed to zero, so that
# axis-aligned rays stay exactly axis-aligned after reflections.
DIRECTION_SNAP = 1e-15


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


def normalize_angle(theta: float) -> float:
    """Map ``theta`` into ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod of a tiny negative number can round back up to 2*pi
    if t >= TWO_PI:
        t = 0.0
    return t


def unit_vector(theta: float) -> tuple[float, float]:
    dx, dy = math.cos(theta), math.sin(theta)
    if abs(dx) < DIRECTION_SNAP:
        dx, dy = 0.0, math.copysign(1.0, dy)
    elif abs(dy) < DIRECTION_SNAP:
        dx, dy = math.copysign(1.0, dx), 0.0
    return dx, dy


def orient(p, q, r) -> int:
    """Sign of the signed area of triangle ``(p, q, r)``.

    Returns +1 for a counter-clockwise turn, -1 for clockwise and 0 when the
    area is below the relative collinearity tolerance.
    """
    ux, uy = q[0] - p[0], q[1] - p[1]
    wx, wy = r[0] - p[0], r[1] - p[1]
    area = ux * wy - uy * wx
    scale = max(abs(ux), abs(uy), abs(wx), abs(wy))
    if abs(area) <= ORIENT_REL * scale * scale:
        return 0
    return 1 if area > 0 else -1


def segments_cross(s1, s2) -> bool:
    """True iff the segments meet in exactly one point interior to both.

    Shared endpoints, an endpoint touching the other segment, and collinear
    overlaps are all non-crossing.
    """
    a1, b1 = s1
    a2, b2 = s2
    o1 = orient(a1, b1, a2)
    o2 = orient(a1, b1, b2)
    if o1 * o2 != -1:
        return False
    o3 = orient(a2, b2, a1)
    o4 = orient(a2, b2, b1)
    return o3 * o4 == -1


def halfline_segment_intersection(
    origin, theta: float, s, tau_fwd: float = 0.0
) -> Optional[Point]:
    """First point of the open half-line from ``origin`` at angle ``theta`` on ``s``.

    Only hits with ray parameter ``t > tau_fwd`` count, so the origin itself
    (and anything behind it) never intersects. Parallel segments never hit.
    """
    dx, dy = unit_vector(theta)
    hit = _ray_hit(origin[0], origin[1], dx, dy, s[0], s[1])
    if hit is None:
        return None
    t, u = hit
    if t <= tau_fwd or u < 0.0 or u > 1.0:
        return None
    return Point(origin[0] + t * dx, origin[1] + t * dy)


def _ray_hit(ox, oy, dx, dy, a, b):
    ex, ey = b[0] - a[0], b[1] - a[1]
    denom = dx * ey - dy * ex
    if abs(denom) <= ORIENT_REL * max(abs(ex), abs(ey)):
        return None
    rx, ry = a[0] - ox, a[1] - oy
    t = (rx * ey - ry * ex) / denom
    u = (rx * dy - ry * dx) / denom
    return t, u


def reflect_angle(incoming: float, edge_angle: float) -> float:
    """Billiard reflection of direction ``incoming`` off a mirror at ``edge_angle``."""
    return normalize_angle(2.0 * edge_angle - incoming)


def segment_angle(a, b) -> float:
    return normalize_angle(math.atan2(b[1] - a[1], b[0] - a[0]))


# -- vectorized forms -------------------------------------------------------


def orient_sign(ax, ay, bx, by, cx, cy) -> np.ndarray:
    """Elementwise ``orient`` over broadcastable coordinate arrays."""
    ux = bx - ax
    uy = by - ay
    wx = cx - ax
    wy = cy - ay
    area = ux * wy - uy * wx
    scale = np.maximum(np.maximum(np.abs(ux), np.abs(uy)), np.maximum(np.abs(wx), np.abs(wy)))
    sign = np.sign(area).astype(np.int8)
    sign[np.abs(area) <= ORIENT_REL * scale * scale] = 0
    return sign


def cross_matrix(seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Boolean matrix ``M[i, j] = segments_cross(seg_a[i], seg_b[j])``.

    Each argument is an ``(n, 4)`` array of ``x1, y1, x2, y2`` rows.
    """
    a1x, a1y, b1x, b1y = (seg_a[:, k, None] for k in range(4))
    a2x, a2y, b2x, b2y = (seg_b[None, :, k] for k in range(4))
    o1 = orient_sign(a1x, a1y, b1x, b1y, a2x, a2y)
    o2 = orient_sign(a1x, a1y, b1x, b1y, b2x, b2y)
    o3 = orient_sign(a2x, a2y, b2x, b2y, a1x, a1y)
    o4 = orient_sign(a2x, a2y, b2x, b2y, b1x, b1y)
    return ((o1 * o2) == -1) & ((o3 * o4) == -1)

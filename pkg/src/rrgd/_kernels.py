"""Compiled inner loop of the ray caster.

Arithmetic mirrors ``geometry.orient``/``segments_cross`` and
``raycast.opacity`` operation for operation; the pure-Python versions are the
reference semantics and the tests hold the two together.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

ORIENT_REL = 1e-12
DIRECTION_SNAP = 1e-15
ENDPOINT_TOL = 1e-9
TWO_PI = 2.0 * math.pi

OK = 0
DEGENERATE = 1


@njit(cache=True)
def _orient(px, py, qx, qy, rx, ry):
    ux = qx - px
    uy = qy - py
    wx = rx - px
    wy = ry - py
    area = ux * wy - uy * wx
    scale = max(abs(ux), abs(uy), abs(wx), abs(wy))
    if abs(area) <= ORIENT_REL * scale * scale:
        return 0
    return 1 if area > 0 else -1


@njit(cache=True)
def _cross(a1x, a1y, b1x, b1y, a2x, a2y, b2x, b2y):
    o1 = _orient(a1x, a1y, b1x, b1y, a2x, a2y)
    o2 = _orient(a1x, a1y, b1x, b1y, b2x, b2y)
    if o1 * o2 != -1:
        return False
    o3 = _orient(a2x, a2y, b2x, b2y, a1x, a1y)
    o4 = _orient(a2x, a2y, b2x, b2y, b1x, b1y)
    return o3 * o4 == -1


@njit(cache=True)
def _normalize(theta):
    t = np.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@njit(cache=True)
def _unit(theta):
    dx = math.cos(theta)
    dy = math.sin(theta)
    if abs(dx) < DIRECTION_SNAP:
        return 0.0, math.copysign(1.0, dy)
    if abs(dy) < DIRECTION_SNAP:
        return math.copysign(1.0, dx), 0.0
    return dx, dy


@njit(cache=True)
def _hits(ox, oy, dx, dy, ax, ay, ex, ey, ptol, tau_fwd, ts, ids, degen):
    """Fill ``ts/ids/degen`` with forward hits sorted by (t, id); return their count."""
    M = ax.shape[0]
    tmp_t = np.empty(M)
    tmp_u = np.empty(M)
    tmp_i = np.empty(M, dtype=np.int64)
    k = 0
    for j in range(M):
        denom = dx * ey[j] - dy * ex[j]
        if not abs(denom) > ptol[j]:
            continue
        rx = ax[j] - ox
        ry = ay[j] - oy
        t = (rx * ey[j] - ry * ex[j]) / denom
        u = (rx * dy - ry * dx) / denom
        if t > tau_fwd and u >= -ENDPOINT_TOL and u <= 1.0 + ENDPOINT_TOL:
            tmp_t[k] = t
            tmp_u[k] = u
            tmp_i[k] = j
            k += 1
    order = np.argsort(tmp_t[:k], kind="mergesort")
    for r in range(k):
        s = order[r]
        ts[r] = tmp_t[s]
        ids[r] = tmp_i[s]
        degen[r] = tmp_u[s] < ENDPOINT_TOL or tmp_u[s] > 1.0 - ENDPOINT_TOL
    return k


@njit(cache=True)
def _opacity(v, e, qx, qy, nbrs, edge_u, edge_w, pos):
    a = edge_u[e]
    b = edge_w[e]
    total = 0
    count = 0
    for nb in nbrs:
        if v == a or v == b or nb == a or nb == b:
            continue
        if _cross(qx, qy, pos[nb, 0], pos[nb, 1], pos[a, 0], pos[a, 1], pos[b, 0], pos[b, 1]):
            total -= 1
        else:
            total += 1
        count += 1
    if count == 0:
        return 1.0
    return total / count


@njit(cache=True)
def cast(
    v, theta, n_r, nbrs, pos, edge_u, edge_w,
    ax, ay, ex, ey, ptol, angles, real_count,
    tau_fwd, eps_ray, xmin, ymin, xmax, ymax,
    randomized, chis, out,
):
    """Trace one ray into ``out`` (``n_r + 1`` rows); return (status, final angle)."""
    M = ax.shape[0]
    ts = np.empty(M)
    ids = np.empty(M, dtype=np.int64)
    degen = np.empty(M, dtype=np.bool_)
    px = pos[v, 0]
    py = pos[v, 1]
    dx, dy = _unit(theta)
    out[0, 0] = px
    out[0, 1] = py
    count = 0
    qi = 0
    draws = 0
    for i in range(n_r):
        if qi >= count:
            count = _hits(px, py, dx, dy, ax, ay, ex, ey, ptol, tau_fwd, ts, ids, degen)
            qi = 0
            if count == 0:
                return DEGENERATE, theta
        t = ts[qi]
        eid = ids[qi]
        bad = degen[qi]
        qi += 1
        if bad or (qi < count and ts[qi] - t <= tau_fwd):
            return DEGENERATE, theta
        hx = min(max(px + t * dx, xmin), xmax)
        hy = min(max(py + t * dy, ymin), ymax)
        out[i + 1, 0] = hx
        out[i + 1, 1] = hy
        if eid >= real_count:
            reflect = True
        else:
            op = _opacity(v, eid, hx - eps_ray * dx, hy - eps_ray * dy, nbrs, edge_u, edge_w, pos)
            if randomized:
                reflect = chis[draws] < op
                draws += 1
            else:
                reflect = op >= 0.0
        if reflect:
            px = hx
            py = hy
            theta = _normalize(2.0 * angles[eid] - theta)
            dx, dy = _unit(theta)
            count = 0
            qi = 0
    return OK, theta

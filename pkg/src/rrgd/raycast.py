"""Ray construction: travel, hit an edge, reflect or cross, repeat ``n_r`` times."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .config import EngineConfig, OpacityMode
from .geometry import (
    ORIENT_REL,
    Point,
    normalize_angle,
    segment_angle,
    segments_cross,
)
from .model import Drawing


@dataclass
class Ray:
    points: list[Point]
    dir: float

    @property
    def candidate(self) -> Point:
        (x1, y1), (x2, y2) = self.points[-1], self.points[-2]
        return Point((x1 + x2) / 2.0, (y1 + y2) / 2.0)


def edge_weight(v: int, neighbor: int, eval_pos, e: int, drawing: Drawing) -> int:
    """Weight of the incident edge ``(v, neighbor)`` with ``v`` placed at ``eval_pos``.

    0 when that edge shares a graph vertex with ``e``, -1 when it crosses
    ``e``, +1 otherwise.
    """
    a, b = drawing.graph.edges[e]
    if v in (a, b) or neighbor in (a, b):
        return 0
    seg_e = (drawing.position(a), drawing.position(b))
    return -1 if segments_cross((eval_pos, drawing.position(neighbor)), seg_e) else 1


def opacity(v: int, e: int, eval_pos, drawing: Drawing) -> float:
    """Mean of the nonzero incident-edge weights, or 1 when there are none."""
    total = 0
    count = 0
    for nb in drawing.graph.neighbors(v):
        w = edge_weight(v, nb, eval_pos, e, drawing)
        if w:
            total += w
            count += 1
    return total / count if count else 1.0


def decide_reflection(op: float, mode: OpacityMode, rng: Optional[np.random.Generator] = None) -> bool:
    """True to reflect, False to cross."""
    if not mode.randomized:
        return op >= 0.0
    if rng is None:
        raise ValueError("randomized reflections need an rng")
    eps = mode.epsilon_rand
    chi = rng.uniform(-1.0 - eps, 1.0 + eps)
    return chi < op


class Scene:
    """Segments a ray can hit: the real edges followed by the four box sides.

    Built once per drawing state and shared by every ray of a move.
    """

    def __init__(self, drawing: Drawing, cfg: EngineConfig):
        seg = drawing.segments()
        sides = np.array([[a.x, a.y, b.x, b.y] for a, b in drawing.box.sides()])
        allseg = np.vstack([seg.reshape(-1, 4), sides])
        self.drawing = drawing
        self.real_count = len(seg)
        self.ax, self.ay, self.bx, self.by = (np.ascontiguousarray(allseg[:, k]) for k in range(4))
        self.ex = self.bx - self.ax
        self.ey = self.by - self.ay
        self.parallel_tol = ORIENT_REL * np.maximum(np.abs(self.ex), np.abs(self.ey))
        self.angles = np.array([segment_angle((r[0], r[1]), (r[2], r[3])) for r in allseg.tolist()])
        ea = drawing.graph.edge_array()
        self.edge_u = np.ascontiguousarray(ea[:, 0], dtype=np.int64)
        self.edge_w = np.ascontiguousarray(ea[:, 1], dtype=np.int64)
        self.positions = np.ascontiguousarray(drawing.positions)
        self._nbrs: dict[int, np.ndarray] = {}
        diag = drawing.box.diagonal
        self.tau_fwd = cfg.tau_fwd_rel * diag
        self.eps_ray = cfg.eps_ray_rel * diag
        box = drawing.box
        self.bounds = (box.xmin, box.ymin, box.xmax, box.ymax)

    def neighbors(self, v: int) -> np.ndarray:
        nb = self._nbrs.get(v)
        if nb is None:
            nb = np.array(self.drawing.graph.neighbors(v), dtype=np.int64)
            self._nbrs[v] = nb
        return nb


_NO_DRAWS = np.zeros(0)


def _cast_once(v, theta, scene: Scene, cfg: EngineConfig, rng) -> Optional[Ray]:
    if cfg.mode.randomized:
        if rng is None:
            raise ValueError("randomized reflections need an rng")
        eps = cfg.mode.epsilon_rand
        chis = rng.uniform(-1.0 - eps, 1.0 + eps, size=cfg.ray_size)
    else:
        chis = _NO_DRAWS
    out = np.empty((cfg.ray_size + 1, 2))
    status, final_theta = _kernels.cast(
        v, theta, cfg.ray_size, scene.neighbors(v), scene.positions, scene.edge_u, scene.edge_w,
        scene.ax, scene.ay, scene.ex, scene.ey, scene.parallel_tol, scene.angles, scene.real_count,
        scene.tau_fwd, scene.eps_ray, *scene.bounds,
        cfg.mode.randomized, chis, out,
    )
    if status != _kernels.OK:
        return None
    return Ray([Point(x, y) for x, y in out.tolist()], final_theta)


def trace_ray(
    v: int,
    theta: float,
    drawing: Drawing,
    cfg: EngineConfig,
    rng: Optional[np.random.Generator] = None,
    scene: Optional[Scene] = None,
) -> Optional[Ray]:
    """Build the full polyline of one ray, or None if every retry was degenerate.

    A degenerate hit (through a vertex or a crossing point) restarts the cast
    with the angle nudged by ``cfg.tau_ang``, at most ``cfg.degenerate_retries``
    times.
    """
    if scene is None:
        scene = Scene(drawing, cfg)
    for k in range(cfg.degenerate_retries + 1):
        ray = _cast_once(v, normalize_angle(theta + k * cfg.tau_ang), scene, cfg, rng)
        if ray is not None:
            return ray
    return None


def cast_ray(
    v: int,
    theta: float,
    drawing: Drawing,
    cfg: EngineConfig,
    rng: Optional[np.random.Generator] = None,
    scene: Optional[Scene] = None,
) -> Optional[Point]:
    """Candidate position from one ray: midpoint of the polyline's last segment."""
    ray = trace_ray(v, theta, drawing, cfg, rng, scene)
    return None if ray is None else ray.candidate

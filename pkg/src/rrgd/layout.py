"""Initial drawings: random, circle, or a short spring/repulsion pass."""

from __future__ import annotations

import math

import numpy as np

from .model import BoundingBox, Drawing, Graph

DEFAULT_WINDOW = (1000.0, 1000.0)


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def init_random(graph: Graph, width: float = DEFAULT_WINDOW[0], height: float = DEFAULT_WINDOW[1], rng=None) -> Drawing:
    """Uniform positions in ``[0, width] x [0, height]``."""
    pts = _rng(rng).uniform((0.0, 0.0), (width, height), size=(graph.vertex_count, 2))
    return Drawing(graph, pts, BoundingBox.around(pts))


def init_circle(graph: Graph, radius: float = DEFAULT_WINDOW[0] / 2) -> Drawing:
    """Vertex ``i`` at angle ``2*pi*i/n`` on a circle centred at ``(radius, radius)``."""
    n = graph.vertex_count
    ang = 2.0 * math.pi * np.arange(n) / max(n, 1)
    pts = np.column_stack([radius + radius * np.cos(ang), radius + radius * np.sin(ang)])
    return Drawing(graph, pts, BoundingBox.around(pts))


def init_force(
    graph: Graph,
    iterations: int = 30,
    width: float = DEFAULT_WINDOW[0],
    height: float = DEFAULT_WINDOW[1],
    rng=None,
    step: float = 0.05,
) -> Drawing:
    """``init_random`` followed by a few explicit Euler steps of springs plus repulsion.

    Springs pull edges toward the rest length ``L0 = sqrt(width*height/n)``;
    every vertex pair repels with ``L0**2 / d**2``. Positions are clamped to
    the window after every step.
    """
    start = init_random(graph, width, height, rng)
    n = graph.vertex_count
    pts = start.positions.copy()
    if iterations <= 0 or n == 0:
        return start
    rest = math.sqrt(width * height / n)
    ea = graph.edge_array()
    for _ in range(iterations):
        force = np.zeros_like(pts)
        if len(ea):
            delta = pts[ea[:, 1]] - pts[ea[:, 0]]
            length = np.hypot(delta[:, 0], delta[:, 1])
            unit = delta / np.maximum(length, 1e-12)[:, None]
            pull = (length - rest)[:, None] * unit
            np.add.at(force, ea[:, 0], pull)
            np.add.at(force, ea[:, 1], -pull)
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        dist = np.maximum(dist, 1e-9)
        force += ((rest * rest / dist**3)[..., None] * diff).sum(axis=1)
        pts = pts + step * force
        np.clip(pts[:, 0], 0.0, width, out=pts[:, 0])
        np.clip(pts[:, 1], 0.0, height, out=pts[:, 1])
    return Drawing(graph, pts, BoundingBox.around(pts))


INITIALIZERS = ("random", "circle", "force")


def initial_drawing(graph: Graph, kind: str, rng=None, width: float = DEFAULT_WINDOW[0], height: float = DEFAULT_WINDOW[1]) -> Drawing:
    if kind == "random":
        return init_random(graph, width, height, rng)
    if kind == "circle":
        return init_circle(graph, min(width, height) / 2)
    if kind == "force":
        return init_force(graph, width=width, height=height, rng=rng)
    raise ValueError(f"unknown initializer {kind!r}; expected one of {INITIALIZERS}")

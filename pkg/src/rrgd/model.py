"""Graph and drawing data model, crossing and energy metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .geometry import Point, cross_matrix


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..vertex_count-1``.

    Edges are stored as ``(u, w)`` with ``u < w``; ``incident[v]`` lists the
    ids of the edges touching ``v``.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    incident: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise GraphError("vertex_count must be non-negative")
        canon = []
        seen = set()
        for u, w in self.edges:
            u, w = int(u), int(w)
            if u == w:
                raise GraphError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= w < n):
                raise GraphError(f"edge ({u}, {w}) references a vertex outside 0..{n - 1}")
            key = (u, w) if u < w else (w, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        inc: list[list[int]] = [[] for _ in range(n)]
        for i, (u, w) in enumerate(canon):
            inc[u].append(i)
            inc[w].append(i)
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "incident", tuple(tuple(x) for x in inc))
        if self.labels is not None and len(self.labels) != n:
            raise GraphError("labels must name every vertex")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], vertex_count: Optional[int] = None) -> "Graph":
        edges = [tuple(e) for e in edges]
        if vertex_count is None:
            vertex_count = 1 + max((max(e) for e in edges), default=-1)
        return cls(vertex_count, tuple(edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        out = []
        for e in self.incident[v]:
            a, b = self.edges[e]
            out.append(b if a == v else a)
        return out

    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)

    def adjacent_edges_mask(self) -> np.ndarray:
        """``M[i, j]`` is true when edges i and j share an endpoint (or i == j)."""
        ea = self.edge_array()
        if len(ea) == 0:
            return np.zeros((0, 0), dtype=bool)
        u, w = ea[:, 0], ea[:, 1]
        return (
            (u[:, None] == u[None, :])
            | (u[:, None] == w[None, :])
            | (w[:, None] == u[None, :])
            | (w[:, None] == w[None, :])
        )

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        adj = [self.neighbors(v) for v in range(self.vertex_count)]
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count


@dataclass(frozen=True)
class BoundingBox:
    """The fixed expanded frame; its sides act as four always-reflecting edges."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float
    margin: float = 0.0

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("bounding box must have positive width and height")

    @classmethod
    def around(cls, positions: np.ndarray, margin: Optional[float] = None) -> "BoundingBox":
        """Tight box of ``positions`` grown by ``margin`` (default 10% of its larger side)."""
        pts = np.asarray(positions, dtype=float).reshape(-1, 2)
        if len(pts) == 0:
            lo = np.zeros(2)
            hi = np.zeros(2)
        else:
            lo = pts.min(axis=0)
            hi = pts.max(axis=0)
        if margin is None:
            margin = 0.1 * float(max(hi - lo))
            if margin <= 0.0:
                margin = 1.0
        if margin <= 0.0:
            raise ValueError("margin must be positive")
        return cls(float(lo[0] - margin), float(lo[1] - margin), float(hi[0] + margin), float(hi[1] + margin), float(margin))

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self) -> list[Point]:
        return [
            Point(self.xmin, self.ymin),
            Point(self.xmax, self.ymin),
            Point(self.xmax, self.ymax),
            Point(self.xmin, self.ymax),
        ]

    def sides(self) -> list[tuple[Point, Point]]:
        c = self.corners()
        return [(c[i], c[(i + 1) % 4]) for i in range(4)]

    def contains(self, p) -> bool:
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax


@dataclass(frozen=True)
class EnergyModel:
    """Per-edge spring penalty ``stiffness * (length - rest_length)**2``."""

    rest_length: float
    stiffness: float = 1.0

    def __post_init__(self):
        if not (self.rest_length > 0 and self.stiffness > 0):
            raise ValueError("rest_length and stiffness must be positive")

    @classmethod
    def for_drawing(cls, drawing: "Drawing", stiffness: float = 1.0) -> "EnergyModel":
        """Uniform-density rest length ``sqrt(w * h / |V|)`` from the tight box of ``drawing``."""
        pts = drawing.positions
        n = max(1, drawing.graph.vertex_count)
        if len(pts):
            w, h = (pts.max(axis=0) - pts.min(axis=0)).tolist()
        else:
            w = h = 0.0
        if w > 0 and h > 0:
            rest = math.sqrt(w * h / n)
        elif max(w, h) > 0:
            rest = max(w, h) / math.sqrt(n)
        else:
            rest = 0.1 * drawing.box.diagonal
        return cls(rest, stiffness)

    def __call__(self, length):
        return self.stiffness * (length - self.rest_length) ** 2


class Drawing:
    """Positions of the real vertices of ``graph`` inside a fixed bounding box.

    Positions are kept in an ``(n, 2)`` float array and mutated in place by
    the optimizer only.
    """

    def __init__(self, graph: Graph, positions, box: Optional[BoundingBox] = None):
        pts = np.array(positions, dtype=float).reshape(-1, 2)
        if len(pts) != graph.vertex_count:
            raise ValueError(f"expected {graph.vertex_count} positions, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("positions must be finite")
        if box is None:
            box = BoundingBox.around(pts)
        for p in pts:
            if not box.contains(p):
                raise ValueError(f"position {tuple(p)} lies outside the bounding box")
        self.graph = graph
        self.positions = pts
        self.box = box

    def copy(self) -> "Drawing":
        return Drawing(self.graph, self.positions.copy(), self.box)

    def position(self, v: int) -> Point:
        return Point(float(self.positions[v, 0]), float(self.positions[v, 1]))

    def move(self, v: int, p) -> None:
        if not self.box.contains(p):
            raise ValueError(f"position {tuple(p)} lies outside the bounding box")
        self.positions[v] = p

    def segments(self) -> np.ndarray:
        """``(m, 4)`` array of edge segments in canonical ``(u, w)`` order."""
        ea = self.graph.edge_array()
        if len(ea) == 0:
            return np.zeros((0, 4))
        return np.hstack([self.positions[ea[:, 0]], self.positions[ea[:, 1]]])

    def __eq__(self, other):
        if not isinstance(other, Drawing):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.box == other.box
            and np.array_equal(self.positions, other.positions)
        )

    def __repr__(self):
        return f"Drawing(n={self.graph.vertex_count}, m={self.graph.edge_count}, box={self.box})"


# -- crossings --------------------------------------------------------------


def crossing_matrix(drawing: Drawing) -> np.ndarray:
    """Symmetric boolean matrix of crossing real-edge pairs."""
    seg = drawing.segments()
    m = cross_matrix(seg, seg)
    if len(seg):
        m &= ~drawing.graph.adjacent_edges_mask()
    return m


def edge_crossings(drawing: Drawing) -> np.ndarray:
    """``cr(e)`` for every edge."""
    return crossing_matrix(drawing).sum(axis=1)


def cr_edge(e: int, drawing: Drawing) -> int:
    return int(edge_crossings(drawing)[e])


def vertex_crossings(drawing: Drawing, per_edge: Optional[np.ndarray] = None) -> np.ndarray:
    """``cr(v)`` for every vertex: sum of ``cr(e)`` over its incident edges."""
    if per_edge is None:
        per_edge = edge_crossings(drawing)
    out = np.zeros(drawing.graph.vertex_count, dtype=np.int64)
    ea = drawing.graph.edge_array()
    if len(ea):
        np.add.at(out, ea[:, 0], per_edge)
        np.add.at(out, ea[:, 1], per_edge)
    return out


def cr_vertex(v: int, drawing: Drawing) -> int:
    return int(vertex_crossings(drawing)[v])


def cr_drawing(drawing: Drawing) -> int:
    total = int(edge_crossings(drawing).sum())
    assert total % 2 == 0
    return total // 2


# -- energy -----------------------------------------------------------------


def edge_lengths(drawing: Drawing) -> np.ndarray:
    seg = drawing.segments()
    return np.hypot(seg[:, 2] - seg[:, 0], seg[:, 3] - seg[:, 1])


def edge_energies(drawing: Drawing, model: EnergyModel) -> np.ndarray:
    return model(edge_lengths(drawing))


def energy_edge(e: int, drawing: Drawing, model: EnergyModel) -> float:
    return float(edge_energies(drawing, model)[e])


def vertex_energies(drawing: Drawing, model: EnergyModel, per_edge: Optional[np.ndarray] = None) -> np.ndarray:
    if per_edge is None:
        per_edge = edge_energies(drawing, model)
    out = np.zeros(drawing.graph.vertex_count)
    for v, inc in enumerate(drawing.graph.incident):
        out[v] = math.fsum(per_edge[list(inc)]) if inc else 0.0
    return out


def energy_vertex(v: int, drawing: Drawing, model: EnergyModel) -> float:
    inc = drawing.graph.incident[v]
    return math.fsum(edge_energies(drawing, model)[list(inc)]) if inc else 0.0


def energy_drawing(drawing: Drawing, model: EnergyModel) -> float:
    return math.fsum(edge_energies(drawing, model))


def energy_max(initial: Drawing, model: EnergyModel) -> float:
    """Upper bound on the drawing energy while vertices stay inside the box of ``initial``."""
    d = initial.box.diagonal
    L0 = model.rest_length
    return initial.graph.edge_count * model.stiffness * max(L0 * L0, (d - L0) ** 2)


# -- ordering and facets ----------------------------------------------------


def compare_vertices(u: int, v: int, drawing: Drawing, model: EnergyModel) -> int:
    """-1 if ``u`` strictly precedes ``v`` in the crossing/energy order, 0 if tied, +1 otherwise.

    ``u`` is "before or equal" ``v`` exactly when the result is <= 0.
    """
    cr = vertex_crossings(drawing)
    en = vertex_energies(drawing, model)
    ku = (int(cr[u]), float(en[u]))
    kv = (int(cr[v]), float(en[v]))
    return (ku > kv) - (ku < kv)


def facet_count(drawing: Drawing, crossings: Optional[int] = None) -> int:
    """Number of faces (outer face included) of the planarized drawing.

    Valid for connected graphs with no three edges through one crossing point.
    """
    g = drawing.graph
    if crossings is None:
        crossings = cr_drawing(drawing)
    if not g.is_connected():
        raise GraphError("facet_count requires a connected graph")
    return g.edge_count - g.vertex_count + 2 + crossings

"""The outer relocation loop.

Each pass ranks the vertices worst first (most crossings, then highest local
energy), and moves the first eligible vertex whose best ray candidate passes
the acceptance rule. A pass without any accepted move ends the run.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import EngineConfig
from .geometry import TWO_PI, Point, cross_matrix
from .model import (
    Drawing,
    EnergyModel,
    edge_crossings,
    edge_energies,
    energy_max,
    vertex_crossings,
    vertex_energies,
)
from .raycast import Scene, cast_ray

log = logging.getLogger(__name__)

SAFETY_CAP_LIMIT = 10**6


@dataclass
class IterationRecord:
    iteration: int
    moved: Optional[int]
    crossings: int
    energy: float

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "moved": self.moved, "cr": self.crossings, "energy": self.energy}


@dataclass
class RunStats:
    initial_crossings: int
    initial_energy: float
    energy_max: float
    delta_e: float
    plateau_bound: float
    prohibition_window: int
    rest_length: float
    safety_cap: int
    records: list[IterationRecord] = field(default_factory=list)
    rays_cast: int = 0
    failed_rays: int = 0
    wall_time: float = 0.0
    stop_reason: str = "running"

    @property
    def converged(self) -> bool:
        return self.stop_reason == "converged"

    @property
    def outer_iterations(self) -> int:
        return len(self.records)

    @property
    def final_crossings(self) -> int:
        return self.records[-1].crossings if self.records else self.initial_crossings

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy if self.records else self.initial_energy

    @property
    def moves(self) -> list[IterationRecord]:
        return [r for r in self.records if r.moved is not None]

    def crossing_sequence(self) -> list[int]:
        return [self.initial_crossings] + [r.crossings for r in self.records]

    def energy_sequence(self) -> list[float]:
        return [self.initial_energy] + [r.energy for r in self.records]

    def plateau_lengths(self) -> list[int]:
        """Lengths of the runs of consecutive accepted moves that kept cr unchanged."""
        out = []
        run = 0
        prev = self.initial_crossings
        for r in self.moves:
            if r.crossings == prev:
                run += 1
            else:
                if run:
                    out.append(run)
                run = 0
            prev = r.crossings
        if run:
            out.append(run)
        return out

    def summary(self) -> dict:
        return {
            "initial_cr": self.initial_crossings,
            "final_cr": self.final_crossings,
            "initial_energy": self.initial_energy,
            "final_energy": self.final_energy,
            "outer_iterations": self.outer_iterations,
            "moves": len(self.moves),
            "rays_cast": self.rays_cast,
            "failed_rays": self.failed_rays,
            "stop_reason": self.stop_reason,
        }


def ray_angles(cfg: EngineConfig) -> list[float]:
    return [cfg.theta0 + i * TWO_PI / cfg.rays for i in range(1, cfg.rays + 1)]


def _ray_rng(cfg: EngineConfig, iteration: int, v: int, ray_index: int):
    if not cfg.mode.randomized:
        return None
    return np.random.default_rng([cfg.seed & 0xFFFFFFFFFFFFFFFF, iteration, v, ray_index])


def score_positions(v: int, candidates, drawing: Drawing, energy: EnergyModel) -> tuple[np.ndarray, np.ndarray]:
    """Crossings and local energy of ``v`` if it stood at each candidate position.

    Incident segments keep the canonical edge orientation, so the crossing
    counts agree exactly with the global crossing matrix.
    """
    cand = np.asarray(candidates, dtype=float).reshape(-1, 2)
    k = len(cand)
    g = drawing.graph
    inc = list(g.incident[v])
    if not inc:
        return np.zeros(k, dtype=np.int64), np.zeros(k)
    ea = g.edge_array()
    pos = drawing.positions
    deg = len(inc)
    segs = np.empty((k, deg, 4))
    for j, e in enumerate(inc):
        a, b = ea[e]
        if a == v:
            segs[:, j, 0:2] = cand
            segs[:, j, 2:4] = pos[b]
        else:
            segs[:, j, 0:2] = pos[a]
            segs[:, j, 2:4] = cand
    segs = segs.reshape(k * deg, 4)
    lengths = np.hypot(segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1]).reshape(k, deg)
    energies = energy(lengths).sum(axis=1)

    others = np.ones(len(ea), dtype=bool)
    others[inc] = False
    if not others.any():
        return np.zeros(k, dtype=np.int64), energies
    other_ids = np.flatnonzero(others)
    other_edges = ea[other_ids]
    nbrs = np.array([ea[e][1] if ea[e][0] == v else ea[e][0] for e in inc])
    # edges touching the far endpoint never cross the incident edge
    touching = (other_edges[None, :, 0] == nbrs[:, None]) | (other_edges[None, :, 1] == nbrs[:, None])
    all_segs = drawing.segments()
    cm = cross_matrix(segs, all_segs[other_ids])
    cm &= ~np.tile(touching, (k, 1))
    crossings = cm.sum(axis=1).reshape(k, deg).sum(axis=1)
    return crossings.astype(np.int64), energies


@dataclass
class _Choice:
    point: Point
    current: Point
    crossings: int
    energy: float
    current_crossings: int
    current_energy: float
    rays_cast: int
    failed: int


def _best_candidate(v, drawing, cfg, energy, scene, iteration) -> _Choice:
    current = drawing.position(v)
    points = [current]
    failed = 0
    for i, theta in enumerate(ray_angles(cfg), start=1):
        p = cast_ray(v, theta, drawing, cfg, _ray_rng(cfg, iteration, v, i), scene)
        if p is None:
            failed += 1
        else:
            points.append(p)
    crs, ens = score_positions(v, points, drawing, energy)
    keys = [(int(crs[i]), float(ens[i]), i) for i in range(len(points))]
    best = min(keys)
    return _Choice(points[best[2]], current, best[0], best[1], keys[0][0], keys[0][1], cfg.rays, failed)


def move_vertex(
    v: int,
    drawing: Drawing,
    cfg: EngineConfig,
    energy: Optional[EnergyModel] = None,
    iteration: int = 0,
    scene: Optional[Scene] = None,
) -> Point:
    """Best of the current position and the ``cfg.rays`` ray candidates for ``v``.

    Candidates are ranked by (crossings of v, local energy of v); exact ties
    keep the current position, then the lowest ray index. Randomized rays
    draw from a stream seeded by ``(cfg.seed, iteration, v, ray index)``.
    """
    if energy is None:
        energy = cfg.energy or EnergyModel.for_drawing(drawing)
    if scene is None:
        scene = Scene(drawing, cfg)
    return _best_candidate(v, drawing, cfg, energy, scene, iteration).point


def _accepts(cr_cur: int, en_cur: float, cr_new: int, en_new: float, delta_e: float) -> bool:
    if cr_new < cr_cur:
        return True
    return cr_new == cr_cur and en_cur - en_new >= delta_e


def accept_move(
    v: int,
    candidate,
    drawing: Drawing,
    cfg: EngineConfig,
    energy: Optional[EnergyModel] = None,
    delta_e: Optional[float] = None,
) -> bool:
    """Fewer crossings always wins; equal crossings need a local energy gain of at least delta_e."""
    if energy is None:
        energy = cfg.energy or EnergyModel.for_drawing(drawing)
    if delta_e is None:
        delta_e = cfg.resolved_delta_e(energy)
    crs, ens = score_positions(v, [drawing.position(v), candidate], drawing, energy)
    return _accepts(int(crs[0]), float(ens[0]), int(crs[1]), float(ens[1]), delta_e)


def plateau_steps(e_max: float, delta_e: float) -> float:
    """``ceil(e_max / delta_e)``, at least 1; infinite when delta_e is 0."""
    if delta_e <= 0:
        return math.inf
    return max(1, math.ceil(e_max / delta_e))


def plateau_bound(cfg: EngineConfig, initial: Drawing, energy: Optional[EnergyModel] = None) -> float:
    """Most consecutive equal-crossing moves any run from ``initial`` can make."""
    if energy is None:
        energy = cfg.energy or EnergyModel.for_drawing(initial)
    return plateau_steps(energy_max(initial, energy), cfg.resolved_delta_e(energy))


def _metrics(drawing: Drawing, energy: EnergyModel):
    per_edge = edge_crossings(drawing)
    en_edge = edge_energies(drawing, energy)
    vc = vertex_crossings(drawing, per_edge)
    ve = vertex_energies(drawing, energy, en_edge)
    return vc, ve, int(per_edge.sum()) // 2, math.fsum(en_edge)


def rrgd(
    initial: Drawing,
    cfg: EngineConfig = EngineConfig(),
    on_record: Optional[Callable[[IterationRecord], None]] = None,
) -> tuple[Drawing, RunStats]:
    """Relocate vertices until a full pass finds no acceptable move.

    ``initial`` is left untouched; its bounding box stays fixed for the run.
    ``on_record`` receives one record per outer pass as it completes.
    """
    t0 = time.perf_counter()
    drawing = initial.copy()
    n = drawing.graph.vertex_count
    energy = cfg.energy or EnergyModel.for_drawing(initial)
    delta_e = cfg.resolved_delta_e(energy)
    e_max = energy_max(initial, energy)
    n_s = plateau_steps(e_max, delta_e)
    window = cfg.prohibition_window(n)
    if cfg.max_outer_iterations is not None:
        cap = cfg.max_outer_iterations
    else:
        cap = SAFETY_CAP_LIMIT if math.isinf(n_s) else int(min(10 * max(n, 1) * n_s, SAFETY_CAP_LIMIT))
    vc, ve, cr, en = _metrics(drawing, energy)
    stats = RunStats(cr, en, e_max, delta_e, n_s, window, energy.rest_length, cap)
    counters = np.zeros(n, dtype=np.int64)

    iteration = 0
    while True:
        if iteration >= cap:
            stats.stop_reason = "safety_cap"
            log.warning("safety cap of %d passes reached", cap)
            break
        iteration += 1
        order = sorted(range(n), key=lambda u: (int(vc[u]), float(ve[u])), reverse=True)
        scene = Scene(drawing, cfg)
        moved = None
        for u in order:
            if counters[u] > 0:
                continue
            choice = _best_candidate(u, drawing, cfg, energy, scene, iteration)
            stats.rays_cast += choice.rays_cast
            stats.failed_rays += choice.failed
            if choice.point == choice.current:
                continue
            if _accepts(choice.current_crossings, choice.current_energy, choice.crossings, choice.energy, delta_e):
                drawing.move(u, choice.point)
                moved = u
                break
        if moved is not None:
            counters[moved] = window
            vc, ve, cr, en = _metrics(drawing, energy)
        np.maximum(counters - 1, 0, out=counters)
        rec = IterationRecord(iteration, moved, cr, en)
        stats.records.append(rec)
        if on_record is not None:
            on_record(rec)
        if moved is None:
            stats.stop_reason = "converged"
            break
    stats.wall_time = time.perf_counter() - t0
    return drawing, stats

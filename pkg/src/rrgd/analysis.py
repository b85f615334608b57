"""Facet-access probabilities, their Monte Carlo check, and benchmark machinery."""

from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import replace
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as _stats

from .config import EngineConfig, OpacityMode
from .layout import initial_drawing
from .model import Graph, cr_drawing
from .optimizer import rrgd


# -- probability of a random ray meeting a random segment --------------------


def ray_edge_probability_mc(samples: int, rng=None, a=None, b=None, chunk: int = 250_000) -> float:
    """Fraction of random half-lines that cross a random segment in the unit square.

    Ray origins and segment endpoints are uniform in ``[0, 1]^2``, directions
    uniform in ``[0, 2*pi)``. Passing ``a`` and ``b`` pins the segment.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    hits = 0
    left = samples
    while left:
        k = min(chunk, left)
        left -= k
        A = np.broadcast_to(np.asarray(a, float), (k, 2)) if a is not None else rng.random((k, 2))
        B = np.broadcast_to(np.asarray(b, float), (k, 2)) if b is not None else rng.random((k, 2))
        R = rng.random((k, 2))
        phi = rng.uniform(0.0, 2.0 * math.pi, k)
        dx, dy = np.cos(phi), np.sin(phi)
        ex, ey = B[:, 0] - A[:, 0], B[:, 1] - A[:, 1]
        rx, ry = A[:, 0] - R[:, 0], A[:, 1] - R[:, 1]
        denom = dx * ey - dy * ex
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rx * ey - ry * ex) / denom
            u = (rx * dy - ry * dx) / denom
        hits += int(np.count_nonzero((denom != 0) & (t > 0) & (u >= 0) & (u <= 1)))
    return hits / samples


# -- facet access bound --------------------------------------------------------


def _per_ray_edge_term(nv: int, ne: int, cr: int) -> float:
    if nv + cr <= 2:
        raise ValueError("need nv + cr > 2")
    if ne < 0 or cr < 0:
        raise ValueError("counts must be non-negative")
    return ne / (36.0 * (nv + cr - 2))


def facet_hit_probability(nv: int, ne: int, cr: int, R: int) -> float:
    """Upper bound on the chance that ``R`` random rays enter a given facet.

    ``1 - (1 - ne / (36 (nv + cr - 2)))**(3R)``, with the inner miss
    probability floored at 0 so the result stays in [0, 1].
    """
    if R < 0:
        raise ValueError("R must be non-negative")
    miss = max(0.0, 1.0 - _per_ray_edge_term(nv, ne, cr))
    return min(1.0, max(0.0, 1.0 - miss ** (3 * R)))


def average_joint_facets(nv: int, ne: int, cr: int) -> float:
    """``F = 6 (nv + cr - 2) / ne``: mean facets per edge in the all-triangles worst case."""
    return 6.0 * (nv + cr - 2) / ne


def q_binomial_sum(F: float) -> float:
    """Chance one random ray enters a given triangular facet, as the explicit 4-term sum."""
    miss = 1.0 - 1.0 / F
    return sum(
        math.comb(3, k) * (1 / 6) ** k * (5 / 6) ** (3 - k) * (1.0 - miss**k)
        for k in range(4)
    )


def q_closed_form(F: float) -> float:
    return 1.0 - (1.0 - 1.0 / (6.0 * F)) ** 3


def rays_needed(q: float, nv: int, ne: int, cr: int) -> int:
    """Smallest ``R >= 1`` with ``facet_hit_probability(nv, ne, cr, R) >= q``."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    miss = max(0.0, 1.0 - _per_ray_edge_term(nv, ne, cr))
    if miss == 0.0:
        return 1
    if miss == 1.0:
        raise ValueError("no edges: the bound never reaches q")
    R = max(1, math.ceil(math.log1p(-q) / (3.0 * math.log(miss))))
    # the logarithms can be off by one ulp either way
    while R > 1 and facet_hit_probability(nv, ne, cr, R - 1) >= q:
        R -= 1
    while facet_hit_probability(nv, ne, cr, R) < q:
        R += 1
    return R


# -- graph generators ----------------------------------------------------------


K4_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def expand_k4(steps: int, rng=None) -> Graph:
    """K4 grown by ``steps`` bridge insertions.

    Each step subdivides two distinct edges with new vertices and joins the
    two new vertices, adding 2 vertices and 3 edges.
    """
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    edges = list(K4_EDGES)
    n = 4
    for _ in range(steps):
        i, j = rng.choice(len(edges), size=2, replace=False)
        (a, b), (c, d) = edges[i], edges[j]
        m1, m2 = n, n + 1
        n += 2
        for k in sorted((i, j), reverse=True):
            edges.pop(k)
        edges += [(a, m1), (m1, b), (c, m2), (m2, d), (m1, m2)]
    return Graph.from_edges(edges, n)


def gen_3connected(target_vertices: int, rng=None) -> Graph:
    """3-connected graph with the largest size ``4 + 2k <= target_vertices``."""
    if target_vertices < 4:
        raise ValueError("need at least 4 vertices")
    return expand_k4((target_vertices - 4) // 2, rng)


def gen_random(n: int, m: int, rng=None) -> Graph:
    """Uniform simple graph with ``n`` vertices and ``m`` edges."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    pairs = list(itertools.combinations(range(n), 2))
    if m > len(pairs):
        raise ValueError(f"at most {len(pairs)} edges on {n} vertices")
    pick = rng.choice(len(pairs), size=m, replace=False)
    return Graph.from_edges([pairs[i] for i in sorted(pick)], n)


# -- statistics ----------------------------------------------------------------


def three_sigma_filter(values: Sequence[float]) -> list[float]:
    """Drop values more than three sample standard deviations from the mean."""
    vals = list(values)
    if len(vals) < 2:
        return vals
    mu = statistics.fmean(vals)
    sd = statistics.stdev(vals)
    return [x for x in vals if abs(x - mu) <= 3.0 * sd]


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided p-value of Welch's unequal-variance t-test."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two values")
    if a.var() == 0.0 and b.var() == 0.0:
        # scipy yields nan here; constant samples are equal or infinitely apart
        return 1.0 if a.mean() == b.mean() else 0.0
    return float(_stats.ttest_ind(a, b, equal_var=False).pvalue)


# -- benchmark -----------------------------------------------------------------


def run_seed(master_seed: int, run_index: int) -> int:
    """Independent 63-bit seed for one benchmark run."""
    state = np.random.SeedSequence([master_seed, run_index]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def config_grid(base: EngineConfig, **axes: Iterable) -> list[EngineConfig]:
    """Cartesian product of config overrides, e.g. ``config_grid(base, rays=[5, 10])``.

    The ``mode`` axis accepts ``"det"``/``"rand"`` strings.
    """
    names = list(axes)
    out = []
    for combo in itertools.product(*(list(axes[k]) for k in names)):
        kw = dict(zip(names, combo))
        if isinstance(kw.get("mode"), str):
            kw["mode"] = OpacityMode(randomized=kw["mode"] == "rand", epsilon_rand=base.mode.epsilon_rand)
        out.append(replace(base, **kw))
    return out


def _summary(values: list[float]) -> dict:
    kept = three_sigma_filter(values)
    return {
        "n": len(values),
        "kept": len(kept),
        "mean": statistics.fmean(kept) if kept else None,
        "sd": statistics.stdev(kept) if len(kept) > 1 else 0.0,
    }


def run_benchmark(
    corpus: Sequence[tuple[str, Graph]],
    configs: Sequence[EngineConfig],
    seeds: int = 1,
    init: str = "random",
    master_seed: int = 0,
) -> dict:
    """Run every (graph, config, seed) combination and aggregate final crossings.

    Each run gets its own seed from ``(master_seed, run index)``; the
    aggregates drop three-sigma outliers before taking mean and deviation.
    """
    runs = []
    index = 0
    for ci, cfg in enumerate(configs):
        for name, graph in corpus:
            for s in range(seeds):
                seed = run_seed(master_seed, index)
                index += 1
                d0 = initial_drawing(graph, init, rng=seed)
                final, st = rrgd(d0, replace(cfg, seed=seed))
                runs.append(
                    {
                        "config": ci,
                        "graph": name,
                        "vertices": graph.vertex_count,
                        "edges": graph.edge_count,
                        "seed": seed,
                        "initial_cr": st.initial_crossings,
                        "final_cr": cr_drawing(final),
                        "iterations": st.outer_iterations,
                        "stop_reason": st.stop_reason,
                        "wall_time": st.wall_time,
                    }
                )
    aggregates = []
    for ci, cfg in enumerate(configs):
        mine = [r for r in runs if r["config"] == ci]
        aggregates.append(
            {
                "config": ci,
                "settings": cfg.to_dict(),
                "final_cr": _summary([r["final_cr"] for r in mine]),
                "iterations": _summary([r["iterations"] for r in mine]),
                "wall_time": _summary([r["wall_time"] for r in mine]),
            }
        )
    return {"init": init, "master_seed": master_seed, "runs": runs, "aggregates": aggregates}

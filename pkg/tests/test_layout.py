import math

import numpy as np
import pytest
from scipy import stats

from conftest import K4
from rrgd.layout import INITIALIZERS, init_circle, init_force, init_random, initial_drawing
from rrgd.model import Graph, cr_drawing


def test_random_single_vertex_in_window():
    d = init_random(Graph(1, ()), 10.0, 20.0, rng=0)
    x, y = d.position(0)
    assert 0 <= x <= 10 and 0 <= y <= 20


def test_random_reproducible():
    g = Graph.from_edges(K4)
    assert np.array_equal(init_random(g, rng=42).positions, init_random(g, rng=42).positions)
    assert not np.array_equal(init_random(g, rng=42).positions, init_random(g, rng=43).positions)


def test_random_marginals_uniform():
    d = init_random(Graph(10_000, ()), 1000.0, 500.0, rng=123)
    assert stats.kstest(d.positions[:, 0], "uniform", args=(0, 1000)).pvalue > 0.01
    assert stats.kstest(d.positions[:, 1], "uniform", args=(0, 500)).pvalue > 0.01


def test_circle_square():
    d = init_circle(Graph(4, ()), radius=1.0)
    want = [(2, 1), (1, 2), (0, 1), (1, 0)]
    assert np.allclose(d.positions, want, atol=1e-12)


@pytest.mark.parametrize("n", [3, 7, 12])
def test_circle_equal_steps(n):
    d = init_circle(Graph(n, ()), radius=5.0)
    p = d.positions - 5.0
    ang = np.unwrap(np.arctan2(p[:, 1], p[:, 0]))
    assert np.allclose(np.diff(ang), 2 * math.pi / n)


def test_circle_k4_has_one_crossing():
    assert cr_drawing(init_circle(Graph.from_edges(K4))) == 1


def test_force_zero_iterations_is_random():
    g = Graph.from_edges(K4)
    assert np.array_equal(init_force(g, iterations=0, rng=5).positions, init_random(g, rng=5).positions)


def test_force_two_vertices_reach_rest_length():
    g = Graph.from_edges([(0, 1)])
    d = init_force(g, iterations=2000, rng=1)
    rest = math.sqrt(1000 * 1000 / 2)
    dist = float(np.hypot(*(d.positions[0] - d.positions[1])))
    assert dist == pytest.approx(rest, rel=0.05)


@pytest.mark.parametrize("seed", range(5))
def test_force_stays_in_window(seed):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(15) for j in range(i + 1, 15) if rng.random() < 0.3]
    d = init_force(Graph.from_edges(edges, 15), width=300.0, height=200.0, rng=seed)
    assert np.all(d.positions >= 0)
    assert np.all(d.positions[:, 0] <= 300) and np.all(d.positions[:, 1] <= 200)


@pytest.mark.parametrize("kind", INITIALIZERS)
def test_strictly_inside_box(kind):
    d = initial_drawing(Graph.from_edges(K4 + [(3, 4), (4, 5)]), kind, rng=3)
    b = d.box
    p = d.positions
    assert np.all((p[:, 0] > b.xmin) & (p[:, 0] < b.xmax) & (p[:, 1] > b.ymin) & (p[:, 1] < b.ymax))


def test_unknown_initializer():
    with pytest.raises(ValueError):
        initial_drawing(Graph(2, ()), "spiral")

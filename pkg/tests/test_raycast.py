import math

import numpy as np
import pytest

from conftest import drawing_of
from rrgd import _kernels
from rrgd.config import DETERMINISTIC, RANDOMIZED, EngineConfig, OpacityMode
from rrgd.geometry import Point
from rrgd.model import BoundingBox, Drawing, Graph
from rrgd.raycast import Scene, cast_ray, decide_reflection, edge_weight, opacity, trace_ray

DET = EngineConfig(mode=DETERMINISTIC)


# v = 0 at the origin, hit edge e = (1, 2) on the line x + y = 5
WEIGHT_POINTS = [
    (0, 0), (0, 5), (5, 0), (0, -5), (10, 5), (5, 10),
    (0, 10), (-5, 5), (10, 0), (5, -5),
]
WEIGHT_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5),
    (1, 2), (1, 6), (1, 7), (2, 8), (2, 9),
]


@pytest.fixture
def weight_figure():
    return drawing_of(WEIGHT_EDGES, WEIGHT_POINTS)


def _edge_id(d, u, w):
    return d.graph.edges.index((min(u, w), max(u, w)))


class TestWeights:
    def test_figure_weights(self, weight_figure):
        d = weight_figure
        e = _edge_id(d, 1, 2)
        p1 = (1.9, 1.9)
        weights = {nb: edge_weight(0, nb, p1, e, d) for nb in d.graph.neighbors(0)}
        assert weights == {1: 0, 2: 0, 3: 1, 4: -1, 5: -1}
        assert opacity(0, e, p1, d) == pytest.approx(-1 / 3)

    def test_far_side_flips_weights(self, weight_figure):
        d = weight_figure
        e = _edge_id(d, 1, 2)
        p2 = (2.6, 2.6)
        weights = {nb: edge_weight(0, nb, p2, e, d) for nb in d.graph.neighbors(0)}
        assert weights == {1: 0, 2: 0, 3: -1, 4: 1, 5: 1}
        assert opacity(0, e, p2, d) == pytest.approx(1 / 3)

    def test_figure_ray_crosses(self, weight_figure):
        ray = trace_ray(0, math.pi / 4, weight_figure, EngineConfig(ray_size=1))
        assert ray is not None
        assert ray.points[1] == pytest.approx((2.5, 2.5), abs=1e-12)
        # negative opacity: the ray keeps its direction
        assert ray.dir == pytest.approx(math.pi / 4)

    def test_only_shared_edges_gives_one(self):
        # v's single neighbour is an endpoint of the hit edge
        d = drawing_of([(0, 1), (1, 2)], [(0, 0), (1, 1), (2, 0)])
        assert opacity(0, _edge_id(d, 1, 2), (0.5, 0.4), d) == 1.0

    def test_isolated_vertex_gives_one(self):
        d = drawing_of([(1, 2)], [(0, 0), (1, 1), (2, 0)])
        assert opacity(0, 0, (0.5, 0.4), d) == 1.0

    def test_all_crossing_gives_minus_one(self):
        # v below the horizontal edge (3, 4), both neighbours above it
        pts = [(0, 0), (-1, 3), (1, 3), (-2, 1), (2, 1)]
        d = drawing_of([(0, 1), (0, 2), (3, 4)], pts)
        assert opacity(0, _edge_id(d, 3, 4), (0, 0), d) == -1.0

    @pytest.mark.parametrize("seed", range(10))
    def test_kernel_opacity_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        n = 9
        pts = rng.random((n, 2))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.45]
        d = drawing_of(edges, pts)
        scene = Scene(d, DET)
        for v in range(n):
            for e in range(len(edges)):
                q = rng.random(2)
                ref = opacity(v, e, q, d)
                got = _kernels._opacity(
                    v, e, q[0], q[1], scene.neighbors(v), scene.edge_u, scene.edge_w, scene.positions
                )
                assert got == ref
                assert -1.0 <= got <= 1.0


class TestDecision:
    @pytest.mark.parametrize("op, expected", [(-1 / 3, False), (0.0, True), (0.5, True), (-1.0, False)])
    def test_deterministic(self, op, expected):
        assert decide_reflection(op, DETERMINISTIC) is expected

    def test_randomized_reflect_rate(self):
        rng = np.random.default_rng(2024)
        n = 100_000
        hits = sum(decide_reflection(1.0, RANDOMIZED, rng) for _ in range(n))
        assert hits / n == pytest.approx(2.05 / 2.1, abs=0.0025)
        assert hits < n

    def test_randomized_extremes_both_possible(self):
        rng = np.random.default_rng(5)
        outcomes = {decide_reflection(-1.0, RANDOMIZED, rng) for _ in range(5_000)}
        assert outcomes == {True, False}

    def test_randomized_needs_rng(self):
        with pytest.raises(ValueError):
            decide_reflection(0.0, RANDOMIZED)

    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError):
            OpacityMode(randomized=True, epsilon_rand=0.0)


def _empty_box(v_pos):
    return Drawing(Graph(1, ()), [v_pos], BoundingBox(0.0, 0.0, 4.0, 4.0))


class TestEmptyBox:
    def test_single_hit(self):
        ray = trace_ray(0, 0.0, _empty_box((2, 2)), EngineConfig(ray_size=1))
        assert ray.points == [Point(2, 2), Point(4, 2)]
        assert ray.candidate == Point(3, 2)

    def test_two_hits(self):
        ray = trace_ray(0, 0.0, _empty_box((2, 2)), EngineConfig(ray_size=2))
        assert ray.points == [Point(2, 2), Point(4, 2), Point(0, 2)]
        assert ray.dir == 0.0
        assert ray.candidate == Point(2, 2)

    def test_vertical(self):
        ray = trace_ray(0, math.pi / 2, _empty_box((1, 3)), EngineConfig(ray_size=3))
        assert ray.points == [Point(1, 3), Point(1, 4), Point(1, 0), Point(1, 4)]

    def test_diagonal(self):
        ray = trace_ray(0, math.pi / 4, _empty_box((1, 2)), EngineConfig(ray_size=3))
        want = [(1, 2), (3, 4), (4, 3), (1, 0)]
        assert np.allclose(ray.points, want, rtol=0, atol=1e-12)
        # pi/4 -> 7pi/4 (top) -> 5pi/4 (right) -> 3pi/4 (bottom)
        assert ray.dir == pytest.approx(3 * math.pi / 4)

    def test_corner_hit_is_perturbed(self):
        # straight into the corner (4, 4): degenerate, retried at a nudged angle
        ray = trace_ray(0, math.pi / 4, _empty_box((2, 2)), EngineConfig(ray_size=2))
        assert ray is not None
        assert len(ray.points) == 3

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.2, 4.0, 5.5])
    def test_reflection_law(self, theta):
        ray = trace_ray(0, theta, _empty_box((1.3, 2.9)), EngineConfig(ray_size=8))
        pts = np.array(ray.points)
        assert len(pts) == 9
        assert np.all((pts >= 0) & (pts <= 4))
        for k in range(1, len(pts) - 1):
            a_in = math.atan2(*(pts[k] - pts[k - 1])[::-1])
            a_out = math.atan2(*(pts[k + 1] - pts[k])[::-1])
            x, y = pts[k]
            edge = 0.0 if min(y, 4 - y) < min(x, 4 - x) else math.pi / 2
            # a_in + a_out == 2 * edge (mod 2 pi)
            r = (a_in + a_out - 2 * edge) % (2 * math.pi)
            assert min(r, 2 * math.pi - r) < 1e-9


# -- independent step simulator -------------------------------------------------


def _sim_segments(d):
    segs = [(tuple(d.positions[u]), tuple(d.positions[w])) for u, w in d.graph.edges]
    b = d.box
    c = [(b.xmin, b.ymin), (b.xmax, b.ymin), (b.xmax, b.ymax), (b.xmin, b.ymax)]
    return segs + [(c[i], c[(i + 1) % 4]) for i in range(4)]


def _sim_cross(p1, p2, q1, q2):
    r = (p2[0] - p1[0], p2[1] - p1[1])
    s = (q2[0] - q1[0], q2[1] - q1[1])
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0:
        return False
    qp = (q1[0] - p1[0], q1[1] - p1[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / den
    u = (qp[0] * r[1] - qp[1] * r[0]) / den
    return 0 < t < 1 and 0 < u < 1


def simulate(d, v, theta, n_r):
    """Straightforward re-statement of the ray walk; no shared code with rrgd.raycast."""
    segs = _sim_segments(d)
    m = d.graph.edge_count
    diag = math.hypot(d.box.xmax - d.box.xmin, d.box.ymax - d.box.ymin)
    eps = 1e-6 * diag
    p = tuple(d.positions[v])
    pts = [p]
    queue = []
    dx, dy = math.cos(theta), math.sin(theta)
    while len(pts) < n_r + 1:
        if not queue:
            found = []
            for i, (a, b) in enumerate(segs):
                ex, ey = b[0] - a[0], b[1] - a[1]
                den = dx * ey - dy * ex
                if abs(den) < 1e-14:
                    continue
                t = ((a[0] - p[0]) * ey - (a[1] - p[1]) * ex) / den
                u = ((a[0] - p[0]) * dy - (a[1] - p[1]) * dx) / den
                if t > 1e-9 * diag and 0 <= u <= 1:
                    assert 1e-6 < u < 1 - 1e-6, "fixture must avoid vertex hits"
                    found.append((t, i))
            queue = sorted(found)
        t, i = queue.pop(0)
        hit = (p[0] + t * dx, p[1] + t * dy)
        pts.append(hit)
        if i >= m:
            reflect = True
        else:
            a, b = d.graph.edges[i]
            q = (hit[0] - eps * dx, hit[1] - eps * dy)
            ws = []
            for nb in d.graph.neighbors(v):
                if nb in (a, b) or v in (a, b):
                    continue
                ws.append(-1 if _sim_cross(q, tuple(d.positions[nb]), segs[i][0], segs[i][1]) else 1)
            reflect = (sum(ws) / len(ws) if ws else 1.0) >= 0
        if reflect:
            ea = math.atan2(segs[i][1][1] - segs[i][0][1], segs[i][1][0] - segs[i][0][0])
            theta = 2 * ea - theta
            dx, dy = math.cos(theta), math.sin(theta)
            p = hit
            queue = []
    return pts


FIVE_POINTS = [(0.0, 0.0), (6.0, 1.0), (5.0, 7.0), (-1.0, 6.0), (2.5, 3.2)]
FIVE_EDGES = [(0, 2), (1, 3), (0, 1), (2, 3), (1, 4), (3, 4)]


@pytest.fixture
def five():
    return drawing_of(FIVE_EDGES, FIVE_POINTS)


@pytest.mark.parametrize("v", range(5))
@pytest.mark.parametrize("theta", [1.0, 1.0 + 2 * math.pi / 3, 1.0 + 4 * math.pi / 3, 0.37])
def test_matches_step_simulator(five, v, theta):
    cfg = EngineConfig(ray_size=12)
    ray = trace_ray(v, theta, five, cfg)
    assert ray is not None
    want = simulate(five, v, theta, 12)
    got = np.array(ray.points)
    scale = five.box.diagonal
    assert got.shape == (13, 2)
    assert np.allclose(got, want, rtol=0, atol=1e-9 * scale)


def test_five_fixture_exercises_crossings(five):
    # at least one of the simulated rays must pass through an edge instead of bouncing
    crossed = False
    for v in range(5):
        pts = simulate(five, v, 1.0, 12)
        for k in range(1, len(pts) - 1):
            a = np.subtract(pts[k], pts[k - 1])
            b = np.subtract(pts[k + 1], pts[k])
            if abs(a[0] * b[1] - a[1] * b[0]) < 1e-9 * np.linalg.norm(a) * np.linalg.norm(b) and a @ b > 0:
                crossed = True
    assert crossed


def test_polyline_inside_box(five):
    for v in range(5):
        for theta in np.linspace(0.1, 6.2, 13):
            ray = trace_ray(v, theta, five, EngineConfig(ray_size=10))
            if ray is None:
                continue
            assert len(ray.points) == 11
            assert all(five.box.contains(p) for p in ray.points)


def test_deterministic_is_pure(five):
    a = trace_ray(4, 2.0, five, DET)
    b = trace_ray(4, 2.0, five, DET)
    assert a.points == b.points and a.dir == b.dir


def test_randomized_reproducible(five):
    cfg = EngineConfig(mode=RANDOMIZED)
    a = cast_ray(4, 2.0, five, cfg, np.random.default_rng(9))
    b = cast_ray(4, 2.0, five, cfg, np.random.default_rng(9))
    assert a == b
    with pytest.raises(ValueError):
        cast_ray(4, 2.0, five, cfg)

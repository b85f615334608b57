import itertools

import numpy as np
import pytest

from rrgd.model import BoundingBox, Drawing, Graph

K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
K5 = list(itertools.combinations(range(5), 2))


def brute_force_crossings(positions, edges) -> int:
    """All-pairs count with a plain parametric solve; independent of rrgd.geometry."""
    total = 0
    for (a, b), (c, d) in itertools.combinations(edges, 2):
        if len({a, b, c, d}) < 4:
            continue
        p, r = np.asarray(positions[a], float), np.asarray(positions[b], float) - positions[a]
        q, s = np.asarray(positions[c], float), np.asarray(positions[d], float) - positions[c]
        den = r[0] * s[1] - r[1] * s[0]
        if den == 0:
            continue
        qp = q - p
        t = (qp[0] * s[1] - qp[1] * s[0]) / den
        u = (qp[0] * r[1] - qp[1] * r[0]) / den
        if 0 < t < 1 and 0 < u < 1:
            total += 1
    return total


def drawing_of(edges, positions, n=None, margin=None) -> Drawing:
    g = Graph.from_edges(edges, n if n is not None else len(positions))
    pts = np.asarray(positions, float)
    return Drawing(g, pts, BoundingBox.around(pts, margin))


@pytest.fixture
def k4_square():
    # 0,1,2,3 around the unit square: (0,2) and (1,3) are the diagonals
    return drawing_of(K4, [(0, 0), (1, 0), (1, 1), (0, 1)])

"""Ray-based crossing minimization for straight-line graph drawings."""

from .config import DETERMINISTIC, RANDOMIZED, EngineConfig, OpacityMode
from .geometry import Point, Segment, halfline_segment_intersection, orient, segments_cross
from .layout import init_circle, init_force, init_random, initial_drawing
from .model import (
    BoundingBox,
    Drawing,
    EnergyModel,
    Graph,
    GraphError,
    cr_drawing,
    cr_edge,
    cr_vertex,
    energy_drawing,
    energy_edge,
    energy_max,
    energy_vertex,
)
from .optimizer import RunStats, accept_move, move_vertex, rrgd
from .raycast import Ray, cast_ray, opacity, trace_ray

__version__ = "0.1.0"

__all__ = [
    "DETERMINISTIC", "RANDOMIZED", "EngineConfig", "OpacityMode",
    "Point", "Segment", "halfline_segment_intersection", "orient", "segments_cross",
    "init_circle", "init_force", "init_random", "initial_drawing",
    "BoundingBox", "Drawing", "EnergyModel", "Graph", "GraphError",
    "cr_drawing", "cr_edge", "cr_vertex", "energy_drawing", "energy_edge", "energy_max", "energy_vertex",
    "RunStats", "accept_move", "move_vertex", "rrgd",
    "Ray", "cast_ray", "opacity", "trace_ray",
]

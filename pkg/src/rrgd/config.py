from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .model import EnergyModel


@dataclass(frozen=True)
class OpacityMode:
    """Deterministic (sign of the opacity) or randomized reflections.

    In randomized mode a ray reflects when a uniform draw on
    ``[-1 - epsilon_rand, 1 + epsilon_rand]`` falls below the opacity.
    """

    randomized: bool = False
    epsilon_rand: float = 0.05

    def __post_init__(self):
        if self.randomized and not self.epsilon_rand > 0:
            raise ValueError("epsilon_rand must be positive so both outcomes stay possible")

    @property
    def name(self) -> str:
        return "rand" if self.randomized else "det"


DETERMINISTIC = OpacityMode()
RANDOMIZED = OpacityMode(randomized=True)


@dataclass(frozen=True)
class EngineConfig:
    rays: int = 10
    ray_size: int = 10
    # None: 1e-3 * stiffness * rest_length**2 once the energy model is known
    delta_e: Optional[float] = None
    prohibition_ratio: float = 0.1
    mode: OpacityMode = field(default_factory=OpacityMode)
    theta0: float = 1.0
    # None: EnergyModel.for_drawing(initial drawing)
    energy: Optional[EnergyModel] = None
    seed: int = 0
    max_outer_iterations: Optional[int] = None
    # tolerances, relative to the bounding-box diagonal where it applies
    eps_ray_rel: float = 1e-6
    tau_fwd_rel: float = 1e-9
    tau_ang: float = 1e-7
    degenerate_retries: int = 3

    def __post_init__(self):
        if self.rays < 1:
            raise ValueError("rays (R) must be >= 1")
        if self.ray_size < 1:
            raise ValueError("ray_size (n_r) must be >= 1")
        if self.delta_e is not None and self.delta_e < 0:
            raise ValueError("delta_e must be >= 0")
        if not 0.0 <= self.prohibition_ratio < 1.0:
            raise ValueError("prohibition_ratio must lie in [0, 1)")
        if not math.isfinite(self.theta0):
            raise ValueError("theta0 must be finite")

    def prohibition_window(self, vertex_count: int) -> int:
        return int(math.floor(self.prohibition_ratio * vertex_count + 0.5))

    def resolved_delta_e(self, energy: EnergyModel) -> float:
        if self.delta_e is not None:
            return self.delta_e
        return 1e-3 * energy.stiffness * energy.rest_length ** 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.name
        d["epsilon_rand"] = self.mode.epsilon_rand
        return d

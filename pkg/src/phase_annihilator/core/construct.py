"""
Inductive equivariant construction of phase trees over spheres

alpha_k maps S^k to phase trees so that exp(i alpha_k) is odd. Positive
points of S^{k+1} go through the hemisphere projection onto B^{k+1} and the
extension alpha~_k; negative points use the antipode shifted by one half-turn.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Sequence, Union

import numpy as np

from .phase import Const, HardSwitch, IntConst, PhaseTree, blend, eval_h, shift
from .smoothstep import SmoothStep, default_step
from .sphere import (
    POSITIVITY_TOL,
    BallPoint,
    BoundarySide,
    SpherePoint,
    blend_width,
    hemi_params,
    is_positive,
    project,
)

logger = logging.getLogger(__name__)


class ConstructionMode(Enum):
    """Which base case and path family the recursion uses."""
    STANDARD = "standard"
    HOBBY_RICE = "hobby-rice"
    IMPROVED = "improved"


@dataclass(frozen=True)
class ConstructionConfig:
    """Mode and the upper bound on blend widths."""

    mode: ConstructionMode = ConstructionMode.STANDARD
    width_cap: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", ConstructionMode(self.mode))
        if not 0.0 < self.width_cap <= 1.0:
            raise ValueError(f"width_cap must lie in (0,1], got {self.width_cap}")
        if self.mode is ConstructionMode.IMPROVED and self.width_cap >= 1.0:
            raise ValueError("Improved mode needs a width cap below 1")

    @property
    def base_dimension(self) -> int:
        return 1 if self.mode is ConstructionMode.IMPROVED else 0


@dataclass(frozen=True)
class RangeBound:
    g_min: float
    g_max: float

    @property
    def span(self) -> float:
        return self.g_max - self.g_min


@dataclass(frozen=True)
class EquivariantMap:
    """alpha_k for k <= dimension, and beta = exp(i alpha)."""

    dimension: int
    config: ConstructionConfig = field(default_factory=ConstructionConfig)
    step: SmoothStep = field(default_factory=default_step, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.dimension < self.config.base_dimension:
            raise ValueError(
                f"{self.config.mode.value} construction needs dimension >= {self.config.base_dimension}"
            )

    def _base(self, x: SpherePoint) -> PhaseTree:
        mode = self.config.mode
        if mode is ConstructionMode.IMPROVED:
            theta = math.atan2(x.coords[1], x.coords[0]) % (2.0 * math.pi)
            return Const(theta)
        root: PhaseTree = IntConst(0) if mode is ConstructionMode.HOBBY_RICE else Const(0.0)
        return root if is_positive(x) else shift(root, 1)

    def alpha(self, x: SpherePoint) -> PhaseTree:
        """Phase tree of a point of S^k, k <= dimension."""
        k = x.dimension
        if k > self.dimension:
            raise ValueError(f"Point of S^{k} exceeds map dimension {self.dimension}")
        if k < self.config.base_dimension:
            raise ValueError(f"{self.config.mode.value} construction starts at S^{self.config.base_dimension}")
        if k == self.config.base_dimension:
            return self._base(x)
        if is_positive(x):
            return self.alpha_tilde(project(x))
        return shift(self.alpha_tilde(project(x.antipode())), 1)

    def alpha_tilde(self, y: BallPoint) -> PhaseTree:
        """Extension of alpha_{k-1} from S^{k-1} to the ball B^k."""
        params = hemi_params(y)
        if params is None:
            return self.alpha(SpherePoint.normalized(y.array))
        width = blend_width(params, self.config.width_cap)
        if width is BoundarySide.UPPER:
            return self.alpha(params.u)
        if width is BoundarySide.LOWER:
            return self.alpha(params.l)
        return blend(self.alpha(params.u), self.alpha(params.l), params.t, width, check=False)

    def beta_eval(self, x: SpherePoint, sample_points: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """h = beta(x) sampled at the given points of [0,1]."""
        samples = np.asarray(sample_points, dtype=float)
        if samples.size and (samples.min() < 0.0 or samples.max() > 1.0):
            raise ValueError("Sample points must lie in [0,1]")
        return np.asarray(eval_h(self.alpha(x), samples, self.step))

    def range_bound(self, x: SpherePoint) -> RangeBound:
        """g(0) and g(1) of alpha(x); g is nondecreasing so these bound its range."""
        tree = self.alpha(x)
        ends = tree.evaluate(np.array([0.0, 1.0]), self.step)
        return RangeBound(float(ends[0]), float(ends[1]))

    def oddness_defect(self, points: Iterable[SpherePoint], sample_points: Sequence[float]) -> float:
        """max |beta(-x) + beta(x)| over the given points and samples."""
        worst = 0.0
        for x in points:
            total = self.beta_eval(x, sample_points) + self.beta_eval(x.antipode(), sample_points)
            worst = max(worst, float(np.max(np.abs(total))) if total.size else 0.0)
        return worst


def alpha(emap: EquivariantMap, x: SpherePoint) -> PhaseTree:
    return emap.alpha(x)


def beta_eval(emap: EquivariantMap, x: SpherePoint, sample_points: Sequence[float]) -> np.ndarray:
    return emap.beta_eval(x, sample_points)


def range_bound(emap: EquivariantMap, x: SpherePoint) -> RangeBound:
    return emap.range_bound(x)


def pinkus_partition(x: SpherePoint) -> PhaseTree:
    """Step function with cell i of width x_i^2 and sign sgn(x_i).

    Adjacent cells of equal sign merge and zero cells vanish, so a point of
    S^n gives at most n sign changes.
    """
    coords = x.array
    pieces: List[List[float]] = []
    for c in coords:
        if abs(c) <= POSITIVITY_TOL:
            continue
        sign = 1.0 if c > 0 else -1.0
        if pieces and pieces[-1][0] == sign:
            pieces[-1][1] += c * c
        else:
            pieces.append([sign, c * c])

    start = 0 if pieces[0][0] > 0 else 1
    boundaries = np.cumsum([width for _, width in pieces])[:-1]
    boundaries = [float(b) for b in boundaries if 0.0 < b < 1.0]

    # value on the j-th piece is start + j, so parity alternates
    tree: PhaseTree = IntConst(start + len(boundaries))
    for j in range(len(boundaries) - 1, -1, -1):
        tree = HardSwitch(IntConst(start + j), tree, 1.0 - boundaries[j])
    return tree

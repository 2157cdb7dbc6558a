"""
Sphere and ball geometry used by the equivariant construction and the zero finder
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import BudgetExceededError, DegeneratePointError

logger = logging.getLogger(__name__)

POSITIVITY_TOL = 1e-12
NORM_TOL = 1e-12
EQUATOR_TOL = 1e-12
BOUNDARY_TOL = 1e-12
MAX_LEVEL = 12
DEFAULT_MAX_SIMPLICES = 200_000


def _as_coords(coords: Union[Sequence[float], np.ndarray]) -> Tuple[float, ...]:
    return tuple(float(c) for c in np.asarray(coords, dtype=float).reshape(-1))


@dataclass(frozen=True)
class SpherePoint:
    """Unit vector in R^{m+1}, a point of S^m."""

    coords: Tuple[float, ...]

    def __post_init__(self) -> None:
        coords = _as_coords(self.coords)
        if not coords:
            raise ValueError("SpherePoint needs at least one coordinate")
        norm = float(np.linalg.norm(coords))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"SpherePoint must have unit norm, got {norm!r}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def normalized(cls, vector: Union[Sequence[float], np.ndarray]) -> "SpherePoint":
        v = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise DegeneratePointError("Cannot normalise the zero vector")
        return cls(tuple(v / norm))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    def antipode(self) -> "SpherePoint":
        return SpherePoint(tuple(-c for c in self.coords))

    def __neg__(self) -> "SpherePoint":
        return self.antipode()


@dataclass(frozen=True)
class BallPoint:
    """Point of the closed ball B^{k+1}."""

    coords: Tuple[float, ...]

    def __post_init__(self) -> None:
        coords = _as_coords(self.coords)
        if not coords:
            raise ValueError("BallPoint needs at least one coordinate")
        norm = float(np.linalg.norm(coords))
        if norm > 1.0 + NORM_TOL:
            raise ValueError(f"BallPoint must lie in the closed unit ball, got norm {norm!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


def is_positive(x: Union[SpherePoint, BallPoint, Sequence[float]]) -> bool:
    """True iff the last coordinate above POSITIVITY_TOL in magnitude is positive."""
    coords = np.asarray(x.coords if isinstance(x, (SpherePoint, BallPoint)) else x, dtype=float)
    significant = np.flatnonzero(np.abs(coords) > POSITIVITY_TOL)
    if significant.size == 0:
        raise DegeneratePointError(f"No coordinate exceeds {POSITIVITY_TOL} in magnitude: {tuple(coords)}")
    return bool(coords[significant[-1]] > 0.0)


def positive_representative(x: SpherePoint) -> SpherePoint:
    return x if is_positive(x) else x.antipode()


def mirror(x: SpherePoint) -> SpherePoint:
    """Reflect across the hyperplane of the last coordinate."""
    return SpherePoint(x.coords[:-1] + (-x.coords[-1],))


def project(x: SpherePoint) -> BallPoint:
    """Drop the last coordinate: closed upper hemisphere of S^{k+1} onto B^{k+1}."""
    return BallPoint(x.coords[:-1])


@dataclass(frozen=True)
class HemisphereParams:
    """Upper/lower lifts of a ball point and its blend parameters."""

    u: SpherePoint
    l: SpherePoint  # noqa: E741
    t: float
    d_equator: float


class BoundarySide(Enum):
    """Which lift to use when the blend parameter t sits at an endpoint."""
    UPPER = "upper"
    LOWER = "lower"


def hemi_params(x: BallPoint) -> Optional[HemisphereParams]:
    """Lift x in B^{k+1} to u, l in S^k by replacing its last coordinate.

    Returns None on the equator case (||x|| >= 1 - EQUATOR_TOL); the caller
    then uses the boundary sphere directly.
    """
    coords = x.array
    if np.linalg.norm(coords) >= 1.0 - EQUATOR_TOL:
        return None
    head = coords[:-1]
    head_norm = float(np.linalg.norm(head))
    root = float(np.sqrt(max(0.0, 1.0 - head_norm * head_norm)))
    last = float(coords[-1])

    u = SpherePoint.normalized(np.append(head, root))
    l = SpherePoint.normalized(np.append(head, -root))  # noqa: E741
    # |u - x| / |u - l| along the vertical segment
    t = (root - last) / (2.0 * root)
    t = min(1.0, max(0.0, t))
    d_equator = float(np.hypot(last, 1.0 - head_norm))
    return HemisphereParams(u=u, l=l, t=t, d_equator=d_equator)


def blend_width(params: HemisphereParams, cap: float = 1.0) -> Union[float, BoundarySide]:
    """min(d(x, E), t, 1 - t, cap), or the boundary side when t is 0 or 1."""
    if not 0.0 < cap <= 1.0:
        raise ValueError(f"Width cap must lie in (0,1], got {cap}")
    if params.t <= BOUNDARY_TOL:
        return BoundarySide.UPPER
    if params.t >= 1.0 - BOUNDARY_TOL:
        return BoundarySide.LOWER
    return float(min(params.d_equator, params.t, 1.0 - params.t, cap))


# ----------------------------------------------------------------------
# antipodally symmetric triangulations
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SymmetricTriangulation:
    """Triangulation of S^m whose vertex ``i ^ 1`` is the antipode of vertex ``i``.

    Simplex rows are ordered so that the antipodal image of every simplex is
    again a row of the table.
    """

    vertices: np.ndarray
    simplices: np.ndarray
    level: int

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1] - 1

    @staticmethod
    def antipode_index(index: int) -> int:
        return index ^ 1

    def points(self) -> List[SpherePoint]:
        return [SpherePoint(tuple(v)) for v in self.vertices]

    def max_diameter(self) -> float:
        corners = self.vertices[self.simplices]
        diameter = 0.0
        for a, b in itertools.combinations(range(corners.shape[1]), 2):
            diameter = max(diameter, float(np.max(np.linalg.norm(corners[:, a] - corners[:, b], axis=1))))
        return diameter


def _freudenthal_templates(m: int) -> List[List[Tuple[int, int]]]:
    """Children of the edgewise subdivision of an m-simplex.

    Every child vertex is a parent vertex (a, a) or an edge midpoint (a, b).
    """
    templates = []
    for bits in itertools.product((0, 1), repeat=m):
        a = sum(bits)
        x = np.array([1] * a + [0] * (m - a))
        next_a, next_b = 0, a
        path = [x.copy()]
        for bit in bits:
            if bit:
                x[next_a] += 1
                next_a += 1
            else:
                x[next_b] += 1
                next_b += 1
            path.append(x.copy())

        child = []
        for point in path:
            # staircase coordinates -> doubled barycentric weights
            padded = np.concatenate(([2], point, [0]))
            weights = padded[:-1] - padded[1:]
            support = np.flatnonzero(weights)
            child.append((int(support[0]), int(support[-1])))
        templates.append(child)
    return templates


def _cross_polytope(m: int) -> SymmetricTriangulation:
    vertices = np.zeros((2 * (m + 1), m + 1))
    for i in range(m + 1):
        vertices[2 * i, i] = 1.0
        vertices[2 * i + 1, i] = -1.0
    simplices = np.array(
        [[2 * i + s for i, s in enumerate(signs)] for signs in itertools.product((0, 1), repeat=m + 1)],
        dtype=np.int64,
    )
    return SymmetricTriangulation(vertices, simplices, 0)


def _refine(tri: SymmetricTriangulation, templates: List[List[Tuple[int, int]]]) -> SymmetricTriangulation:
    vertices, simplices = tri.vertices, tri.simplices
    count = vertices.shape[0]
    m = tri.dimension

    local_edges = list(itertools.combinations(range(m + 1), 2))
    ends = np.stack([np.sort(simplices[:, [a, b]], axis=1) for a, b in local_edges], axis=1).reshape(-1, 2)
    keys = np.unique(ends[:, 0] * count + ends[:, 1])
    p, q = keys // count, keys % count
    ap, aq = np.minimum(p ^ 1, q ^ 1), np.maximum(p ^ 1, q ^ 1)
    anti_keys = ap * count + aq
    rep = keys < anti_keys

    rep_p, rep_q = p[rep], q[rep]
    midpoints = vertices[rep_p] + vertices[rep_q]
    midpoints /= np.linalg.norm(midpoints, axis=1, keepdims=True)
    new_vertices = np.empty((count + 2 * midpoints.shape[0], m + 1))
    new_vertices[:count] = vertices
    new_vertices[count::2] = midpoints
    new_vertices[count + 1::2] = -midpoints

    rep_index = count + 2 * np.arange(midpoints.shape[0])
    lookup_keys = np.concatenate((keys[rep], anti_keys[rep]))
    lookup_vals = np.concatenate((rep_index, rep_index + 1))
    order = np.argsort(lookup_keys)
    lookup_keys, lookup_vals = lookup_keys[order], lookup_vals[order]

    def vertex_for(a: int, b: int) -> np.ndarray:
        if a == b:
            return simplices[:, a]
        lo = np.minimum(simplices[:, a], simplices[:, b])
        hi = np.maximum(simplices[:, a], simplices[:, b])
        return lookup_vals[np.searchsorted(lookup_keys, lo * count + hi)]

    children = np.stack(
        [np.stack([vertex_for(a, b) for a, b in template], axis=1) for template in templates],
        axis=1,
    )
    return SymmetricTriangulation(new_vertices, children.reshape(-1, m + 1), tri.level + 1)


def triangulate(m: int, level: int, max_simplices: int = DEFAULT_MAX_SIMPLICES) -> SymmetricTriangulation:
    """Cross-polytope boundary of S^m refined ``level`` times by edge midpoints."""
    if m < 1:
        raise ValueError(f"Sphere dimension must be >= 1, got {m}")
    if not 0 <= level <= MAX_LEVEL:
        raise ValueError(f"Refinement level must lie in [0, {MAX_LEVEL}], got {level}")
    expected = 2 ** (m + 1) * 2 ** (m * level)
    if expected > max_simplices:
        raise BudgetExceededError(
            f"Triangulation of S^{m} at level {level} needs {expected} simplices (budget {max_simplices})"
        )

    tri = _cross_polytope(m)
    templates = _freudenthal_templates(m)
    for _ in range(level):
        tri = _refine(tri, templates)
    logger.debug("Triangulated S^%d at level %d: %d vertices, %d simplices",
                 m, level, tri.vertices.shape[0], tri.simplices.shape[0])
    return tri

"""
Approximate zeros of odd maps F: S^m -> R^m

Stage one labels the vertices of an antipodally symmetric triangulation by
their dominant component and keeps simplices that carry a complementary pair
of labels. Stage two runs a tangent-space pattern search on ||F|| from each
candidate, with a finite-difference Newton polish that is only accepted when
it lowers the residual.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from ..errors import BudgetExceededError, OddnessContractError
from .sphere import SpherePoint, SymmetricTriangulation, positive_representative, triangulate

logger = logging.getLogger(__name__)

MIN_STEP = 1e-14
NEWTON_PROBE = 1e-7


@dataclass(frozen=True)
class ZeroFindConfig:
    """Search controls; ``abs_tol`` is the residual accepted as a zero.

    ``max_evaluations`` bounds the vertex and local-search evaluations of one
    ``find_zero`` call; the oddness samples and the final re-evaluation are
    not counted.
    """

    abs_tol: float = 1e-10
    max_refine_level: int = 8
    local_budget: int = 20_000
    max_evaluations: int = 5_000
    seed: int = 0
    max_candidates: int = 8
    max_simplices: int = 200_000
    workers: int = 1
    oddness_samples: int = 100
    oddness_tol: float = 1e-9
    newton_polish: bool = True

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_refine_level < 0:
            raise ValueError("max_refine_level must be non-negative")
        if self.local_budget < 1:
            raise ValueError("local_budget must be positive")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "abs_tol": self.abs_tol,
            "max_refine_level": self.max_refine_level,
            "local_budget": self.local_budget,
            "max_evaluations": self.max_evaluations,
            "seed": self.seed,
            "max_candidates": self.max_candidates,
            "max_simplices": self.max_simplices,
            "workers": self.workers,
            "oddness_samples": self.oddness_samples,
            "oddness_tol": self.oddness_tol,
            "newton_polish": self.newton_polish,
        }


class OddMap:
    """Continuous odd map S^m -> R^m given by an evaluator on unit vectors.

    Oddness is the caller's promise; ``find_zero`` samples it. Calls are
    counted, and the evaluator must tolerate concurrent use.
    """

    def __init__(self, dimension: int, evaluator: Callable[[SpherePoint], Sequence[float]]):
        if dimension < 1:
            raise ValueError(f"Odd map dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self._evaluator = evaluator
        self._lock = threading.Lock()
        self._calls = 0

    @property
    def evaluations(self) -> int:
        return self._calls

    def __call__(self, x: SpherePoint) -> np.ndarray:
        value = np.asarray(self._evaluator(x), dtype=float).reshape(-1)
        if value.size != self.dimension:
            raise ValueError(f"Evaluator returned {value.size} components, expected {self.dimension}")
        with self._lock:
            self._calls += 1
        return value

    def at(self, vector: np.ndarray) -> np.ndarray:
        return self(SpherePoint.normalized(vector))


@dataclass(frozen=True)
class ZeroResult:
    point: SpherePoint
    residual: Tuple[float, ...]
    residual_norm: float
    evaluations: int
    converged: bool


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> List:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def vertex_values(
    fmap: OddMap, tri: SymmetricTriangulation, workers: int = 1, known: Optional[np.ndarray] = None
) -> np.ndarray:
    """F at every vertex; only even vertices are evaluated, odd ones by oddness.

    ``known`` holds values for a prefix of the vertex table (coarser levels
    keep their vertex indices).
    """
    count = tri.vertices.shape[0]
    values = np.empty((count, fmap.dimension))
    start = 0
    if known is not None:
        start = known.shape[0]
        values[:start] = known
    evens = list(range(start, count, 2))
    results = _parallel_map(lambda i: fmap(SpherePoint(tuple(tri.vertices[i]))), evens, workers)
    for i, value in zip(evens, results):
        values[i] = value
        values[i + 1] = -value
    return values


def label_vertices(values: np.ndarray) -> np.ndarray:
    """+-(i+1) for the dominant component i (lowest index on ties)."""
    dominant = np.argmax(np.abs(values), axis=1)
    signs = np.where(values[np.arange(values.shape[0]), dominant] >= 0.0, 1, -1)
    return signs * (dominant + 1)


def complementary_simplices(tri: SymmetricTriangulation, labels: np.ndarray) -> np.ndarray:
    """Indices of simplices whose labels contain some pair {+i, -i}."""
    m = tri.dimension
    simplex_labels = labels[tri.simplices]
    rows = np.arange(tri.simplices.shape[0])
    positive = np.zeros((rows.size, m + 1), dtype=bool)
    negative = np.zeros((rows.size, m + 1), dtype=bool)
    for column in range(simplex_labels.shape[1]):
        lab = simplex_labels[:, column]
        positive[rows[lab > 0], lab[lab > 0]] = True
        negative[rows[lab < 0], -lab[lab < 0]] = True
    return np.flatnonzero(np.any(positive & negative, axis=1))


def _dedup_positive(vectors: np.ndarray) -> List[SpherePoint]:
    seen = set()
    points = []
    for vector in vectors:
        point = positive_representative(SpherePoint.normalized(vector))
        key = tuple(np.round(point.array, 12))
        if key not in seen:
            seen.add(key)
            points.append(point)
    return points


def coarse_candidates(
    fmap: OddMap,
    tri: SymmetricTriangulation,
    workers: int = 1,
    values: Optional[np.ndarray] = None,
) -> List[SpherePoint]:
    """Positive barycenters of complementary-labelled simplices, best first.

    Simplices are ranked by the smallest residual among their vertices, ties
    by table order.
    """
    if tri.dimension != fmap.dimension:
        raise ValueError(f"Triangulation of S^{tri.dimension} does not match map dimension {fmap.dimension}")
    if values is None:
        values = vertex_values(fmap, tri, workers)
    labels = label_vertices(values)
    chosen = complementary_simplices(tri, labels)
    if chosen.size == 0:
        return []

    norms = np.linalg.norm(values, axis=1)
    score = norms[tri.simplices[chosen]].min(axis=1)
    order = chosen[np.argsort(score, kind="stable")]
    barycenters = tri.vertices[tri.simplices[order]].sum(axis=1)
    return _dedup_positive(barycenters)


def _tangent_basis(x: np.ndarray) -> np.ndarray:
    return null_space(x[None, :])


def local_refine(
    fmap: OddMap,
    start: SpherePoint,
    cfg: ZeroFindConfig,
    initial_step: float = 0.1,
    budget: Optional[int] = None,
) -> ZeroResult:
    """Pattern search on ||F|| restricted to the sphere, renormalising after every move.

    ``budget`` defaults to ``cfg.local_budget``.
    """
    budget = cfg.local_budget if budget is None else budget
    used = 0

    def evaluate(vector: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        nonlocal used
        point = vector / np.linalg.norm(vector)
        value = fmap.at(point)
        used += 1
        return point, value, float(np.linalg.norm(value))

    x, fx, rx = evaluate(start.array)
    step = initial_step
    basis = _tangent_basis(x)

    while rx > cfg.abs_tol and used < budget and step > MIN_STEP:
        if cfg.newton_polish and used + basis.shape[1] + 1 <= budget:
            probe = max(NEWTON_PROBE, min(step, 1e-3) * 1e-3)
            jac = np.empty((fmap.dimension, basis.shape[1]))
            for i in range(basis.shape[1]):
                _, fi, _ = evaluate(x + probe * basis[:, i])
                jac[:, i] = (fi - fx) / probe
            delta, *_ = np.linalg.lstsq(jac, -fx, rcond=None)
            length = float(np.linalg.norm(delta))
            if length > step * 4.0:
                delta *= step * 4.0 / length
            y, fy, ry = evaluate(x + basis @ delta)
            if ry < rx:
                x, fx, rx = y, fy, ry
                basis = _tangent_basis(x)
                continue

        moved = False
        for i in range(basis.shape[1]):
            for sign in (1.0, -1.0):
                if used >= budget:
                    break
                y, fy, ry = evaluate(x + sign * step * basis[:, i])
                if ry < rx:
                    x, fx, rx = y, fy, ry
                    moved = True
                    break
            if moved or used >= budget:
                break
        if moved:
            basis = _tangent_basis(x)
            step = min(step * 2.0, 1.0)
        else:
            step *= 0.5

    converged = rx <= cfg.abs_tol
    logger.debug("local_refine: residual %.3e after %d evaluations (converged=%s)", rx, used, converged)
    return ZeroResult(SpherePoint(tuple(x)), tuple(float(v) for v in fx), rx, used, converged)


def check_oddness(fmap: OddMap, cfg: ZeroFindConfig) -> float:
    """Largest relative oddness defect over seeded random points; raises on violation."""
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.oddness_samples):
        point = SpherePoint.normalized(rng.normal(size=fmap.dimension + 1))
        value = fmap(point)
        defect = float(np.linalg.norm(fmap(point.antipode()) + value)) / (1.0 + float(np.linalg.norm(value)))
        worst = max(worst, defect)
        if defect > cfg.oddness_tol:
            raise OddnessContractError(
                f"Map is not odd: ||F(-x) + F(x)|| = {defect:.3e} at x = {point.coords}"
            )
    return worst


def _finalize(fmap: OddMap, result: ZeroResult, cfg: ZeroFindConfig) -> ZeroResult:
    point = positive_representative(result.point)
    residual = fmap(point)
    norm = float(np.linalg.norm(residual))
    return ZeroResult(
        point=point,
        residual=tuple(float(v) for v in residual),
        residual_norm=norm,
        evaluations=fmap.evaluations,
        converged=norm <= cfg.abs_tol,
    )


def find_zero(fmap: OddMap, cfg: ZeroFindConfig) -> ZeroResult:
    """Search levels 0..max_refine_level for a point with ||F|| <= abs_tol.

    A level is only labelled while its new vertices fit in half of the
    remaining evaluation budget; its candidates then share what is left. The
    best point seen gets the final remainder. The result is reported at its
    positive representative. Non-convergence returns the best point seen.
    """
    if cfg.oddness_samples > 0:
        check_oddness(fmap, cfg)
    baseline = fmap.evaluations

    def remaining() -> int:
        return cfg.max_evaluations - (fmap.evaluations - baseline)

    def accept(result: ZeroResult, level: int) -> Optional[ZeroResult]:
        if not result.converged:
            return None
        final = _finalize(fmap, result, cfg)
        if final.converged:
            logger.info("Zero found at level %d, residual %.3e after %d evaluations",
                        level, final.residual_norm, final.evaluations)
            return final
        return None

    best: Optional[ZeroResult] = None
    known: Optional[np.ndarray] = None
    level = 0
    for level in range(cfg.max_refine_level + 1):
        try:
            tri = triangulate(fmap.dimension, level, cfg.max_simplices)
        except BudgetExceededError as exc:
            logger.warning("Stopping refinement at level %d: %s", level, exc)
            break
        fresh = (tri.vertices.shape[0] - (0 if known is None else known.shape[0])) // 2
        if level > 0 and fresh > remaining() // 2:
            logger.info("Stopping refinement at level %d: %d vertex evaluations, %d left in the budget",
                        level, fresh, remaining())
            break

        values = vertex_values(fmap, tri, cfg.workers, known)
        known = values
        norms = np.linalg.norm(values, axis=1)
        starts = _dedup_positive(tri.vertices[np.flatnonzero(norms <= cfg.abs_tol)][:1])
        starts += coarse_candidates(fmap, tri, cfg.workers, values)
        starts = starts[: cfg.max_candidates]
        share = min(cfg.local_budget, remaining() // max(len(starts), 1))
        logger.debug("Level %d: %d candidates, %d evaluations each", level, len(starts), share)
        if share < 1:
            break

        initial_step = 0.5 ** (level + 1)
        results = _parallel_map(lambda s: local_refine(fmap, s, cfg, initial_step, share), starts, cfg.workers)
        for result in results:
            if best is None or result.residual_norm < best.residual_norm:
                best = result
            final = accept(result, level)
            if final is not None:
                return final

    if best is not None and remaining() > fmap.dimension + 1:
        polished = local_refine(fmap, best.point, cfg, 0.5 ** (level + 2), remaining())
        if polished.residual_norm < best.residual_norm:
            best = polished
        final = accept(polished, level)
        if final is not None:
            return final

    if best is None:
        fallback = SpherePoint(tuple([0.0] * fmap.dimension + [1.0]))
        best = ZeroResult(fallback, tuple(float(v) for v in fmap(fallback)), float("inf"), 0, False)
    logger.warning("No zero within tolerance %.3e; best residual %.3e after %d evaluations",
                   cfg.abs_tol, best.residual_norm, fmap.evaluations - baseline)
    final = _finalize(fmap, best, cfg)
    return replace(final, converged=False)

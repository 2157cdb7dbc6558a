"""
Functionals psi(h) and window-aware adaptive Gauss-Legendre quadrature

Integration cells are split at every breakpoint of the input functions and at
every transition window edge of the phase tree, then bisected adaptively.
Each panel compares the p-point rule with the floor(p/2)-point rule.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import AccuracyError, MalformedDocumentError
from .funcspace import PiecewiseFn
from .phase import PhaseTree, eval_h, transition_windows

logger = logging.getLogger(__name__)

LIPSCHITZ_SLACK = 1e-9

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadConfig:
    """Accuracy controls for the adaptive rule."""

    rel_tol: float = 1e-10
    max_depth: int = 40
    panel_order: int = 15

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol <= 1e-4:
            raise ValueError(f"rel_tol must lie in (0, 1e-4], got {self.rel_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be positive, got {self.max_depth}")
        if self.panel_order < 2:
            raise ValueError(f"panel_order must be at least 2, got {self.panel_order}")

    def tightened(self, factor: float = 10.0) -> "QuadConfig":
        return QuadConfig(self.rel_tol / factor, self.max_depth, self.panel_order)

    def to_dict(self) -> Dict[str, Any]:
        return {"rel_tol": self.rel_tol, "max_depth": self.max_depth, "panel_order": self.panel_order}


@lru_cache(maxsize=8)
def _rules(order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    high_x, high_w = leggauss(order)
    low_x, low_w = leggauss(max(1, order // 2))
    return high_x, high_w, low_x, low_w


def split_points(functions: Sequence[PiecewiseFn], tree: PhaseTree) -> np.ndarray:
    """Sorted cell edges: 0, 1, all f breakpoints and all window edges."""
    pieces: List[np.ndarray] = [np.array([0.0, 1.0])]
    pieces.extend(f.breakpoints for f in functions)
    windows = transition_windows(tree)
    if windows:
        pieces.append(np.array([e for w in windows for e in (w.left, w.center, w.right)]))
    edges = np.unique(np.clip(np.concatenate(pieces), 0.0, 1.0))
    return edges


def adaptive_integrate(
    integrand: Integrand,
    edges: np.ndarray,
    tolerance_density: np.ndarray,
    cfg: QuadConfig,
) -> np.ndarray:
    """Integrate a batch of J integrands over [edges[0], edges[-1]].

    ``integrand`` maps an array of N points to a (J, N) array. A panel is
    accepted once every component's error estimate is at most
    ``tolerance_density[j] * panel_width``.
    """
    high_x, high_w, low_x, low_w = _rules(cfg.panel_order)
    p, q = high_x.size, low_x.size
    tolerance_density = np.asarray(tolerance_density, dtype=float)

    left = np.asarray(edges[:-1], dtype=float)
    right = np.asarray(edges[1:], dtype=float)
    depth = np.zeros(left.size, dtype=int)
    total = np.zeros(tolerance_density.size, dtype=complex)
    worst_miss = 0.0
    rounds = 0

    while left.size:
        rounds += 1
        mid = 0.5 * (left + right)
        half = 0.5 * (right - left)
        nodes_high = (mid[:, None] + half[:, None] * high_x[None, :]).ravel()
        nodes_low = (mid[:, None] + half[:, None] * low_x[None, :]).ravel()
        values = np.asarray(integrand(np.concatenate((nodes_high, nodes_low))))
        values = values.reshape(tolerance_density.size, -1)
        panels = left.size

        est_high = (values[:, : panels * p].reshape(-1, panels, p) @ high_w) * half
        est_low = (values[:, panels * p:].reshape(-1, panels, q) @ low_w) * half
        error = np.abs(est_high - est_low)
        allowed = tolerance_density[:, None] * (right - left)[None, :]
        converged = np.all(error <= allowed, axis=0)
        exhausted = depth >= cfg.max_depth
        accept = converged | exhausted

        if np.any(exhausted & ~converged):
            worst_miss = max(worst_miss, float(np.max(error[:, exhausted & ~converged])))
        total += est_high[:, accept].sum(axis=1)

        keep = ~accept
        left, mid_k, right = left[keep], mid[keep], right[keep]
        depth = np.repeat(depth[keep] + 1, 2)
        left, right = (
            np.column_stack((left, mid_k)).ravel(),
            np.column_stack((mid_k, right)).ravel(),
        )

    if worst_miss > 0.0:
        raise AccuracyError(
            f"Quadrature reached max_depth={cfg.max_depth} with panel error {worst_miss:.3e}",
            estimate=total.copy(),
        )
    logger.debug("Adaptive quadrature finished in %d rounds", rounds)
    return total


def integrate_many(functions: Sequence[PiecewiseFn], tree: PhaseTree, cfg: QuadConfig) -> np.ndarray:
    """``integral_0^1 f_j h`` for every j, sharing the evaluations of h."""
    functions = list(functions)
    if not functions:
        return np.zeros(0, dtype=complex)

    def integrand(xs: np.ndarray) -> np.ndarray:
        h = np.asarray(eval_h(tree, xs))
        return np.stack([f.evaluate(xs) for f in functions]) * h[None, :]

    density = np.array([cfg.rel_tol * (1.0 + f.l1_norm()) for f in functions])
    return adaptive_integrate(integrand, split_points(functions, tree), density, cfg)


def integrate(f: PiecewiseFn, tree: PhaseTree, cfg: QuadConfig) -> complex:
    """``integral_0^1 f(x) h(x) dx`` with h the function of the tree."""
    return complex(integrate_many([f], tree, cfg)[0])


# ----------------------------------------------------------------------
# functionals
# ----------------------------------------------------------------------
class LinearMode(Enum):
    """How linear integrals become real components."""
    COMPLEX = "complex"
    REAL_PART = "real-part"


class Functional(ABC):
    """Odd, L1-continuous map from phase trees to R^m.

    Oddness (psi(-h) = -psi(h)) is a contract of subclasses; the zero
    finder samples it but cannot prove it.
    """

    @property
    @abstractmethod
    def output_dim(self) -> int:
        pass

    @abstractmethod
    def evaluate(self, tree: PhaseTree, cfg: QuadConfig) -> np.ndarray:
        pass

    def scale(self) -> float:
        """Magnitude used for scale-aware tolerances."""
        return 0.0


@dataclass(frozen=True)
class OddTerm:
    """weight * (Re integral base*h)^exponent, with an odd exponent."""

    base: PiecewiseFn
    exponent: int = 3
    weight: float = 1.0

    def __post_init__(self) -> None:
        if int(self.exponent) != self.exponent or self.exponent < 1 or self.exponent % 2 == 0:
            raise ValueError(f"Odd term exponent must be an odd positive integer, got {self.exponent}")
        object.__setattr__(self, "exponent", int(self.exponent))
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class FunctionalSpec(Functional):
    """Linear integrals against f_j plus optional odd power terms."""

    linear: Tuple[PiecewiseFn, ...]
    mode: LinearMode = LinearMode.COMPLEX
    odd_terms: Tuple[OddTerm, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "linear", tuple(self.linear))
        object.__setattr__(self, "odd_terms", tuple(self.odd_terms))
        object.__setattr__(self, "mode", LinearMode(self.mode))
        if self.output_dim < 1:
            raise ValueError("Functional must have at least one output component")

    @property
    def output_dim(self) -> int:
        per_function = 2 if self.mode is LinearMode.COMPLEX else 1
        return per_function * len(self.linear) + len(self.odd_terms)

    @property
    def is_linear(self) -> bool:
        return not self.odd_terms

    def scale(self) -> float:
        return float(sum(f.l1_norm() for f in self.linear) + sum(t.base.l1_norm() for t in self.odd_terms))

    def evaluate(self, tree: PhaseTree, cfg: QuadConfig) -> np.ndarray:
        bases = list(self.linear) + [term.base for term in self.odd_terms]
        integrals = integrate_many(bases, tree, cfg)
        linear = integrals[: len(self.linear)]
        if self.mode is LinearMode.COMPLEX:
            parts = np.column_stack((linear.real, linear.imag)).ravel()
        else:
            parts = linear.real.copy()
        odd = [
            term.weight * float(value.real) ** term.exponent
            for term, value in zip(self.odd_terms, integrals[len(self.linear):])
        ]
        return np.concatenate((parts, np.asarray(odd, dtype=float)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": 1,
            "linear": [f.to_dict() for f in self.linear],
            "mode": self.mode.value,
            "odd_terms": [
                {"base": t.base.to_dict(), "exponent": t.exponent, "weight": t.weight} for t in self.odd_terms
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FunctionalSpec":
        if not isinstance(data, dict) or "linear" not in data:
            raise MalformedDocumentError("Functional spec must be an object with a 'linear' list")
        try:
            mode = LinearMode(data.get("mode", LinearMode.COMPLEX.value))
        except ValueError as exc:
            raise MalformedDocumentError(f"Unknown functional mode: {data.get('mode')!r}") from exc
        linear = tuple(PiecewiseFn.from_dict(entry) for entry in data["linear"])
        terms = []
        for entry in data.get("odd_terms", []) or []:
            if not isinstance(entry, dict) or "base" not in entry:
                raise MalformedDocumentError("Odd term must be an object with a 'base' function")
            try:
                terms.append(OddTerm(PiecewiseFn.from_dict(entry["base"]),
                                     entry.get("exponent", 3), entry.get("weight", 1.0)))
            except (TypeError, ValueError) as exc:
                if isinstance(exc, MalformedDocumentError):
                    raise
                raise MalformedDocumentError(f"Invalid odd term: {exc}") from exc
        try:
            return cls(linear, mode, tuple(terms))
        except ValueError as exc:
            if isinstance(exc, MalformedDocumentError):
                raise
            raise MalformedDocumentError(str(exc)) from exc


def psi_eval(spec: Functional, tree: PhaseTree, cfg: QuadConfig) -> np.ndarray:
    """Real vector psi(h) of length spec.output_dim."""
    return np.asarray(spec.evaluate(tree, cfg), dtype=float)


def lipschitz_sides(
    spec: FunctionalSpec, tree_a: PhaseTree, tree_b: PhaseTree, cfg: QuadConfig
) -> Tuple[np.ndarray, np.ndarray]:
    """Per function: |psi_j(h_b) - psi_j(h_a)| and ``integral |f_j| |h_b - h_a|``."""
    if not spec.is_linear:
        raise ValueError("Lipschitz check applies to linear functionals only")
    functions = list(spec.linear)
    lhs = np.abs(integrate_many(functions, tree_b, cfg) - integrate_many(functions, tree_a, cfg))

    def integrand(xs: np.ndarray) -> np.ndarray:
        gap = np.abs(np.asarray(eval_h(tree_b, xs)) - np.asarray(eval_h(tree_a, xs)))
        return np.stack([np.abs(f.evaluate(xs)) for f in functions]) * gap[None, :]

    edges = np.union1d(split_points(functions, tree_a), split_points(functions, tree_b))
    density = np.array([cfg.rel_tol * (1.0 + f.l1_norm()) for f in functions])
    rhs = adaptive_integrate(integrand, edges, density, cfg).real
    return lhs, rhs


def lipschitz_check(spec: FunctionalSpec, tree_a: PhaseTree, tree_b: PhaseTree, cfg: QuadConfig) -> bool:
    """True iff |psi_j(h_b) - psi_j(h_a)| <= integral |f_j| |h_b - h_a| + 1e-9 for all j."""
    lhs, rhs = lipschitz_sides(spec, tree_a, tree_b, cfg)
    return bool(np.all(lhs <= rhs + LIPSCHITZ_SLACK))

"""
Phase trees: finite representations of nondecreasing phase functions g on [0,1]

Smooth trees are built from constants and tau-blends and give h = exp(i g).
Integer trees are built from integer constants and hard switches and give
h = (-1)^g. Trees are immutable; every evaluation is a pure vectorised call.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, List, Optional, Union

import numpy as np

from ..errors import MalformedDocumentError, OrderViolationError, UnsupportedKindError
from .smoothstep import SmoothStep, default_step

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

LEQ_GRID_POINTS = 4096
LEQ_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TransitionWindow:
    """Interval ``[center - half_width, center + half_width]`` where g may vary.

    Hard switches report a zero-width window at their switch point.
    """

    center: float
    half_width: float
    depth: int

    @property
    def left(self) -> float:
        return self.center - self.half_width

    @property
    def right(self) -> float:
        return self.center + self.half_width


class PhaseTree(ABC):
    """Base class of all phase tree nodes."""

    is_integer: ClassVar[bool] = False

    @abstractmethod
    def evaluate(self, xs: np.ndarray, step: SmoothStep) -> np.ndarray:
        """Evaluate g on an array of points."""

    @abstractmethod
    def shifted(self, k: int) -> "PhaseTree":
        """Copy with every leaf moved by k half-turns (or k integer steps)."""

    @abstractmethod
    def _collect_windows(self, depth: int, out: List[TransitionWindow]) -> None:
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return eval_g(self, x)

    @property
    def kind(self) -> str:
        return "integer" if self.is_integer else "smooth"


@dataclass(frozen=True)
class Const(PhaseTree):
    c: float

    def evaluate(self, xs: np.ndarray, step: SmoothStep) -> np.ndarray:
        return np.full(xs.shape, float(self.c))

    def shifted(self, k: int) -> "Const":
        return Const(self.c + k * math.pi)

    def _collect_windows(self, depth: int, out: List[TransitionWindow]) -> None:
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {"const": float(self.c)}


@dataclass(frozen=True)
class IntConst(PhaseTree):
    k: int
    is_integer: ClassVar[bool] = True

    def evaluate(self, xs: np.ndarray, step: SmoothStep) -> np.ndarray:
        return np.full(xs.shape, float(self.k))

    def shifted(self, k: int) -> "IntConst":
        return IntConst(self.k + int(k))

    def _collect_windows(self, depth: int, out: List[TransitionWindow]) -> None:
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {"int": int(self.k)}


@dataclass(frozen=True)
class Blend(PhaseTree):
    """``lo + tau((x - c(t)) / w) * (hi - lo)`` with c(t) = (1 + w) - t(1 + 2w).

    The window sits right of [0,1] at t = 0 and left of it at t = 1, so the
    blend equals lo resp. hi there exactly.
    """

    lo: PhaseTree
    hi: PhaseTree
    t: float
    w: float

    def __post_init__(self) -> None:
        if self.lo.is_integer or self.hi.is_integer:
            raise UnsupportedKindError("Blend children must be smooth trees")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"Blend parameter t must lie in [0,1], got {self.t}")
        if not 0.0 < self.w <= 1.0:
            raise ValueError(f"Blend width w must lie in (0,1], got {self.w}")

    @property
    def center(self) -> float:
        return (1.0 + self.w) - self.t * (1.0 + 2.0 * self.w)

    def evaluate(self, xs: np.ndarray, step: SmoothStep) -> np.ndarray:
        weight = np.asarray(step.tau((xs - self.center) / self.w))
        out = np.empty(xs.shape)
        low_part = weight < 1.0
        high_part = weight > 0.0
        lo_vals = np.zeros(xs.shape)
        hi_vals = np.zeros(xs.shape)
        if np.any(low_part):
            lo_vals[low_part] = self.lo.evaluate(xs[low_part], step)
        if np.any(high_part):
            hi_vals[high_part] = self.hi.evaluate(xs[high_part], step)
        mixed = low_part & high_part
        out[~high_part] = lo_vals[~high_part]
        out[~low_part] = hi_vals[~low_part]
        out[mixed] = lo_vals[mixed] + weight[mixed] * (hi_vals[mixed] - lo_vals[mixed])
        return out

    def shifted(self, k: int) -> "Blend":
        return Blend(self.lo.shifted(k), self.hi.shifted(k), self.t, self.w)

    def _collect_windows(self, depth: int, out: List[TransitionWindow]) -> None:
        center = self.center
        if center - self.w < 1.0 and center + self.w > 0.0:
            out.append(TransitionWindow(center, self.w, depth))
        self.lo._collect_windows(depth + 1, out)
        self.hi._collect_windows(depth + 1, out)

    def to_dict(self) -> Dict[str, Any]:
        return {"blend": {"lo": self.lo.to_dict(), "hi": self.hi.to_dict(), "t": float(self.t), "w": float(self.w)}}


@dataclass(frozen=True)
class HardSwitch(PhaseTree):
    """lo on [0, 1 - t), hi on [1 - t, 1]."""

    lo: PhaseTree
    hi: PhaseTree
    t: float
    is_integer: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if not (self.lo.is_integer and self.hi.is_integer):
            raise UnsupportedKindError("HardSwitch children must be integer trees")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"Switch parameter t must lie in [0,1], got {self.t}")

    @property
    def switch_point(self) -> float:
        return 1.0 - self.t

    def evaluate(self, xs: np.ndarray, step: SmoothStep) -> np.ndarray:
        left = xs < self.switch_point
        out = np.empty(xs.shape)
        if np.any(left):
            out[left] = self.lo.evaluate(xs[left], step)
        if np.any(~left):
            out[~left] = self.hi.evaluate(xs[~left], step)
        return out

    def shifted(self, k: int) -> "HardSwitch":
        return HardSwitch(self.lo.shifted(k), self.hi.shifted(k), self.t)

    def _collect_windows(self, depth: int, out: List[TransitionWindow]) -> None:
        if 0.0 <= self.switch_point <= 1.0:
            out.append(TransitionWindow(self.switch_point, 0.0, depth))
        self.lo._collect_windows(depth + 1, out)
        self.hi._collect_windows(depth + 1, out)

    def to_dict(self) -> Dict[str, Any]:
        return {"switch": {"lo": self.lo.to_dict(), "hi": self.hi.to_dict(), "t": float(self.t)}}


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------
def eval_g(tree: PhaseTree, x: ArrayLike, step: Optional[SmoothStep] = None) -> ArrayLike:
    """Phase g(x) for a scalar or an array of points in [0,1]."""
    xs = np.asarray(x, dtype=float)
    values = tree.evaluate(np.atleast_1d(xs), step or default_step())
    return float(values[0]) if xs.ndim == 0 else values.reshape(xs.shape)


def eval_h(tree: PhaseTree, x: ArrayLike, step: Optional[SmoothStep] = None) -> Union[complex, np.ndarray]:
    """h(x) = exp(i g(x)) for smooth trees, (-1)^g(x) for integer trees."""
    xs = np.asarray(x, dtype=float)
    g = tree.evaluate(np.atleast_1d(xs), step or default_step())
    if tree.is_integer:
        h = np.where(np.mod(np.rint(g), 2.0) == 0.0, 1.0, -1.0).astype(complex)
    else:
        h = np.exp(1j * g)
    return complex(h[0]) if xs.ndim == 0 else h.reshape(xs.shape)


def leq(a: PhaseTree, b: PhaseTree, step: Optional[SmoothStep] = None) -> bool:
    """Grid certificate for ``a <= b`` pointwise on [0,1]."""
    if a.is_integer != b.is_integer:
        raise UnsupportedKindError("Cannot compare smooth and integer trees")
    grid = [np.linspace(0.0, 1.0, LEQ_GRID_POINTS)]
    for window in transition_windows(a) + transition_windows(b):
        edges = np.array([window.left, window.center, window.right])
        if window.half_width == 0.0:
            edges = np.append(edges, np.nextafter(window.center, -np.inf))
        grid.append(np.clip(edges, 0.0, 1.0))
    xs = np.unique(np.concatenate(grid))
    step = step or default_step()
    return bool(np.all(a.evaluate(xs, step) <= b.evaluate(xs, step) + LEQ_TOLERANCE))


def blend(lo: PhaseTree, hi: PhaseTree, t: float, w: float, check: bool = True) -> PhaseTree:
    """The path from lo to hi at time t with window half-width w.

    Integer trees get a hard switch at 1 - t and w is ignored.
    """
    if lo.is_integer != hi.is_integer:
        raise UnsupportedKindError("Cannot blend smooth and integer trees")
    if check and not leq(lo, hi):
        raise OrderViolationError("blend requires lo <= hi pointwise")
    if lo.is_integer:
        return HardSwitch(lo, hi, float(t))
    return Blend(lo, hi, float(t), float(w))


def shift(tree: PhaseTree, k: int) -> PhaseTree:
    """g + k*pi for smooth trees, g + k for integer trees."""
    return tree.shifted(int(k))


def w11_norm(tree: PhaseTree) -> float:
    """W^{1,1} norm of exp(i g), i.e. 1 + g(1) - g(0) for nondecreasing g."""
    if tree.is_integer:
        raise UnsupportedKindError("W1,1 norm is undefined for integer-valued step functions")
    ends = tree.evaluate(np.array([0.0, 1.0]), default_step())
    return 1.0 + float(ends[1] - ends[0])


def transition_windows(tree: PhaseTree) -> List[TransitionWindow]:
    """Windows outside of which g is locally constant, sorted by center."""
    windows: List[TransitionWindow] = []
    tree._collect_windows(0, windows)
    windows.sort(key=lambda window: (window.center, window.depth))
    return windows


def switch_points(tree: PhaseTree) -> np.ndarray:
    """Sorted switch points of an integer tree inside (0,1)."""
    points = [w.center for w in transition_windows(tree) if w.half_width == 0.0 and 0.0 < w.center < 1.0]
    return np.unique(np.asarray(points, dtype=float))


def sign_changes(tree: PhaseTree) -> int:
    """Number of parity flips of an integer tree on (0,1)."""
    if not tree.is_integer:
        raise UnsupportedKindError("sign_changes needs an integer tree")
    edges = np.concatenate(([0.0], switch_points(tree), [1.0]))
    if edges.size <= 2:
        return 0
    mids = 0.5 * (edges[:-1] + edges[1:])
    parity = np.mod(np.rint(tree.evaluate(mids, default_step())), 2.0)
    return int(np.count_nonzero(np.diff(parity)))


def tree_from_dict(data: Dict[str, Any]) -> PhaseTree:
    """Inverse of ``PhaseTree.to_dict``."""
    if not isinstance(data, dict) or len(data) != 1:
        raise MalformedDocumentError(f"Phase tree node must be a single-key object, got {data!r}")
    (tag, body), = data.items()
    try:
        if tag == "const":
            return Const(float(body))
        if tag == "int":
            return IntConst(int(body))
        if tag == "blend":
            return Blend(tree_from_dict(body["lo"]), tree_from_dict(body["hi"]), float(body["t"]), float(body["w"]))
        if tag == "switch":
            return HardSwitch(tree_from_dict(body["lo"]), tree_from_dict(body["hi"]), float(body["t"]))
    except (KeyError, TypeError) as exc:
        raise MalformedDocumentError(f"Incomplete '{tag}' node: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, MalformedDocumentError):
            raise
        raise MalformedDocumentError(f"Invalid '{tag}' node: {exc}") from exc
    raise MalformedDocumentError(f"Unknown phase tree node '{tag}'")

"""
Input functions f_j on [0,1], their norms and the induced measure mu_f
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import (
    EmptyProblemError,
    MalformedDocumentError,
    MonotonicityError,
    OverlappingIntervalsError,
    ProblemFormatError,
    UnsupportedKindError,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Below this relative slope a linear cell is integrated by Simpson's rule;
# the closed form would lose digits to cancellation.
_FLAT_CELL_RATIO = 1e-6


class FunctionKind(Enum):
    """How a PiecewiseFn interprets its values."""
    CONSTANT_CELLS = "constant-cells"
    LINEAR_SAMPLES = "linear-samples"


def _linear_abs_integral(a: np.ndarray, b: np.ndarray, length: np.ndarray) -> np.ndarray:
    """Exact ``integral_0^L |a + (b - a) s / L| ds`` per cell, vectorised."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    length = np.asarray(length, dtype=float)
    delta = b - a
    scale = np.maximum(np.abs(a), np.abs(b))
    flat = np.abs(delta) <= _FLAT_CELL_RATIO * scale

    simpson = length / 6.0 * (np.abs(a) + 4.0 * np.abs(0.5 * (a + b)) + np.abs(b))

    # |a + d s| = |d| |s - z0| with z0 = -a/d = p + i q
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(flat, 1.0, delta / np.where(length > 0, length, 1.0))
        z0 = -a / slope
        p = z0.real
        q = np.abs(z0.imag)

        def antiderivative(u: np.ndarray) -> np.ndarray:
            root = np.sqrt(u * u + q * q)
            tail = np.where(q > 0, q * q * np.arcsinh(u / np.where(q > 0, q, 1.0)), 0.0)
            return 0.5 * (u * root + tail)

        exact = np.abs(slope) * (antiderivative(length - p) - antiderivative(-p))

    return np.where(flat, simpson, exact)


@dataclass(frozen=True, eq=False)
class PiecewiseFn:
    """Complex function on [0,1], piecewise constant or piecewise linear.

    ``values`` holds one entry per cell for CONSTANT_CELLS and one entry per
    breakpoint for LINEAR_SAMPLES.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    kind: FunctionKind = FunctionKind.CONSTANT_CELLS

    def __post_init__(self) -> None:
        try:
            bp = np.array(self.breakpoints, dtype=float).reshape(-1)
            vals = np.array(self.values, dtype=complex).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise MalformedDocumentError(f"Breakpoints/values are not numeric: {exc}") from exc
        kind = FunctionKind(self.kind)

        if bp.size < 2:
            raise MalformedDocumentError("A function needs at least two breakpoints")
        if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(vals)):
            raise MalformedDocumentError("Breakpoints and values must be finite")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise MonotonicityError(f"Breakpoints must run from 0 to 1, got {bp[0]!r}..{bp[-1]!r}")
        if not np.all(np.diff(bp) > 0):
            raise MonotonicityError("Breakpoints must be strictly increasing")

        expected = bp.size - 1 if kind is FunctionKind.CONSTANT_CELLS else bp.size
        if vals.size != expected:
            raise MalformedDocumentError(
                f"{kind.value} function with {bp.size} breakpoints needs {expected} values, got {vals.size}"
            )

        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "kind", kind)

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    @classmethod
    def constant(cls, value: complex) -> "PiecewiseFn":
        return cls(np.array([0.0, 1.0]), np.array([value], dtype=complex))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PiecewiseFn":
        """Build from the JSON record ``{"kind", "breakpoints", "values"}``."""
        if not isinstance(data, dict):
            raise MalformedDocumentError("Function entry must be an object")
        missing = [key for key in ("kind", "breakpoints", "values") if key not in data]
        if missing:
            raise MalformedDocumentError(f"Function entry misses {', '.join(missing)}")
        try:
            kind = FunctionKind(data["kind"])
        except ValueError as exc:
            raise MalformedDocumentError(f"Unknown function kind: {data['kind']!r}") from exc

        values = []
        for pair in data["values"]:
            if isinstance(pair, (int, float)):
                values.append(complex(pair, 0.0))
            elif isinstance(pair, (list, tuple)) and len(pair) == 2:
                values.append(complex(float(pair[0]), float(pair[1])))
            else:
                raise MalformedDocumentError(f"Value must be a number or [re, im] pair, got {pair!r}")
        return cls(np.asarray(data["breakpoints"], dtype=float), np.asarray(values, dtype=complex), kind)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    @property
    def cell_count(self) -> int:
        return self.breakpoints.size - 1

    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    def evaluate(self, x: ArrayLike) -> np.ndarray:
        """Evaluate at one point or an array of points in [0,1]."""
        xs = np.asarray(x, dtype=float)
        if self.kind is FunctionKind.CONSTANT_CELLS:
            idx = np.searchsorted(self.breakpoints, xs, side="right") - 1
            idx = np.clip(idx, 0, self.cell_count - 1)
            return self.values[idx]
        re = np.interp(xs, self.breakpoints, self.values.real)
        im = np.interp(xs, self.breakpoints, self.values.imag)
        return re + 1j * im

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self.evaluate(x)

    # ------------------------------------------------------------------
    # norms and integrals
    # ------------------------------------------------------------------
    def _restricted_cells(self, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
        inner = self.breakpoints[(self.breakpoints > a) & (self.breakpoints < b)]
        edges = np.concatenate(([a], inner, [b]))
        return edges[:-1], edges[1:]

    def abs_integral(self, a: float = 0.0, b: float = 1.0) -> float:
        """``integral_a^b |f(x)| dx``, exact per cell."""
        a = max(0.0, float(a))
        b = min(1.0, float(b))
        if b <= a:
            return 0.0
        left, right = self._restricted_cells(a, b)
        widths = right - left
        if self.kind is FunctionKind.CONSTANT_CELLS:
            mids = 0.5 * (left + right)
            return float(np.sum(np.abs(self.evaluate(mids)) * widths))
        return float(np.sum(_linear_abs_integral(self.evaluate(left), self.evaluate(right), widths)))

    def l1_norm(self) -> float:
        return self.abs_integral(0.0, 1.0)

    def sup_norm(self) -> float:
        # piecewise-linear |f| is convex per cell, so the max sits at a sample
        return float(np.max(np.abs(self.values)))

    def integral(self) -> complex:
        """``integral_0^1 f(x) dx``."""
        widths = np.diff(self.breakpoints)
        if self.kind is FunctionKind.CONSTANT_CELLS:
            return complex(np.sum(self.values * widths))
        return complex(np.sum(0.5 * (self.values[:-1] + self.values[1:]) * widths))

    # ------------------------------------------------------------------
    # algebra
    # ------------------------------------------------------------------
    def scaled(self, factor: complex) -> "PiecewiseFn":
        return PiecewiseFn(self.breakpoints, self.values * factor, self.kind)

    def real_part(self) -> "PiecewiseFn":
        return PiecewiseFn(self.breakpoints, self.values.real.astype(complex), self.kind)

    def imag_part(self) -> "PiecewiseFn":
        return PiecewiseFn(self.breakpoints, self.values.imag.astype(complex), self.kind)

    def __add__(self, other: "PiecewiseFn") -> "PiecewiseFn":
        if not isinstance(other, PiecewiseFn):
            return NotImplemented
        if other.kind is not self.kind:
            raise UnsupportedKindError(
                f"Cannot add {self.kind.value} and {other.kind.value} functions"
            )
        bp = np.union1d(self.breakpoints, other.breakpoints)
        if self.kind is FunctionKind.CONSTANT_CELLS:
            nodes = 0.5 * (bp[:-1] + bp[1:])
        else:
            nodes = bp
        return PiecewiseFn(bp, self.evaluate(nodes) + other.evaluate(nodes), self.kind)


def l1_norm(f: PiecewiseFn) -> float:
    """``||f||_1`` computed exactly."""
    return f.l1_norm()


@dataclass(frozen=True)
class Problem:
    """The functions to annihilate.

    ``real_valued`` may be left as ``None`` and is then inferred; an explicit
    flag must agree with the data.
    """

    functions: Tuple[PiecewiseFn, ...]
    real_valued: Optional[bool] = field(default=None)

    def __post_init__(self) -> None:
        functions = tuple(self.functions)
        if not functions:
            raise EmptyProblemError("Problem must contain at least one function")
        actual = all(f.is_real() for f in functions)
        if self.real_valued is not None and bool(self.real_valued) != actual:
            raise ProblemFormatError(
                f"real_valued={self.real_valued} contradicts the data (functions are "
                f"{'real' if actual else 'complex'})"
            )
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "real_valued", actual)

    @property
    def n(self) -> int:
        return len(self.functions)

    def total_l1(self) -> float:
        return float(sum(f.l1_norm() for f in self.functions))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": 1,
            "functions": [f.to_dict() for f in self.functions],
            "real_valued": self.real_valued,
        }


def mu_f(problem: Problem, intervals: Iterable[Tuple[float, float]]) -> float:
    """Measure with density ``sum_j |f_j|`` of a union of disjoint intervals.

    Intervals may touch at endpoints; proper overlaps are rejected.
    """
    spans = []
    for a, b in intervals:
        a, b = float(a), float(b)
        if a > b or a < 0.0 or b > 1.0:
            raise OverlappingIntervalsError(f"Interval [{a}, {b}] is not a subinterval of [0,1]")
        spans.append((a, b))
    spans.sort()
    for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
        if a1 < b0:
            raise OverlappingIntervalsError(f"Intervals [{a0}, {b0}] and [{a1}, {b1}] overlap")

    total = 0.0
    for a, b in spans:
        total += sum(f.abs_integral(a, b) for f in problem.functions)
    return total


# ----------------------------------------------------------------------
# fixtures with known lower bounds
# ----------------------------------------------------------------------
def constant_problem(value: complex = 1.0) -> Problem:
    """Single constant function."""
    return Problem((PiecewiseFn.constant(value),))


def disjoint_indicator_problem(n: int) -> Problem:
    """Indicators of the n equal consecutive subintervals of [0,1]."""
    if n < 1:
        raise EmptyProblemError("Need at least one indicator")
    bp = np.linspace(0.0, 1.0, n + 1)
    functions = []
    for j in range(n):
        cells = np.zeros(n, dtype=complex)
        cells[j] = 1.0
        functions.append(PiecewiseFn(bp, cells))
    return Problem(tuple(functions))

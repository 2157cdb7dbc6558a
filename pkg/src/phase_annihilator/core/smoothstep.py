"""
Smooth monotone transition tau built from the standard bump

tau(x) = 0 for x <= -1, 1 for x >= 1, and in between the normalised
cumulative integral of b(s) = exp(-1/(1 - s^2)). Values come from a
precomputed cumulative table interpolated by a monotone cubic Hermite spline
whose node slopes are the exact bump values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DEFAULT_RESOLUTION = 4096
_CELL_NODES = 20


def bump(s: ArrayLike) -> np.ndarray:
    """Unnormalised bump exp(-1/(1-s^2)) on (-1,1), zero elsewhere."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)


def _limit_slopes(x: np.ndarray, y: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson limiter: scale slopes so every cell stays monotone."""
    h = np.diff(x)
    secant = np.diff(y) / h
    flat = secant <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(flat, 0.0, slopes[:-1] / secant)
        beta = np.where(flat, 0.0, slopes[1:] / secant)
    radius = np.hypot(alpha, beta)
    factor = np.where(radius > 3.0, 3.0 / np.where(radius > 0, radius, 1.0), 1.0)

    node_factor = np.ones_like(slopes)
    node_factor[:-1] = factor
    node_factor[1:] = np.minimum(node_factor[1:], factor)
    limited = slopes * node_factor
    # cells with zero rise must have zero slopes at both ends
    limited[:-1][flat] = 0.0
    limited[1:][flat] = 0.0
    return limited


@dataclass(frozen=True)
class SmoothStep:
    """Tabulated smooth step.

    Only the left half [-1, 0] is tabulated; the right half follows from
    tau(x) = 1 - tau(-x), which therefore holds exactly.
    """

    resolution: int = DEFAULT_RESOLUTION
    normalization: float = field(init=False)
    table: np.ndarray = field(init=False, repr=False, compare=False)
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.resolution < 2 or self.resolution % 2:
            raise ValueError(f"Table resolution must be an even integer >= 2, got {self.resolution}")
        half = self.resolution // 2
        grid = np.linspace(-1.0, 0.0, half + 1)

        nodes, weights = leggauss(_CELL_NODES)
        left = grid[:-1, None]
        width = np.diff(grid)[:, None]
        points = left + 0.5 * width * (nodes[None, :] + 1.0)
        cells = 0.5 * width[:, 0] * (bump(points) @ weights)
        cumulative = np.concatenate(([0.0], np.cumsum(cells)))

        normalization = 2.0 * cumulative[-1]
        values = cumulative / normalization
        values[-1] = 0.5
        slopes = _limit_slopes(grid, values, bump(grid) / normalization)

        table = np.concatenate((values, 1.0 - values[-2::-1]))
        table.setflags(write=False)
        object.__setattr__(self, "normalization", float(normalization))
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_spline", CubicHermiteSpline(grid, values, slopes, extrapolate=False))
        logger.debug("SmoothStep table built: resolution=%d normalization=%.15g", self.resolution, normalization)

    @property
    def table_resolution(self) -> int:
        return self.resolution

    def _left(self, a: np.ndarray) -> np.ndarray:
        """tau on (-inf, 0]; a must already be <= 0."""
        out = np.zeros_like(a)
        inside = a > -1.0
        if np.any(inside):
            out[inside] = self._spline(a[inside])
        # the spline's endpoint value is only correct up to rounding
        out[a == 0.0] = 0.5
        return out

    def tau(self, x: ArrayLike) -> ArrayLike:
        xs = np.asarray(x, dtype=float)
        mag = -np.abs(np.atleast_1d(xs))
        left = self._left(mag)
        result = np.where(np.atleast_1d(xs) > 0.0, 1.0 - left, left)
        result = np.clip(result, 0.0, 1.0)
        return float(result[0]) if xs.ndim == 0 else result.reshape(xs.shape)

    def tau_prime(self, x: ArrayLike) -> ArrayLike:
        xs = np.asarray(x, dtype=float)
        result = bump(xs) / self.normalization
        return float(result) if xs.ndim == 0 else result


@lru_cache(maxsize=None)
def default_step() -> SmoothStep:
    """Shared step at the default resolution."""
    return SmoothStep()


def tau(step: SmoothStep, x: ArrayLike) -> ArrayLike:
    return step.tau(x)


def tau_prime(step: SmoothStep, x: ArrayLike) -> ArrayLike:
    return step.tau_prime(x)

"""
Shared fixtures and helpers for the test suite
"""

import numpy as np
import pytest

from src.phase_annihilator.core.funcspace import FunctionKind, PiecewiseFn


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run end-to-end solver tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end solves, skipped unless --runslow is given")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def random_function(rng, kind=FunctionKind.CONSTANT_CELLS, cells=5, complex_values=True):
    """Random PiecewiseFn with `cells` cells on random breakpoints."""
    inner = np.sort(rng.uniform(0.05, 0.95, size=cells - 1))
    while cells > 1 and np.min(np.diff(np.concatenate(([0.0], inner, [1.0])))) < 1e-3:
        inner = np.sort(rng.uniform(0.05, 0.95, size=cells - 1))
    breakpoints = np.concatenate(([0.0], inner, [1.0]))
    count = cells if kind is FunctionKind.CONSTANT_CELLS else cells + 1
    values = rng.normal(size=count)
    if complex_values:
        values = values + 1j * rng.normal(size=count)
    return PiecewiseFn(breakpoints, values, kind)


def per_cell_midpoint(f, integrand, total_panels=1_000_000):
    """Composite midpoint rule applied separately on every cell of f."""
    total = 0.0
    cells = f.cell_count
    per_cell = max(1, total_panels // cells)
    for a, b in zip(f.breakpoints[:-1], f.breakpoints[1:]):
        h = (b - a) / per_cell
        mids = a + h * (np.arange(per_cell) + 0.5)
        total = total + np.sum(integrand(mids)) * h
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

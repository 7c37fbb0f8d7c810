import functools

import numpy as np
import pytest

from isotet import GridDims, extract
from isotet.objects import make_object

METHODS = ("mc", "mt5", "mt6", "ccl")
TETRA_METHODS = ("mt5", "mt6", "ccl")

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def object_grid(name: str, n: int = 64, noise_seed: int = 0):
    dims = GridDims.cube(n)
    obj = make_object(name, dims, noise_seed=noise_seed)
    return obj, obj.grid(dims)


@functools.lru_cache(maxsize=None)
def object_mesh(name: str, method: str, n: int = 64, noise_seed: int = 0):
    _, grid = object_grid(name, n, noise_seed)
    return extract(grid, 0.0, method)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

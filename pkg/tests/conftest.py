"""Shared test fixtures for bdris tests."""

import json
import shutil
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    """Seeded generator; every test sees the same draws.

    Returns:
        numpy Generator backed by Philox
    """
    return np.random.Generator(np.random.Philox(20240101))


@pytest.fixture
def channels(rng):
    """Factory for unit-variance complex Gaussian channels.

    Usage:
        def test_something(channels):
            h_ri, h_it = channels(8, 2)

    Returns:
        Function ``(n, m) -> (h_ri, h_it)`` with shapes ``(n,)`` and ``(n, m)``
    """

    def _channels(n: int, m: int):
        h_ri = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        h_it = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        return h_ri, h_it

    return _channels


@pytest.fixture
def scenario_dict():
    """Small scenario document covering every architecture kind.

    Returns:
        Dictionary parsed from tests/fixtures/scenario.json
    """
    with open(FIXTURES / "scenario.json") as f:
        return json.load(f)


@pytest.fixture
def scenario_file(tmp_path):
    """Copy of the fixture scenario in a temporary directory.

    Returns:
        Path to the scenario JSON
    """
    path = tmp_path / "scenario.json"
    shutil.copy(FIXTURES / "scenario.json", path)
    return path


@pytest.fixture
def write_config(tmp_path):
    """Helper to write an arbitrary config document.

    Usage:
        def test_something(write_config):
            path = write_config({"trials": 2})

    Returns:
        Function writing a dict (or raw text) and returning its path
    """

    def _write(content, name="config.json"):
        path = tmp_path / name
        if isinstance(content, str):
            path.write_text(content)
        else:
            path.write_text(json.dumps(content))
        return path

    return _write

from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from simplex_infogeo.config import get_settings
from simplex_infogeo.simplex import Composition


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def random_comp(rng: np.random.Generator) -> Callable[[int], Composition]:
    """Closed composition with unit-rate exponential parts."""

    def _make(D: int) -> Composition:
        draws = rng.exponential(1.0, size=D)
        return Composition(draws / draws.sum())

    return _make


@pytest.fixture
def sample_csv(tmp_path):
    path = tmp_path / "samples.csv"
    path.write_text("sample,a,b,c\ns1,2,3,5\ns2,1,1,2\n", encoding="utf-8")
    return path

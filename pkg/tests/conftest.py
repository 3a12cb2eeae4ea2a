from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from vmulab.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 8) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


def random_graph(rng: np.random.Generator, n: int, p: float | None = None) -> Graph:
    p = rng.uniform(0.2, 0.8) if p is None else p
    return Graph.from_edges(n, [(a, b) for a, b in combinations(range(n), 2) if rng.random() < p])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodsis.model import EDGE_EPS
from nodsis.roots import SCAN_POINTS, bisect, dedupe, golden_section, grid_minimum, opinion_grid, scan_roots


def test_grid_spans_open_interval():
    g = opinion_grid()
    assert g.size == SCAN_POINTS
    assert g[0] == pytest.approx(-1 + EDGE_EPS, abs=0)
    assert g[-1] == pytest.approx(1 - EDGE_EPS, abs=0)
    assert np.all(np.diff(g) > 0)


def test_bisect_reaches_tolerance():
    r = bisect(lambda x: x * x - 2.0, 0.0, 2.0)
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-13)


def test_dedupe_merges_close_values():
    assert dedupe([0.1, 0.1 + 1e-10, 0.5]) == pytest.approx([0.1, 0.5])


def test_scan_roots_cubic():
    roots = scan_roots(lambda x: (x - 0.2) * (x + 0.5) * (x - 0.7))
    assert roots == pytest.approx([-0.5, 0.2, 0.7], abs=1e-12)


def test_scan_roots_none():
    assert scan_roots(lambda x: x * x + 1.0) == []


def test_golden_section_parabola():
    assert golden_section(lambda x: (x - 0.3) ** 2, -1.0, 1.0) == pytest.approx(0.3, abs=1e-6)


def test_grid_minimum_value():
    x, v = grid_minimum(lambda x: np.cosh(x - 0.25))
    assert x == pytest.approx(0.25, abs=1e-6)
    assert v == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.95, 0.95))
def test_linear_root_found(c):
    roots = scan_roots(lambda x: x - c)
    assert len(roots) == 1
    assert abs(roots[0] - c) < 1e-12

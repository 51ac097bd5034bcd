import numpy as np
import pytest
from hypothesis import given, strategies as st

from tempsim.analytic import (
    efficiency,
    efficiency_grid,
    efficiency_surface,
    infer_payload_fraction,
    precision_model,
    speedup_for_operand_ratio,
)


def test_speedup_examples():
    assert speedup_for_operand_ratio(1.0, 4) == 4.0
    assert speedup_for_operand_ratio(0.0, 4) == 1.0
    assert speedup_for_operand_ratio(0.890366, 4) == pytest.approx(3.01, abs=1e-5)
    assert precision_model(1.0, 4).speedup == 4.0


@pytest.mark.parametrize("f, r", [(-0.1, 4), (1.1, 4), (0.5, 0), (0.5, -2)])
def test_speedup_domain(f, r):
    with pytest.raises(ValueError):
        speedup_for_operand_ratio(f, r)


def test_infer_payload_fraction_examples():
    assert infer_payload_fraction(3.01, 4) == pytest.approx(0.890366, abs=1e-6)
    assert infer_payload_fraction(3.42, 4) == pytest.approx(0.943469, abs=1e-6)
    assert infer_payload_fraction(4.0, 4) == 1.0
    assert infer_payload_fraction(1.0, 4) == 0.0


@pytest.mark.parametrize("s, r", [(0.9, 4), (4.5, 4), (1.0, 1.0)])
def test_infer_payload_fraction_domain(s, r):
    with pytest.raises(ValueError):
        infer_payload_fraction(s, r)


@given(st.floats(0, 1), st.floats(1.01, 1e3))
def test_round_trip(f, r):
    s = speedup_for_operand_ratio(f, r)
    assert 1.0 <= s <= r * (1 + 1e-15)
    back = infer_payload_fraction(min(s, r), r)
    assert abs(back - f) <= 1e-12 * max(1.0, f)


@given(st.floats(0, 1), st.floats(1e-3, 1e3))
def test_speedup_never_exceeds_ratio(f, r):
    assert speedup_for_operand_ratio(f, r) <= max(r, 1.0) * (1 + 1e-12)


def test_operand_length_marginal_for_small_payload():
    assert speedup_for_operand_ratio(0.05, 4) - speedup_for_operand_ratio(0.05, 1) < 0.04


def test_efficiency_examples():
    assert efficiency(1, 0.3) == 1.0
    assert efficiency(12345, 1.0) == 1.0
    assert efficiency(1e6, 1 - 1e-7) == pytest.approx(0.909091, abs=1e-6)


@pytest.mark.parametrize("n, alpha", [(0.5, 0.9), (2, 1.5), (2, -0.1)])
def test_efficiency_domain(n, alpha):
    with pytest.raises(ValueError):
        efficiency(n, alpha)


@given(st.floats(1, 1e7), st.floats(1, 1e7), st.floats(0, 0.999999))
def test_efficiency_monotone(n1, n2, alpha):
    lo, hi = sorted((n1, n2))
    assert efficiency(hi, alpha) <= efficiency(lo, alpha)
    if hi > lo * (1 + 1e-9) and alpha < 0.99:
        assert efficiency(hi, alpha) < efficiency(lo, alpha)


@given(st.floats(2, 1e6), st.floats(0, 1), st.floats(0, 1))
def test_efficiency_increasing_in_alpha(n, a1, a2):
    lo, hi = sorted((a1, a2))
    assert efficiency(n, lo) <= efficiency(n, hi)


def test_surface_examples():
    assert [p.e for p in efficiency_surface([1], [0])] == [1.0]
    assert [p.e for p in efficiency_surface([10, 100], [0.01])] == pytest.approx([0.9174, 0.5025], abs=1e-4)
    grid = efficiency_grid([1, 10, 100], [1e-7, 1e-2])
    assert grid.shape == (3, 2)
    assert np.all(grid[0] == 1.0)
    assert np.all(np.diff(grid, axis=0) <= 0)


def test_surface_row_major():
    points = efficiency_surface([1, 2], [0.1, 0.2, 0.3])
    assert [(p.n, p.one_minus_alpha) for p in points] == [
        (1.0, 0.1), (1.0, 0.2), (1.0, 0.3), (2.0, 0.1), (2.0, 0.2), (2.0, 0.3)]


@pytest.mark.parametrize("n, oma", [([], [0.1]), ([1], []), ([0.5], [0.1]), ([2], [1.5])])
def test_surface_domain(n, oma):
    with pytest.raises(ValueError):
        efficiency_surface(n, oma)

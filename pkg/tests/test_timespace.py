import math

import pytest
from hypothesis import given, strategies as st

from tempsim.timespace import (
    ApparentTime,
    SpeedFactor,
    TimePoint,
    apparent_time,
    apparent_time_ratio,
    to_time_coordinates,
    transfer_time,
)

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
coord = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_to_time_coordinates():
    # light covers 300 m in one microsecond
    assert to_time_coordinates(300.0, 3e8) == pytest.approx(1e-6, abs=1e-18)
    assert to_time_coordinates(0.0, 123.0) == 0.0
    assert to_time_coordinates(1.0, 2.0) == 0.5


@pytest.mark.parametrize("distance, speed", [(-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_to_time_coordinates_domain(distance, speed):
    with pytest.raises(ValueError):
        to_time_coordinates(distance, speed)


def test_transfer_time_examples():
    assert transfer_time((-0.5, 0), (0, 0.5), 1.0) == pytest.approx(0.7071068, abs=1e-7)
    assert transfer_time((0, 0), (0, 0), 1.0) == 0.0
    assert transfer_time((0, 0), (1, 0), 0.5) == 2.0
    assert transfer_time(TimePoint(0, 0), TimePoint(3, 4), SpeedFactor(1.0)) == 5.0


@given(coord, coord, coord, coord, pos)
def test_transfer_time_symmetric_and_inverse_in_speed(ax, ay, bx, by, speed):
    a, b = (ax, ay), (bx, by)
    base = transfer_time(a, b, 1.0)
    assert transfer_time(a, b, speed) == transfer_time(b, a, speed)
    assert transfer_time(a, b, speed) == pytest.approx(base / speed, rel=1e-12, abs=1e-12)


def test_timepoint_and_speed_validation():
    with pytest.raises(ValueError):
        TimePoint(math.inf, 0)
    with pytest.raises(ValueError):
        SpeedFactor(0.0)
    with pytest.raises(ValueError):
        transfer_time((0, 0), (1, 0), 0.0)


def test_apparent_time_examples():
    assert apparent_time(1, 1).t_a == pytest.approx(3.1622777, abs=1e-7)
    assert apparent_time(1, 0).t_a == 2.0
    assert apparent_time(0, 1).t_a == pytest.approx(math.sqrt(2), abs=1e-12)
    res = apparent_time(2.0, 1.0)
    assert isinstance(res, ApparentTime)
    assert res.r == 0.5
    assert apparent_time(0, 1).r is None


def test_apparent_time_degenerate():
    with pytest.raises(ValueError):
        apparent_time(0, 0)
    with pytest.raises(ValueError):
        apparent_time(-1, 1)


def test_apparent_time_ratio_examples():
    assert apparent_time_ratio(1.0) == pytest.approx(3.1622777, abs=1e-7)
    assert apparent_time_ratio(0.0) == 2.0
    assert apparent_time_ratio(2.0) == pytest.approx(4.4721360, abs=1e-7)
    with pytest.raises(ValueError):
        apparent_time_ratio(-0.1)


@given(pos, st.floats(min_value=0, max_value=1e3))
def test_closed_form_consistency(t_p, t_t):
    t_a = apparent_time(t_p, t_t).t_a
    assert t_a == pytest.approx(t_p * apparent_time_ratio(t_t / t_p), rel=1e-12)
    assert t_a >= max(2 * t_p, math.sqrt(2) * t_t) * (1 - 1e-15)


@given(pos, pos, st.floats(min_value=1e-3, max_value=10))
def test_strictly_monotone(t_p, t_t, bump):
    base = apparent_time(t_p, t_t).t_a
    assert apparent_time(t_p + bump, t_t).t_a > base
    assert apparent_time(t_p, t_t + bump).t_a > base


@given(st.floats(min_value=0.01, max_value=100), st.floats(min_value=0.01, max_value=100))
def test_convex_in_transfer_time(t_p, t_t):
    def f(x):
        return apparent_time(t_p, x).t_a

    assert f(2 * t_t) - f(t_t) > f(t_t) - f(t_t / 2)


def test_convexity_reference_point():
    slower = apparent_time(1, 2).t_a - apparent_time(1, 1).t_a
    faster = apparent_time(1, 1).t_a - apparent_time(1, 0.5).t_a
    assert slower == pytest.approx(4.4721360 - 3.1622777, abs=1e-6)
    assert faster == pytest.approx(3.1622777 - 2.5495098, abs=1e-6)
    assert slower > faster

"""Time-space arithmetic.

Positions are stored as times: a physical distance divided by the
interaction speed. Everything in this module is a pure function over
immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "TimePoint",
    "SpeedFactor",
    "ApparentTime",
    "to_time_coordinates",
    "transfer_time",
    "apparent_time",
    "apparent_time_ratio",
]


@dataclass(frozen=True)
class TimePoint:
    """A 2-D position whose coordinates are already in time units."""

    x: float
    y: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"TimePoint coordinates must be finite, got ({self.x}, {self.y})")

    @classmethod
    def of(cls, value) -> "TimePoint":
        if isinstance(value, TimePoint):
            return value
        x, y = value
        return cls(float(x), float(y))

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class SpeedFactor:
    """Multiplier of the scenario's unit interaction speed."""

    value: float = 1.0

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError(f"speed factor must be positive and finite, got {self.value}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ApparentTime:
    t_p: float
    t_t: float
    t_a: float
    r: float | None


def _speed(speed) -> float:
    value = float(speed)
    if not value > 0:
        raise ValueError(f"speed must be positive, got {value}")
    return value


def to_time_coordinates(distance: float, interaction_speed: float) -> float:
    """Convert a physical length into a time coordinate."""
    if distance < 0:
        raise ValueError(f"distance must be non-negative, got {distance}")
    if not interaction_speed > 0:
        raise ValueError(f"interaction speed must be positive, got {interaction_speed}")
    return distance / interaction_speed


def transfer_time(a, b, speed=1.0) -> float:
    """Propagation time between two time-space points at ``speed``."""
    a = TimePoint.of(a)
    b = TimePoint.of(b)
    return math.hypot(b.x - a.x, b.y - a.y) / _speed(speed)


def apparent_time_ratio(r: float) -> float:
    """T_A / T_p as a function of R = T_t / T_p."""
    if r < 0:
        raise ValueError(f"ratio must be non-negative, got {r}")
    return math.hypot(r, 2.0 + r)


def apparent_time(t_p: float, t_t: float) -> ApparentTime:
    """Apparent duration of a process/transfer/process chain.

    The observer lights up at ``2*t_p + t_t``; the apparent time is the
    length of the vector from the origin event to that point, whose
    horizontal leg is the transfer time.
    """
    if t_p < 0 or t_t < 0:
        raise ValueError(f"times must be non-negative, got t_p={t_p}, t_t={t_t}")
    if t_p == 0 and t_t == 0:
        raise ValueError("degenerate input: no processing and no transfer is not an event")
    t_a = math.hypot(t_t, 2.0 * t_p + t_t)
    r = t_t / t_p if t_p > 0 else None
    return ApparentTime(t_p=t_p, t_t=t_t, t_a=t_a, r=r)

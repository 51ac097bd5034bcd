"""Closed-form performance models.

- operand-length speedup: only the payload share of the runtime scales
  with the operand-length ratio, the non-payload share stays fixed;
- efficiency of N units when a fraction (1 - alpha) of the work is
  non-payload: E = 1 / (alpha + (1 - alpha) * N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PrecisionModel",
    "EfficiencyPoint",
    "speedup_for_operand_ratio",
    "infer_payload_fraction",
    "precision_model",
    "efficiency",
    "efficiency_grid",
    "efficiency_surface",
]


@dataclass(frozen=True)
class PrecisionModel:
    f: float
    r: float
    speedup: float


@dataclass(frozen=True)
class EfficiencyPoint:
    n: float
    alpha: float
    e: float
    # kept as given; 1 - alpha loses digits for tiny non-payload shares
    one_minus_alpha: float


def _check_fraction(value, label):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{label} must be in [0, 1], got {value}")


def speedup_for_operand_ratio(f: float, r: float) -> float:
    """Speedup when the payload fraction ``f`` of the runtime gets ``r`` times faster."""
    _check_fraction(f, "payload fraction")
    if not r > 0:
        raise ValueError(f"operand-length ratio must be > 0, got {r}")
    return 1.0 / ((1.0 - f) + f / r)


def infer_payload_fraction(speedup: float, r: float) -> float:
    """Invert :func:`speedup_for_operand_ratio` for the payload fraction."""
    if not r > 1:
        raise ValueError(f"payload fraction is only identifiable for r > 1, got {r}")
    if not 1.0 <= speedup <= r:
        raise ValueError(f"speedup {speedup} outside the model range [1, {r}]")
    return (1.0 - 1.0 / speedup) / (1.0 - 1.0 / r)


def precision_model(f: float, r: float) -> PrecisionModel:
    return PrecisionModel(f=f, r=r, speedup=speedup_for_operand_ratio(f, r))


def _efficiency(n, one_minus_alpha):
    # same as 1/(alpha + (1-alpha)*n), but exact at n=1 and alpha=1
    return 1.0 / (1.0 + one_minus_alpha * (n - 1.0))


def efficiency(n: float, alpha: float) -> float:
    """Efficiency of ``n`` processing units at payload fraction ``alpha``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_fraction(alpha, "alpha")
    return float(_efficiency(float(n), 1.0 - alpha))


def efficiency_grid(n_values, one_minus_alpha_values) -> np.ndarray:
    """Efficiency on the grid, shape ``(len(n_values), len(one_minus_alpha_values))``."""
    n = np.asarray(n_values, dtype=float)
    oma = np.asarray(one_minus_alpha_values, dtype=float)
    if n.ndim != 1 or oma.ndim != 1 or n.size == 0 or oma.size == 0:
        raise ValueError("n_values and one_minus_alpha_values must be non-empty 1-D sequences")
    if np.any(n < 1):
        raise ValueError("n values must be >= 1")
    if np.any((oma < 0) | (oma > 1)):
        raise ValueError("one_minus_alpha values must be in [0, 1]")
    return _efficiency(n[:, None], oma[None, :])


def efficiency_surface(n_values, one_minus_alpha_values) -> list[EfficiencyPoint]:
    """Row-major (n outer, 1 - alpha inner) list of efficiency points."""
    grid = efficiency_grid(n_values, one_minus_alpha_values)
    return [
        EfficiencyPoint(float(n), 1.0 - float(oma), float(grid[i, j]), float(oma))
        for i, n in enumerate(n_values)
        for j, oma in enumerate(one_minus_alpha_values)
    ]

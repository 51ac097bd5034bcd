"""Time-space temporal simulator and analytic toolkit for computing components."""

from .analytic import (
    efficiency,
    efficiency_surface,
    infer_payload_fraction,
    speedup_for_operand_ratio,
)
from .engine import payload_fraction, run, utilization
from .model import (
    ComponentSpec,
    Kind,
    Scenario,
    ScenarioError,
    SignalEvent,
    SimulationError,
    SimulationResult,
    State,
    TraceInterval,
)
from .scenarios import simulate
from .timespace import (
    ApparentTime,
    SpeedFactor,
    TimePoint,
    apparent_time,
    apparent_time_ratio,
    to_time_coordinates,
    transfer_time,
)

__version__ = "0.1.0"

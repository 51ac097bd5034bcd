"""Shared value types: components, signals, scenarios, traces."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .timespace import TimePoint

__all__ = [
    "State",
    "Kind",
    "SIGNAL_KINDS",
    "ComponentSpec",
    "SignalEvent",
    "Scenario",
    "TraceInterval",
    "SimulationResult",
    "ScenarioError",
    "ScenarioSyntaxError",
    "SchemaError",
    "DuplicateIdError",
    "DanglingReferenceError",
    "LivelockError",
    "SimulationError",
]


class State(str, enum.Enum):
    PAYLOAD = "payload"
    TRANSFER_WAIT = "transfer_wait"
    ARBITRATION = "arbitration"
    BLOCKED = "blocked"
    IDLE = "idle"

    def __str__(self):
        return self.value


class Kind(str, enum.Enum):
    SOURCE = "source"
    GATE = "gate"
    PROCESSING_UNIT = "processing_unit"
    BUS_ARBITER = "bus_arbiter"
    CACHE = "cache"
    COORDINATOR = "coordinator"
    WORKER = "worker"
    NEURON = "neuron"
    SINK = "sink"

    def __str__(self):
        return self.value


SIGNAL_KINDS = ("data", "request", "grant", "result")


class ScenarioError(ValueError):
    """Base class for invalid scenario input."""


class ScenarioSyntaxError(ScenarioError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(ScenarioError):
    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class DuplicateIdError(ScenarioError):
    def __init__(self, message, ident=None):
        super().__init__(message)
        self.ident = ident


class DanglingReferenceError(ScenarioError):
    def __init__(self, message, ident=None):
        super().__init__(message)
        self.ident = ident


class SimulationError(RuntimeError):
    pass


class LivelockError(SimulationError):
    def __init__(self, message, cycle=()):
        super().__init__(message)
        self.cycle = tuple(cycle)


@dataclass(frozen=True)
class ComponentSpec:
    """A simulated element.

    ``inputs`` lists the ids of the components whose outputs this one
    consumes; fan-out is derived from it. ``params`` carries the
    kind-specific numbers:

    - ``speed``: speed factor of signals arriving here (default 1)
    - ``t_msg``: serialization time of each outgoing message (default 0)
    - ``bus``: id of the bus arbiter outgoing data must win first
    - ``server``: id of a cache/worker to send a request to after firing
    - ``t_dispatch``, ``t_recv``: coordinator overheads per task
    """

    id: int
    kind: Kind
    position: TimePoint = TimePoint(0.0, 0.0)
    t_p: float = 0.0
    name: str = ""
    op: str | None = None
    inputs: tuple[int, ...] = ()
    params: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "position", TimePoint.of(self.position))
        object.__setattr__(self, "inputs", tuple(int(i) for i in self.inputs))
        if not self.name:
            object.__setattr__(self, "name", f"{self.kind.value}{self.id}")
        if not (self.t_p >= 0 and math.isfinite(self.t_p)):
            raise ScenarioError(f"component {self.id}: t_p must be finite and >= 0, got {self.t_p}")

    def param(self, key, default=None):
        return self.params.get(key, default)


@dataclass(frozen=True)
class SignalEvent:
    """A timed message. ``source=None`` marks an external stimulus."""

    id: int
    source: int | None
    dest: int
    emit_time: float
    kind: str = "data"
    payload_bits: tuple[bool, ...] | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ScenarioError(f"signal {self.id}: unknown kind {self.kind!r}")
        if not (self.emit_time >= 0 and math.isfinite(self.emit_time)):
            raise ScenarioError(f"signal {self.id}: emit_time must be finite and >= 0, got {self.emit_time}")
        if self.source is not None and self.source == self.dest:
            raise ScenarioError(f"signal {self.id}: self-addressed signals are not allowed")
        if self.payload_bits is not None:
            object.__setattr__(self, "payload_bits", tuple(bool(b) for b in self.payload_bits))


@dataclass(frozen=True)
class Scenario:
    name: str
    components: tuple[ComponentSpec, ...]
    stimuli: tuple[SignalEvent, ...] = ()
    speed: float = 1.0
    expected_metrics: dict | None = field(default=None, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "stimuli", tuple(self.stimuli))
        object.__setattr__(self, "speed", float(self.speed))

    def component(self, key) -> ComponentSpec:
        for comp in self.components:
            if comp.id == key or comp.name == key:
                return comp
        raise KeyError(key)

    def validate(self):
        """Check ids are unique and every reference resolves."""
        if not self.speed > 0:
            raise SchemaError(f"speed must be positive, got {self.speed}", path="speed")
        seen = {}
        names = set()
        for comp in self.components:
            if comp.id in seen:
                raise DuplicateIdError(f"duplicate component id {comp.id}", ident=comp.id)
            if comp.name in names:
                raise DuplicateIdError(f"duplicate component name {comp.name!r}", ident=comp.name)
            seen[comp.id] = comp
            names.add(comp.name)
        for comp in self.components:
            refs = [("inputs", i) for i in comp.inputs]
            refs += [(key, int(comp.params[key])) for key in ("bus", "server") if key in comp.params]
            for what, ref in refs:
                if ref not in seen:
                    raise DanglingReferenceError(
                        f"component {comp.id} ({comp.name}) {what} references unknown id {ref}",
                        ident=ref,
                    )
            if comp.kind is Kind.GATE:
                from .components import GateKind

                GateKind(comp.op).check_arity(len(comp.inputs))
        event_ids = set()
        for ev in self.stimuli:
            if ev.id in event_ids:
                raise DuplicateIdError(f"duplicate stimulus id {ev.id}", ident=ev.id)
            event_ids.add(ev.id)
            for ref in (ev.source, ev.dest):
                if ref is not None and ref not in seen:
                    raise DanglingReferenceError(
                        f"stimulus {ev.id} references unknown component {ref}", ident=ref
                    )
        return self


@dataclass(frozen=True)
class TraceInterval:
    component: int
    start: float
    end: float
    state: State
    detail: str = ""

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class SimulationResult:
    makespan: float
    trace: list[TraceInterval]
    utilization: dict[int, dict[str, float]]
    metrics: dict[str, float] = field(default_factory=dict)
    names: dict[int, str] = field(default_factory=dict)
    positions: dict[int, TimePoint] = field(default_factory=dict)
    kinds: dict[int, Kind] = field(default_factory=dict)
    # (signal, arrival time) in delivery order
    deliveries: list[tuple[SignalEvent, float]] = field(default_factory=list)
    # delivered signals no component ever consumed (e.g. an incomplete input set)
    unconsumed: list[SignalEvent] = field(default_factory=list)

    def resolve(self, component) -> int:
        if component in self.names:
            return component
        for cid, name in self.names.items():
            if name == component:
                return cid
        raise KeyError(f"unknown component {component!r}")

    def intervals(self, component) -> list[TraceInterval]:
        cid = self.resolve(component)
        return [iv for iv in self.trace if iv.component == cid]

"""Behavioral models for gates, processing units, buses, caches and coordinators.

Each ``*Behavior`` class is a small state machine driven by the engine's
event loop. The module-level functions (``gate_settle``, ``bus_transfer``,
``cache_access``) are closed-form versions of the same rules, usable
without running a simulation.
"""

from __future__ import annotations

import enum
import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace

from . import engine
from .model import (
    ComponentSpec,
    Kind,
    Scenario,
    ScenarioError,
    SignalEvent,
    SimulationError,
    SimulationResult,
    State,
)
from .timespace import TimePoint, transfer_time

__all__ = [
    "GateKind",
    "BusProtocolState",
    "gate_evaluate",
    "gate_settle",
    "gate_output_at",
    "bus_transfer",
    "cache_access",
    "dispatch_and_collect",
    "distributed_scenario",
    "distributed_metrics",
    "make_behavior",
    "ComponentSpec",
]


class GateKind(str, enum.Enum):
    AND = "AND"
    OR = "OR"
    XOR = "XOR"
    NOT = "NOT"

    @property
    def arity(self) -> int:
        return 1 if self is GateKind.NOT else 2

    def check_arity(self, n: int):
        if n != self.arity:
            raise ScenarioError(f"{self.value} gate takes {self.arity} input(s), got {n}")


def gate_evaluate(kind, inputs) -> bool:
    """Truth-table value of ``kind`` applied to ``inputs``."""
    kind = GateKind(kind)
    inputs = [bool(v) for v in inputs]
    kind.check_arity(len(inputs))
    if kind is GateKind.NOT:
        return not inputs[0]
    a, b = inputs
    if kind is GateKind.AND:
        return a and b
    if kind is GateKind.OR:
        return a or b
    return a != b


def gate_settle(gate: ComponentSpec, input_arrivals) -> tuple[float, bool]:
    """Output-valid time and value of ``gate`` given ``(time, value)`` arrivals.

    The output is undefined until the last input has arrived and the gate
    has spent its processing time on it.
    """
    kind = GateKind(gate.op)
    arrivals = list(input_arrivals)
    if len(arrivals) != kind.arity:
        raise ValueError(f"{kind.value} gate needs {kind.arity} input(s), got {len(arrivals)}")
    last = max(t for t, _ in arrivals)
    return last + gate.t_p, gate_evaluate(kind, [v for _, v in arrivals])


def gate_output_at(gate: ComponentSpec, input_arrivals, t: float):
    """Read the gate output at time ``t``; ``None`` while it is undefined."""
    valid, value = gate_settle(gate, input_arrivals)
    return value if t >= valid else None


@dataclass
class BusProtocolState:
    """FIFO arbitration state of one shared medium."""

    arbiter: TimePoint = TimePoint(0.0, 0.0)
    speed: float = 1.0
    queue: list = field(default_factory=list)
    busy_until: float = 0.0
    grants_issued: int = 0
    last_request_arrival: float = -math.inf


def bus_transfer(bus: BusProtocolState, request: SignalEvent, sender_pos, dest_pos, t_msg: float) -> float:
    """Deliver one message over the shared medium and return its arrival time.

    The request travels to the arbiter, waits for the bus, the grant travels
    back, and the bus stays occupied until the whole message has reached
    ``dest_pos``. Calls must come in request-arrival order (ties broken
    by the caller, lower component id first).
    """
    if t_msg < 0:
        raise ValueError(f"t_msg must be >= 0, got {t_msg}")
    to_arbiter = transfer_time(sender_pos, bus.arbiter, bus.speed)
    arrival = request.emit_time + to_arbiter
    if arrival < bus.last_request_arrival:
        raise ValueError("requests must be presented in arrival order")
    bus.last_request_arrival = arrival
    bus.queue.append(request.id)
    grant = max(arrival, bus.busy_until)
    delivery = grant + to_arbiter + t_msg + transfer_time(sender_pos, dest_pos, bus.speed)
    bus.busy_until = delivery
    bus.grants_issued += 1
    return delivery


def cache_access(core: ComponentSpec, cache: ComponentSpec, request_time: float,
                 speed: float = 1.0, busy_until: float = 0.0) -> float:
    """Time the response reaches ``core``; ``busy_until`` models a cache still serving someone else."""
    t_t = transfer_time(core.position, cache.position, speed)
    start = max(request_time + t_t, busy_until)
    return start + cache.t_p + t_t


# ---------------------------------------------------------------------------
# engine behaviors


class _Behavior:
    def __init__(self, spec: ComponentSpec, sim):
        self.spec = spec
        self.sim = sim

    @property
    def cid(self):
        return self.spec.id

    def on_signal(self, ev: SignalEvent, t: float):
        raise SimulationError(f"{self.spec.name} cannot handle {ev.kind} signal {ev.id}")

    def unconsumed(self):
        return []


class FireBehavior(_Behavior):
    """Fires once all inputs have a value: sources, gates, processing units, neurons, sinks.

    After processing, output goes to every consumer, either directly, over
    a shared bus (``bus`` param), or after a round trip to a server
    (``server`` param).
    """

    def __init__(self, spec, sim):
        super().__init__(spec, sim)
        self.pending = {src: deque() for src in spec.inputs}
        self.first_arrival = None
        self.awaiting_grant = deque()
        self.request_times = deque()
        self.gate = GateKind(spec.op) if spec.kind is Kind.GATE else None
        self.fired = 0

    def on_signal(self, ev, t):
        if ev.kind == "grant":
            self._on_grant(t)
        elif ev.kind == "result":
            self._on_response(ev, t)
        elif ev.source is None or not self.spec.inputs:
            self._fire([ev.payload_bits], t)
        elif ev.source in self.pending:
            self.pending[ev.source].append(ev)
            if self.first_arrival is None:
                self.first_arrival = t
            if all(self.pending.values()):
                self.sim.mark(self.cid, self.first_arrival, t, State.BLOCKED, "awaiting inputs")
                values = [self.pending[src].popleft().payload_bits for src in self.spec.inputs]
                self.first_arrival = t if any(self.pending.values()) else None
                self._fire(values, t)
        else:
            super().on_signal(ev, t)

    def unconsumed(self):
        return [ev for q in self.pending.values() for ev in q]

    def _compute(self, values):
        if self.gate is not None:
            bits = [v[0] if v else None for v in values]
            if any(b is None for b in bits):
                return None
            return (gate_evaluate(self.gate, bits),)
        return values[0] if values else None

    def _fire(self, values, t):
        out = self._compute(values)
        self.fired += 1
        detail = self.gate.value if self.gate is not None else self.spec.kind.value
        self.sim.submit(self.cid, self.spec.t_p, State.PAYLOAD, detail,
                        on_done=lambda end: self._complete(out, end))

    def _complete(self, out, t):
        self.sim.metrics[f"valid_{self.spec.name}"] = t
        if out is not None:
            self.sim.metrics[f"value_{self.spec.name}"] = float(out[0]) if out else 0.0
        server = self.spec.param("server")
        if server is not None:
            self.request_times.append((t, out))
            self.sim.send(self.cid, int(server), "request", t, out)
        else:
            self._route(out, t)

    def _on_response(self, ev, t):
        sent, out = self.request_times.popleft()
        self.sim.metrics.setdefault(f"apparent_access_{self.spec.name}", t - sent)
        self._route(out, t)

    def _route(self, out, t):
        consumers = self.sim.consumers.get(self.cid, [])
        if not consumers:
            return
        bus = self.spec.param("bus")
        if bus is not None:
            self.awaiting_grant.append((t, out))
            self.sim.send(self.cid, int(bus), "request", t, None)
            return
        t_msg = float(self.spec.param("t_msg", 0.0))
        for dst in consumers:
            self.sim.send(self.cid, dst, "data", t + t_msg, out, hold_from=t)

    def _on_grant(self, t):
        requested, out = self.awaiting_grant.popleft()
        self.sim.mark(self.cid, requested, t, State.ARBITRATION, "bus request")
        t_msg = float(self.spec.param("t_msg", 0.0))
        for dst in self.sim.consumers[self.cid]:
            self.sim.send(self.cid, dst, "data", t + t_msg, out, hold_from=t)


class ServerBehavior(_Behavior):
    """Cache or worker: serves requests one at a time and replies to the requester."""

    def on_signal(self, ev, t):
        if ev.kind not in ("request", "data") or ev.source is None:
            return super().on_signal(ev, t)
        requester = ev.source
        t_msg = float(self.spec.param("t_msg", 0.0))
        name = self.sim.specs[requester].name

        def reply(end):
            self.sim.send(self.cid, requester, "result", end + t_msg, ev.payload_bits, hold_from=end)

        self.sim.submit(self.cid, self.spec.t_p, State.PAYLOAD, f"serve {name}", on_done=reply, tie=requester)


class CoordinatorBehavior(_Behavior):
    """Dispatches one task per worker, then receives results in arrival order."""

    def on_signal(self, ev, t):
        t_dispatch = float(self.spec.param("t_dispatch", 0.0))
        t_recv = float(self.spec.param("t_recv", 0.0))
        if ev.kind == "result":
            name = self.sim.specs[ev.source].name
            self.sim.submit(self.cid, t_recv, State.ARBITRATION, f"receive {name}", tie=ev.source)
            return
        if ev.source is not None:
            return super().on_signal(ev, t)
        for k, worker in enumerate(self.sim.consumers.get(self.cid, [])):
            def dispatch(end, worker=worker):
                self.sim.send(self.cid, worker, "request", end, ev.payload_bits, hold_from=end)

            name = self.sim.specs[worker].name
            self.sim.submit(self.cid, t_dispatch, State.ARBITRATION, f"dispatch {name}",
                            on_done=dispatch, tie=k)


class BusArbiterBehavior(_Behavior):
    """FIFO arbiter of a shared medium.

    The bus is occupied from grant issue until the granted message has
    fully arrived; requests are served in arrival order, ties to the
    lower sender id.
    """

    def __init__(self, spec, sim):
        super().__init__(spec, sim)
        self.state = BusProtocolState(arbiter=spec.position, speed=sim.scenario.speed)
        self._waiting: list = []
        self._busy = False

    def on_signal(self, ev, t):
        if ev.kind != "request" or ev.source is None:
            return super().on_signal(ev, t)
        heapq.heappush(self._waiting, (t, ev.source, ev.id))
        self.state.queue.append(ev.id)
        self.sim.call_at(t, self._try_grant)

    def _try_grant(self, now):
        if self._busy or not self._waiting:
            return
        _, sender, _ = heapq.heappop(self._waiting)
        sim = self.sim
        spec = sim.specs[sender]
        grant_leg = sim.transfer_time(self.cid, sender)
        t_msg = float(spec.param("t_msg", 0.0))
        dests = sim.consumers.get(sender, [])
        tail = max((sim.transfer_time(sender, d) for d in dests), default=0.0)
        on_air = now + grant_leg
        release = on_air + t_msg + tail
        sim.send(self.cid, sender, "grant", now, mark=False)
        sim.mark(self.cid, now, on_air, State.ARBITRATION, f"grant to {spec.name}")
        sim.mark(self.cid, on_air, on_air + t_msg, State.PAYLOAD, f"message from {spec.name}")
        sim.mark(self.cid, on_air + t_msg, release, State.TRANSFER_WAIT, f"message from {spec.name}")
        self._busy = True
        self.state.busy_until = release
        self.state.grants_issued += 1
        sim.call_at(release, self._release)

    def _release(self, now):
        self._busy = False
        self._try_grant(now)


def make_behavior(spec: ComponentSpec, sim):
    if spec.kind in (Kind.CACHE, Kind.WORKER):
        return ServerBehavior(spec, sim)
    if spec.kind is Kind.COORDINATOR:
        return CoordinatorBehavior(spec, sim)
    if spec.kind is Kind.BUS_ARBITER:
        return BusArbiterBehavior(spec, sim)
    return FireBehavior(spec, sim)


# ---------------------------------------------------------------------------
# coordinator / worker


def distributed_scenario(coordinator: ComponentSpec, workers, t_dispatch, t_work, t_recv,
                         speed=1.0, name="distributed") -> Scenario:
    workers = list(workers)
    if not workers:
        raise ValueError("at least one worker is required")
    for value, label in ((t_dispatch, "t_dispatch"), (t_work, "t_work"), (t_recv, "t_recv")):
        if value < 0:
            raise ValueError(f"{label} must be >= 0, got {value}")
    params = dict(coordinator.params, t_dispatch=float(t_dispatch), t_recv=float(t_recv))
    coord = replace(coordinator, kind=Kind.COORDINATOR, params=params, inputs=())
    staff = [replace(w, kind=Kind.WORKER, t_p=float(t_work), inputs=(coord.id,)) for w in workers]
    stimulus = SignalEvent(0, None, coord.id, 0.0)
    return Scenario(name, [coord, *staff], [stimulus], speed)


def distributed_metrics(result: SimulationResult, coordinator: int, workers) -> dict[str, float]:
    """Makespan, efficiency and idle time of the organizing unit."""
    workers = list(workers)
    makespan = result.makespan
    busy = sum(iv.duration for iv in result.trace
               if iv.component == coordinator and iv.state is State.ARBITRATION)
    work = sum(result.utilization[w].get(State.PAYLOAD.value, 0.0) for w in workers)
    efficiency = work / ((len(workers) + 1) * makespan) if makespan > 0 else math.nan
    return {"makespan": makespan, "efficiency": efficiency, "coordinator_idle": makespan - busy}


def dispatch_and_collect(coordinator: ComponentSpec, workers, t_dispatch: float, t_work: float,
                         t_recv: float, speed: float = 1.0) -> SimulationResult:
    """Run one parallelized-sequential round: dispatch, work, collect."""
    scenario = distributed_scenario(coordinator, workers, t_dispatch, t_work, t_recv, speed)
    result = engine.run(scenario)
    result.metrics.update(
        distributed_metrics(result, scenario.components[0].id, [w.id for w in scenario.components[1:]])
    )
    return result

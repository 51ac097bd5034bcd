"""Deterministic discrete-event kernel with finite-speed signal propagation.

Signals take ``transfer_time(source, dest)`` to arrive, every component is
a single server (one job at a time), and each component's life is tiled
into payload / transfer_wait / arbitration / blocked / idle intervals
once the run is over.

Queue entries are ordered by ``(time, phase, id)``. Phase 0 carries
arrivals and job completions, phase 1 carries scheduling decisions (job
starts, bus grants), so every simultaneous arrival is seen before a
component picks its next job.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from collections import defaultdict

from . import timespace
from .model import (
    Kind,
    LivelockError,
    Scenario,
    SignalEvent,
    SimulationError,
    SimulationResult,
    State,
    TraceInterval,
)

__all__ = [
    "Simulator",
    "run",
    "utilization",
    "payload_fraction",
    "check_tiling",
    "MAX_EVENTS",
]

log = logging.getLogger(__name__)

MAX_EVENTS = 5_000_000

# lower rank wins when marks overlap
_RANK = {
    State.PAYLOAD: 0,
    State.ARBITRATION: 1,
    State.BLOCKED: 2,
    State.TRANSFER_WAIT: 3,
}
_JOB_RANK = -1


class Simulator:
    """One run of one scenario. Not reusable; build a new one per run."""

    def __init__(self, scenario: Scenario, behavior_factory=None, max_events: int = MAX_EVENTS):
        scenario.validate()
        find_zero_delay_cycle(scenario, raise_error=True)
        if behavior_factory is None:
            from .components import make_behavior as behavior_factory

        self.scenario = scenario
        self.specs = {c.id: c for c in scenario.components}
        self.consumers = defaultdict(list)
        for comp in scenario.components:
            for src in comp.inputs:
                if comp.id not in self.consumers[src]:
                    self.consumers[src].append(comp.id)
        for ids in self.consumers.values():
            ids.sort()

        self.now = 0.0
        self.makespan = 0.0
        self.metrics: dict[str, float] = {}
        self.deliveries: list[tuple[SignalEvent, float]] = []
        self._queue: list = []
        self._event_ids: set[int] = set()
        start_id = max((ev.id for ev in scenario.stimuli), default=-1) + 1
        self._ids = itertools.count(start_id)
        self._pending = {cid: [] for cid in self.specs}
        self._busy = {cid: False for cid in self.specs}
        self._marks = {cid: [] for cid in self.specs}
        self._processed = 0
        self._max_events = max_events
        self._ran = False
        self.behaviors = {cid: behavior_factory(spec, self) for cid, spec in self.specs.items()}

    # -- geometry -------------------------------------------------------

    def transfer_time(self, src: int, dst: int) -> float:
        speed = self.scenario.speed * float(self.specs[dst].param("speed", 1.0))
        return timespace.transfer_time(self.specs[src].position, self.specs[dst].position, speed)

    # -- queue ------------------------------------------------------------

    def next_id(self) -> int:
        while True:
            ident = next(self._ids)
            if ident not in self._event_ids:
                return ident

    def _push(self, time, phase, action):
        heapq.heappush(self._queue, (time, phase, self.next_id(), action))

    def schedule(self, event: SignalEvent) -> int:
        """Enqueue ``event`` at its emit time; returns the event id."""
        if event.emit_time < 0 or event.emit_time < self.now:
            raise SimulationError(
                f"cannot schedule signal {event.id} at t={event.emit_time} (now={self.now})"
            )
        if event.id in self._event_ids:
            raise SimulationError(f"duplicate signal id {event.id}")
        if event.dest not in self.specs:
            raise SimulationError(f"signal {event.id}: unknown destination {event.dest}")
        self._event_ids.add(event.id)
        heapq.heappush(self._queue, (event.emit_time, 0, event.id, ("emit", event)))
        return event.id

    def send(self, src, dst, kind, emit_time, bits=None, hold_from=None, mark=True):
        """Emit a signal from ``src``; optionally mark the sender as waiting on the transfer."""
        ev = SignalEvent(self.next_id(), src, dst, emit_time, kind, bits)
        self.schedule(ev)
        if mark:
            arrival = emit_time + self.transfer_time(src, dst)
            start = emit_time if hold_from is None else hold_from
            self.mark(src, start, arrival, State.TRANSFER_WAIT, f"{kind} to {self.specs[dst].name}")
        return ev

    def call_at(self, time, fn):
        if time < self.now:
            raise SimulationError(f"callback scheduled into the past: {time} < {self.now}")
        self._push(time, 1, ("call", fn))

    def mark(self, cid, start, end, state, detail="", rank=None):
        if end < start:
            raise SimulationError(f"mark ends before it starts: [{start}, {end}]")
        rank = _RANK[state] if rank is None else rank
        self._marks[cid].append((start, end, rank, len(self._marks[cid]), State(state), detail))

    def submit(self, cid, duration, state, detail, on_done=None, tie=0):
        """Queue a job on component ``cid``; jobs run one at a time, FIFO by (ready, tie)."""
        if duration < 0:
            raise SimulationError(f"negative job duration {duration}")
        heapq.heappush(
            self._pending[cid], (self.now, tie, self.next_id(), duration, State(state), detail, on_done)
        )
        self._push(self.now, 1, ("start", cid))

    # -- main loop --------------------------------------------------------

    def run(self) -> SimulationResult:
        if self._ran:
            raise SimulationError("a Simulator instance runs once")
        self._ran = True
        for ev in sorted(self.scenario.stimuli, key=lambda e: (e.emit_time, e.id)):
            self.schedule(ev)
        while self._queue:
            time, phase, _, action = heapq.heappop(self._queue)
            self.now = time
            if phase == 0:
                self.makespan = max(self.makespan, time)
            self._processed += 1
            if self._processed > self._max_events:
                raise LivelockError(f"event budget of {self._max_events} exhausted at t={time}")
            tag = action[0]
            if tag == "emit":
                self._on_emit(action[1])
            elif tag == "arrive":
                self._on_arrive(action[1])
            elif tag == "start":
                self._on_start(action[1])
            elif tag == "done":
                self._on_done(*action[1:])
            else:
                action[1](time)
        return self._finish()

    def _on_emit(self, ev):
        if ev.source is None:
            self._on_arrive(ev)
            return
        arrival = ev.emit_time + self.transfer_time(ev.source, ev.dest)
        self._push(arrival, 0, ("arrive", ev))

    def _on_arrive(self, ev):
        self.deliveries.append((ev, self.now))
        self.behaviors[ev.dest].on_signal(ev, self.now)

    def _on_start(self, cid):
        if self._busy[cid] or not self._pending[cid]:
            return
        ready, _, _, duration, state, detail, on_done = heapq.heappop(self._pending[cid])
        self._busy[cid] = True
        start = self.now
        if start > ready:
            # queued behind another job: blocked, not idle
            key = f"blocked_wait_{self.specs[cid].name}"
            self.metrics[key] = self.metrics.get(key, 0.0) + (start - ready)
        self._push(start + duration, 0, ("done", cid, start, start + duration, state, detail, on_done))

    def _on_done(self, cid, start, end, state, detail, on_done):
        self._busy[cid] = False
        self.mark(cid, start, end, state, detail, rank=_JOB_RANK)
        if on_done is not None:
            on_done(end)
        self._push(end, 1, ("start", cid))

    # -- accounting -------------------------------------------------------

    def _finish(self) -> SimulationResult:
        trace = []
        for cid in sorted(self.specs):
            trace.extend(_tile(cid, self._marks[cid], self.makespan))
        util = {cid: _aggregate(trace, cid) for cid in sorted(self.specs)}
        leftover = [(cid, len(q)) for cid, q in self._pending.items() if q]
        if leftover:
            raise SimulationError(f"jobs left unserved: {leftover}")
        metrics = {"makespan": self.makespan}
        metrics.update(self.metrics)
        unconsumed = []
        for beh in self.behaviors.values():
            unconsumed.extend(beh.unconsumed())
        return SimulationResult(
            makespan=self.makespan,
            trace=trace,
            utilization=util,
            metrics=metrics,
            names={cid: s.name for cid, s in sorted(self.specs.items())},
            positions={cid: s.position for cid, s in sorted(self.specs.items())},
            kinds={cid: s.kind for cid, s in sorted(self.specs.items())},
            deliveries=list(self.deliveries),
            unconsumed=unconsumed,
        )


def _tile(cid, marks, makespan):
    """Turn overlapping marks into a gap-free, overlap-free tiling of [0, makespan]."""
    points = {0.0, makespan}
    for start, end, *_ in marks:
        points.add(min(max(start, 0.0), makespan))
        points.add(min(max(end, 0.0), makespan))
    points = sorted(points)
    ranked = sorted(marks, key=lambda m: (m[2], m[0], m[3]))
    pieces = []
    for a, b in zip(points, points[1:]):
        state, detail, key = State.IDLE, "", None
        for start, end, rank, seq, mstate, mdetail in ranked:
            if start <= a and end >= b and end > start:
                state, detail = mstate, mdetail
                # separate jobs never merge, even back to back
                key = seq if rank == _JOB_RANK else None
                break
        pieces.append((a, b, state, detail, key))
    # zero-length jobs (instant firings) are kept as explicit intervals
    instants = sorted((m[0], m[3], m[4], m[5]) for m in marks if m[2] == _JOB_RANK and m[0] == m[1])
    merged: list[list] = []
    i = 0
    for a, b, state, detail, key in pieces:
        while i < len(instants) and instants[i][0] <= a:
            t, seq, s, d = instants[i]
            merged.append([t, t, s, d, ("instant", seq)])
            i += 1
        last = merged[-1] if merged else None
        if last and last[4] == key and last[2] == state and last[3] == detail and last[1] == a:
            last[1] = b
        else:
            merged.append([a, b, state, detail, key])
    for t, seq, s, d in instants[i:]:
        merged.append([t, t, s, d, ("instant", seq)])
    return [TraceInterval(cid, a, b, s, d) for a, b, s, d, _ in merged]


def _aggregate(trace, cid):
    totals: dict[str, float] = {}
    for iv in trace:
        if iv.component == cid:
            key = iv.state.value
            totals[key] = totals.get(key, 0.0) + (iv.end - iv.start)
    return totals


def find_zero_delay_cycle(scenario: Scenario, raise_error=False):
    """Return a cycle of components that can exchange signals in zero time, or None."""
    specs = {c.id: c for c in scenario.components}

    def instant(src, dst):
        s = specs[src]
        if s.t_p > 0 or float(s.param("t_msg", 0.0)) > 0:
            return False
        speed = scenario.speed * float(specs[dst].param("speed", 1.0))
        return timespace.transfer_time(s.position, specs[dst].position, speed) == 0

    graph = defaultdict(set)
    for comp in scenario.components:
        for src in comp.inputs:
            if src in specs and instant(src, comp.id):
                graph[src].add(comp.id)
        server = comp.param("server")
        if server is not None and int(server) in specs:
            server = int(server)
            if instant(comp.id, server):
                graph[comp.id].add(server)
            if instant(server, comp.id):
                graph[server].add(comp.id)

    color = {}
    stack = []

    def visit(node):
        color[node] = 1
        stack.append(node)
        for nxt in sorted(graph[node]):
            if color.get(nxt) == 1:
                return stack[stack.index(nxt):] + [nxt]
            if color.get(nxt) is None:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        color[node] = 2
        return None

    for node in sorted(graph):
        if color.get(node) is None:
            cycle = visit(node)
            if cycle:
                names = [specs[c].name for c in cycle]
                if raise_error:
                    raise LivelockError(
                        "zero-delay dependency cycle: " + " -> ".join(names), cycle=names
                    )
                return names
    return None


def run(scenario: Scenario, max_events: int = MAX_EVENTS) -> SimulationResult:
    """Simulate ``scenario`` until its event queue drains."""
    result = Simulator(scenario, max_events=max_events).run()
    log.debug("scenario %s finished at t=%g", scenario.name, result.makespan)
    return result


def utilization(result: SimulationResult, component) -> dict[str, float]:
    """Time spent in each state by ``component`` (id or name)."""
    try:
        cid = result.resolve(component)
    except KeyError:
        raise KeyError(f"unknown component {component!r}") from None
    return dict(result.utilization[cid])


def payload_fraction(result: SimulationResult) -> float:
    """Total payload time over (component count x makespan)."""
    if result.makespan <= 0:
        raise ValueError("payload fraction undefined for zero makespan")
    payload = sum(u.get(State.PAYLOAD.value, 0.0) for u in result.utilization.values())
    return payload / (len(result.utilization) * result.makespan)


def check_tiling(trace, makespan, components=None, tol=0.0):
    """Raise AssertionError unless every component's intervals tile [0, makespan]."""
    by_comp = defaultdict(list)
    for iv in trace:
        by_comp[iv.component].append(iv)
    if components is not None:
        for cid in components:
            by_comp.setdefault(cid, [])
    for cid, ivs in by_comp.items():
        ivs = sorted(ivs, key=lambda iv: (iv.start, iv.end))
        cursor = 0.0
        for iv in ivs:
            if iv.end < iv.start:
                raise AssertionError(f"component {cid}: reversed interval {iv}")
            if abs(iv.start - cursor) > tol:
                raise AssertionError(f"component {cid}: gap/overlap at {cursor} vs {iv.start}")
            cursor = iv.end
        if makespan > 0 and abs(cursor - makespan) > tol:
            raise AssertionError(f"component {cid}: tiling ends at {cursor}, makespan {makespan}")
    return True

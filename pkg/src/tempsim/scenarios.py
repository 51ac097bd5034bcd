"""Builders for the six case studies and their named metrics.

Scenario names double as CLI identifiers: observer, adder, bus,
distributed, cache, ann. ``simulate`` runs a scenario and adds the
case-study metrics that match its name.
"""

from __future__ import annotations

import math

from . import components, engine
from .model import ComponentSpec, Kind, Scenario, SignalEvent, SimulationResult, State
from .timespace import TimePoint, apparent_time, transfer_time

__all__ = [
    "SCENARIO_NAMES",
    "build_observer_chain",
    "build_one_bit_adder",
    "build_bus_scenario",
    "build_distributed_scenario",
    "build_cache_scenario",
    "build_ann_layer_scenario",
    "measure",
    "simulate",
    "ADDER_LAYOUT",
]

SCENARIO_NAMES = ("observer", "adder", "bus", "distributed", "cache", "ann")


def _stimulus(ident, dest, bits=None, t=0.0):
    return SignalEvent(ident, None, dest, t, "data", bits)


# -- observer chain ------------------------------------------------------------


def build_observer_chain(t_p: float, distance: float, speed_factors) -> Scenario:
    """One source at the origin and one observer per speed factor, all at ``(distance, 0)``."""
    speed_factors = [float(s) for s in speed_factors]
    if not speed_factors:
        raise ValueError("need at least one speed factor")
    if not t_p > 0:
        raise ValueError(f"observer chain needs t_p > 0, got {t_p}")
    if not distance > 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if any(not s > 0 for s in speed_factors):
        raise ValueError(f"speed factors must be > 0, got {speed_factors}")
    comps = [ComponentSpec(0, Kind.SOURCE, TimePoint(0.0, 0.0), t_p, "source")]
    expected = {}
    for k, speed in enumerate(speed_factors):
        name = f"observer{k}"
        comps.append(ComponentSpec(k + 1, Kind.PROCESSING_UNIT, TimePoint(distance, 0.0), t_p, name,
                                   inputs=(0,), params={"speed": speed}))
        expected[f"apparent_time_{name}"] = apparent_time(t_p, distance / speed).t_a
    return Scenario("observer", comps, [_stimulus(0, 0)], 1.0, expected)


def _measure_observer(scenario, result):
    metrics = {}
    src = scenario.component("source").id
    start = min((ev.emit_time for ev in scenario.stimuli if ev.dest == src), default=0.0)
    for ev, arrival in result.deliveries:
        if ev.source != src or ev.kind != "data":
            continue
        name = result.names[ev.dest]
        light_on = result.metrics[f"valid_{name}"] - start
        t_t = arrival - ev.emit_time
        metrics[f"transfer_{name}"] = t_t
        metrics[f"light_on_{name}"] = light_on
        metrics[f"apparent_time_{name}"] = math.hypot(t_t, light_on)
    return metrics


# -- one-bit adder -------------------------------------------------------------

# name -> (kind, op, position, inputs); gate t_p = 1, speed 1
ADDER_LAYOUT = {
    "a": (Kind.SOURCE, None, (-2.0, 0.0), ()),
    "b": (Kind.SOURCE, None, (-2.0, 1.0), ()),
    "cin": (Kind.SOURCE, None, (-2.0, -1.0), ()),
    "xor1": (Kind.GATE, "XOR", (0.0, 0.0), ("a", "b")),
    "and1": (Kind.GATE, "AND", (0.0, 1.0), ("a", "b")),
    "and2": (Kind.GATE, "AND", (1.0, 1.0), ("cin", "xor1")),
    "xor2": (Kind.GATE, "XOR", None, ("xor1", "cin")),
    "or1": (Kind.GATE, "OR", (2.0, 1.0), ("and1", "and2")),
    "sum_out": (Kind.SINK, None, (3.0, 0.0), ("xor2",)),
    "cout_out": (Kind.SINK, None, (3.0, 1.0), ("or1",)),
}
ADDER_GATES = ("xor1", "and1", "and2", "xor2", "or1")


def build_one_bit_adder(xor2_position=(1.0, 0.0), inputs=(1, 0, 1), gate_t_p: float = 1.0) -> Scenario:
    """Gate-level full adder; only XOR2's placement is a parameter."""
    xor2_position = TimePoint.of(xor2_position)
    if len(inputs) != 3:
        raise ValueError(f"need (a, b, cin), got {inputs}")
    ids = {name: k for k, name in enumerate(ADDER_LAYOUT)}
    comps = []
    for name, (kind, op, pos, srcs) in ADDER_LAYOUT.items():
        pos = xor2_position if pos is None else TimePoint.of(pos)
        t_p = gate_t_p if kind is Kind.GATE else 0.0
        comps.append(ComponentSpec(ids[name], kind, pos, t_p, name, op, tuple(ids[s] for s in srcs)))
    stimuli = [
        _stimulus(k, ids[name], (bool(v),)) for k, (name, v) in enumerate(zip(("a", "b", "cin"), inputs))
    ]
    return Scenario("adder", comps, stimuli, 1.0)


def _measure_adder(scenario, result):
    metrics = {}
    for name in ADDER_GATES:
        cid = result.resolve(name)
        payload = [iv for iv in result.intervals(cid) if iv.state is State.PAYLOAD]
        if payload:
            metrics[f"idle_wait_{name}"] = payload[0].start
    for pin, key in (("sum_out", "sum"), ("cout_out", "cout")):
        cid = result.resolve(pin)
        arrivals = [t for ev, t in result.deliveries if ev.dest == cid]
        if arrivals:
            metrics[f"{key}_delivery"] = max(arrivals)
        if f"value_{pin}" in result.metrics:
            metrics[key] = result.metrics[f"value_{pin}"]
    return metrics


# -- shared bus ----------------------------------------------------------------


def build_bus_scenario(n_senders: int, t_msg: float, spacing: float = 1.0) -> Scenario:
    """``n_senders`` on the x axis competing for one bus to a destination at the origin."""
    if n_senders < 1:
        raise ValueError("need at least one sender")
    if t_msg < 0 or spacing < 0:
        raise ValueError("t_msg and spacing must be >= 0")
    senders = range(2, n_senders + 2)
    comps = [
        ComponentSpec(0, Kind.BUS_ARBITER, TimePoint(0.0, 0.0), 0.0, "arbiter"),
        ComponentSpec(1, Kind.SINK, TimePoint(0.0, 0.0), 0.0, "dest", inputs=tuple(senders)),
    ]
    bus = components.BusProtocolState()
    expected = {}
    for k, cid in enumerate(senders, start=1):
        pos = TimePoint(spacing * k, 0.0)
        comps.append(ComponentSpec(cid, Kind.SOURCE, pos, 0.0, f"sender{k}",
                                   params={"bus": 0, "t_msg": float(t_msg)}))
        expected[f"delivery_{k}"] = components.bus_transfer(
            bus, SignalEvent(k - 1, cid, 0, 0.0, "request"), pos, TimePoint(0.0, 0.0), t_msg
        )
    stimuli = [_stimulus(k, cid) for k, cid in enumerate(senders)]
    return Scenario("bus", comps, stimuli, 1.0, expected)


def _deliveries_to(result, dest):
    arrivals = {}
    for ev, t in result.deliveries:
        if ev.dest == dest and ev.kind == "data" and ev.source is not None:
            arrivals.setdefault(ev.source, t)
    return arrivals


def _measure_bus(scenario, result):
    metrics = {}
    arrivals = _deliveries_to(result, scenario.component("dest").id)
    senders = sorted(c.id for c in scenario.components if c.param("bus") is not None)
    for k, cid in enumerate(senders, start=1):
        if cid in arrivals:
            metrics[f"delivery_{k}"] = arrivals[cid]
    arbiter = scenario.component("arbiter").id
    busy = result.utilization[arbiter].get(State.PAYLOAD.value, 0.0)
    if result.makespan > 0:
        metrics["bus_payload_fraction"] = busy / result.makespan
    return metrics


# -- distributed coordinator ---------------------------------------------------


def build_distributed_scenario(n_workers: int, t_dispatch: float, t_work: float, t_recv: float,
                               spacing: float = 1.0) -> Scenario:
    if n_workers < 1:
        raise ValueError("need at least one worker")
    coord = ComponentSpec(0, Kind.COORDINATOR, TimePoint(0.0, 0.0), 0.0, "coordinator")
    workers = [
        ComponentSpec(k, Kind.WORKER, TimePoint(spacing * k, 0.0), 0.0, f"worker{k}")
        for k in range(1, n_workers + 1)
    ]
    return components.distributed_scenario(coord, workers, t_dispatch, t_work, t_recv)


def _measure_distributed(scenario, result):
    coord = next(c.id for c in scenario.components if c.kind is Kind.COORDINATOR)
    workers = [c.id for c in scenario.components if c.kind is Kind.WORKER]
    return components.distributed_metrics(result, coord, workers)


# -- cache ---------------------------------------------------------------------


def build_cache_scenario(cache_y: float = 0.5, cache_t_p: float = 1.0) -> Scenario:
    """Two cores at (+-0.5, 0) hitting one cache at (0, cache_y) at t=0."""
    if not cache_y > 0:
        raise ValueError(f"cache_y must be > 0, got {cache_y}")
    if cache_t_p < 0:
        raise ValueError(f"cache t_p must be >= 0, got {cache_t_p}")
    cache = ComponentSpec(2, Kind.CACHE, TimePoint(0.0, cache_y), float(cache_t_p), "cache")
    cores = [
        ComponentSpec(0, Kind.PROCESSING_UNIT, TimePoint(-0.5, 0.0), 0.0, "core0", params={"server": 2}),
        ComponentSpec(1, Kind.PROCESSING_UNIT, TimePoint(0.5, 0.0), 0.0, "core1", params={"server": 2}),
    ]
    first = components.cache_access(cores[0], cache, 0.0)
    busy = first - transfer_time(cores[0].position, cache.position)
    expected = {
        "apparent_access_core0": first,
        "apparent_access_core1": components.cache_access(cores[1], cache, 0.0, busy_until=busy),
    }
    stimuli = [_stimulus(0, 0), _stimulus(1, 1)]
    return Scenario("cache", [*cores, cache], stimuli, 1.0, expected)


def _measure_cache(scenario, result):
    return {k: v for k, v in result.metrics.items() if k.startswith("apparent_access_")}


# -- ANN layer -----------------------------------------------------------------


def build_ann_layer_scenario(n_neurons: int, t_p: float = 1.0, t_msg: float = 0.1,
                             dedicated_links: bool = False, spacing: float = 1.0) -> Scenario:
    """One layer of neurons reporting to a collector at the origin.

    Neuron k sits at ``(spacing*k, 0)``. With ``dedicated_links`` each
    neuron has its own wire; otherwise all share one bus arbitrated at
    the origin.
    """
    if n_neurons < 1:
        raise ValueError("need at least one neuron")
    if not t_p > 0:
        raise ValueError(f"neuron t_p must be > 0, got {t_p}")
    neurons = range(2, n_neurons + 2)
    comps = [ComponentSpec(0, Kind.SINK, TimePoint(0.0, 0.0), 0.0, "collector", inputs=tuple(neurons),
                           params={"poll_period": float(t_p)})]
    if not dedicated_links:
        comps.append(ComponentSpec(1, Kind.BUS_ARBITER, TimePoint(0.0, 0.0), 0.0, "bus"))
    for k, cid in enumerate(neurons, start=1):
        params = {"t_msg": float(t_msg)}
        if not dedicated_links:
            params["bus"] = 1
        comps.append(ComponentSpec(cid, Kind.NEURON, TimePoint(spacing * k, 0.0), float(t_p),
                                   f"neuron{k}", params=params))
    stimuli = [_stimulus(k, cid) for k, cid in enumerate(neurons)]
    return Scenario("ann", comps, stimuli, 1.0)


def stale_reads(arrivals, poll_period: float) -> int:
    """Collector polls at poll_period, 2*poll_period, ...; count polls before the last input."""
    if not arrivals:
        return 0
    last = max(arrivals)
    count = 0
    k = 1
    while k * poll_period < last:
        count += 1
        k += 1
    return count


def _measure_ann(scenario, result):
    collector = scenario.component("collector")
    arrivals = _deliveries_to(result, collector.id)
    neurons = sorted(c.id for c in scenario.components if c.kind is Kind.NEURON)
    times = [arrivals[c] for c in neurons if c in arrivals]
    metrics = {f"arrival_{k}": arrivals[c] for k, c in enumerate(neurons, start=1) if c in arrivals}
    if times:
        period = collector.param("poll_period") or min(scenario.component(c).t_p for c in neurons)
        metrics["skew"] = max(times) - min(times)
        metrics["stale_read_count"] = float(stale_reads(times, period))
    return metrics


_MEASURES = {
    "observer": _measure_observer,
    "adder": _measure_adder,
    "bus": _measure_bus,
    "distributed": _measure_distributed,
    "cache": _measure_cache,
    "ann": _measure_ann,
}


def measure(scenario: Scenario, result: SimulationResult) -> dict[str, float]:
    """Case-study metrics for ``scenario`` (empty for unknown names)."""
    fn = _MEASURES.get(scenario.name.split(":")[0])
    return fn(scenario, result) if fn else {}


def simulate(scenario: Scenario) -> SimulationResult:
    """Run ``scenario`` and attach its case-study metrics."""
    result = engine.run(scenario)
    result.metrics.update(measure(scenario, result))
    return result

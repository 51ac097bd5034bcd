"""Scenario JSON documents, trace/surface CSV and temporal-dependence SVG."""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

import jsonschema

from .model import (
    ComponentSpec,
    Kind,
    Scenario,
    ScenarioSyntaxError,
    SchemaError,
    SignalEvent,
    SimulationResult,
    State,
    SIGNAL_KINDS,
)

__all__ = [
    "SCENARIO_SCHEMA",
    "DiagramStyle",
    "parse_scenario",
    "load_scenario",
    "serialize_scenario",
    "write_trace_csv",
    "read_trace_csv",
    "write_surface_csv",
    "write_svg_diagram",
    "fmt",
]

_number = {"type": "number"}
_id = {"type": "integer"}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "components"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "speed": {"type": "number", "exclusiveMinimum": 0},
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "kind", "position"],
                "properties": {
                    "id": _id,
                    "kind": {"enum": [k.value for k in Kind]},
                    "name": {"type": "string"},
                    "position": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
                    "t_p": {"type": "number", "minimum": 0},
                    "op": {"enum": ["AND", "OR", "XOR", "NOT", None]},
                    "inputs": {"type": "array", "items": _id},
                    "params": {"type": "object", "additionalProperties": _number},
                },
            },
        },
        "stimuli": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "dest", "emit_time"],
                "properties": {
                    "id": _id,
                    "source": {"type": ["integer", "null"]},
                    "dest": _id,
                    "emit_time": {"type": "number", "minimum": 0},
                    "kind": {"enum": list(SIGNAL_KINDS)},
                    "payload_bits": {
                        "anyOf": [
                            {"type": "null"},
                            {"type": "array", "items": {"type": ["boolean", "integer"]}},
                        ]
                    },
                },
            },
        },
        "expected_metrics": {"type": "object", "additionalProperties": _number},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)


def fmt(value: float) -> str:
    """Fixed 9-decimal rendering used by every text output."""
    text = f"{float(value):.9f}"
    return "0.000000000" if text == "-0.000000000" else text


def _json_path(path) -> str:
    out = "$"
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def parse_scenario(document: str | bytes) -> Scenario:
    """Parse and validate a scenario document.

    Raises ScenarioSyntaxError (bad JSON, with line/column), SchemaError
    (with JSON path), DuplicateIdError or DanglingReferenceError.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioSyntaxError(f"document is not UTF-8: {exc}") from None
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from None
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        first = errors[0]
        path = _json_path(first.absolute_path)
        raise SchemaError(f"schema violation at {path}: {first.message}", path=path)

    comps = [
        ComponentSpec(
            id=c["id"],
            kind=Kind(c["kind"]),
            position=tuple(c["position"]),
            t_p=float(c.get("t_p", 0.0)),
            name=c.get("name", ""),
            op=c.get("op"),
            inputs=tuple(c.get("inputs", ())),
            params=dict(c.get("params", {})),
        )
        for c in data["components"]
    ]
    stimuli = [
        SignalEvent(
            id=s["id"],
            source=s.get("source"),
            dest=s["dest"],
            emit_time=float(s["emit_time"]),
            kind=s.get("kind", "data"),
            payload_bits=s.get("payload_bits"),
        )
        for s in data.get("stimuli", [])
    ]
    scenario = Scenario(
        name=data["name"],
        components=comps,
        stimuli=stimuli,
        speed=float(data.get("speed", 1.0)),
        expected_metrics=data.get("expected_metrics"),
    )
    return scenario.validate()


def load_scenario(path) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def serialize_scenario(scenario: Scenario) -> str:
    doc = {
        "name": scenario.name,
        "speed": scenario.speed,
        "components": [
            {
                "id": c.id,
                "kind": c.kind.value,
                "name": c.name,
                "position": [c.position.x, c.position.y],
                "t_p": c.t_p,
                "op": c.op,
                "inputs": list(c.inputs),
                "params": dict(c.params),
            }
            for c in scenario.components
        ],
        "stimuli": [
            {
                "id": s.id,
                "source": s.source,
                "dest": s.dest,
                "emit_time": s.emit_time,
                "kind": s.kind,
                "payload_bits": None if s.payload_bits is None else list(s.payload_bits),
            }
            for s in scenario.stimuli
        ],
    }
    if scenario.expected_metrics is not None:
        doc["expected_metrics"] = dict(scenario.expected_metrics)
    return json.dumps(doc, indent=2) + "\n"


# -- CSV -----------------------------------------------------------------------


def write_trace_csv(result: SimulationResult) -> str:
    """Trace as CSV, rows sorted by (component id, start, end)."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["component", "start", "end", "state", "detail"])
    rows = sorted(result.trace, key=lambda iv: (iv.component, iv.start, iv.end))
    for iv in rows:
        name = result.names.get(iv.component, str(iv.component))
        writer.writerow([name, fmt(iv.start), fmt(iv.end), iv.state.value, iv.detail])
    return buf.getvalue()


def read_trace_csv(text: str) -> list[dict]:
    """Rows of a trace CSV as dicts with float start/end (for re-checking a file)."""
    rows = list(csv.DictReader(_io.StringIO(text)))
    for row in rows:
        row["start"] = float(row["start"])
        row["end"] = float(row["end"])
    return rows


def write_surface_csv(points) -> str:
    """Efficiency surface as CSV with columns n, one_minus_alpha, efficiency."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "one_minus_alpha", "efficiency"])
    for p in points:
        n = str(int(p.n)) if float(p.n).is_integer() else fmt(p.n)
        writer.writerow([n, fmt(p.one_minus_alpha), fmt(p.e)])
    return buf.getvalue()


# -- SVG -----------------------------------------------------------------------


@dataclass(frozen=True)
class Stroke:
    color: str
    width: float = 2.0
    dash: str | None = None

    def attrs(self) -> str:
        out = f'stroke="{self.color}" stroke-width="{self.width:g}"'
        if self.dash:
            out += f' stroke-dasharray="{self.dash}"'
        return out


@dataclass(frozen=True)
class DiagramStyle:
    payload: Stroke = field(default_factory=lambda: Stroke("#2ca02c", 3.0))
    transfer: Stroke = field(default_factory=lambda: Stroke("#2ca02c", 1.5, "4 3"))
    idle: Stroke = field(default_factory=lambda: Stroke("#ff7f0e", 2.0))
    apparent: Stroke = field(default_factory=lambda: Stroke("#d62728", 2.0))
    scale: float = 60.0
    margin: float = 40.0

    def __post_init__(self):
        strokes = [self.payload, self.transfer, self.idle, self.apparent]
        if len(set(strokes)) != len(strokes):
            raise ValueError("diagram styles must be pairwise distinct")


def _n(v: float) -> str:
    text = f"{v:.3f}"
    return "0.000" if text == "-0.000" else text


def write_svg_diagram(result: SimulationResult, style: DiagramStyle | None = None) -> str:
    """Temporal dependence diagram: x = component position, y = time (upward).

    Green verticals are payload, dotted green slants are signal transfers,
    orange verticals are idle time, the red line joins the first stimulus
    to the last completed payload.
    """
    style = style or DiagramStyle()
    xs = [p.x for p in result.positions.values()] or [0.0]
    xmin, xmax = min(min(xs), 0.0) - 1.0, max(max(xs), 0.0) + 1.0
    tmax = max(result.makespan, 1.0)
    s, m = style.scale, style.margin
    width = (xmax - xmin) * s + 2 * m
    height = tmax * s + 2 * m

    def X(x):
        return m + (x - xmin) * s

    def Y(t):
        return height - m - t * s

    def line(x1, t1, x2, t2, stroke, cls, title=None):
        el = (f'<line class="{cls}" x1="{_n(X(x1))}" y1="{_n(Y(t1))}" '
              f'x2="{_n(X(x2))}" y2="{_n(Y(t2))}" {stroke.attrs()}')
        if title:
            return el + f"><title>{escape(title)}</title></line>"
        return el + "/>"

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
        '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{_n(width)}" '
        f'height="{_n(height)}" viewBox="0 0 {_n(width)} {_n(height)}">',
        f'<rect x="0" y="0" width="{_n(width)}" height="{_n(height)}" fill="white"/>',
        '<g id="axes" stroke="black" stroke-width="1">',
        f'<line class="axis" x1="{_n(X(xmin))}" y1="{_n(Y(0))}" x2="{_n(X(xmax))}" y2="{_n(Y(0))}"/>',
        f'<line class="axis" x1="{_n(X(0))}" y1="{_n(Y(0))}" x2="{_n(X(0))}" y2="{_n(Y(tmax))}"/>',
        f'<text x="{_n(X(xmax) - 12)}" y="{_n(Y(0) + 16)}" font-size="12" stroke="none">x</text>',
        f'<text x="{_n(X(0) + 6)}" y="{_n(Y(tmax) + 4)}" font-size="12" stroke="none">t</text>',
        "</g>",
    ]
    trace = sorted(result.trace, key=lambda iv: (iv.component, iv.start, iv.end))

    out.append('<g id="idle">')
    for iv in trace:
        if iv.state is State.IDLE:
            x = result.positions[iv.component].x
            out.append(line(x, iv.start, x, iv.end, style.idle, "idle",
                            f"{result.names[iv.component]} idle {fmt(iv.start)}-{fmt(iv.end)}"))
    out.append("</g>")

    out.append('<g id="transfer">')
    for ev, arrival in result.deliveries:
        if ev.source is None:
            continue
        x1 = result.positions[ev.source].x
        x2 = result.positions[ev.dest].x
        out.append(line(x1, ev.emit_time, x2, arrival, style.transfer, "transfer",
                        f"{ev.kind} {result.names[ev.source]} -> {result.names[ev.dest]}"))
    out.append("</g>")

    out.append('<g id="payload">')
    for iv in trace:
        if iv.state is State.PAYLOAD and result.kinds.get(iv.component) is not Kind.SOURCE:
            x = result.positions[iv.component].x
            out.append(line(x, iv.start, x, iv.end, style.payload, "payload",
                            f"{result.names[iv.component]} {iv.detail} {fmt(iv.start)}-{fmt(iv.end)}"))
    out.append("</g>")

    out.append('<g id="apparent">')
    vector = _apparent_vector(result, trace)
    if vector is not None:
        (x1, t1), (x2, t2) = vector
        out.append(line(x1, t1, x2, t2, style.apparent, "apparent", "apparent time"))
    out.append("</g>")

    out.append('<g id="components" font-size="11" text-anchor="middle">')
    for cid in sorted(result.positions):
        x = result.positions[cid].x
        label = quoteattr(result.names[cid])
        if result.kinds.get(cid) is Kind.SOURCE:
            out.append(f'<circle cx="{_n(X(x))}" cy="{_n(Y(0))}" r="4" fill="none" stroke="black"/>')
        out.append(f'<text x="{_n(X(x))}" y="{_n(Y(0) + 28)}" data-name={label}>'
                   f"{escape(result.names[cid])}</text>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _apparent_vector(result, trace):
    stimuli = [(t, ev.dest) for ev, t in result.deliveries if ev.source is None]
    payload = [iv for iv in trace if iv.state is State.PAYLOAD]
    if not stimuli or not payload:
        return None
    t0, first = min(stimuli)
    last = max(payload, key=lambda iv: (iv.end, -iv.component))
    return (result.positions[first].x, t0), (result.positions[last.component].x, last.end)

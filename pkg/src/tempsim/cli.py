"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 simulation or parse error.
Metric lines are printed as ``key = value`` with 9 decimals.
"""

from __future__ import annotations

import argparse
import sys

from . import analytic, engine, io, scenarios, timespace
from .model import ScenarioError, SimulationError

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _point(text):
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return tuple(values)


def _bits(text):
    values = _ints(text)
    if len(values) != 3 or any(v not in (0, 1) for v in values):
        raise argparse.ArgumentTypeError(f"expected three bits a,b,cin, got {text!r}")
    return tuple(values)


def _outputs(parser):
    parser.add_argument("--out-trace", metavar="PATH", help="write the trace CSV here")
    parser.add_argument("--out-svg", metavar="PATH", help="write the temporal diagram SVG here")
    parser.add_argument("--metrics", action="store_true", help="print metrics as key = value")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tempsim", description="Time-space simulator for computing components.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("run", help="simulate a scenario JSON file")
    p.add_argument("path")
    _outputs(p)

    p = sub.add_parser("observer", help="source + observers at different transfer speeds")
    p.add_argument("--tp", type=float, default=1.0)
    p.add_argument("--distance", type=float, default=1.0)
    p.add_argument("--speeds", type=_floats, default=[0.5, 1.0, 2.0])
    _outputs(p)

    p = sub.add_parser("adder", help="one-bit full adder with movable XOR2")
    p.add_argument("--xor2", type=_point, default=(1.0, 0.0), metavar="X,Y")
    p.add_argument("--inputs", type=_bits, default=(1, 0, 1), metavar="A,B,CIN")
    _outputs(p)

    p = sub.add_parser("bus", help="senders competing for one shared bus")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--tmsg", type=float, default=0.1)
    p.add_argument("--spacing", type=float, default=1.0)
    _outputs(p)

    p = sub.add_parser("cache", help="two cores sharing one on-chip cache")
    p.add_argument("--y", type=float, default=0.5)
    p.add_argument("--tp", type=float, default=1.0)
    _outputs(p)

    p = sub.add_parser("distributed", help="coordinator dispatching to N workers")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t-dispatch", type=float, default=0.1)
    p.add_argument("--t-work", type=float, default=1.0)
    p.add_argument("--t-recv", type=float, default=0.1)
    p.add_argument("--spacing", type=float, default=1.0)
    _outputs(p)

    p = sub.add_parser("ann", help="ANN layer reporting to a collector")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--tp", type=float, default=1.0)
    p.add_argument("--tmsg", type=float, default=0.1)
    links = p.add_mutually_exclusive_group()
    links.add_argument("--dedicated", dest="dedicated", action="store_true", help="point-to-point links")
    links.add_argument("--shared", dest="dedicated", action="store_false", help="one shared bus (default)")
    _outputs(p)

    p = sub.add_parser("sweep", help="efficiency surface over (N, 1 - alpha)")
    p.add_argument("--n", type=_floats, required=True)
    p.add_argument("--one-minus-alpha", type=_floats, required=True)
    p.add_argument("--out", metavar="PATH", help="CSV destination (stdout if omitted)")

    p = sub.add_parser("ratio", help="apparent-time ratio T_A/T_p for R = T_t/T_p")
    p.add_argument("--r", type=_floats, required=True)
    return parser


def _build(args):
    cmd = args.command
    if cmd == "observer":
        return scenarios.build_observer_chain(args.tp, args.distance, args.speeds)
    if cmd == "adder":
        return scenarios.build_one_bit_adder(args.xor2, args.inputs)
    if cmd == "bus":
        return scenarios.build_bus_scenario(args.n, args.tmsg, args.spacing)
    if cmd == "cache":
        return scenarios.build_cache_scenario(args.y, args.tp)
    if cmd == "distributed":
        return scenarios.build_distributed_scenario(args.n, args.t_dispatch, args.t_work, args.t_recv,
                                                    args.spacing)
    if cmd == "ann":
        return scenarios.build_ann_layer_scenario(args.n, args.tp, args.tmsg, args.dedicated)
    raise UsageError(f"unknown scenario command {cmd}")


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _simulate(args, out):
    if args.command == "run":
        try:
            scenario = io.load_scenario(args.path)
        except OSError as exc:
            raise ScenarioError(f"cannot read {args.path}: {exc.strerror or exc}") from None
    else:
        try:
            scenario = _build(args)
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise UsageError(str(exc)) from None
    result = scenarios.simulate(scenario)
    if args.out_trace:
        _write(args.out_trace, io.write_trace_csv(result))
    if args.out_svg:
        _write(args.out_svg, io.write_svg_diagram(result))
    if args.metrics:
        for key in sorted(result.metrics):
            print(f"{key} = {io.fmt(result.metrics[key])}", file=out)
        if result.makespan > 0:
            print(f"payload_fraction = {io.fmt(engine.payload_fraction(result))}", file=out)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "ratio":
            for r in args.r:
                print(f"apparent_time_ratio[{r:g}] = {io.fmt(timespace.apparent_time_ratio(r))}", file=out)
        elif args.command == "sweep":
            text = io.write_surface_csv(analytic.efficiency_surface(args.n, args.one_minus_alpha))
            if args.out:
                _write(args.out, text)
            else:
                out.write(text)
        else:
            _simulate(args, out)
    except UsageError as exc:
        print(f"tempsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, SimulationError) as exc:
        print(f"tempsim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        if args.command in ("ratio", "sweep"):
            print(f"tempsim: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"tempsim: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

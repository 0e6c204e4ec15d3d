"""Command-line entry point: legendrian-lab verify|plot|approximate|flow|report."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import curves as cv
from . import flow as fl
from . import report as rp
from . import schedules as sc
from . import zigzag as zz
from .contact import GridSpec, ParamMap, c0_distance, legendrian_defect

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _write_json(path: str, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _plot_source(text: str):
    """gamma:M, sigma:M:W, psi:DELTA, birth:TAU or file:PATH."""
    kind, _, rest = text.partition(":")
    try:
        if kind in ("gamma", "psi", "birth"):
            return kind, (int(rest) if kind == "gamma" else float(rest)), 0.0
        if kind == "sigma":
            m, w = rest.split(":")
            return kind, int(m), float(w)
        if kind == "file" and rest:
            return kind, rest, 0.0
    except ValueError:
        pass
    raise UsageError(f"bad plot source {text!r}; use gamma:M, sigma:M:W, psi:D, birth:T or file:PATH")


def _target(text: str) -> ParamMap:
    kind, _, rest = text.partition(":")
    if kind == "gamma_inf":
        return cv.gamma_inf_map()
    if kind == "gamma" and rest.isdigit():
        return cv.gamma_map(int(rest))
    if kind == "parabola":
        return rp._parabola()
    if kind == "file" and rest:
        with open(rest, encoding="utf-8") as fh:
            return cv.curve_from_json(json.load(fh))
    raise UsageError(f"bad target {text!r}; use gamma_inf, gamma:M, parabola or file:PATH")


def cmd_verify(args) -> int:
    cfg = rp.SuiteConfig.build(quick=args.quick, m_max=args.m_max, seed=args.seed)
    report = rp.run_suite(args.suite, cfg)
    print(report.table())
    if args.json:
        _write_json(args.json, report.as_dict(include_timing=args.timing))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_plot(args) -> int:
    sources = [_plot_source(s) for s in args.source]
    figs = rp.plot_front(sources, args.out)
    for fig in figs:
        print(f"{fig.title}: {len(fig.path)} path points, {len(fig.cusps)} cusp markers, "
              f"{len(fig.crossings)} crossing markers")
    return EXIT_OK


def cmd_approximate(args) -> int:
    target = _target(args.target)
    curve = zz.approximate_curve(target, args.M, args.d, slope=args.slope)
    grid = GridSpec.uniform(args.grid)
    summary = {
        "target": target.name, "M": args.M, "d": args.d,
        "defect": legendrian_defect(curve, grid),
        "c0_distance": c0_distance(curve, target, grid),
        "front_distance": zz.front_distance(curve, target, args.grid),
        "cusps": curve.cusp_count,
    }
    for k, v in summary.items():
        print(f"{k}: {v}")
    if args.out:
        doc = cv.curve_to_json(curve, args.samples, kind="zigzag",
                               params={"target": target.name, "M": args.M, "d": args.d})
        _write_json(args.out, doc)
    return EXIT_OK if summary["defect"] <= 1e-9 else EXIT_FAIL


def cmd_flow(args) -> int:
    ham = fl.builtin_hamiltonian(args.hamiltonian)
    start = np.array(_floats(args.start, 5))
    traj = fl.integrate_flow(fl.ContactField(ham), start, args.tau0, args.tau1, args.step)
    lines = [json.dumps({"tau": float(t), "pt": [float(v) for v in p]})
             for t, p in zip(traj.taus, traj.points)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{len(lines)} states written to {args.out}; end point {traj.end.tolist()}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = rp.SuiteConfig.build(quick=args.quick)
    report = rp.construction_report(args.N, cfg)
    print(report.table())
    if args.json:
        _write_json(args.json, report.as_dict())
    if args.schedule is not None:
        if not 0.0 < args.schedule < 1.0:
            raise UsageError("schedule epsilon must lie in (0, 1)")
        _write_json(args.schedule_out, sc.build_lambda_schedule(args.schedule).as_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="legendrian-lab",
                                     description="Legendrian approximation toolkit and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", required=True, choices=rp.SUITES + ("all",))
    p.add_argument("--m-max", type=int, default=30)
    p.add_argument("--quick", action="store_true", help="quarter every grid size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings in the JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="write an SVG of one or more fronts side by side")
    p.add_argument("--source", action="append", required=True,
                   help="gamma:M, sigma:M:W, psi:DELTA, birth:TAU or file:PATH (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("approximate", help="zig-zag Legendrian approximation of a curve")
    p.add_argument("--target", default="gamma_inf")
    p.add_argument("--M", type=int, default=50)
    p.add_argument("--d", type=float, default=0.01)
    p.add_argument("--slope", type=float, default=None, help="constant slope field (default: target y)")
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--out", help="write the curve JSON here")
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("flow", help="integrate a builtin contact Hamiltonian flow")
    p.add_argument("--hamiltonian", required=True, choices=sorted(fl.BUILTIN_HAMILTONIANS))
    p.add_argument("--start", required=True, help="x,y,z,q,p")
    p.add_argument("--tau0", type=float, default=0.0)
    p.add_argument("--tau1", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--out", help="JSON-lines trajectory file (default: stdout)")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("report", help="construction report for the first N stages")
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--json")
    p.add_argument("--schedule", type=float, help="also export the lambda schedule for this epsilon")
    p.add_argument("--schedule-out", default="schedule.json")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, rp.ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"legendrian-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"legendrian-lab: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

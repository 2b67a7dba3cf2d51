"""Command-line front end: ``bellpyramid <command> [options]``.

Commands: classify, realize, volume, sample, estimate, scan-quantum, compare.
``classify`` encodes the innermost region in its exit status: 0 for SL,
10 for Q\\SL, 20 for NS\\Q, 30 outside the cube, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import behavior as bh
from . import chsh, geometry, models, montecarlo, sampler
from .errors import DomainError, InsufficientDataError, StructureError

REPORT_VERSION = 1
EXIT_CODES = {"SL": 0, "Q\\SL": 10, "NS\\Q": 20, "outside": 30}
EXIT_INPUT_ERROR = 2


class InputError(Exception):
    pass


def _emit(args, report: dict, human: str) -> None:
    if args.format == "structured":
        text = json.dumps({"version": REPORT_VERSION, **report}, sort_keys=True, indent=2) + "\n"
    else:
        text = human.rstrip("\n") + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fmt(values) -> str:
    return " ".join(f"{v:.6g}" for v in values)


# --- classify ----------------------------------------------------------------


def _membership_report(m: geometry.RegionMembership) -> dict:
    return {
        "point": list(m.point),
        "region": m.region,
        "sl": m.in_sl.value,
        "q": m.in_q.value,
        "ns": m.in_ns.value,
        "barycentric": list(m.barycentric.xi),
        "facet_margins": list(geometry.tetrahedron_facet_margins(m.point)),
        "gram_det": m.gram_det,
        "tolerance": m.tolerance_used,
    }


def _membership_text(m: geometry.RegionMembership) -> str:
    return "\n".join(
        [
            f"region: {m.region}",
            f"point (X, Y, Z): {_fmt(m.point)}",
            f"SL: {m.in_sl.value}   barycentric: {_fmt(m.barycentric.xi)}",
            f"Q:  {m.in_q.value}   det G: {m.gram_det:.6g}",
            f"NS: {m.in_ns.value}",
        ]
    )


def cmd_classify(args) -> int:
    sources = [s for s in (args.point, args.behavior, args.events) if s is not None]
    if len(sources) != 1:
        raise InputError("give exactly one of --point, --behavior, --events")
    report = {"command": "classify", "input": {}}
    extra = ""
    if args.point is not None:
        point = geometry.MomentPoint(*args.point)
        report["input"] = {"point": list(point)}
    elif args.behavior is not None:
        b = bh.loads_behavior(Path(args.behavior).read_text(encoding="utf-8"))
        check = bh.validate(b, args.tol)
        if not check.valid:
            raise InputError(f"behavior is not normalized/non-negative (max residual {check.max_residual:.3g})")
        point = bh.reduce_to_moment_point(b, args.tol)
        symmetric, sym_res = bh.check_exchange_symmetry(b, args.tol)
        ns_ok, ns_dev = bh.check_no_signalling(b, args.tol)
        report["input"] = {"behavior": str(args.behavior)}
        report["behavior_checks"] = {
            "exchange_symmetric": symmetric,
            "symmetry_residual": sym_res,
            "no_signalling": ns_ok,
            "signalling_deviation": ns_dev,
        }
        extra = f"\nexchange symmetric: {symmetric} (residual {sym_res:.3g})\nno-signalling: {ns_ok} (deviation {ns_dev:.3g})"
    else:
        events, desc = sampler.read_events(args.events)
        run = sampler.classify_run(events, args.tol, args.alpha)
        point = run.estimate.point
        report["input"] = {"events": str(args.events), "source": desc}
        report["run"] = run.to_dict()
        extra = (
            f"\nevents per class: {' '.join(map(str, run.estimate.counts))}"
            f"\nstderr: {_fmt(run.estimate.stderr)}"
            f"\nfacet z-scores: {_fmt(run.facet_z)}   det G z-score: {run.gram_det_z:.6g}"
        )
    m = geometry.classify(point, args.tol)
    report["classification"] = _membership_report(m)
    _emit(args, report, _membership_text(m) + extra)
    return EXIT_CODES[m.region]


# --- realize -----------------------------------------------------------------


def cmd_realize(args) -> int:
    point = geometry.MomentPoint(*args.point)
    state, coords = geometry.sl_membership(point, args.tol)
    if not state.closed:
        print(f"point {_fmt(point)} is outside the tetrahedron; facet margins {_fmt(coords.xi)}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    model = models.realize_sl_point(point, args.tol)
    text = models.dumps_lhv(model) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# --- volume ------------------------------------------------------------------


def cmd_volume(args) -> int:
    regions = list(montecarlo.Region) if args.region == "all" else [montecarlo.Region.parse(args.region)]
    estimates = [
        montecarlo.estimate_volume(r, args.samples, args.seed, tol=args.tol, workers=args.workers) for r in regions
    ]
    report = {
        "command": "volume",
        "seed": args.seed,
        "samples": args.samples,
        "estimates": [e.to_dict(timing=args.timing) for e in estimates],
    }
    lines = [f"seed {args.seed}, {args.samples} samples"]
    for e in estimates:
        line = (
            f"{e.region.value:>2}: fraction {e.fraction:.6f} +- {e.stderr:.2g}"
            f"  (reference {e.reference_fraction:.6f}), volume {e.absolute_volume:.5f}"
        )
        if args.timing:
            line += f", {e.wall_time_s:.2f}s"
        lines.append(line)
    _emit(args, report, "\n".join(lines))
    return 0


# --- sample / estimate -------------------------------------------------------


def _source_from_args(args):
    given = [s for s in (args.model, args.photon, args.behavior) if s is not None]
    if len(given) != 1:
        raise InputError("give exactly one of --model, --photon, --behavior")
    if args.model is not None:
        return models.loads_lhv(Path(args.model).read_text(encoding="utf-8")), f"lhv:{args.model}"
    if args.photon is not None:
        m = models.PhotonPairModel(*args.photon)
        return m, "photon:" + ",".join(repr(t) for t in args.photon)
    return bh.loads_behavior(Path(args.behavior).read_text(encoding="utf-8")), f"behavior:{args.behavior}"


def cmd_sample(args) -> int:
    source, desc = _source_from_args(args)
    events = sampler.sample_events(source, args.samples, args.seed, workers=args.workers)
    desc = f"{desc} seed={args.seed}"
    if args.out:
        sampler.write_events(args.out, events, desc)
    else:
        sampler.write_events(sys.stdout, events, desc)
    return 0


def cmd_estimate(args) -> int:
    if args.events is not None:
        if any(s is not None for s in (args.model, args.photon, args.behavior)):
            raise InputError("--events cannot be combined with a model source")
        events, desc = sampler.read_events(args.events)
        seed = None
    else:
        source, desc = _source_from_args(args)
        events = sampler.sample_events(source, args.samples, args.seed, workers=args.workers)
        seed = args.seed
    run = sampler.classify_run(events, args.tol, args.alpha)
    report = {"command": "estimate", "source": desc, "events": len(events), "seed": seed, **run.to_dict()}
    human = "\n".join(
        [
            f"source: {desc}" + ("" if seed is None else f" (seed {seed})"),
            f"events: {len(events)}",
            f"estimate (X, Y, Z): {_fmt(run.estimate.point)}",
            f"stderr: {_fmt(run.estimate.stderr)}",
            f"region: {run.membership.region}",
            f"facet z-scores: {_fmt(run.facet_z)}",
            f"det G z-score: {run.gram_det_z:.6g}",
        ]
    )
    _emit(args, report, human)
    return 0


# --- scan-quantum ------------------------------------------------------------


def scan_quantum(theta0: float, start: float, stop: float, num: int) -> list[dict]:
    """Photon-pair moments over a grid of ``(theta1, theta2)`` with ``theta0`` fixed."""
    rows = []
    grid = np.linspace(start, stop, num)
    for t1 in grid:
        for t2 in grid:
            m = models.PhotonPairModel(theta0, float(t1), float(t2))
            p = models.photon_moments(m)
            xi = geometry.tetrahedron_facet_margins(p)
            rows.append(
                {
                    "theta": [m.theta0, m.theta1, m.theta2],
                    "point": list(p),
                    "gram_det": float(geometry.gram_det_array(p.as_array())),
                    "sl_margins": list(xi),
                    "sl_violating": min(xi) < 0,
                }
            )
    return rows


def cmd_scan_quantum(args) -> int:
    start, stop, num = args.grid
    num = int(num)
    if num < 1:
        raise InputError("grid needs at least one point")
    rows = scan_quantum(args.theta0, start, stop, num)
    report = {"command": "scan-quantum", "grid": {"theta0": args.theta0, "start": start, "stop": stop, "num": num}, "rows": rows}
    header = "theta0 theta1 theta2 X Y Z detG xi1 xi2 xi3 xi4 sl_violating"
    body = [
        " ".join(f"{v:.6f}" for v in r["theta"] + r["point"] + [r["gram_det"]] + r["sl_margins"]) + f" {int(r['sl_violating'])}"
        for r in rows
    ]
    _emit(args, report, "\n".join([header, *body]))
    return 0


# --- compare -----------------------------------------------------------------


def cmd_compare(args) -> int:
    c = chsh.comparison()
    report = {"command": "compare", **c}
    human = "\n".join(
        [
            "                 pyramid   CHSH",
            f"V_SL / V_NS      {c['pyramid']['sl']:.3f}     {c['chsh']['sl']:.3f}",
            f"V_Q  / V_NS      {c['pyramid']['q']:.3f}     {c['chsh']['q']:.3f}",
            f"beyond quantum   {c['pyramid']['beyond_q']:.3f}     {c['chsh']['beyond_q']:.3f}",
        ]
    )
    _emit(args, report, human)
    return 0


# --- parser ------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(float(text)) if "e" in text.lower() else int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _tol(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("tolerance must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_tol, default=geometry.DEFAULT_TOL, help="absolute tolerance (default 1e-9)")
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    random_opts = argparse.ArgumentParser(add_help=False)
    random_opts.add_argument("--seed", type=_seed, default=0)
    random_opts.add_argument("--samples", type=_positive_int, default=1_000_000)
    random_opts.add_argument("--workers", type=int, default=1, help="threads for chunked sampling")

    source_opts = argparse.ArgumentParser(add_help=False)
    source_opts.add_argument("--model", metavar="FILE", help="LHV model file")
    source_opts.add_argument("--photon", nargs=3, type=float, metavar=("T0", "T1", "T2"), help="polarizer angles in radians")
    source_opts.add_argument("--behavior", metavar="FILE", help="behavior file")

    parser = argparse.ArgumentParser(prog="bellpyramid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="locate a point, behavior or event run in SL / Q / NS")
    p.add_argument("--point", nargs=3, type=float, metavar=("X", "Y", "Z"))
    p.add_argument("--behavior", metavar="FILE")
    p.add_argument("--events", metavar="FILE")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level for event runs")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("realize", parents=[common], help="write an LHV model reproducing a tetrahedron point")
    p.add_argument("--point", nargs=3, type=float, metavar=("X", "Y", "Z"), required=True)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("volume", parents=[common, random_opts], help="Monte Carlo volume fractions")
    p.add_argument("--region", choices=("sl", "q", "ns", "all", "SL", "Q", "NS"), default="all")
    p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("sample", parents=[common, random_opts, source_opts], help="write an event file")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", parents=[common, random_opts, source_opts], help="estimate moments from events")
    p.add_argument("--events", metavar="FILE")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("scan-quantum", parents=[common], help="photon-pair moments over an angle grid")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument(
        "--grid",
        nargs=3,
        type=float,
        metavar=("START", "STOP", "NUM"),
        default=(0.0, math.pi, 9),
        help="linspace for theta1 and theta2 (default 0 pi 9)",
    )
    p.set_defaults(func=cmd_scan_quantum)

    p = sub.add_parser("compare", parents=[common], help="pyramid vs CHSH occupancy ratios")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DomainError, StructureError, InsufficientDataError, OSError) as exc:
        print(f"bellpyramid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

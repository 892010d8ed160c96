"""Pipeline driver.

    quasiarc profile    --space grid2d:8x8 [--exhaustive] [--out rpt.json]
    quasiarc straighten --space comb:3:20:2 --arc default --iota 10 --svg out.svg
    quasiarc iterate    --space koch:3:8 --arc default --epsilon 0.25 --delta 0.6

Exit codes: 0 all verdicts pass, 1 hypothesis failure, 2 usage or scale
errors, 3 internal verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .corpus import generate_from_string, load_arc, load_space
from .errors import (FormatError, HypothesisFailure, ScaleFloorError,
                     VerificationError)
from .multiscale import (IterationConfig, check_cauchy, iterate,
                         measure_local_quasiarc)
from .profile import PairSample, BallSample, profile_space
from .report import (build_report, dump_report, iterate_section,
                     report_verdicts, straighten_section)
from .straighten import straighten

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_USAGE = 2
EXIT_VERIFICATION = 3

_GEN_KINDS = ("grid2d:", "koch:", "sierpinski:", "comb:", "snowline:")


def _resolve_space(source):
    if source.startswith(_GEN_KINDS):
        instance = generate_from_string(source)
        return instance.space, instance
    return load_space(source), None


def _resolve_arc(source, space, instance):
    if source == "default" or source.startswith("default:"):
        if instance is None:
            raise FormatError(
                "default arcs exist only for generated spaces; pass a file")
        name = source.partition(":")[2] or None
        return instance.arc(name)
    return load_arc(source, space)


def _profile(space, args):
    if args.exhaustive and space.n > 2000:
        raise FormatError(
            f"--exhaustive supports n <= 2000 points, space has {space.n}")
    return profile_space(
        space,
        exhaustive=True if args.exhaustive else None,
        seed=args.seed,
        pair_sample=PairSample(seed=args.seed),
        ball_sample=BallSample(seed=args.seed),
    )


def _emit(report, args):
    text = dump_report(report, args.out)
    if args.out is None:
        print(text)
    else:
        print(f"report written to {args.out}")


def _exit_from_verdicts(report):
    verdicts = report_verdicts(report)
    return EXIT_OK if all(verdicts.values()) else EXIT_VERIFICATION


def cmd_profile(args):
    t0 = time.perf_counter()
    space, _ = _resolve_space(args.space)
    profile = _profile(space, args)
    report = build_report(
        "profile", space, profile=profile, seed=args.seed,
        echo={"space": args.space, "exhaustive": bool(args.exhaustive)},
        timings_ms={"total": 1e3 * (time.perf_counter() - t0)})
    _emit(report, args)
    return EXIT_OK


def cmd_straighten(args):
    t0 = time.perf_counter()
    space, instance = _resolve_space(args.space)
    arc = _resolve_arc(args.arc, space, instance)
    profile = _profile(space, args)
    result = straighten(space, arc, args.iota, profile.l_hat, strict=False)
    report = build_report(
        "straighten", space, profile=profile, seed=args.seed,
        echo={"space": args.space, "arc": args.arc, "iota": args.iota},
        straighten=straighten_section(result),
        timings_ms={"total": 1e3 * (time.perf_counter() - t0)})
    if args.svg:
        _write_svg(args.svg, space, [(arc, "#999999", 1.0),
                                     (result.arc, "#d62728", 2.0)])
        report["svg"] = str(args.svg)
    _emit(report, args)
    return _exit_from_verdicts(report)


def cmd_iterate(args):
    t0 = time.perf_counter()
    space, instance = _resolve_space(args.space)
    arc = _resolve_arc(args.arc, space, instance)
    profile = _profile(space, args)
    config = IterationConfig(
        epsilon=args.epsilon, l_hat=profile.l_hat,
        scale_delta=args.delta, max_depth=args.depth)
    trace = iterate(space, arc, config, strict=False)
    lo, hi = trace.scale_band(space)
    if lo <= hi:
        lam = measure_local_quasiarc(space, trace.arcs[-1], lo, hi)
    else:
        lam = measure_local_quasiarc(space, trace.arcs[-1], hi, hi)
    cauchy = check_cauchy(space, trace)
    report = build_report(
        "iterate", space, profile=profile, seed=args.seed,
        echo={"space": args.space, "arc": args.arc,
              "epsilon": args.epsilon, "depth": args.depth,
              "delta": args.delta},
        iterate=iterate_section(space, trace, lam, cauchy),
        timings_ms={"total": 1e3 * (time.perf_counter() - t0)})
    if args.svg:
        stem = Path(args.svg)
        for n, arc_n in enumerate(trace.arcs):
            out = stem.with_name(f"{stem.stem}_scale{n}{stem.suffix}")
            _write_svg(out, space, [(arc, "#999999", 1.0),
                                    (arc_n, "#d62728", 2.0)])
        report["svg"] = str(stem)
    _emit(report, args)
    return _exit_from_verdicts(report)


def _write_svg(path, space, layers):
    """Two-dimensional coordinate spaces only; others are report-only."""
    if space.coords is None or space.coords.shape[1] != 2:
        return
    xs = space.coords[:, 0]
    ys = space.coords[:, 1]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0) or 1.0
    scale = 760.0 / span
    pad = 20.0

    def sx(x):
        return pad + (x - x0) * scale

    def sy(y):
        return pad + (y1 - y) * scale

    width = pad * 2 + (x1 - x0) * scale
    height = pad * 2 + (y1 - y0) * scale
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">'
    ]
    for arc, color, stroke in layers:
        pts = " ".join(
            f"{sx(space.coords[i][0]):.2f},{sy(space.coords[i][1]):.2f}"
            for i in arc.indices)
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{stroke}"/>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quasiarc",
        description="Arc straightening in finite doubling metric spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, arc=False):
        p.add_argument("--space", required=True,
                       help="generator spec (grid2d:WxH, koch:L:S, "
                            "sierpinski:L, comb:T:L:S, snowline:N:A) "
                            "or a JSON/CSV file")
        if arc:
            p.add_argument("--arc", default="default",
                           help='"default", "default:NAME", or a JSON file')
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="report JSON path")
        p.add_argument("--exhaustive", action="store_true",
                       help="force exhaustive estimators (n <= 2000)")

    p = sub.add_parser("profile", help="estimate the space constants")
    common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("straighten", help="straighten an arc at one scale")
    common(p, arc=True)
    p.add_argument("--iota", type=float, required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_straighten)

    p = sub.add_parser("iterate", help="multi-scale refinement")
    common(p, arc=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--delta", type=float, default=None,
                   help="scale ratio in (0,1); default is the "
                        "hypothesis cap 0.1")
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_iterate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except HypothesisFailure as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ScaleFloorError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"verification failure: {exc} witness={exc.witness}",
              file=sys.stderr)
        return EXIT_VERIFICATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

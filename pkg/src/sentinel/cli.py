"""``sentinel`` command line: run the pipeline, generate scenarios, evaluate logs.

Exit codes: 0 success, 1 input error, 2 configuration error, 3 evaluation gate failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from sentinel.config import load_config
from sentinel.core import ConfigurationError
from sentinel.events import read_events, write_events

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_GATE = 0, 1, 2, 3

log = logging.getLogger("sentinel")


def _overrides(pairs: Optional[List[str]]) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _scenario(arg: str):
    from sentinel.scenario import builtin_scenario, builtin_scenarios, load_scenario

    if not Path(arg).exists() and arg in builtin_scenarios():
        return builtin_scenario(arg)
    return load_scenario(arg)


def cmd_run(args) -> int:
    from sentinel.perception import RecordedDetector, read_detections
    from sentinel.pipeline import run_scenario
    from sentinel.scenario import ScenarioError, derive_events

    cfg = load_config(args.config, _overrides(args.set))
    try:
        if args.scenario is None:
            raise ScenarioError("--scenario is required: a detection stream carries no pixels")
        sc = _scenario(args.scenario)
        detector = RecordedDetector(read_detections(args.detections)) if args.detections else None
    except (OSError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    events, pipe = run_scenario(sc, cfg, seed=args.seed, threads=args.threads, detector=detector)
    if args.out:
        write_events(args.out, events, sc.fps)
    if args.gt_out:
        write_events(args.gt_out, derive_events(sc, cfg.own), sc.fps)
    for e in events:
        print(f"[{e.frame / sc.fps:8.2f}s] {e.kind.value:24s} object={e.object_id} person={e.person_id}"
              + (f" ({e.detail})" if e.detail else ""))
    print(f"{len(events)} events over {sc.n_frames} frames")
    return EXIT_OK


def cmd_gen(args) -> int:
    from sentinel.perception import mock_detector, write_detections
    from sentinel.scenario import Renderer, ScenarioError, derive_events, dump_scenario, generate_random

    try:
        sc = generate_random(args.seed, n_persons=args.persons, n_objects=args.objects, p_theft=args.p_theft)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = dump_scenario(sc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.gt_out:
        write_events(args.gt_out, derive_events(sc), sc.fps)
    if args.detections_out:
        cfg = load_config(args.config, _overrides(args.set))
        det = mock_detector(sc, cfg.mock, args.seed, cfg.det.categories)
        r = Renderer(sc)
        write_detections(args.detections_out, ((i, det.detect(r.render(i))) for i in range(sc.n_frames)))
    return EXIT_OK


def cmd_eval(args) -> int:
    from sentinel.eval import match_events, report

    cfg = load_config(args.config, _overrides(args.set))
    tol = args.tolerance if args.tolerance is not None else cfg.eval.tolerance_s
    try:
        pred = read_events(args.events)
        gt = read_events(args.gt)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep = match_events(pred, gt, tol, args.fps, name=Path(args.events).stem)
    print(report(rep))
    if args.json:
        Path(args.json).write_text(rep.to_json())
    if args.min_recall is not None:
        low = [c for c, n in rep.total().items() if n.recall < args.min_recall]
        if low:
            print(f"recall below {args.min_recall} for: {', '.join(low)}", file=sys.stderr)
            return EXIT_GATE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sentinel", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log pipeline decisions")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="YAML config file (default: $SENTINEL_CONFIG)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")

    r = sub.add_parser("run", help="run the pipeline on a scenario")
    common(r)
    r.add_argument("--scenario", help="scenario file or bundled scenario name")
    r.add_argument("--detections", help="recorded detection stream (JSON lines) to use instead of the mock detector")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="event log to write (JSON lines)")
    r.add_argument("--gt-out", help="also write the scenario's ground-truth events")
    r.add_argument("--threads", type=int, default=1, help="worker threads for appearance embedding")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gen", help="generate a random scenario")
    common(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="scenario file to write (default: stdout)")
    g.add_argument("--persons", type=int, default=3)
    g.add_argument("--objects", type=int, default=2)
    g.add_argument("--p-theft", type=float, default=0.5)
    g.add_argument("--gt-out", help="write the ground-truth event log")
    g.add_argument("--detections-out", help="write the mock detector's full-frame detection stream")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("eval", help="score an event log against ground truth")
    common(e)
    e.add_argument("--events", required=True)
    e.add_argument("--gt", required=True)
    e.add_argument("--tolerance", type=float, help="matching tolerance in seconds (default eval.tolerance_s)")
    e.add_argument("--fps", type=float, default=25.0)
    e.add_argument("--min-recall", type=float, help="exit 3 if any column's recall is below this")
    e.add_argument("--json", help="also write the report as JSON")
    e.set_defaults(func=cmd_eval)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 success, 1 oracle divergence, 2 collision or deadlock,
3 timeout or depth limit, 4 unsolvable instance, 64 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import campaign as camp
from .controller import order_targets
from .engine import ForcedPolicy, UnsolvableInstanceError, check_move_bound, make_policy, run, POLICIES
from .fileio import (
    MalformedInputError, dumps, instance_json, load_instance, load_pattern, pattern_json,
    read_trace, write_trace,
)
from .model import Configuration, InvalidConfigurationError, is_solvable, pattern_formed

EXIT_OK = 0
EXIT_DIVERGENCE = 1
EXIT_FAILURE = 2
EXIT_TIMEOUT = 3
EXIT_UNSOLVABLE = 4
EXIT_MALFORMED = 64

OUTCOME_EXIT = {"Success": EXIT_OK, "Collision": EXIT_FAILURE, "Deadlock": EXIT_FAILURE,
                "Timeout": EXIT_TIMEOUT, "Exhausted": EXIT_FAILURE}


class UsageError(Exception):
    """Bad flag combination; reported with the malformed-input exit code."""


def _emit(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_pair(args):
    if not args.instance or not args.pattern:
        raise UsageError("--instance and --pattern are required")
    inst = load_instance(args.instance)
    pattern = load_pattern(args.pattern)
    if len(pattern) != len(inst.robots):
        raise MalformedInputError(f"{len(inst.robots)} robots but {len(pattern)} targets")
    return inst, pattern


def _stats_json(out, args, pattern) -> dict:
    st = out.stats
    return {
        "outcome": out.kind,
        "policy": args.policy,
        "seed": args.seed,
        **st.as_dict(),
        "bound_constant": args.bound_constant,
        "bound_ok": out.kind == "Success" and check_move_bound(st, args.bound_constant),
        "pattern_formed": out.kind == "Success" and pattern_formed(out.final, pattern),
        "error": str(out.error) if out.error else None,
    }


def cmd_run(args) -> int:
    if args.campaign:
        return _campaign(args)
    inst, pattern = _load_pair(args)
    initial = inst.configuration()
    if not is_solvable(initial):
        print("unsolvable: the initial configuration is mirror symmetric about an empty axis",
              file=sys.stderr)
        return EXIT_UNSOLVABLE
    out = run(initial, order_targets(pattern), make_policy(args.policy, args.seed),
              max_events=args.max_events, fairness=args.fairness, record_trace=bool(args.trace))
    if args.trace:
        write_trace(args.trace, initial, pattern, out.trace, out.kind)
    _emit(_stats_json(out, args, pattern), args.stats)
    return OUTCOME_EXIT[out.kind]


def _campaign(args) -> int:
    records = []
    if args.instance:
        inst, pattern = _load_pair(args)
        if not is_solvable(inst.robots):
            return EXIT_UNSOLVABLE
        jobs = [(0, inst.robots, pattern, inst.chirality, args.seed + i) for i in range(args.campaign)]
    else:
        if args.robots is None:
            raise UsageError("--campaign needs --instance/--pattern or --robots")
        spread = args.spread if args.spread is not None else max(args.robots, 10)
        jobs = []
        for i in range(args.campaign):
            robots, pattern = camp.generate(args.robots, spread, args.seed + i)
            jobs.append((i, robots, pattern, None, args.seed + i))
    for idx, robots, pattern, chir, seed in jobs:
        if args.trace:
            initial = Configuration.from_points(robots, chirality=chir)
            out = run(initial, order_targets(pattern), make_policy(args.policy, seed),
                      max_events=args.max_events, fairness=args.fairness)
            path = Path(args.trace)
            write_trace(path.with_name(f"{path.stem}-{len(records):04d}{path.suffix}"),
                        initial, pattern, out.trace, out.kind)
        records.append(camp.run_one(idx, robots, pattern, args.policy, seed, chirality=chir,
                                    bound_constant=args.bound_constant, max_events=args.max_events,
                                    fairness=args.fairness))
    summary = camp_summary(records, args)
    _emit(summary, args.stats)
    kinds = {r.outcome for r in records}
    if kinds & {"Collision", "Deadlock"}:
        return EXIT_FAILURE
    if "Timeout" in kinds:
        return EXIT_TIMEOUT
    return EXIT_OK


def camp_summary(records, args) -> dict:
    from .report import summarize, write_report

    if args.report:
        return write_report(args.report, records, args.bound_constant)
    return summarize(records, args.bound_constant)


def cmd_generate(args) -> int:
    try:
        robots, pattern = camp.generate(args.robots, args.spread, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    inst = instance_json(robots)
    pat = pattern_json(pattern)
    if args.instance or args.pattern:
        if not (args.instance and args.pattern):
            raise UsageError("give both --instance and --pattern output paths, or neither")
        Path(args.instance).write_text(dumps(inst) + "\n")
        Path(args.pattern).write_text(dumps(pat) + "\n")
    else:
        sys.stdout.write(dumps({"instance": inst, "pattern": pat}) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    div = camp.oracle_campaign(args.count, args.seed)
    if div is None:
        print(f"ok: {args.count} configurations agree")
        return EXIT_OK
    repro = {"check": div.check, "robots": [list(p) for p in div.positions], "index": div.index,
             "fast": div.fast, "brute": div.brute}
    print(dumps(repro), file=sys.stderr)
    if args.out:
        Path(args.out).write_text(dumps(repro) + "\n")
    return EXIT_DIVERGENCE


def cmd_explore(args) -> int:
    from .oracle import COLLISION, DEADLOCK, DEPTH_EXCEEDED, explore_all_schedules

    inst, pattern = _load_pair(args)
    initial = inst.configuration()
    if not is_solvable(initial):
        return EXIT_UNSOLVABLE
    targets = order_targets(pattern)
    res = explore_all_schedules(initial, targets, depth_limit=args.depth)
    _emit({"states_visited": res.states_visited, "outcomes": dict(sorted(res.outcomes.items())),
           "counterexample": [list(e) for e in res.counterexample] if res.counterexample else None},
          args.stats)
    if res.counterexample and args.trace:
        out = run(initial, targets, ForcedPolicy(res.counterexample), fairness=None)
        write_trace(args.trace, initial, pattern, out.trace, out.kind)
    if res.outcomes.get(COLLISION) or res.outcomes.get(DEADLOCK):
        return EXIT_FAILURE
    if res.outcomes.get(DEPTH_EXCEEDED):
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_svg

    svg = render_svg(read_trace(args.trace))
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_replay(args) -> int:
    """Re-execute a trace file and check it ends where the recording says."""
    tf = read_trace(args.trace)
    out = run(tf.initial, order_targets(tf.targets), ForcedPolicy(tf.events()), fairness=None)
    same = [tuple(r) for r in out.trace] == [tuple(r) for r in tf.records]
    _emit({"outcome": out.kind, "recorded_outcome": tf.outcome, "identical": same,
           "final": [[r.id, r.pos.x, r.pos.y, r.light.value] for r in out.final.robots]}, args.stats)
    return EXIT_OK if same else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apfgrid", description="Luminous-robot pattern formation on a grid")
    sub = p.add_subparsers(dest="command", required=True)

    def files(sp):
        sp.add_argument("--instance", help="instance JSON: {robots: [[x, y], ...], chirality: [...]}")
        sp.add_argument("--pattern", help="pattern JSON: {targets: [[x, y], ...]}")
        sp.add_argument("--stats", help="write the JSON report here instead of stdout")

    r = sub.add_parser("run", help="simulate one run or a seeded campaign")
    files(r)
    r.add_argument("--policy", choices=sorted(POLICIES), default="random")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--fairness", type=int, default=16, help="starvation bound B (events per robot)")
    r.add_argument("--max-events", type=int, default=1_000_000)
    r.add_argument("--trace", help="JSONL trace output (campaigns add a run suffix)")
    r.add_argument("--bound-constant", type=int, default=10)
    r.add_argument("--campaign", type=int, default=0, metavar="N", help="run N seeds")
    r.add_argument("--robots", type=int, help="campaign: generate instances with this many robots")
    r.add_argument("--spread", type=int, help="campaign: coordinate range for generated instances")
    r.add_argument("--report", help="campaign: directory for runs.csv, summary.json and moves.png")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("generate", help="sample a solvable instance and a pattern")
    g.add_argument("--robots", type=int, required=True)
    g.add_argument("--spread", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--instance", help="instance output path")
    g.add_argument("--pattern", help="pattern output path")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="compare fast geometry with brute-force oracles")
    v.add_argument("--count", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="write the first divergence here")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("explore", help="exhaust every schedule of a small instance")
    files(e)
    e.add_argument("--depth", type=int, default=100_000)
    e.add_argument("--trace", help="write a counterexample trace here, if any")
    e.set_defaults(func=cmd_explore)

    d = sub.add_parser("render", help="draw a trace as SVG")
    d.add_argument("--trace", required=True)
    d.add_argument("--out")
    d.set_defaults(func=cmd_render)

    y = sub.add_parser("replay", help="re-execute a trace and compare")
    y.add_argument("--trace", required=True)
    y.add_argument("--stats")
    y.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MalformedInputError, UsageError, InvalidConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except UnsolvableInstanceError as exc:
        print(f"unsolvable: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE


if __name__ == "__main__":
    sys.exit(main())

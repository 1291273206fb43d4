"""Command-line surface.

    hearth replay <scenario>        run a scenario through a fresh engine
    hearth serve                    start the loopback HTTP API
    hearth diarize <scenario>       replay segments only, print turns and DER
    hearth fuse <scenario>          replay sensors only, print fusion stats
    hearth memory search <query>    top-k over the current workspace
    hearth rules check <file>       validate a watch-rule file

Usage errors exit 2 (argparse's default); operational errors exit 1.
"""

from __future__ import annotations

import argparse
import sys
import tempfile

from . import api, automation, scenario, timeutil
from .config import Config
from .diarization import EmptyReference
from .engine import Engine
from .errors import HearthError


def _build_config(args: argparse.Namespace) -> Config:
    config = Config.from_file(args.config) if args.config else Config()
    if args.seed is not None:
        config.seed = args.seed
    if args.offline:
        config.offline = True
    if getattr(args, "data_dir", None):
        config.data_dir = args.data_dir
    return config


def _print_actions(engine: Engine, limit: int | None = None) -> None:
    records = engine.action_records[-limit:] if limit else engine.action_records
    for r in records:
        addressee = f" -> {r['addressee']}" if r["addressee"] else ""
        print(f"[{r['timestamp']}] {r['kind']}{addressee}: {r['text']}")


def cmd_replay(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not args.data_dir:
        config.data_dir = tempfile.mkdtemp(prefix="hearth-replay-")
    engine = scenario.replay(args.scenario, config)
    try:
        print(f"replayed {args.scenario}: {len(engine.action_records)} actions")
        if args.verbose:
            _print_actions(engine)
        print(f"action log: {engine.store.actions.path}")
        print(f"egress invocations: {engine.gate.invocations}")
    finally:
        engine.close()
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if args.port is not None:
        config.port = args.port
    if args.host is not None:
        config.host = args.host
    engine = Engine(config)
    if args.clock:
        engine.advance_clock(timeutil.parse_timestamp(args.clock))
    print(f"listening on http://{config.host}:{config.port}")
    try:
        api.serve_forever(engine)
    except KeyboardInterrupt:
        pass
    finally:
        engine.close()
    return 0


def cmd_diarize(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not getattr(args, "data_dir", None):
        config.data_dir = tempfile.mkdtemp(prefix="hearth-diarize-")
    engine = scenario.replay(args.scenario, config)
    try:
        turns = engine.hyp_turns
        print(f"{len(turns)} speaker turns:")
        for t in turns:
            print(f"  {t.speaker}: {t.t_start:.2f} .. {t.t_end:.2f}")
        if engine.truth_turns:
            try:
                der = engine.diarization_error_rate()
                print(f"DER: {der:.4f}")
            except EmptyReference:
                pass
    finally:
        engine.close()
    return 0


def cmd_fuse(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not getattr(args, "data_dir", None):
        config.data_dir = tempfile.mkdtemp(prefix="hearth-fuse-")
    engine = scenario.replay(args.scenario, config)
    try:
        stats = engine.stats()
        print(f"date: {stats['date']}")
        print("occupancy (seconds):")
        for room, secs in stats["occupancy_seconds"].items():
            print(f"  {room}: {secs:.0f}")
        print(f"sedentarization: {stats['sedentarization']:.3f}")
        print("activity labels:")
        for label in stats["activity_labels"]:
            print(f"  {label['label']}: {label['t_start']} .. {label['t_end']} ({label['origin']})")
    finally:
        engine.close()
    return 0


def cmd_memory_search(args: argparse.Namespace) -> int:
    config = _build_config(args)
    engine = Engine(config)
    try:
        engine.advance_clock(timeutil.parse_timestamp(args.now))
        hits = engine.memory_search(args.query, args.k)
        if not hits:
            print("no matches")
        for i, (item, sim) in enumerate(hits, start=1):
            print(f"{i}. [{sim:.4f}] ({item.source.value}) {item.text[:100]}")
    finally:
        engine.close()
    return 0


def cmd_memory_delete(args: argparse.Namespace) -> int:
    # the sole sanctioned path that removes a permanent memory item
    config = _build_config(args)
    engine = Engine(config)
    try:
        if engine.memstore.delete_permanent(args.item_id):
            print(f"deleted {args.item_id}")
            return 0
        print(f"error: no permanent item {args.item_id}", file=sys.stderr)
        return 1
    finally:
        engine.close()


def cmd_rules_check(args: argparse.Namespace) -> int:
    rules = automation.load_watch_rules(args.rules)
    print(f"{len(rules)} rule(s) OK:")
    for rule in rules:
        print(
            f"  {rule.rule_id}: >= {rule.n_min}/night on >= {rule.m_min} of the last "
            f"{rule.window_nights} nights -> {rule.action} (cooldown {rule.cooldown_days}d)"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hearth", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--offline", action="store_true", help="disable all external clients")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="replay a scenario file")
    p.add_argument("scenario")
    p.add_argument("--data-dir", help="engine data directory")
    p.add_argument("--verbose", action="store_true", help="print every action")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the loopback HTTP API")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--data-dir")
    p.add_argument("--clock", help="initial virtual clock (ISO timestamp)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("diarize", help="replay and print speaker turns + DER")
    p.add_argument("scenario")
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_diarize)

    p = sub.add_parser("fuse", help="replay and print sensor fusion stats")
    p.add_argument("scenario")
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("memory", help="memory operations")
    msub = p.add_subparsers(dest="memory_command", required=True)
    ps = msub.add_parser("search", help="search the workspace")
    ps.add_argument("query")
    ps.add_argument("--k", type=int, default=5)
    ps.add_argument("--data-dir")
    ps.add_argument("--now", default="2026-01-01T12:00:00",
                    help="virtual clock for expiry checks")
    ps.set_defaults(func=cmd_memory_search)
    pd = msub.add_parser("delete", help="administratively delete a permanent item")
    pd.add_argument("item_id")
    pd.add_argument("--data-dir")
    pd.set_defaults(func=cmd_memory_delete)

    p = sub.add_parser("rules", help="watch-rule operations")
    rsub = p.add_subparsers(dest="rules_command", required=True)
    pc = rsub.add_parser("check", help="validate a watch-rule file")
    pc.add_argument("rules")
    pc.set_defaults(func=cmd_rules_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HearthError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

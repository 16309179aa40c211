"""Command line entry point: ``centralizer-lab <subcommand>``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .constructions import build_block_hierarchy, dump_hierarchy
from .io import format_language
from .report import (
    EXIT_CONFIG,
    ConfigError,
    action_from_config,
    load_config,
    run_scenario,
    schedule_from_config,
    validate_config,
)
from .subshift import BudgetExceeded, SubstitutionSequence, generate_language, generate_union_language


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    cfg = load_config(args.config, args.seed, args.out)
    rep = run_scenario(cfg)
    print(rep.summary())
    if not cfg.output:
        sys.stdout.write(rep.to_json(timings=not args.no_timings))
    return rep.exit_code


def _cmd_oracle(args) -> int:
    cfg = load_config(args.config, args.seed, args.out)
    body = dict(cfg.body)
    for key in ("automorphisms", "normalizer_candidates", "horizons", "oracle"):
        body.pop(key, None)
    if args.L is not None:
        body["L"] = args.L
    if args.K is not None:
        body["K"] = args.K
    hz = cfg.body.get("horizons", {})
    body.setdefault("L", hz.get("L", 8))
    body.setdefault("K", hz.get("K", 4))
    raw = {"kind": "oracle-compare", **body}
    rep = run_scenario(validate_config(raw, cfg.seed, cfg.output))
    print(rep.summary())
    return rep.exit_code


def _cmd_dump_language(args) -> int:
    cfg = load_config(args.config)
    action = action_from_config(cfg.body)
    seq = SubstitutionSequence.from_action(action, schedule_from_config(cfg.body, action))
    hz = cfg.body.get("horizons", {})
    L = args.L or cfg.body.get("L") or hz.get("L", 8)
    K = args.K if args.K is not None else cfg.body.get("K", hz.get("K", 4))
    budget = cfg.body.get("budget")
    if args.letter is None:
        lang = generate_union_language(seq, L, K, budget)
    else:
        lang = generate_language(seq, args.letter, L, K, budget)
    _emit(format_language(lang), args.out)
    return 0


def _cmd_dump_hierarchy(args) -> int:
    cfg = load_config(args.config)
    b = cfg.body
    if cfg.kind != "block-hierarchy":
        raise ConfigError("$.kind", "dump-hierarchy needs a block-hierarchy config")
    markers = {int(k): [tuple(w) for w in v] for k, v in b.get("markers", {}).items()} or None
    density = {int(k): Fraction(str(v)) for k, v in b.get("density", {}).items()} or None
    kw = {k: b[k] for k in ("k_cap", "enumeration_cap") if k in b}
    h = build_block_hierarchy(action_from_config(b), b["levels"], markers, density, **kw)
    _emit(dump_hierarchy(h, words=not args.no_words), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="centralizer-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config and write a report")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--no-timings", action="store_true", help="omit the timing section from stdout")
    run.set_defaults(func=_cmd_run)

    orc = sub.add_parser("oracle-compare", help="compare the generator against the brute-force oracle")
    orc.add_argument("--config", required=True)
    orc.add_argument("--L", type=int)
    orc.add_argument("--K", type=int)
    orc.add_argument("--seed", type=int)
    orc.add_argument("--out")
    orc.set_defaults(func=_cmd_oracle)

    dl = sub.add_parser("dump-language", help="write a stratified language dump")
    dl.add_argument("--config", required=True)
    dl.add_argument("--letter", type=int, help="seed letter; default is the union over all letters")
    dl.add_argument("--L", type=int)
    dl.add_argument("--K", type=int)
    dl.add_argument("--out")
    dl.set_defaults(func=_cmd_dump_language)

    dh = sub.add_parser("dump-hierarchy", help="write the block hierarchy levels")
    dh.add_argument("--config", required=True)
    dh.add_argument("--no-words", action="store_true")
    dh.add_argument("--out")
    dh.set_defaults(func=_cmd_dump_hierarchy)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

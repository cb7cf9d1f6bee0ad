"""``unspell`` command line.

Exit status: 0 on success, 1 on a runtime failure (one ``unspell: <Kind>: message``
line on stderr), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .commands import UsageError, do_eval, do_ingest, do_report, do_synth, do_train, resolve
from .experiments import PRESETS, execute, make_plan


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        p.add_argument("--config", metavar="JSON", help="flat JSON config; flags and key=value overrides win")
    p.add_argument("--seed", type=int, help="seed for every random stream of the command")
    p.add_argument("overrides", nargs="*", metavar="key=value", help="config overrides")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="unspell", description="Train and evaluate text-line recognisers against unpaired text.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    ap.subcommands = sub.choices

    p = sub.add_parser("synth", help="render a synthetic train/test dataset")
    p.add_argument("--corpus", help="text file, one entry per line")
    p.add_argument("--kind", choices=("word", "line"))
    p.add_argument("--len", dest="length", type=int, help="word length filter, or line truncation length")
    p.add_argument("--n", type=int, help="sequence length (image width n*16)")
    p.add_argument("--out")
    p.add_argument("--count-train", dest="count_train", type=int)
    p.add_argument("--count-test", dest="count_test", type=int)
    p.add_argument("--background-dir", dest="background_dir")
    p.add_argument("--test-corpus", dest="test_corpus")
    p.add_argument("--clean", action="store_const", const=True, help="white background, black ink, no noise")
    _common(p)

    p = sub.add_parser("train", help="adversarial or supervised training with restarts")
    p.add_argument("--dataset")
    p.add_argument("--corpus")
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("eval", help="accuracy, predictions and confusion of a checkpoint on a test shard")
    p.add_argument("--checkpoint")
    p.add_argument("--dataset", help="shard directory or dataset root (its test split is used)")
    p.add_argument("--out")
    p.add_argument("--count", type=int)
    _common(p)

    p = sub.add_parser("ingest-lines", help="build shards from PGM/PPM line images and transcripts")
    p.add_argument("--images")
    p.add_argument("--transcripts")
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    p.add_argument("--test-count", dest="test_count", type=int)
    p.add_argument("--channels", type=int, choices=(1, 3))
    _common(p)

    p = sub.add_parser("report", help="CSV tables and SVG figures from run logs and eval outputs")
    p.add_argument("root", help="run, training or experiment directory")
    p.add_argument("--out")
    _common(p, config=False)

    p = sub.add_parser("experiment", help="run a named experiment preset")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out")
    p.add_argument("--corpus", help="word list (wordlen-convergence) or line corpus")
    p.add_argument("--words", help="word list for the short evaluation sets (length-generalisation)")
    p.add_argument("--alt-corpus", dest="alt_corpus", help="unrelated line corpus (corpus-variation)")
    p.add_argument("--images")
    p.add_argument("--transcripts")
    p.add_argument("--n", type=int)
    p.add_argument("--test-count", dest="test_count", type=int)
    p.add_argument("--dry-run", action="store_true", help="print the plan without running it")
    _common(p, config=False)
    return ap


def _flags(args: argparse.Namespace, skip=("command", "verbose", "config", "overrides")) -> dict:
    return {k: v for k, v in vars(args).items() if k not in skip}


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=str))


def _parse(argv: list[str]) -> argparse.Namespace:
    # subcommands parse intermixed so key=value overrides may follow or precede options
    ap = build_parser()
    head = 0
    while head < len(argv) and argv[head] in ("-v", "--verbose"):
        head += 1
    if head == len(argv) or argv[head] not in ap.subcommands:
        return ap.parse_args(argv)  # help, or a usage error
    args = ap.subcommands[argv[head]].parse_intermixed_args(argv[head + 1:])
    args.command, args.verbose = argv[head], head > 0
    return args


def dispatch(argv=None) -> int:
    args = _parse(list(sys.argv[1:] if argv is None else argv))
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    cmd = args.command
    if cmd == "experiment":
        opts = _flags(args, skip=("command", "verbose", "overrides", "name", "dry_run"))
        opts["out"] = opts["out"] or f"experiments/{args.name}"
        plan = make_plan(args.name, opts, args.overrides)
        if args.dry_run:
            _emit(plan.as_dict())
            return 0
        results = execute(plan, log=lambda msg: print(msg, file=sys.stderr) if args.verbose else None)
        _emit({"experiment": plan.name, "runs": plan.run_count, "results": results})
        return 0
    cfg = resolve(cmd, getattr(args, "config", None), _flags(args), args.overrides)
    _emit({"command": cmd, "config": cfg})
    body = {"synth": do_synth, "train": do_train, "eval": do_eval, "ingest-lines": do_ingest, "report": do_report}
    _emit(body[cmd](cfg))
    return 0


def main(argv=None) -> int:
    try:
        return dispatch(argv)
    except UsageError as exc:
        print(f"unspell: usage: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("unspell: interrupted", file=sys.stderr)
        return 130
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"unspell: {type(exc).__name__}: {' '.join(str(exc).split())}", file=sys.stderr)
        return 1

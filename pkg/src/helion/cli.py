"""Command-line entry point: ``helion <subcommand> ...``.

Exit status: 0 on success (and no violations), 1 when ``check`` finds
violations, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .events import Sequence, format_corpus, parse_line, read_corpus
from .generator import Flavor, GenerationConfig, Mode, Pick, extract_routines, generate
from .ingest import IngestError, dump_routines, ingest
from .ngram import DEFAULT_SENTENCE_LENGTH, NgramModel, kfold_entropy, segment, train
from .scheduler import DEFAULT_DAYS, extract_sequence, schedule
from .seeding import derive_seed
from .snapshot import check, default_policies, load_policies, render_report
from .synthetic import make_routine_file

log = logging.getLogger("helion")

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[Path] = field(default_factory=list)
    output: Path | None = None
    seed: int = 0
    verbosity: int = 0

    def validate(self) -> None:
        missing = [str(p) for p in self.inputs if not p.exists()]
        if missing:
            raise UsageError(f"input file(s) not found: {', '.join(missing)}")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def parse_orders(text: str) -> list[int]:
    """``3``, ``1..10`` or ``1,2,4``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            orders = list(range(int(lo), int(hi) + 1))
        else:
            orders = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order spec {text!r}") from None
    if not orders or min(orders) < 1:
        raise argparse.ArgumentTypeError("orders must be >= 1")
    return orders


def _sentence_length(n: int) -> int | None:
    return n or None


# -- subcommands ---------------------------------------------------------------


def _ingest_result(args):
    result = ingest(args.routines, args.synonyms, args.abstraction, args.devices)
    for d in result.diagnostics:
        if d.severity != "info" or args.verbose:
            print(str(d), file=sys.stderr)
    if result.errors:
        raise UsageError(f"{len(result.errors)} routine(s) failed validation")
    return result


def cmd_ingest(args) -> int:
    result = ingest(args.routines, args.synonyms, args.abstraction, args.devices)
    for d in result.diagnostics:
        print(str(d), file=sys.stderr)
    _emit(dump_routines(result.routines), args.out)
    return EXIT_USAGE if result.errors else EXIT_OK


def cmd_schedule(args) -> int:
    result = _ingest_result(args)
    sequences, rows = [], ["day,hour,routine_id"]
    for user, routines in result.by_user().items():
        timeline = schedule(routines, args.days, derive_seed(args.seed, f"schedule:{user}"))
        sequences.append(extract_sequence(timeline, routines, user))
        rows += timeline.dump().splitlines()[1:]
        log.info("%s: %d routines, %d events", user, len(routines), len(sequences[-1]))
    _emit(format_corpus(sequences), args.out)
    if args.timeline:
        args.timeline.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = segment(read_corpus(args.corpus), _sentence_length(args.sentence_length))
    model = train(corpus, args.order)
    text = model.dumps()
    _emit(text, args.out)
    return EXIT_OK


def cmd_entropy(args) -> int:
    corpus = read_corpus(args.corpus)
    fold_seed = derive_seed(args.seed, "folds")
    lines = ["n,fold,H,tokens"]
    means = []
    for n in args.order:
        report = kfold_entropy(corpus, n, args.k, fold_seed, _sentence_length(args.sentence_length))
        lines += [f"{n},{f.fold},{f.entropy:.6f},{f.tokens}" for f in report.per_fold]
        means.append(f"{n},mean,{report.mean:.6f},{report.tokens}")
        log.info("n=%d H=%.4f perplexity=%.4f", n, report.mean, report.perplexity)
    _emit("\n".join(lines + means) + "\n", args.out)
    return EXIT_OK


def _histories(spec: str) -> list[Sequence]:
    path = Path(spec)
    if path.exists():
        return read_corpus(path)
    return [parse_line(line, "inline") for line in spec.split(";") if line.strip()]


def cmd_generate(args) -> int:
    model = NgramModel.load(args.model)
    histories = _histories(args.history)
    if not histories:
        raise UsageError("no history given")
    out = []
    for i, hist in enumerate(histories):
        cfg = GenerationConfig(
            length=args.length,
            flavor=Flavor.parse(args.flavor),
            mode=Mode.GREEDY if args.greedy else Mode.SAMPLE,
            seed=derive_seed(args.seed, f"generate:{i}"),
        )
        scenario = generate(model, hist.tokens, cfg)
        out += [scenario.annotation(), scenario.to_line()]
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_extract(args) -> int:
    corpus = read_corpus(args.corpus)
    model = train(segment(corpus, _sentence_length(args.sentence_length)), args.order)
    pairs = extract_routines(
        model,
        corpus,
        args.rounds,
        derive_seed(args.seed, "extract"),
        pick=Pick.DOWN if args.flavor == "down" else Pick.UP,
        mode=Mode.GREEDY if args.greedy else Mode.SAMPLE,
        sentence_length=_sentence_length(args.sentence_length),
    )
    _emit("".join(f"{t}\t{a}\n" for t, a in pairs), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    policies = load_policies(args.policies) if args.policies else default_policies()
    scenarios = read_corpus(args.scenario)
    text, records, found = [], [], 0
    for i, scenario in enumerate(scenarios):
        violations = check(scenario, policies)
        report = render_report(violations, scenario, name=f"scenario {i}")
        found += len(violations)
        text.append(report.text)
        records.append(report.records_jsonl())
    _emit("".join(records) if args.format == "records" else "".join(text), args.out)
    return EXIT_VIOLATIONS if found else EXIT_OK


def cmd_synth(args) -> int:
    doc = make_routine_file(args.users, args.per_user, args.seed)
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helion", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"helion {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def common(p, seed=True):
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="global random seed (default: 0)")
        p.add_argument("-v", "--verbose", action="count", default=0, help="more logging")

    def routine_inputs(p):
        p.add_argument("--routines", type=Path, required=True, help="routine file (JSON)")
        p.add_argument("--synonyms", type=Path, help="synonym table (JSON)")
        p.add_argument("--abstraction", type=Path, help="continuous-value range map (JSON)")
        p.add_argument("--devices", type=Path, help="device-attribute map (JSON)")

    def sentence_length(p):
        p.add_argument("--sentence-length", type=int, default=DEFAULT_SENTENCE_LENGTH,
                       help="split sequences into sentences of this many tokens; 0 disables")

    p = sub.add_parser("ingest", help="validate and normalize a routine file")
    routine_inputs(p)
    common(p, seed=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("schedule", help="schedule routines into per-user event sequences")
    routine_inputs(p)
    p.add_argument("--days", type=int, default=DEFAULT_DAYS, help="horizon in days (default: 30)")
    p.add_argument("--timeline", type=Path, help="also write day,hour,routine_id rows here")
    common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("train", help="train an n-gram model on a corpus")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--order", type=int, default=3)
    sentence_length(p)
    common(p, seed=False)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("entropy", help="k-fold cross-entropy table")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--order", type=parse_orders, default=parse_orders("1..10"), help="e.g. 3, 1..10 or 2,3,4")
    p.add_argument("--k", type=int, default=10, help="number of folds (default: 10)")
    sentence_length(p)
    common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("generate", help="generate scenarios from a model")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--history", required=True,
                   help="corpus file of histories, or inline tokens (';' separates histories)")
    p.add_argument("--flavor", choices=["up", "down", "up-down", "down-up"], default="up")
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--greedy", action="store_true", help="up picks take the argmax instead of sampling")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("extract-routines", help="mine trigger/action pairs from generated continuations")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--flavor", choices=["up", "down"], default="up")
    p.add_argument("--greedy", action="store_true")
    sentence_length(p)
    common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("check", help="replay scenarios and check policies")
    p.add_argument("--scenario", type=Path, required=True, help="scenario file (corpus format)")
    p.add_argument("--policies", type=Path, help="policy file (default: bundled 17-policy pack)")
    p.add_argument("--format", choices=["text", "records"], default="text")
    common(p, seed=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="write a synthetic routine file")
    p.add_argument("--users", type=int, default=10)
    p.add_argument("--routines", dest="per_user", type=int, default=25, help="routines per user")
    common(p)
    p.set_defaults(func=cmd_synth)
    return parser


_INPUT_ARGS = ("routines", "synonyms", "abstraction", "devices", "corpus", "model", "scenario", "policies")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    config = RunConfig(
        subcommand=args.command,
        inputs=[getattr(args, a) for a in _INPUT_ARGS if getattr(args, a, None) is not None],
        output=args.out,
        seed=getattr(args, "seed", 0),
        verbosity=args.verbose,
    )
    try:
        config.validate()
        return args.func(args)
    except (UsageError, IngestError, ValueError, OSError) as exc:
        print(f"helion {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

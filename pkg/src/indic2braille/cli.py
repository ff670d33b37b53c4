"""Command-line interface: translate, train, evaluate, inspect-table, generate.

Exit codes: 0 success, 1 lint findings, 2 unreadable or invalid input files,
3 script detection failure, 4 ambiguous text without a model, 5 training
divergence.
"""
from __future__ import annotations

import argparse
import contextlib
import os
import sys
import tempfile
from pathlib import Path

from .corpus import (build_vocab, encode_examples, generate_corpus, read_gold_files, read_training,
                     write_gold, write_training)
from .errors import (CorpusError, DetectionFailure, DivergenceError, FormatError, MissingModel,
                     TableError)
from .evaluation import evaluate
from .pipeline import translate_hybrid
from .rules import (BUNDLED_TABLES, bundled_table, bundled_table_text, has_problems, lint_table,
                    read_table_files)
from .script import Script, detect_script
from .tagger import TrainConfig, load_model, save_model, train

EXIT_FINDINGS, EXIT_LOAD, EXIT_DETECT, EXIT_MODEL, EXIT_DIVERGED = 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _warn(msg):
    print(msg, file=sys.stderr)


@contextlib.contextmanager
def atomic_output(path: str | None, mode="w"):
    """Yield a writable stream; a file target only appears once the block succeeds."""
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _load_table(args):
    try:
        return read_table_files(args.table) if args.table else bundled_table()
    except (OSError, UnicodeDecodeError, TableError) as exc:
        raise CliError(f"cannot load table: {exc}", EXIT_LOAD) from None


def _load_model(path):
    if path is None:
        return None
    try:
        return load_model(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, FormatError) as exc:
        raise CliError(f"cannot load model: {exc}", EXIT_LOAD) from None


def _script_arg(value: str):
    if value == "auto":
        return None
    try:
        return Script.parse(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown script {value!r}") from None


def _open_input(path):
    if path is None or path == "-":
        return contextlib.nullcontext(sys.stdin)
    try:
        return open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}", EXIT_LOAD) from None


def cmd_translate(args) -> int:
    table = _load_table(args)
    model = _load_model(args.model)
    last_script = args.script
    with _open_input(args.input) as src, atomic_output(args.output) as out:
        for lineno, raw in enumerate(src, 1):
            line = raw.rstrip("\n")
            ending = raw[len(line):]
            if line.endswith("\r"):
                line, ending = line[:-1], "\r" + ending
            script = args.script
            if script is None and not line.strip():
                script = last_script or Script.DEVANAGARI  # only whitespace: any script gives blanks
            elif script is None:
                try:
                    script = detect_script(line)
                except DetectionFailure:
                    if last_script is None:
                        raise CliError(f"line {lineno}: no supported script detected", EXIT_DETECT) from None
                    script = last_script
                last_script = script
            try:
                result = translate_hybrid(line, table, model, script)
            except MissingModel as exc:
                raise CliError(f"line {lineno}: {exc}; pass --model", EXIT_MODEL) from None
            for item in result.untranslated:
                _warn(f"warning: line {lineno}: untranslated {item.text!r}")
            out.write(result.render(args.format) + ending)
    return 0


def cmd_train(args) -> int:
    table = _load_table(args)
    try:
        text = Path(args.corpus).read_text(encoding="utf-8")
        examples = read_training(text, table.tags())
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read corpus: {exc}", EXIT_LOAD) from None
    except CorpusError as exc:
        raise CliError(f"corpus {args.corpus}: {exc}", EXIT_LOAD) from None
    if not examples:
        raise CliError(f"corpus {args.corpus} is empty", EXIT_LOAD)
    vocab = build_vocab(examples, table)
    config = TrainConfig(
        epochs=args.epochs, lr=args.lr, d_emb=args.d_emb, d_hidden=args.d_hidden,
        dropout=args.dropout, seed=args.seed, layers=args.layers,
    )
    progress = (lambda e, loss: _warn(f"epoch {e}: loss {loss:.6f}")) if args.verbose else None
    try:
        model, trace = train(encode_examples(examples, vocab), vocab, config, progress)
    except DivergenceError as exc:
        raise CliError(f"training diverged: {exc}", EXIT_DIVERGED) from None
    trace_path = args.loss_trace or f"{args.model}.loss.tsv"
    with atomic_output(args.model) as fh:
        fh.write(save_model(model))
    with atomic_output(trace_path) as fh:
        fh.write("epoch\tloss\n")
        fh.writelines(f"{i}\t{loss:.17g}\n" for i, loss in enumerate(trace, 1))
    _warn(f"trained on {len(examples)} examples; loss {trace[0]:.4f} -> {trace[-1]:.4f}")
    return 0


def cmd_evaluate(args) -> int:
    table = _load_table(args)
    model = _load_model(args.model)
    try:
        pairs = read_gold_files(args.gold)
    except (OSError, UnicodeDecodeError, CorpusError) as exc:
        raise CliError(f"cannot read gold corpus: {exc}", EXIT_LOAD) from None
    if not pairs:
        raise CliError("gold corpus is empty", EXIT_LOAD)
    report = evaluate(pairs, table, model)
    for idx, msg in report.failures:
        _warn(f"warning: pair {idx + 1}: {msg}")
    with atomic_output(args.output) as out:
        out.write(report.to_tsv() if args.tsv else report.render())
    return 0


def cmd_inspect_table(args) -> int:
    if not args.table:
        raise CliError("inspect-table needs --table", EXIT_LOAD)
    bundled = {name: script for script, name in BUNDLED_TABLES.items()}
    status = 0
    for path in args.table:
        try:
            if not Path(path).exists() and path in bundled:
                text = bundled_table_text(bundled[path])
            else:
                text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise CliError(f"cannot read table: {exc}", EXIT_LOAD) from None
        findings = lint_table(text)
        for f in findings:
            print(f"{path}: {f}")
        if has_problems(findings):
            status = EXIT_FINDINGS
    return status


def cmd_generate(args) -> int:
    table = _load_table(args)
    script = args.script or Script.DEVANAGARI
    corpus = generate_corpus(table, script, args.n, args.seed, args.rate)
    with atomic_output(args.gold_out) as fh:
        fh.write(write_gold(corpus.pairs))
    if args.train_out:
        with atomic_output(args.train_out) as fh:
            fh.write(write_training(corpus.training))
    return 0


def build_parser() -> argparse.ArgumentParser:
    defaults = TrainConfig()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--table", action="append", metavar="PATH",
                        help="rule table file (repeatable; default: all bundled tables)")
    common.add_argument("--model", metavar="PATH", help="tagger model file")
    common.add_argument("--script", type=_script_arg, default=None, metavar="NAME",
                        help='script name or "auto" (default)')
    common.add_argument("--format", choices=("unicode", "brf", "dots"), default="unicode")
    common.add_argument("-i", "--input", metavar="PATH", help="input file (default: stdin)")
    common.add_argument("-o", "--output", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=defaults.seed)
    common.add_argument("--epochs", type=int, default=defaults.epochs)
    common.add_argument("--lr", type=float, default=defaults.lr)
    common.add_argument("--d-emb", type=int, default=defaults.d_emb)
    common.add_argument("--d-hidden", type=int, default=defaults.d_hidden)
    common.add_argument("--dropout", type=float, default=defaults.dropout)
    common.add_argument("--layers", type=int, default=defaults.layers)

    parser = argparse.ArgumentParser(prog="indic2braille", description="Indic text to Bharti Braille.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translate", parents=[common], help="translate text to braille")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("train", parents=[common], help="train the disambiguation tagger")
    p.add_argument("--corpus", required=True, metavar="PATH", help="tagged training TSV")
    p.add_argument("--loss-trace", metavar="PATH", help="loss trace TSV (default: MODEL.loss.tsv)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="score against a gold corpus")
    p.add_argument("--gold", action="append", required=True, metavar="PATH")
    p.add_argument("--tsv", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inspect-table", parents=[common], help="lint rule tables")
    p.set_defaults(func=cmd_inspect_table)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic gold corpus")
    p.add_argument("-n", type=int, default=100, help="number of sentences")
    p.add_argument("--rate", type=float, default=0.1, help="ambiguity injection rate")
    p.add_argument("--gold-out", metavar="PATH", help="gold TSV (default: stdout)")
    p.add_argument("--train-out", metavar="PATH", help="tagged training TSV")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train" and not args.model:
        _warn("error: train needs --model PATH for the output model")
        return EXIT_LOAD
    try:
        return args.func(args)
    except CliError as exc:
        _warn(f"error: {exc}")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

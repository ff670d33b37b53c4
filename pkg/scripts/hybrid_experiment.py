#!/usr/bin/env python3
"""Train one tagger per script and report held-in and held-out accuracy.

The training corpus is generated with ``--seed``; the held-out corpus uses a
disjoint seed, so its sentences were never seen in training. Both reports are
printed in the usual four-column layout (Script, Rule Based, LSTM, Total).

    python3 scripts/hybrid_experiment.py -n 500 --rate 0.1 --out runs/hybrid
"""
import argparse
import time
from pathlib import Path

from indic2braille.corpus import build_vocab, encode_examples, generate_corpus
from indic2braille.evaluation import EvalReport, evaluate
from indic2braille.rules import bundled_table
from indic2braille.script import Script
from indic2braille.tagger import TrainConfig, save_model, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=500, help="training sentences per script")
    ap.add_argument("--held-out", type=int, default=200, help="held-out sentences per script")
    ap.add_argument("--rate", type=float, default=0.1, help="ambiguity injection rate")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    ap.add_argument("--scripts", nargs="*", type=Script.parse, default=list(Script))
    ap.add_argument("--out", type=Path, help="directory for models and TSV reports")
    args = ap.parse_args()

    table = bundled_table()
    held_in, held_out = EvalReport(), EvalReport()
    for script in args.scripts:
        t0 = time.perf_counter()
        corpus = generate_corpus(table, script, args.n, seed=args.seed, ambiguity_rate=args.rate)
        vocab = build_vocab(corpus.training, table, [script])
        config = TrainConfig(epochs=args.epochs, seed=args.seed)
        model, trace = train(encode_examples(corpus.training, vocab), vocab, config)
        fresh = generate_corpus(table, script, args.held_out, seed=args.seed + 10_000, ambiguity_rate=args.rate)
        held_in.rows.update(evaluate(corpus.pairs, table, model).rows)
        held_out.rows.update(evaluate(fresh.pairs, table, model).rows)
        print(f"{script.label}: {len(corpus.training)} examples, loss {trace[0]:.4f} -> {trace[-1]:.4f}, "
              f"{time.perf_counter() - t0:.1f}s", flush=True)
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"{script.name.lower()}.model").write_text(save_model(model), encoding="utf-8")

    print("\nHeld-in (training sentences)\n")
    print(held_in.render())
    print("Held-out (unseen sentences)\n")
    print(held_out.render())
    if args.out:
        (args.out / "held_in.tsv").write_text(held_in.to_tsv(), encoding="utf-8")
        (args.out / "held_out.tsv").write_text(held_out.to_tsv(), encoding="utf-8")


if __name__ == "__main__":
    main()

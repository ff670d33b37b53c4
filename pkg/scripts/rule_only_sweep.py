#!/usr/bin/env python3
"""Rule-only accuracy as a function of the ambiguity injection rate.

For each script and rate, generates a synthetic corpus and scores the rule
pass alone (every ambiguous site takes the table's first candidate). At 6%
injection the Devanagari figure lands near 0.94.

    python3 scripts/rule_only_sweep.py --rates 0 0.03 0.06 0.1 -n 500
"""
import argparse

from indic2braille.corpus import generate_corpus
from indic2braille.evaluation import evaluate
from indic2braille.rules import bundled_table
from indic2braille.script import Script


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rates", type=float, nargs="+", default=[0.0, 0.03, 0.06, 0.1, 0.2])
    ap.add_argument("-n", type=int, default=500, help="sentences per script and rate")
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--scripts", nargs="*", type=Script.parse, default=list(Script))
    args = ap.parse_args()

    table = bundled_table()
    print("\t".join(["Script", *(f"rate={r:g}" for r in args.rates)]))
    for script in args.scripts:
        cells = []
        for rate in args.rates:
            accs = []
            for seed in range(args.seeds):
                corpus = generate_corpus(table, script, args.n, seed=seed, ambiguity_rate=rate)
                accs.append(float(evaluate(corpus.pairs, table).rows[script].rule.accuracy))
            mean = sum(accs) / len(accs)
            cells.append(f"{mean:.4f} ({min(accs):.3f}-{max(accs):.3f})")
        print("\t".join([script.label, *cells]), flush=True)


if __name__ == "__main__":
    main()

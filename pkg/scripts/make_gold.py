#!/usr/bin/env python3
"""Write the bundled gold corpora under src/indic2braille/data/gold/.

Each script gets a small file of generated sentences with no ambiguous
characters, so its gold transcription can be reproduced by the rule pass
alone. The files serve as a regression corpus for the rule tables.

Run from the repository root:  python3 scripts/make_gold.py [-n 30]
"""
import argparse
import warnings
from pathlib import Path

from indic2braille.corpus import NoAmbiguityWarning, generate_corpus, write_gold
from indic2braille.rules import bundled_table
from indic2braille.script import Script

GOLD = Path(__file__).resolve().parent.parent / "src" / "indic2braille" / "data" / "gold"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=30, help="sentences per script")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    table = bundled_table()
    GOLD.mkdir(parents=True, exist_ok=True)
    for k, script in enumerate(Script):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NoAmbiguityWarning)
            corpus = generate_corpus(table, script, args.n, seed=args.seed + k, ambiguity_rate=0.0)
        path = GOLD / f"{script.name.lower()}.tsv"
        path.write_text(f"# generated by scripts/make_gold.py, seed {args.seed + k}\n" + write_gold(corpus.pairs),
                        encoding="utf-8")
        print(f"{path.name}: {len(corpus.pairs)} pairs")


if __name__ == "__main__":
    main()

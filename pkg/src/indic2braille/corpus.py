"""Seeded synthetic corpora with a known-correct braille transcription.

Sentences are built from the source inventory of a rule table. Gold braille
is assembled unit by unit from the table's outputs, independently of the
rule engine, and every ambiguity-class instance is resolved by a fixed
context oracle: the class's first candidate when the instance ends its word,
the second candidate otherwise.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .braille import BLANK, BrailleSequence, parse_dot_notation, to_dot_notation
from .errors import CorpusError
from .rules import NULL_TAG, MAX_SOURCE_TOKENS, Candidate, RuleTable
from .script import Kind, Script, is_consonant, segment


class NoAmbiguityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GoldPair:
    source: str
    gold: BrailleSequence
    script: Script


@dataclass(frozen=True)
class TaggedExample:
    script: Script
    tokens: tuple[str, ...]
    tags: tuple[str, ...]


@dataclass
class Corpus:
    pairs: list[GoldPair] = field(default_factory=list)
    training: list[TaggedExample] = field(default_factory=list)


@dataclass(frozen=True)
class _Unit:
    source: str
    tokens: tuple[str, ...]
    output: BrailleSequence = ()
    candidates: tuple[Candidate, ...] = ()

    @property
    def ambiguous(self) -> bool:
        return len(self.candidates) > 1


def oracle_choice(unit_candidates: Sequence[Candidate], word_final: bool) -> Candidate:
    """The generator's ground truth for one ambiguity-class instance."""
    return unit_candidates[0] if word_final else unit_candidates[1]


class _Inventory:
    def __init__(self, table: RuleTable, script: Script):
        self.bases, self.consonants, self.signs, self.digits, self.punct = [], [], [], [], []
        self.amb_marks, self.amb_viramas, self.amb_letters = [], [], []
        self.multi_sources = set()
        for (s, source), rules in table.rules.items():
            if s is not script:
                continue
            toks = segment(source, script)
            if len(toks) > MAX_SOURCE_TOKENS or any(t.script not in (None, script) for t in toks):
                continue
            texts = tuple(t.text for t in toks)
            if len(toks) > 1:
                self.multi_sources.add(texts)
            first, last = toks[0], toks[-1]
            if len(rules) > 1:
                unit = _Unit(source, texts, candidates=tuple(Candidate(r.tag, r.output) for r in rules))
                if len(toks) != 1:
                    continue
                {Kind.MATRA: self.amb_marks, Kind.VIRAMA: self.amb_viramas,
                 Kind.LETTER: self.amb_letters}.get(first.kind, []).append(unit)
                continue
            unit = _Unit(source, texts, rules[0].output)
            if not unit.output or rules[0].context.value != "Always":
                continue
            if first.kind is Kind.LETTER and all(t.kind in (Kind.LETTER, Kind.MATRA, Kind.VIRAMA) for t in toks):
                self.bases.append(unit)
                if last.kind is Kind.LETTER and is_consonant(last.text[0]):
                    self.consonants.append(unit)
            elif len(toks) == 1 and first.kind is Kind.MATRA:
                self.signs.append(unit)
            elif len(toks) == 1 and first.kind is Kind.DIGIT and first.script is script:
                self.digits.append(unit)
            elif len(toks) == 1 and first.kind is Kind.PUNCTUATION and source in "।.۔":
                self.punct.append(unit)

    @property
    def has_ambiguity(self):
        return bool(self.amb_marks or self.amb_viramas or self.amb_letters)


class _WordBuilder:
    def __init__(self, inv: _Inventory, rng: np.random.Generator):
        self.inv, self.rng = inv, rng
        self.units: list[_Unit] = []
        self.tokens: list[str] = []

    def pick(self, options):
        return options[self.rng.integers(len(options))]

    def fits(self, unit: _Unit) -> bool:
        """False when appending would let a longer table source span the join."""
        tail = self.tokens[-(MAX_SOURCE_TOKENS - 1):]
        for a in range(len(tail)):
            for b in range(1, len(unit.tokens) + 1):
                window = tuple(tail[a:]) + unit.tokens[:b]
                if len(window) <= MAX_SOURCE_TOKENS and window in self.inv.multi_sources:
                    return False
        return True

    def add(self, options) -> bool:
        for _ in range(20):
            unit = self.pick(options)
            if self.fits(unit):
                self.units.append(unit)
                self.tokens.extend(unit.tokens)
                return True
        return False


def _build_word(inv: _Inventory, rng, rate: float, n_slots: int) -> list[_Unit]:
    w = _WordBuilder(inv, rng)
    pending = False
    prev_kind = None  # "base", "consonant", "sign", "amb"
    slot = 0
    while slot < n_slots:
        last = slot == n_slots - 1
        if rate > 0 and rng.random() < rate:
            pending = True
        if pending:
            options = list(inv.amb_letters)
            if prev_kind in ("base", "consonant", "sign"):
                options += inv.amb_marks
            if prev_kind == "consonant" and (last or inv.consonants):
                options += inv.amb_viramas
            if options and w.add(options):
                pending = False
                unit = w.units[-1]
                if unit in inv.amb_viramas and not last:
                    # a mid-word virama must be followed by a consonant
                    if not w.add(inv.consonants):
                        w.units.pop()
                        del w.tokens[-len(unit.tokens):]
                        break
                    slot += 1
                    prev_kind = "consonant"
                elif unit in inv.amb_letters:
                    prev_kind = "base"
                else:
                    prev_kind = "amb"
                slot += 1
                continue
        if prev_kind == "consonant" and inv.signs and rng.random() < 0.5:
            if w.add(inv.signs):
                prev_kind = "sign"
                slot += 1
                continue
        pool = inv.consonants if inv.consonants and rng.random() < 0.8 else inv.bases
        if not w.add(pool):
            break
        prev_kind = "consonant" if w.units[-1] in inv.consonants else "base"
        slot += 1
    return w.units


def generate_corpus(table: RuleTable, script: Script, n: int, seed: int = 0,
                    ambiguity_rate: float = 0.1, words: tuple[int, int] = (3, 7),
                    slots: tuple[int, int] = (2, 7), number_rate: float = 0.08,
                    punct_rate: float = 0.7) -> Corpus:
    """Generate ``n`` sentence pairs plus tagged examples for every word holding an ambiguity."""
    if n < 1:
        raise ValueError("n must be at least 1")
    inv = _Inventory(table, script)
    if not inv.bases:
        raise ValueError(f"table has no letters for {script.name}")
    if not inv.has_ambiguity:
        warnings.warn(f"table has no ambiguity classes for {script.name}", NoAmbiguityWarning, stacklevel=2)
    rng = np.random.default_rng([seed, 7])
    corpus = Corpus()
    sign = table.numeral_sign(script)
    for _ in range(n):
        texts, golds = [], []
        n_words = int(rng.integers(words[0], words[1] + 1))
        for wi in range(n_words):
            if inv.digits and rng.random() < number_rate:
                digits = [inv.digits[rng.integers(len(inv.digits))] for _ in range(rng.integers(1, 5))]
                texts.append("".join(u.source for u in digits))
                golds.append(sign + tuple(c for u in digits for c in u.output))
                continue
            units = _build_word(inv, rng, ambiguity_rate, int(rng.integers(slots[0], slots[1] + 1)))
            cells, unit_tags = [], []
            for k, unit in enumerate(units):
                if unit.ambiguous:
                    cand = oracle_choice(unit.candidates, k == len(units) - 1)
                    cells.extend(cand.cells)
                    unit_tags.append(cand.tag)
                else:
                    cells.extend(unit.output)
                    unit_tags.append(NULL_TAG)
            text = "".join(u.source for u in units)
            if wi == n_words - 1 and inv.punct and rng.random() < punct_rate:
                mark = inv.punct[rng.integers(len(inv.punct))]
                units.append(mark)
                unit_tags.append(NULL_TAG)
                text += mark.source
                cells.extend(mark.output)
            texts.append(text)
            golds.append(tuple(cells))
            if any(t != NULL_TAG for t in unit_tags):
                corpus.training.append(_tag_tokens(units, unit_tags, script))
        gold: list = []
        for k, g in enumerate(golds):
            if k:
                gold.append(BLANK)
            gold.extend(g)
        corpus.pairs.append(GoldPair(" ".join(texts), tuple(gold), script))
    return corpus


def _tag_tokens(units, unit_tags, script) -> TaggedExample:
    """Put each unit's tag on the segmentation token holding its first character."""
    tokens = segment("".join(u.source for u in units), script)
    starts, pos = {}, 0
    for unit, tag in zip(units, unit_tags):
        starts[pos] = tag
        pos += len(unit.source)
    tags, pos = [], 0
    for tok in tokens:
        tags.append(starts.get(pos, NULL_TAG))
        pos += len(tok.text)
    return TaggedExample(script, tuple(t.text for t in tokens), tuple(tags))


def build_vocab(examples: Iterable[TaggedExample], table: RuleTable, scripts: Iterable[Script] | None = None):
    """Vocabulary over example tokens plus every token of the table's sources, in a fixed order."""
    from .tagger import Vocab

    examples = list(examples)
    scripts = list(scripts) if scripts is not None else sorted({e.script for e in examples}, key=list(Script).index)
    tokens = [t for e in examples for t in e.tokens]
    tags = []
    for script in scripts:
        tags += table.tags(script)
        for (s, source), _ in table.rules.items():
            if s is script:
                tokens += [t.text for t in segment(source, script)]
    tags += [t for e in examples for t in e.tags if t != NULL_TAG]
    return Vocab.build(tokens, tags)


def encode_examples(examples: Iterable[TaggedExample], vocab) -> list[tuple[list[int], list[int]]]:
    return [(vocab.encode(e.tokens), [vocab.tag_id(t) for t in e.tags]) for e in examples]


# -- file formats ---------------------------------------------------------------------

def split_words(seq: BrailleSequence) -> list[BrailleSequence]:
    words: list[list] = [[]]
    for cell in seq:
        if cell.is_blank:
            words.append([])
        else:
            words[-1].append(cell)
    return [tuple(w) for w in words]


def format_gold(seq: BrailleSequence) -> str:
    return "/".join(to_dot_notation(w) for w in split_words(seq))


def parse_gold(text: str) -> BrailleSequence:
    out: list = []
    for k, word in enumerate(text.split("/")):
        if k:
            out.append(BLANK)
        out.extend(parse_dot_notation(word))
    return tuple(out)


def write_gold(pairs: Iterable[GoldPair]) -> str:
    lines = [f"{p.script.name}\t{p.source}\t{format_gold(p.gold)}" for p in pairs]
    return "\n".join(lines) + ("\n" if lines else "")


def read_gold(document: str) -> list[GoldPair]:
    pairs = []
    for lineno, line in enumerate(document.split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusError(f"expected SCRIPT, SOURCE, GOLD; got {len(fields)} fields", lineno)
        try:
            script = Script.parse(fields[0])
            gold = parse_gold(fields[2])
        except ValueError as exc:
            raise CorpusError(str(exc), lineno) from None
        pairs.append(GoldPair(fields[1], gold, script))
    return pairs


def write_training(examples: Iterable[TaggedExample]) -> str:
    lines = [f"{e.script.name}\t{' '.join(e.tokens)}\t{' '.join(e.tags)}" for e in examples]
    return "\n".join(lines) + ("\n" if lines else "")


def read_training(document: str, known_tags: Iterable[str] | None = None) -> list[TaggedExample]:
    known = None if known_tags is None else set(known_tags) | {NULL_TAG}
    out = []
    for lineno, line in enumerate(document.split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusError(f"expected SCRIPT, TOKENS, TAGS; got {len(fields)} fields", lineno)
        try:
            script = Script.parse(fields[0])
        except ValueError as exc:
            raise CorpusError(str(exc), lineno) from None
        tokens, tags = fields[1].split(" "), fields[2].split(" ")
        if not fields[1] or len(tokens) != len(tags):
            raise CorpusError(f"{len(tokens)} tokens but {len(tags)} tags", lineno)
        if known is not None:
            bad = [t for t in tags if t not in known]
            if bad:
                raise CorpusError(f"unknown tag {bad[0]!r}", lineno)
        out.append(TaggedExample(script, tuple(tokens), tuple(tags)))
    return out


def read_gold_files(paths: Iterable[str | Path]) -> list[GoldPair]:
    pairs = []
    for p in paths:
        pairs.extend(read_gold(Path(p).read_text(encoding="utf-8")))
    return pairs

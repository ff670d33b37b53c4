"""Cell-level accuracy (correct mappings over total gold cells) and per-script reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .braille import BrailleSequence, Cell
from .corpus import GoldPair, split_words
from .errors import BrailleError
from .pipeline import Models, translate_hybrid, translate_rule_only
from .rules import RuleTable, Site
from .script import Script

COLUMNS = ("Script", "Rule Based", "LSTM", "Total")
COUNT_COLUMNS = ("Characters", "Rule Correct", "Total Correct", "Site Word Characters",
                 "Site Word Correct", "Sites", "Untranslated", "Errors")


@dataclass(frozen=True)
class Counts:
    correct: int
    total: int

    @property
    def accuracy(self) -> Fraction:
        """Exact ratio; 0/0 counts as 1."""
        return Fraction(self.correct, self.total) if self.total else Fraction(1)

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.correct + other.correct, self.total + other.total)


ZERO = Counts(0, 0)


def accuracy(predicted: Sequence[Cell], gold: Sequence[Cell]) -> Counts:
    """Compare word by word (blank cells separate words), then cell by cell within a word.

    Cells past the shorter of two aligned words are wrong; the denominator is
    the gold cell count.
    """
    gold_words, pred_words = split_words(tuple(gold)), split_words(tuple(predicted))
    correct = min(len(gold_words), len(pred_words)) - 1 if gold else 0  # separators
    for g, p in zip(gold_words, pred_words):
        correct += sum(1 for a, b in zip(g, p) if a == b)
    return Counts(max(correct, 0), len(gold))


@dataclass
class ScriptRow:
    script: Script
    rule: Counts = ZERO
    hybrid: Counts = ZERO
    site_words: Counts = ZERO  # hybrid output restricted to words that held a site
    sites: int = 0
    untranslated: int = 0
    errors: int = 0

    @property
    def values(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.rule.accuracy, self.site_words.accuracy, self.hybrid.accuracy


@dataclass
class EvalReport:
    rows: dict[Script, ScriptRow] = field(default_factory=dict)
    failures: list[tuple[int, str]] = field(default_factory=list)  # (pair index, message)

    def ordered(self) -> list[ScriptRow]:
        return [self.rows[s] for s in Script if s in self.rows]

    def render(self) -> str:
        header = COLUMNS
        body = [(r.script.label, *(f"{float(v):.4f}" for v in r.values)) for r in self.ordered()]
        widths = [max(len(x) for x in col) for col in zip(header, *body)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
        lines.append("")
        lines.append("LSTM = accuracy on words sent to the tagger; Total = whole text; 0/0 is reported as 1.")
        for r in self.ordered():
            lines.append(
                f"{r.script.label}: {r.hybrid.total} characters, {r.rule.correct} rule-correct, "
                f"{r.hybrid.correct} hybrid-correct, {r.sites} sites, {r.untranslated} untranslated, "
                f"{r.errors} errors"
            )
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["\t".join(COLUMNS + COUNT_COLUMNS)]
        for r in self.ordered():
            vals = [f"{float(v):.6f}" for v in r.values]
            counts = [r.hybrid.total, r.rule.correct, r.hybrid.correct, r.site_words.total,
                      r.site_words.correct, r.sites, r.untranslated, r.errors]
            lines.append("\t".join([r.script.label, *vals, *map(str, counts)]))
        return "\n".join(lines) + "\n"


def parse_report_tsv(text: str) -> EvalReport:
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or tuple(lines[0].split("\t")) != COLUMNS + COUNT_COLUMNS:
        raise ValueError("not an evaluation report TSV")
    report = EvalReport()
    for line in lines[1:]:
        f = line.split("\t")
        script = Script.parse(f[0])
        total, rc, hc, swt, swc, sites, untr, errs = map(int, f[4:])
        report.rows[script] = ScriptRow(script, Counts(rc, total), Counts(hc, total), Counts(swc, swt), sites, untr, errs)
    return report


def evaluate(pairs: Sequence[GoldPair], table: RuleTable, model: Models = None) -> EvalReport:
    """Score rule-only and hybrid output of every pair against its gold transcription."""
    if not pairs:
        raise ValueError("no gold pairs to evaluate")
    report = EvalReport()
    for idx, pair in enumerate(pairs):
        row = report.rows.setdefault(pair.script, ScriptRow(pair.script))
        gold_total = Counts(0, len(pair.gold))
        try:
            rule = translate_rule_only(pair.source, table, pair.script)
            row.rule += accuracy(rule.cells, pair.gold)
            row.untranslated += len(rule.untranslated)
        except BrailleError as exc:
            report.failures.append((idx, f"rule pass: {exc}"))
            row.rule += gold_total
            row.errors += 1
        try:
            hybrid = translate_hybrid(pair.source, table, model, pair.script)
        except BrailleError as exc:
            report.failures.append((idx, f"hybrid pass: {exc}"))
            row.hybrid += gold_total
            row.errors += 1
            continue
        row.hybrid += accuracy(hybrid.cells, pair.gold)
        row.sites += len(hybrid.rule_pass.sites)
        row.site_words += _site_word_counts(hybrid, pair.gold)
    return report


def _site_word_counts(result, gold: BrailleSequence) -> Counts:
    """Accuracy over the words that contained an ambiguous site, aligned as in accuracy()."""
    if not result.rule_pass.sites:
        return ZERO
    pred_words: list[list] = [[]]
    flagged = set()
    for item, cells in result._pieces():
        if isinstance(item, Site):
            flagged.add(len(pred_words) - 1)
        for cell in cells:
            if cell.is_blank:
                pred_words.append([])
            else:
                pred_words[-1].append(cell)
    gold_words = split_words(gold)
    total = correct = 0
    for w in sorted(flagged):
        g = gold_words[w] if w < len(gold_words) else ()
        total += len(g)
        correct += sum(1 for x, y in zip(g, pred_words[w]) if x == y)
    return Counts(correct, total)

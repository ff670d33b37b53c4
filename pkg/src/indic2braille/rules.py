"""Declarative Bharti Braille rule tables and the rule-based translation pass.

Table documents are UTF-8 text. ``#`` starts a comment line. Data lines are
tab-separated ``SCRIPT, SOURCE, DOTS[, TAG[, PRIORITY[, CONTEXT]]]`` where DOTS
is dot notation (an empty field is a deleting rule). ``@NUMSIGN<TAB>DOTS`` sets
the numeral sign for the script of the current section (the script of the most
recent data line, or every script when it precedes all data lines);
``@NUMSIGN<TAB>SCRIPT<TAB>DOTS`` names the script explicitly.
"""
from __future__ import annotations

import enum
import re
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, Union

from .braille import BLANK, BrailleSequence, parse_dot_notation, to_dot_notation
from .errors import DotNotationError, TableError
from .script import Kind, Script, SourceToken, is_consonant, segment

MAX_SOURCE_TOKENS = 4
DEFAULT_NUMSIGN = parse_dot_notation("3456")
NULL_TAG = "O"
_TAG_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Context(enum.Enum):
    ALWAYS = "Always"
    WORD_INITIAL = "WordInitial"
    WORD_FINAL = "WordFinal"
    AFTER_DIGIT = "AfterDigit"
    BEFORE_CONSONANT = "BeforeConsonant"


@dataclass(frozen=True)
class Rule:
    script: Script
    source: str
    output: BrailleSequence
    tag: str | None = None
    priority: int = 0
    context: Context = Context.ALWAYS
    line: int = 0
    length: int = 1  # source length in segmentation tokens


@dataclass(frozen=True)
class RuleTable:
    rules: dict[tuple[Script, str], tuple[Rule, ...]]
    numeral_signs: dict[Script, BrailleSequence]
    max_length: dict[Script, int]

    def lookup(self, script: Script, source: str) -> tuple[Rule, ...]:
        return self.rules.get((script, source), ())

    def numeral_sign(self, script: Script) -> BrailleSequence:
        return self.numeral_signs.get(script, DEFAULT_NUMSIGN)

    @property
    def ambiguity_classes(self) -> dict[tuple[Script, str], tuple[Rule, ...]]:
        return {k: v for k, v in self.rules.items() if len(v) > 1}

    def tags(self, script: Script | None = None) -> list[str]:
        """Ambiguity tags in table order, optionally for one script."""
        seen: dict[str, None] = {}
        for (s, _), rules in self.rules.items():
            if len(rules) > 1 and (script is None or s is script):
                for r in rules:
                    seen.setdefault(r.tag, None)
        return list(seen)

    def scripts(self) -> list[Script]:
        present = {s for s, _ in self.rules}
        return [s for s in Script if s in present]

    def __len__(self):
        return sum(len(v) for v in self.rules.values())


# -- parsing -----------------------------------------------------------------

@dataclass
class _Parsed:
    rules: list[Rule] = field(default_factory=list)
    numsigns: dict[Script | None, BrailleSequence] = field(default_factory=dict)
    errors: list[TableError] = field(default_factory=list)


def _parse_script(name: str, lineno: int) -> Script:
    try:
        return Script.parse(name)
    except ValueError:
        raise TableError(f"unknown script name {name!r}", lineno) from None


def _parse_dots(text: str, lineno: int) -> BrailleSequence:
    try:
        return parse_dot_notation(text)
    except DotNotationError as exc:
        raise TableError(f"malformed dot notation {text!r}: {exc}", lineno) from None


def _parse_document(text: str) -> _Parsed:
    out = _Parsed()
    section: Script | None = None
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        try:
            if fields[0].startswith("@"):
                if fields[0] != "@NUMSIGN" or len(fields) not in (2, 3):
                    raise TableError(f"unknown directive {line!r}", lineno)
                script = _parse_script(fields[1], lineno) if len(fields) == 3 else section
                out.numsigns[script] = _parse_dots(fields[-1], lineno)
                continue
            if not 3 <= len(fields) <= 6:
                raise TableError(f"expected 3-6 tab-separated fields, got {len(fields)}", lineno)
            script = _parse_script(fields[0], lineno)
            section = script
            source = unicodedata.normalize("NFC", fields[1])
            if not source:
                raise TableError("empty source", lineno)
            output = _parse_dots(fields[2], lineno)
            tag = fields[3] if len(fields) > 3 and fields[3] else None
            if tag is not None and (not _TAG_RE.match(tag) or tag == NULL_TAG):
                raise TableError(f"invalid tag {tag!r}", lineno)
            try:
                priority = int(fields[4]) if len(fields) > 4 and fields[4] else 0
            except ValueError:
                raise TableError(f"invalid priority {fields[4]!r}", lineno) from None
            try:
                context = Context(fields[5]) if len(fields) > 5 and fields[5] else Context.ALWAYS
            except ValueError:
                raise TableError(f"unknown context keyword {fields[5]!r}", lineno) from None
            length = len(segment(source, script))
            out.rules.append(Rule(script, source, output, tag, priority, context, lineno, length))
        except TableError as exc:
            out.errors.append(exc)
    return out


def _duplicate_errors(rules: Iterable[Rule]) -> list[TableError]:
    errors = []
    groups: dict[tuple[Script, str], list[Rule]] = defaultdict(list)
    for rule in rules:
        group = groups[rule.script, rule.source]
        for other in group:
            if rule.tag is None or other.tag is None or rule.tag == other.tag:
                errors.append(TableError(
                    f"duplicate source {rule.source!r} for {rule.script.name} without distinct tags "
                    f"(first defined on line {other.line})",
                    rule.line,
                ))
                break
        group.append(rule)
    return errors


def build_table(rules: Sequence[Rule], numsigns: dict | None = None) -> RuleTable:
    errors = _duplicate_errors(rules)
    if errors:
        raise errors[0]
    grouped: dict[tuple[Script, str], list[Rule]] = defaultdict(list)
    for rule in rules:
        grouped[rule.script, rule.source].append(rule)
    index = {
        key: tuple(sorted(group, key=lambda r: -r.priority))  # stable: file order breaks ties
        for key, group in grouped.items()
    }
    numsigns = dict(numsigns or {})
    default = numsigns.pop(None, DEFAULT_NUMSIGN)
    signs = {s: numsigns.get(s, default) for s in Script}
    max_length: dict[Script, int] = defaultdict(int)
    for rule in rules:
        max_length[rule.script] = max(max_length[rule.script], min(rule.length, MAX_SOURCE_TOKENS))
    return RuleTable(index, signs, dict(max_length))


def load_table(document: str | bytes) -> RuleTable:
    """Parse and validate one table document; raises TableError on the first problem."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    parsed = _parse_document(document)
    if parsed.errors:
        raise parsed.errors[0]
    return build_table(parsed.rules, parsed.numsigns)


def load_tables(documents: Iterable[str | bytes]) -> RuleTable:
    """Merge several documents into one table (line numbers stay per document)."""
    rules: list[Rule] = []
    numsigns: dict = {}
    for doc in documents:
        if isinstance(doc, bytes):
            doc = doc.decode("utf-8")
        parsed = _parse_document(doc)
        if parsed.errors:
            raise parsed.errors[0]
        rules.extend(parsed.rules)
        numsigns.update(parsed.numsigns)
    return build_table(rules, numsigns)


BUNDLED_TABLES = {s: f"{s.name.lower()}.tsv" for s in Script}


def bundled_table_text(script: Script) -> str:
    return resources.files("indic2braille").joinpath(f"data/tables/{BUNDLED_TABLES[script]}").read_text("utf-8")


@lru_cache(maxsize=None)
def bundled_table(script: Script | None = None) -> RuleTable:
    """The shipped table for one script, or all ten merged."""
    scripts = [script] if script is not None else list(Script)
    return load_tables(bundled_table_text(s) for s in scripts)


def read_table_files(paths: Iterable[str | Path]) -> RuleTable:
    """Load tables from paths; a bare bundled file name such as ``devanagari.tsv`` also works."""
    docs = []
    bundled = {v: k for k, v in BUNDLED_TABLES.items()}
    for p in paths:
        path = Path(p)
        if not path.exists() and path.name in bundled and path.parent == Path("."):
            docs.append(bundled_table_text(bundled[path.name]))
        else:
            docs.append(path.read_text(encoding="utf-8"))
    return load_tables(docs)


# -- rule pass ---------------------------------------------------------------

@dataclass(frozen=True)
class Fragment:
    start: int  # token index range [start, stop)
    stop: int
    cells: BrailleSequence
    rule: Rule | None = None


@dataclass(frozen=True)
class Candidate:
    tag: str
    cells: BrailleSequence


@dataclass(frozen=True)
class Site:
    start: int
    stop: int
    key: tuple[Script, str]
    candidates: tuple[Candidate, ...]


@dataclass(frozen=True)
class PassThrough:
    start: int
    stop: int
    text: str


Item = Union[Fragment, Site, PassThrough]


@dataclass(frozen=True)
class RulePassOutput:
    script: Script
    tokens: tuple[SourceToken, ...]
    items: tuple[Item, ...]

    @property
    def fragments(self) -> list[Fragment]:
        return [i for i in self.items if isinstance(i, Fragment)]

    @property
    def sites(self) -> list[Site]:
        return [i for i in self.items if isinstance(i, Site)]

    @property
    def passthroughs(self) -> list[PassThrough]:
        return [i for i in self.items if isinstance(i, PassThrough)]

    def cells(self, choices: dict[int, Candidate] | None = None) -> BrailleSequence:
        """Concatenate outputs; sites not in ``choices`` (keyed by start) take their first candidate."""
        out: list = []
        for item in self.items:
            if isinstance(item, Fragment):
                out.extend(item.cells)
            elif isinstance(item, Site):
                chosen = (choices or {}).get(item.start, item.candidates[0])
                out.extend(chosen.cells)
        return tuple(out)


def _is_boundary(tok: SourceToken) -> bool:
    return tok.kind in (Kind.WHITESPACE, Kind.PUNCTUATION)


def _context_holds(ctx: Context, tokens: Sequence[SourceToken], start: int, stop: int) -> bool:
    if ctx is Context.ALWAYS:
        return True
    if ctx is Context.WORD_INITIAL:
        return start == 0 or _is_boundary(tokens[start - 1])
    if ctx is Context.WORD_FINAL:
        return stop == len(tokens) or _is_boundary(tokens[stop])
    if ctx is Context.AFTER_DIGIT:
        return start > 0 and tokens[start - 1].kind is Kind.DIGIT
    if ctx is Context.BEFORE_CONSONANT:
        return stop < len(tokens) and is_consonant(tokens[stop].text[0])
    raise AssertionError(ctx)


def _foreign(tok: SourceToken, script: Script) -> bool:
    return tok.script is not None and tok.script is not script


def _match(table, script, tokens, start, stop, text):
    rules = table.lookup(script, text)
    return [r for r in rules if _context_holds(r.context, tokens, start, stop)]


def _decompose(table, script, tokens, i):
    """Per-codepoint fallback for a multi-codepoint token such as an Urdu letter with harakat."""
    text = tokens[i].text
    parts = []
    for ch in text:
        rules = _match(table, script, tokens, i, i + 1, ch)
        if not rules:
            return None
        parts.append(rules)
    ambiguous = [k for k, rules in enumerate(parts) if len(rules) > 1]
    if len(ambiguous) > 1:
        return None
    if not ambiguous:
        cells = tuple(c for rules in parts for c in rules[0].output)
        return Fragment(i, i + 1, cells)
    k = ambiguous[0]
    before = tuple(c for rules in parts[:k] for c in rules[0].output)
    after = tuple(c for rules in parts[k + 1:] for c in rules[0].output)
    cands = tuple(Candidate(r.tag, before + r.output + after) for r in parts[k])
    return Site(i, i + 1, (script, text[k]), cands)


def infer_script(tokens: Sequence[SourceToken]) -> Script | None:
    counts: dict[Script, int] = defaultdict(int)
    for tok in tokens:
        if tok.script is not None and tok.kind is not Kind.OTHER:
            counts[tok.script] += 1
    return max(Script, key=lambda s: counts[s]) if counts else None


def apply_rules(tokens: Sequence[SourceToken], table: RuleTable, script: Script | None = None) -> RulePassOutput:
    """Greedy left-to-right longest-match translation of one segment() result."""
    tokens = tuple(tokens)
    if script is None:
        script = infer_script(tokens) or Script.DEVANAGARI
    max_len = table.max_length.get(script, 1)
    items: list[Item] = []
    in_digit_run = signed = False
    i, n = 0, len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.kind is not Kind.DIGIT:
            in_digit_run = signed = False
        elif not in_digit_run:
            in_digit_run = True

        if _foreign(tok, script):
            items.append(PassThrough(i, i + 1, tok.text))
            i += 1
            continue

        item = None
        for k in range(min(max_len, n - i), 0, -1):
            if any(_foreign(t, script) for t in tokens[i:i + k]):
                continue
            text = "".join(t.text for t in tokens[i:i + k])
            rules = _match(table, script, tokens, i, i + k, text)
            if len(rules) == 1:
                item = Fragment(i, i + k, rules[0].output, rules[0])
            elif rules:
                cands = tuple(Candidate(r.tag, r.output) for r in rules)
                item = Site(i, i + k, (script, text), cands)
            if item is not None:
                break
        if item is None and tok.kind is Kind.WHITESPACE:
            item = Fragment(i, i + 1, (BLANK,))
        if item is None and len(tok.text) > 1:
            item = _decompose(table, script, tokens, i)
        if item is None:
            item = PassThrough(i, i + 1, tok.text)

        if in_digit_run and not signed and isinstance(item, Fragment):
            item = Fragment(item.start, item.stop, table.numeral_sign(script) + item.cells, item.rule)
            signed = True
        items.append(item)
        i = item.stop
    return RulePassOutput(script, tokens, tuple(items))


# -- linting -----------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    line: int | None
    severity: str  # "error", "warning" or "info"
    message: str

    def __str__(self):
        where = f"line {self.line}" if self.line is not None else "table"
        return f"{self.severity}: {where}: {self.message}"


def lint_table(document: str) -> list[Finding]:
    """Report dot errors, duplicate rows, unreachable rules and ambiguity classes."""
    parsed = _parse_document(document)
    findings = [Finding(e.line, "error", str(e.args[0]).split(": ", 1)[-1]) for e in parsed.errors]
    for e in _duplicate_errors(parsed.rules):
        findings.append(Finding(e.line, "error", str(e.args[0]).split(": ", 1)[-1]))

    seen: dict[tuple, Rule] = {}
    for rule in parsed.rules:
        key = (rule.script, rule.source, rule.context, rule.tag)
        if key in seen:
            findings.append(Finding(
                rule.line, "error",
                f"rule for {rule.source!r} is unreachable: shadowed by line {seen[key].line} "
                "with the same context",
            ))
        else:
            seen[key] = rule
        if rule.length > MAX_SOURCE_TOKENS:
            findings.append(Finding(
                rule.line, "error",
                f"rule for {rule.source!r} is unreachable: source spans {rule.length} tokens "
                f"(maximum {MAX_SOURCE_TOKENS})",
            ))
        foreign = [t.text for t in segment(rule.source, rule.script) if t.script not in (None, rule.script)]
        if foreign:
            findings.append(Finding(
                rule.line, "error",
                f"rule for {rule.source!r} is unreachable: contains {''.join(foreign)!r} "
                f"from another script",
            ))

    if not parsed.rules and not parsed.errors:
        findings.append(Finding(None, "warning", "no rules"))
    groups: dict[tuple[Script, str], list[Rule]] = defaultdict(list)
    for rule in parsed.rules:
        groups[rule.script, rule.source].append(rule)
    for (script, source), group in groups.items():
        if len(group) > 1 and all(r.tag for r in group):
            tags = ", ".join(f"{r.tag}={to_dot_notation(r.output) or '(empty)'}" for r in group)
            findings.append(Finding(group[0].line, "info", f"ambiguity class {script.name} {source!r}: {tags}"))
    return sorted(findings, key=lambda f: (f.line is not None, f.line or 0))


def has_problems(findings: Iterable[Finding]) -> bool:
    return any(f.severity == "error" for f in findings)

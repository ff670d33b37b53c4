"""End-to-end translation: rule pass first, tagger only for ambiguous words."""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Mapping, Union

from .braille import BrailleSequence, to_brf, to_dot_notation, to_unicode
from .errors import MissingModel
from .rules import Candidate, Fragment, PassThrough, RulePassOutput, RuleTable, Site, apply_rules
from .script import Kind, Script, SourceToken, detect_script, segment
from .tagger import TaggerModel, disambiguate

Models = Union[TaggerModel, Mapping[Script, TaggerModel], None]


@dataclass(frozen=True)
class TranslationResult:
    text: str  # NFC-normalized input; token spans index into its UTF-8 bytes
    rule_pass: RulePassOutput
    choices: Mapping[int, Candidate]  # site start -> chosen candidate
    provenance: tuple[str, ...]  # per rule-pass item: "rule", "model" or "pass"

    @property
    def script(self) -> Script:
        return self.rule_pass.script

    @property
    def cells(self) -> BrailleSequence:
        return self.rule_pass.cells(self.choices)

    @property
    def untranslated(self) -> list[PassThrough]:
        return self.rule_pass.passthroughs

    def render(self, fmt: str = "unicode") -> str:
        """Render as ``unicode``, ``brf`` or ``dots``; pass-through text is kept inline."""
        if fmt == "dots":
            parts = []
            for item, cells in self._pieces():
                parts.append(item.text if isinstance(item, PassThrough) else to_dot_notation(cells))
            return "-".join(p for p in parts if p)
        encode = {"unicode": to_unicode, "brf": to_brf}[fmt]
        return "".join(item.text if isinstance(item, PassThrough) else encode(cells) for item, cells in self._pieces())

    def _pieces(self):
        for item in self.rule_pass.items:
            if isinstance(item, Fragment):
                yield item, item.cells
            elif isinstance(item, Site):
                yield item, self.choices.get(item.start, item.candidates[0]).cells
            else:
                yield item, ()


def word_spans(tokens: tuple[SourceToken, ...]) -> list[tuple[int, int]]:
    """Maximal runs of non-whitespace tokens as [start, stop) index pairs."""
    spans, start = [], None
    for i, tok in enumerate(tokens):
        if tok.kind is Kind.WHITESPACE:
            if start is not None:
                spans.append((start, i))
                start = None
        elif start is None:
            start = i
    if start is not None:
        spans.append((start, len(tokens)))
    return spans


def _pick_model(models: Models, script: Script) -> TaggerModel | None:
    if models is None or isinstance(models, TaggerModel):
        return models
    return models.get(script)


def resolve_sites(rule_pass: RulePassOutput, models: Models) -> dict[int, Candidate]:
    """Send every word holding an ambiguous site to the tagger."""
    sites = rule_pass.sites
    if not sites:
        return {}
    model = _pick_model(models, rule_pass.script)
    if model is None:
        raise MissingModel(
            f"{len(sites)} ambiguous site(s) in {rule_pass.script.name} text and no tagger model"
        )
    choices = {}
    tokens = rule_pass.tokens
    by_start = {s.start: s for s in sites}
    for ws, we in word_spans(tokens):
        local = [
            Site(s.start - ws, s.stop - ws, s.key, s.candidates)
            for start, s in by_start.items() if ws <= start < we
        ]
        if local:
            picked = disambiguate(tokens[ws:we], local, model)
            choices.update({start + ws: cand for start, cand in picked.items()})
    return choices


def translate_hybrid(text: str, table: RuleTable, model: Models = None, script: Script | None = None) -> TranslationResult:
    """Translate one string. ``script=None`` detects it (DetectionFailure when impossible)."""
    text = unicodedata.normalize("NFC", text)
    if script is None:
        script = detect_script(text) if text else Script.DEVANAGARI
    rule_pass = apply_rules(segment(text, script), table, script)
    choices = resolve_sites(rule_pass, model)
    provenance = tuple(
        "model" if isinstance(item, Site) else "pass" if isinstance(item, PassThrough) else "rule"
        for item in rule_pass.items
    )
    return TranslationResult(text, rule_pass, choices, provenance)


def translate_rule_only(text: str, table: RuleTable, script: Script | None = None) -> TranslationResult:
    """Rule pass with each ambiguous site resolved to the table's first candidate."""
    text = unicodedata.normalize("NFC", text)
    if script is None:
        script = detect_script(text) if text else Script.DEVANAGARI
    rule_pass = apply_rules(segment(text, script), table, script)
    provenance = tuple(
        "rule" if not isinstance(item, PassThrough) else "pass" for item in rule_pass.items
    )
    return TranslationResult(text, rule_pass, {}, provenance)

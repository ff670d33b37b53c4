"""Script identification and codepoint-class segmentation.

Segmentation is driven by a bundled classification table (``data/classes.tsv``)
with one row per codepoint: ``CODEPOINT-HEX<TAB>SCRIPT<TAB>KIND``. Codepoints
absent from the table are classified from their Unicode general category and
treated as script-neutral.
"""
from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping

from .errors import DetectionFailure


class Script(enum.Enum):
    # Definition order is the tie-break order and the report order.
    DEVANAGARI = "Devanagari"
    BENGALI = "Bengali"
    GUJARATI = "Gujarati"
    KANNADA = "Kannada"
    MALAYALAM = "Malayalam"
    ODIA = "Odia"
    GURMUKHI = "Punjabi"
    TAMIL = "Tamil"
    TELUGU = "Telugu"
    PERSO_ARABIC = "Urdu"

    @property
    def label(self) -> str:
        """Name used in evaluation reports."""
        return self.value

    @classmethod
    def parse(cls, name: str) -> "Script":
        key = name.strip().upper().replace("-", "_")
        if key in cls.__members__:
            return cls[key]
        for script in cls:
            if script.value.upper() == key:
                return script
        raise ValueError(f"unknown script {name!r}")


SCRIPT_RANGES: dict[Script, tuple[tuple[int, int], ...]] = {
    Script.DEVANAGARI: ((0x0900, 0x097F),),
    Script.BENGALI: ((0x0980, 0x09FF),),
    Script.GURMUKHI: ((0x0A00, 0x0A7F),),
    Script.GUJARATI: ((0x0A80, 0x0AFF),),
    Script.ODIA: ((0x0B00, 0x0B7F),),
    Script.TAMIL: ((0x0B80, 0x0BFF),),
    Script.TELUGU: ((0x0C00, 0x0C7F),),
    Script.KANNADA: ((0x0C80, 0x0CFF),),
    Script.MALAYALAM: ((0x0D00, 0x0D7F),),
    Script.PERSO_ARABIC: ((0x0600, 0x06FF), (0xFB50, 0xFDFF), (0xFE70, 0xFEFF)),
}

BRAHMIC = frozenset(s for s in Script if s is not Script.PERSO_ARABIC)


class Kind(enum.Enum):
    LETTER = "Letter"
    MATRA = "Matra"
    VIRAMA = "Virama"
    DIGIT = "Digit"
    PUNCTUATION = "Punctuation"
    WHITESPACE = "Whitespace"
    OTHER = "Other"


@dataclass(frozen=True)
class SourceToken:
    text: str
    script: Script | None  # None is script-neutral
    span: tuple[int, int]  # UTF-8 byte offsets into the segmented string
    kind: Kind


def category_kind(ch: str) -> Kind:
    """Fallback classification from the Unicode general category."""
    cat = unicodedata.category(ch)
    if cat == "Lo":
        return Kind.LETTER
    if cat in ("Mn", "Mc", "Me"):
        return Kind.VIRAMA if "VIRAMA" in unicodedata.name(ch, "") else Kind.MATRA
    if cat == "Nd":
        return Kind.DIGIT
    if cat.startswith("P"):
        return Kind.PUNCTUATION
    if cat == "Zs" or ch in "\t\n\r\x0b\x0c":
        return Kind.WHITESPACE
    return Kind.OTHER


def parse_classes(text: str) -> dict[int, tuple[Script | None, Kind]]:
    """Parse a classification table document."""
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"classes line {lineno}: expected 3 fields, got {len(fields)}")
        cp, script, kind = fields
        table[int(cp, 16)] = (None if script == "NEUTRAL" else Script[script], Kind(kind))
    return table


@lru_cache(maxsize=None)
def default_classes() -> Mapping[int, tuple[Script | None, Kind]]:
    data = resources.files("indic2braille").joinpath("data/classes.tsv").read_text("utf-8")
    return parse_classes(data)


def classify(ch: str, classes: Mapping | None = None) -> tuple[Script | None, Kind]:
    entry = (classes or default_classes()).get(ord(ch))
    if entry is not None:
        return entry
    return _block_of(ord(ch)), category_kind(ch)


def _block_of(cp: int) -> Script | None:
    """Script whose block contains ``cp``; used for codepoints missing from the class table."""
    for script, ranges in SCRIPT_RANGES.items():
        if any(lo <= cp <= hi for lo, hi in ranges):
            return script
    return None


def script_of(ch: str) -> Script | None:
    return classify(ch)[0]


def detect_script(text: str) -> Script:
    """Return the script owning most of the non-neutral codepoints in ``text``."""
    counts = dict.fromkeys(Script, 0)
    for ch in text:
        script = script_of(ch)
        if script is not None:
            counts[script] += 1
    best = max(Script, key=lambda s: counts[s])  # max keeps the first of equals
    if counts[best] == 0:
        raise DetectionFailure(f"no supported script in {text[:40]!r}")
    return best


def segment(text: str, script: Script) -> list[SourceToken]:
    """Split ``text`` into codepoint-class tokens for ``script``.

    Brahmic dependent signs and viramas become their own tokens. In Urdu,
    combining marks attach to the preceding letter. Codepoints belonging to
    any other supported script become single ``Other`` tokens.
    """
    classes = default_classes()
    tokens: list[SourceToken] = []
    offset = 0
    for ch in text:
        width = len(ch.encode("utf-8"))
        cs, kind = classify(ch, classes)
        if cs is not None and cs is not script:
            kind = Kind.OTHER
        elif (
            script is Script.PERSO_ARABIC
            and kind is Kind.MATRA
            and tokens
            and tokens[-1].script is script
            and tokens[-1].kind is Kind.LETTER
        ):
            prev = tokens[-1]
            tokens[-1] = SourceToken(prev.text + ch, script, (prev.span[0], offset + width), prev.kind)
            offset += width
            continue
        tokens.append(SourceToken(ch, cs, (offset, offset + width), kind))
        offset += width
    return tokens


# Independent vowel letters in the Brahmic blocks, by the part of the Unicode
# name after "LETTER".
_VOWEL_NAMES = frozenset(
    "A AA I II U UU E EE AI O OO AU SHORT_A SHORT_E SHORT_O CANDRA_E CANDRA_O CANDRA_A "
    "VOCALIC_R VOCALIC_RR VOCALIC_L VOCALIC_LL OE OOE AW UE UUE".split()
)


@lru_cache(maxsize=4096)
def is_consonant(ch: str) -> bool:
    script, kind = classify(ch)
    if script is None or kind is not Kind.LETTER:
        return False
    if script is Script.PERSO_ARABIC:
        return True
    name = unicodedata.name(ch, "")
    if " LETTER " not in name:
        return False
    return name.split(" LETTER ", 1)[1].replace(" ", "_") not in _VOWEL_NAMES

#!/usr/bin/env python3
"""Regenerate the bundled data files under src/indic2braille/data/.

Writes three kinds of file:

* ``classes.tsv``  codepoint classification used by segmentation
* ``brf.tsv``      the 64-entry North American Braille ASCII table
* ``tables/*.tsv`` one Bharti Braille rule table per script

The nine Brahmic tables are produced from a single phonetic chart keyed by
Devanagari codepoints. The Unicode blocks of these scripts follow the ISCII
layout, so the equivalent letter of another script sits at a fixed offset;
each mapped pair is checked by character name before it is written out.
Urdu has its own hand-written chart.

Run from the repository root:  python scripts/build_tables.py
"""
import unicodedata
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "indic2braille" / "data"

BLOCKS = [
    ("DEVANAGARI", 0x0900, 0x097F),
    ("BENGALI", 0x0980, 0x09FF),
    ("GUJARATI", 0x0A80, 0x0AFF),
    ("KANNADA", 0x0C80, 0x0CFF),
    ("MALAYALAM", 0x0D00, 0x0D7F),
    ("ODIA", 0x0B00, 0x0B7F),
    ("GURMUKHI", 0x0A00, 0x0A7F),
    ("TAMIL", 0x0B80, 0x0BFF),
    ("TELUGU", 0x0C00, 0x0C7F),
    ("PERSO_ARABIC", 0x0600, 0x06FF),
    ("PERSO_ARABIC", 0xFB50, 0xFDFF),
    ("PERSO_ARABIC", 0xFE70, 0xFEFF),
]

# Devanagari-block punctuation shared by every Brahmic script.
SHARED_NEUTRAL = [0x0964, 0x0965, 0x200C, 0x200D]


def kind_of(ch):
    cat = unicodedata.category(ch)
    if cat == "Lo":
        return "Letter"
    if cat in ("Mn", "Mc", "Me"):
        return "Virama" if "VIRAMA" in unicodedata.name(ch, "") else "Matra"
    if cat == "Nd":
        return "Digit"
    if cat.startswith("P"):
        return "Punctuation"
    if cat == "Zs" or ch in "\t\n\r\x0b\x0c":
        return "Whitespace"
    return "Other"


def build_classes():
    rows = []
    for cp in range(0x80):
        rows.append((cp, "NEUTRAL", kind_of(chr(cp))))
    for cp in SHARED_NEUTRAL:
        rows.append((cp, "NEUTRAL", kind_of(chr(cp))))
    shared = set(SHARED_NEUTRAL)
    for script, lo, hi in BLOCKS:
        for cp in range(lo, hi + 1):
            ch = chr(cp)
            if cp in shared or unicodedata.category(ch) == "Cn":
                continue
            rows.append((cp, script, kind_of(ch)))
    rows.sort()
    lines = [
        "# Codepoint classification for segmentation.",
        f"# Generated from Unicode {unicodedata.unidata_version}; columns: CODEPOINT-HEX, SCRIPT, KIND",
    ]
    lines += [f"{cp:04X}\t{script}\t{kind}" for cp, script, kind in rows]
    (DATA / "classes.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


# North American Braille ASCII, characters 0x20..0x5F.
BRF = {
    " ": "0", "!": "2346", '"': "5", "#": "3456", "$": "1246", "%": "146",
    "&": "12346", "'": "3", "(": "12356", ")": "23456", "*": "16", "+": "346",
    ",": "6", "-": "36", ".": "46", "/": "34", "0": "356", "1": "2", "2": "23",
    "3": "25", "4": "256", "5": "26", "6": "235", "7": "2356", "8": "236",
    "9": "35", ":": "156", ";": "56", "<": "126", "=": "123456", ">": "345",
    "?": "1456", "@": "4", "A": "1", "B": "12", "C": "14", "D": "145", "E": "15",
    "F": "124", "G": "1245", "H": "125", "I": "24", "J": "245", "K": "13",
    "L": "123", "M": "134", "N": "1345", "O": "135", "P": "1234", "Q": "12345",
    "R": "1235", "S": "234", "T": "2345", "U": "136", "V": "1236", "W": "2456",
    "X": "1346", "Y": "13456", "Z": "1356", "[": "246", "\\": "1256",
    "]": "12456", "^": "45", "_": "456",
}


def mask(dots):
    return 0 if dots == "0" else sum(1 << (int(d) - 1) for d in dots)


def build_brf():
    by_mask = {mask(d): ch for ch, d in BRF.items()}
    assert sorted(by_mask) == list(range(64)), "Braille ASCII table must cover all 64 masks"
    lines = [f"{m:02X}\t{by_mask[m]}" for m in range(64)]
    (DATA / "brf.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


# Phonetic chart keyed by Devanagari. Values are dot notation; a list value
# declares an ambiguity class as (tag, dots) candidates in preference order.
CHART = {
    # independent vowels
    "अ": "1", "आ": "345", "इ": "24", "ई": "35", "उ": "136", "ऊ": "1256",
    "ऋ": "5-1235", "ऌ": "5-123", "ऍ": "26", "ऎ": "26", "ए": "15", "ऐ": "34",
    "ऑ": "1346", "ऒ": "1346", "ओ": "135", "औ": "246",
    # dependent vowel signs
    "ा": "345", "ि": "24", "ी": "35", "ु": "136", "ू": "1256", "ृ": "5-1235",
    "ॢ": "5-123", "ॅ": "26", "ॆ": "26", "े": "15", "ै": "34", "ॉ": "1346",
    "ॊ": "1346", "ो": "135", "ौ": "246",
    # consonants
    "क": "13", "ख": "46", "ग": "1245", "घ": "126", "ङ": "346",
    "च": "14", "छ": "16", "ज": "245", "झ": "356", "ञ": "25",
    "ट": "23456", "ठ": "2456", "ड": "1246", "ढ": "123456", "ण": "3456",
    "त": "2345", "थ": "1456", "द": "145", "ध": "2346", "न": "1345", "ऩ": "5-1345",
    "प": "1234", "फ": "235", "ब": "12", "भ": "45", "म": "134",
    "य": "13456", "र": "1235", "ऱ": "12456", "ल": "123", "ळ": "456", "ऴ": "12356",
    "व": "1236", "श": "146", "ष": "12346", "स": "234", "ह": "125",
    # signs
    "ँ": "3",
    "ं": [("ANUSVARA", "56"), ("NASAL", "1345")],
    "ः": "6",
    "्": [("HALANT", "4"), ("CONJ", "")],
    "ऽ": "2",
    # nukta forms (stored decomposed, as NFC leaves them)
    "क़": "5-13", "ख़": "5-46", "ग़": "5-1245", "ज़": "1356",
    "ड़": "12456", "ढ़": "5-12456", "फ़": "124", "य़": "13456",
    # conjuncts with their own cells
    "क्ष": "12345", "ज्ञ": "156",
    # digits
    "०": "245", "१": "1", "२": "12", "३": "14", "४": "145", "५": "15",
    "६": "124", "७": "1245", "८": "125", "९": "24",
}

OFFSETS = {
    "DEVANAGARI": 0x000, "BENGALI": 0x080, "GURMUKHI": 0x100, "GUJARATI": 0x180,
    "ODIA": 0x200, "TAMIL": 0x280, "TELUGU": 0x300, "KANNADA": 0x380,
    "MALAYALAM": 0x400,
}

# Name differences that are the same phoneme (Dravidian e/o length pairs).
ALIASES = {
    ("LETTER E", "LETTER SHORT E"), ("LETTER EE", "LETTER E"),
    ("LETTER O", "LETTER SHORT O"), ("LETTER OO", "LETTER O"),
    ("VOWEL SIGN E", "VOWEL SIGN SHORT E"), ("VOWEL SIGN EE", "VOWEL SIGN E"),
    ("VOWEL SIGN O", "VOWEL SIGN SHORT O"), ("VOWEL SIGN OO", "VOWEL SIGN O"),
    ("SIGN BINDI", "SIGN ANUSVARA"), ("SIGN ADAK BINDI", "SIGN CANDRABINDU"),
}

# Letters with no Devanagari counterpart at the same offset.
EXTRAS = {
    "BENGALI": {"ৎ": "2345", "য়": "13456"},
    "GURMUKHI": {"ੰ": [("ANUSVARA", "56"), ("NASAL", "1345")], "ੱ": "2", "ੲ": "24", "ੳ": "136"},
    "MALAYALAM": {
        "ൺ": "3456-4", "ൻ": "1345-4", "ർ": "1235-4", "ൽ": "123-4", "ൾ": "456-4", "ൿ": "13-4",
    },
    "ODIA": {"ୟ": "13456", "ୱ": "1236"},
}

PUNCT = {
    ".": "256", ",": "2", ";": "23", ":": "25", "?": "236", "!": "235",
    "-": "36", "(": "2356", ")": "2356", '"': "236", "'": "3", "/": "34",
    "।": "256", "॥": "256-256",
}
ASCII_DIGITS = {str(d): CHART["०१२३४५६७८९"[d]] for d in range(10)}
DELETE = {"‌": "", "‍": ""}

URDU = {
    "ا": "1", "آ": "345", "أ": "1", "ب": "12", "پ": "1234", "ت": "2345", "ٹ": "23456",
    "ث": "1456", "ج": "245", "چ": "14", "ح": "156", "خ": "1346", "د": "145",
    "ڈ": "1246", "ذ": "2346", "ر": "1235", "ڑ": "12456", "ز": "1356", "ژ": "346",
    "س": "234", "ش": "146", "ص": "12346", "ض": "1246", "ط": "23456", "ظ": "123456",
    "ع": "12356", "غ": "126", "ف": "124", "ق": "12345", "ک": "13", "ك": "13",
    "گ": "1245", "ل": "123", "م": "134", "ن": "1345",
    "ں": [("GHUNNA", "56"), ("NOON", "1345")],
    "و": "1236", "ہ": "125", "ه": "125", "ھ": "6", "ء": "3", "ی": "13456",
    "ي": "13456", "ے": "15", "ئ": "34", "ۃ": "125",
    # harakat
    "َ": "1", "ِ": "24", "ُ": "136", "ْ": "4", "ّ": "6",
    "ٰ": "345",
    # punctuation
    "،": "2", "؛": "23", "؟": "236", "۔": "256",
}
URDU_DIGITS = {}
for base in (0x0660, 0x06F0):
    for d in range(10):
        URDU_DIGITS[chr(base + d)] = ASCII_DIGITS[str(d)]


def suffix(ch):
    return unicodedata.name(ch).split(" ", 1)[1]


def shift(source, offset):
    out = []
    for ch in source:
        if ch in "‌‍":
            out.append(ch)
            continue
        target = chr(ord(ch) + offset)
        name = unicodedata.name(target, None)
        if name is None:
            return None
        s, t = suffix(ch), name.split(" ", 1)[1]
        if s != t and (t, s) not in ALIASES:
            return None
        out.append(target)
    return "".join(out)


def entry_lines(script, source, value):
    source = unicodedata.normalize("NFC", source)
    if isinstance(value, list):
        return [f"{script}\t{source}\t{dots}\t{tag}" for tag, dots in value]
    return [f"{script}\t{source}\t{value}"]


def write_table(script, entries, skipped=()):
    lines = [
        f"# Bharti Braille rule table: {script}",
        "# SCRIPT<TAB>SOURCE<TAB>DOTS[<TAB>TAG[<TAB>PRIORITY[<TAB>CONTEXT]]]",
        "# Rows sharing a source with distinct tags form an ambiguity class;",
        "# the first row listed is the rule-only default.",
        f"@NUMSIGN\t{script}\t3456",
    ]
    for source, value in entries.items():
        lines += entry_lines(script, source, value)
    if skipped:
        lines.append("# not mapped in this script: " + " ".join(f"U+{ord(c[0]):04X}" for c in skipped))
    path = DATA / "tables" / f"{script.lower()}.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def build_tables():
    for script, offset in OFFSETS.items():
        entries, skipped = {}, []
        for source, value in CHART.items():
            shifted = shift(source, offset)
            if shifted is None:
                skipped.append(source)
                continue
            entries[shifted] = value
        entries.update(EXTRAS.get(script, {}))
        entries.update(ASCII_DIGITS)
        entries.update(PUNCT)
        entries.update(DELETE)
        path = write_table(script, entries, skipped)
        print(f"{path.name}: {len(entries)} sources, {len(skipped)} chart entries skipped")
    entries = dict(URDU)
    entries.update(URDU_DIGITS)
    entries.update(ASCII_DIGITS)
    entries.update({k: v for k, v in PUNCT.items() if k not in "।॥"})
    entries.update(DELETE)
    path = write_table("PERSO_ARABIC", entries)
    print(f"{path.name}: {len(entries)} sources")


if __name__ == "__main__":
    build_classes()
    build_brf()
    build_tables()

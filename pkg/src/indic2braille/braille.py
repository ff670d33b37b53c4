"""Six-dot braille cells and their renderers.

A cell is stored as a 6-bit mask with bit ``i-1`` set when dot ``i`` is
raised; dots 1-3 run down the left column and 4-6 down the right.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .errors import DotNotationError

UNICODE_BASE = 0x2800


@dataclass(frozen=True, order=True)
class Cell:
    mask: int = 0

    def __post_init__(self):
        if not 0 <= self.mask <= 63:
            raise ValueError(f"cell mask out of range: {self.mask}")

    @classmethod
    def from_dots(cls, dots: Iterable[int]) -> "Cell":
        mask = 0
        for d in dots:
            if not 1 <= d <= 6:
                raise ValueError(f"dot {d} out of range 1-6")
            mask |= 1 << (d - 1)
        return cls(mask)

    @property
    def dots(self) -> tuple[int, ...]:
        return tuple(d for d in range(1, 7) if self.mask >> (d - 1) & 1)

    @property
    def is_blank(self) -> bool:
        return self.mask == 0

    def __repr__(self):
        return f"Cell({cell_to_dots(self)})"


BLANK = Cell(0)
BrailleSequence = tuple[Cell, ...]


def to_unicode(seq: Sequence[Cell]) -> str:
    return "".join(chr(UNICODE_BASE + c.mask) for c in seq)


def from_unicode(text: str) -> BrailleSequence:
    cells = []
    for ch in text:
        mask = ord(ch) - UNICODE_BASE
        if not 0 <= mask <= 63:
            raise ValueError(f"{ch!r} is not a 6-dot braille pattern")
        cells.append(Cell(mask))
    return tuple(cells)


def parse_brf_table(text: str) -> dict[int, str]:
    """Parse a ``MASK-HEX<TAB>ASCII-CHAR`` table; all 64 masks are required."""
    table = {}
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line:
            continue
        mask_hex, sep, char = line.partition("\t")
        if not sep or len(char) != 1:
            raise ValueError(f"brf table line {lineno}: malformed {line!r}")
        table[int(mask_hex, 16)] = char
    if sorted(table) != list(range(64)):
        raise ValueError("brf table must map each of the 64 masks exactly once")
    if len(set(table.values())) != 64:
        raise ValueError("brf table characters must be distinct")
    return table


@lru_cache(maxsize=None)
def brf_table() -> dict[int, str]:
    data = resources.files("indic2braille").joinpath("data/brf.tsv").read_text("utf-8")
    return parse_brf_table(data)


def to_brf(seq: Sequence[Cell]) -> str:
    table = brf_table()
    return "".join(table[c.mask] for c in seq)


def from_brf(text: str) -> BrailleSequence:
    inverse = {ch: m for m, ch in brf_table().items()}
    try:
        return tuple(Cell(inverse[ch.upper()]) for ch in text)
    except KeyError as exc:
        raise ValueError(f"{exc.args[0]!r} is not a Braille ASCII character") from None


def cell_to_dots(cell: Cell) -> str:
    return "".join(map(str, cell.dots)) or "0"


def to_dot_notation(seq: Sequence[Cell]) -> str:
    return "-".join(cell_to_dots(c) for c in seq)


def parse_cell(text: str) -> Cell:
    if text == "0":
        return BLANK
    if not text:
        raise DotNotationError("empty cell")
    prev = 0
    mask = 0
    for ch in text:
        if ch not in "123456":
            raise DotNotationError(f"invalid dot {ch!r} in {text!r}")
        d = int(ch)
        if d <= prev:
            raise DotNotationError(f"dots must be ascending without repeats: {text!r}")
        prev = d
        mask |= 1 << (d - 1)
    return Cell(mask)


def parse_dot_notation(text: str) -> BrailleSequence:
    """Parse ``cell ("-" cell)*``; the empty string is the empty sequence."""
    if text == "":
        return ()
    return tuple(parse_cell(part) for part in text.split("-"))

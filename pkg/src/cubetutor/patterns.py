"""Masked sticker patterns: partial goal descriptions over the 54 facelets.

A pattern assigns each facelet either a concrete color or Grey, the
wildcard.  A state matches a pattern when every non-grey cell equals the
state's sticker there.  Patterns serialize to 54-char strings using the
state alphabet plus X for grey.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cube import (
    CENTERS, CHAR_COLORS, COLOR_CHARS, Color, CubeState, EDGE_SLOTS, Face,
    FACE_COLORS, SOLVED,
)

__all__ = [
    "GREY", "MaskedPattern", "matches", "white_cross_pattern",
    "solved_pattern", "pattern_from_string", "pattern_to_string",
]

GREY = -1
GREY_CHAR = "X"


@dataclass(frozen=True, slots=True)
class MaskedPattern:
    """54 cells over the six colors plus grey.

    The fully grey pattern is legal and matches every state.
    """

    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.cells) != 54:
            raise ValueError(f"expected 54 cells, got {len(self.cells)}")

    @property
    def grey_count(self) -> int:
        return sum(1 for c in self.cells if c == GREY)

    @property
    def constrained(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.cells) if c != GREY)

    def to_string(self) -> str:
        return pattern_to_string(self)

    def __str__(self) -> str:
        return self.to_string()


def matches(state: CubeState, pattern: MaskedPattern) -> bool:
    cells = state.facelets
    for i, want in enumerate(pattern.cells):
        if want != GREY and cells[i] != want:
            return False
    return True


def pattern_to_string(pattern: MaskedPattern) -> str:
    return "".join(GREY_CHAR if c == GREY else COLOR_CHARS[c] for c in pattern.cells)


def pattern_from_string(text: str) -> MaskedPattern:
    if len(text) != 54:
        raise ValueError(f"expected 54 characters, got {len(text)}")
    cells = []
    for ch in text:
        if ch == GREY_CHAR:
            cells.append(GREY)
        elif ch in CHAR_COLORS:
            cells.append(CHAR_COLORS[ch])
        else:
            raise ValueError(f"unknown pattern character {ch!r}")
    return MaskedPattern(tuple(cells))


def white_cross_pattern() -> MaskedPattern:
    """The classic first goal: white Up edges aligned with side centers.

    Constrains 13 cells: the Up center and its four edge facelets white,
    the four side centers, and each side face's top edge facelet matching
    its center color.  Corners and everything else stay grey.
    """
    cells = [GREY] * 54
    cells[4] = Color.WHITE
    for up_cell, side_cell in ((1, 37), (3, 10), (5, 28), (7, 19)):
        cells[up_cell] = Color.WHITE
        cells[side_cell] = SOLVED.facelets[side_cell]
        side_center = (side_cell // 9) * 9 + 4
        cells[side_center] = SOLVED.facelets[side_center]
    return MaskedPattern(tuple(cells))


def solved_pattern() -> MaskedPattern:
    return MaskedPattern(SOLVED.facelets)

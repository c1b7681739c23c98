"""Word-tile slate: fixed vocabulary, grid placements, row-major reading."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    CellOccupiedError,
    ConfigError,
    EmptyBoardError,
    EmptyCellError,
    OutOfRangeError,
    UnknownWordError,
)


@dataclass(frozen=True)
class Vocabulary:
    words: frozenset[str]
    version: str = "1"

    def __post_init__(self):
        if not self.words:
            raise ConfigError("vocabulary is empty")
        for w in self.words:
            if w != w.lower() or not w or any(c.isspace() for c in w):
                raise ConfigError(f"bad vocabulary word {w!r}")

    def __contains__(self, word: str) -> bool:
        return word in self.words

    @classmethod
    def from_file(cls, path: str | Path, version: str | None = None) -> "Vocabulary":
        """Load a word-per-line UTF-8 file; blank lines and # comments skipped."""
        words = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.lower())
        return cls(words=frozenset(words), version=version or Path(path).name)


@dataclass
class Board:
    """Tiles at grid cells; at most one tile per (row, col)."""

    vocabulary: Vocabulary
    placements: dict[tuple[int, int], str] = field(default_factory=dict)

    def place_tile(self, row: int, col: int, word: str) -> None:
        if row < 0 or col < 0:
            raise OutOfRangeError(f"cell ({row}, {col}) outside the slate")
        word = word.lower()
        if word not in self.vocabulary:
            raise UnknownWordError(word)
        if (row, col) in self.placements:
            raise CellOccupiedError(f"cell ({row}, {col}) already holds a tile")
        self.placements[(row, col)] = word

    def remove_tile(self, row: int, col: int) -> str:
        try:
            return self.placements.pop((row, col))
        except KeyError:
            raise EmptyCellError(f"no tile at ({row}, {col})") from None

    def read_board(self) -> str:
        """Words joined by single spaces in row-major order."""
        if not self.placements:
            raise EmptyBoardError("no tiles on the slate")
        cells = sorted(self.placements)
        return " ".join(self.placements[c] for c in cells)

    def is_empty(self) -> bool:
        return not self.placements

    def to_doc(self) -> list[dict]:
        return [
            {"row": r, "col": c, "word": self.placements[(r, c)]}
            for r, c in sorted(self.placements)
        ]

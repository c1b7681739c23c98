import random

import pytest
from hypothesis import given, strategies as st

from promptmixer.errors import (
    CellOccupiedError,
    EmptyBoardError,
    EmptyCellError,
    UnknownWordError,
)
from promptmixer.slate import Board, Vocabulary

VOCAB = Vocabulary(frozenset({"ocean", "dream", "blue", "sky", "storm",
                              "moon", "whisper", "rust"}))


def board():
    return Board(vocabulary=VOCAB)


def test_place_single_tile():
    b = board()
    b.place_tile(0, 0, "ocean")
    assert b.read_board() == "ocean"


def test_unknown_word_rejected():
    with pytest.raises(UnknownWordError):
        board().place_tile(0, 0, "xylophone")


def test_occupied_cell_rejected():
    b = board()
    b.place_tile(1, 2, "moon")
    with pytest.raises(CellOccupiedError):
        b.place_tile(1, 2, "storm")


def test_row_major_column_order():
    b = board()
    b.place_tile(0, 1, "dream")
    b.place_tile(0, 0, "ocean")
    assert b.read_board() == "ocean dream"


def test_row_precedence_over_column():
    b = board()
    b.place_tile(1, 0, "sky")
    b.place_tile(0, 0, "blue")
    assert b.read_board() == "blue sky"


def test_empty_board_errors():
    with pytest.raises(EmptyBoardError):
        board().read_board()


def test_remove_tile_returns_word():
    b = board()
    b.place_tile(2, 2, "rust")
    assert b.remove_tile(2, 2) == "rust"
    assert b.is_empty()


def test_remove_from_empty_cell():
    with pytest.raises(EmptyCellError):
        board().remove_tile(0, 0)


def test_uppercase_input_normalized():
    b = board()
    b.place_tile(0, 0, "Ocean")
    assert b.read_board() == "ocean"


@given(st.permutations([(0, 0, "blue"), (0, 1, "sky"), (1, 0, "ocean"),
                        (1, 1, "dream"), (2, 0, "storm")]))
def test_reading_invariant_under_placement_order(placements):
    b = board()
    for row, col, word in placements:
        b.place_tile(row, col, word)
    assert b.read_board() == "blue sky ocean dream storm"


def test_round_trip_word_count():
    rng = random.Random(7)
    b = board()
    words = sorted(VOCAB.words)
    placed = 0
    for _ in range(30):
        row, col = rng.randint(0, 5), rng.randint(0, 5)
        if (row, col) in b.placements:
            continue
        b.place_tile(row, col, rng.choice(words))
        placed += 1
    assert len(b.read_board().split()) == placed


def test_vocabulary_from_file(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("# comment\nocean\nDream\n\nsky\n", encoding="utf-8")
    vocab = Vocabulary.from_file(path)
    assert vocab.words == frozenset({"ocean", "dream", "sky"})


def test_vocabulary_rejects_whitespace_word():
    with pytest.raises(Exception):
        Vocabulary(frozenset({"two words"}))

from random import Random

import pytest
from hypothesis import given, strategies as st

from cascadelab.errors import DomainError, TranscriptParseError
from cascadelab.transcript import (
    Transcript,
    bad_event,
    iter_text_moves,
    seen_key_pairs,
    validate_moves,
    validate_transcript,
)


def make_transcript(moves):
    tr = Transcript()
    for move in moves:
        tr.append(move)
    return tr


E_PAIR = [("E", None, 5, None), ("E", None, 5, 9)]
F_PAIR = [("F", 2, 1, None), ("F", 2, 1, 3)]
I_PAIR = [("I", 4, None, 7), ("I", 4, 0, 7)]


# -- seen key pairs -----------------------------------------------------------

def test_seen_key_pairs_empty_view():
    assert seen_key_pairs(make_transcript([])) == set()
    assert seen_key_pairs(make_transcript(E_PAIR)) == set()


def test_seen_key_pairs_single_key_pairs_with_itself():
    tr = make_transcript([("F", 3, 0, None), ("F", 3, 0, 1)])
    assert seen_key_pairs(tr) == {(3, 3)}


def test_seen_key_pairs_two_keys_all_four_pairs():
    tr = make_transcript([
        ("F", 1, 0, None), ("F", 1, 0, 2),
        ("I", 2, None, 3), ("I", 2, 1, 3),
    ])
    assert seen_key_pairs(tr) == {(1, 1), (1, 2), (2, 1), (2, 2)}


def test_seen_key_pairs_prefix_views():
    tr = make_transcript([
        ("F", 1, 0, None), ("F", 1, 0, 2),
        ("F", 2, 0, None), ("F", 2, 0, 5),
    ])
    assert seen_key_pairs(tr, upto_move=0) == set()
    assert seen_key_pairs(tr, upto_move=2) == {(1, 1)}
    assert len(seen_key_pairs(tr, upto_move=4)) == 4


# -- bad event ----------------------------------------------------------------

def test_bad_event_empty_view_false():
    assert not bad_event(make_transcript([]), (0, 1), 0)


def test_bad_event_true_when_both_keys_queried():
    tr = make_transcript([
        ("F", 0, 0, None), ("F", 0, 0, 1),
        ("I", 1, None, 2), ("I", 1, 0, 2),
    ])
    assert bad_event(tr, (0, 1), 4)
    assert bad_event(tr, (1, 0), 4)
    assert not bad_event(tr, (0, 2), 4)
    assert not bad_event(tr, (0, 1), 2)  # only key 0 queried so far


def test_bad_event_needs_two_keys_and_valid_index():
    tr = make_transcript(F_PAIR)
    with pytest.raises(DomainError):
        bad_event(tr, (0,), 2)
    with pytest.raises(DomainError):
        bad_event(tr, (0, 1, 2), 2)
    with pytest.raises(DomainError):
        bad_event(tr, (0, 1), 3)


def test_bad_event_monotone_on_random_transcripts():
    # 10^4 random query sequences: bad never flips back to false,
    # and replies never change it (queries alone determine the key set)
    rng = Random(99)
    for _ in range(10_000):
        moves = []
        for _ in range(rng.randrange(1, 7)):
            kind = rng.choice(["E", "F", "I"])
            k = rng.randrange(4) if kind != "E" else None
            if kind == "E":
                moves += [("E", None, rng.randrange(4), None), ("E", None, 0, 1)]
            elif kind == "F":
                moves += [("F", k, 0, None), ("F", k, 0, 1)]
            else:
                moves += [("I", k, None, 0), ("I", k, 1, 0)]
        tr = make_transcript(moves)
        crucial = (rng.randrange(4), rng.randrange(4))
        flags = [bad_event(tr, crucial, i) for i in range(len(moves) + 1)]
        assert all(a <= b for a, b in zip(flags, flags[1:]))
        for odd in range(1, len(moves), 2):
            assert flags[odd] == flags[odd + 1]


# -- text round-trip ----------------------------------------------------------

def test_text_roundtrip_simple():
    tr = make_transcript(E_PAIR + F_PAIR + I_PAIR)
    text = tr.to_text()
    assert text.splitlines()[0] == "1 E 5 *"
    assert text.splitlines()[1] == "2 E 5 9"
    assert text.splitlines()[4] == "5 I 4 * 7"
    assert Transcript.from_text(text) == tr


def test_text_roundtrip_empty():
    assert Transcript.from_text("") == Transcript()
    assert Transcript().to_text() == ""


@given(st.lists(st.tuples(st.sampled_from("EFI"), st.integers(0, 255),
                          st.integers(0, 255), st.integers(0, 255)),
                max_size=20))
def test_text_roundtrip_random(parts):
    moves = []
    for kind, k, x, y in parts:
        if kind == "E":
            moves += [("E", None, x, None), ("E", None, x, y)]
        elif kind == "F":
            moves += [("F", k, x, None), ("F", k, x, y)]
        else:
            moves += [("I", k, None, y), ("I", k, x, y)]
    tr = make_transcript(moves)
    assert Transcript.from_text(tr.to_text()) == tr


@pytest.mark.parametrize("line,fragment", [
    ("x E 1 *", "index"),
    ("1 Q 1 *", "kind"),
    ("1 E 1", "fields"),
    ("1 F 1 2", "fields"),
    ("1 E zz *", "hex"),
    ("1 E * *", "open"),
    ("1 F * 1 *", "key"),
    ("1 F 1 * 2", "open"),   # F query must leave y open, not x
    ("1 I 1 2 *", "open"),   # I query must leave x open, not y
])
def test_parse_errors_carry_line_numbers(line, fragment):
    with pytest.raises(TranscriptParseError) as excinfo:
        list(iter_text_moves(line))
    assert excinfo.value.line_number == 1
    assert fragment in str(excinfo.value).lower()


def test_parse_error_line_number_on_later_line():
    text = "1 E 0 *\n2 E 0 1\nbogus line here\n"
    with pytest.raises(TranscriptParseError) as excinfo:
        list(iter_text_moves(text))
    assert excinfo.value.line_number == 3


def test_from_text_rejects_out_of_order_indices():
    with pytest.raises(TranscriptParseError):
        Transcript.from_text("1 E 0 *\n3 E 0 1\n")


# -- validation ---------------------------------------------------------------

def test_validate_clean_transcript():
    tr = make_transcript(E_PAIR + F_PAIR + I_PAIR)
    assert validate_transcript(tr) == []
    assert validate_transcript(tr, q_max=1, t_max=2) == []


def test_validate_flags_two_replies_in_a_row():
    text = "1 E 0 *\n2 E 0 1\n3 E 0 2\n"
    moves = list(iter_text_moves(text))
    violations = validate_moves(iter(moves))
    assert any("reply" in str(v) for v in violations)
    assert any(v.line_number == 3 for v in violations)


def test_validate_flags_budget_overrun():
    tr = make_transcript(F_PAIR + [("F", 2, 2, None), ("F", 2, 2, 4)])
    assert validate_transcript(tr, t_max=2) == []
    violations = validate_transcript(tr, t_max=1)
    assert any("budget" in str(v) for v in violations)


def test_validate_flags_verbatim_repeat():
    tr = make_transcript(F_PAIR + F_PAIR)
    violations = validate_transcript(tr)
    assert any("repeat" in str(v) for v in violations)


def test_validate_flags_bijectivity_breaks():
    tr = make_transcript([
        ("F", 1, 0, None), ("F", 1, 0, 3),
        ("F", 1, 1, None), ("F", 1, 1, 3),   # two inputs map to 3
    ])
    violations = validate_transcript(tr)
    assert any("bijectivity" in str(v) for v in violations)


def test_validate_flags_mismatched_reply():
    tr = make_transcript([("F", 1, 0, None), ("F", 2, 0, 3)])
    violations = validate_transcript(tr)
    assert any("complete" in str(v) for v in violations)


def test_validate_flags_dangling_query():
    tr = make_transcript(E_PAIR + [("F", 1, 0, None)])
    violations = validate_transcript(tr)
    assert any("unanswered" in str(v) for v in violations)

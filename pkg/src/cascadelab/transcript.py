"""Query/reply transcripts and their key-pair analysis.

A transcript is the ordered list of moves an adversary and its oracles
exchange: queries at odd move indices, replies at even ones, each reply
immediately following its query. Moves are stored as tuples

    ("E", None, x, y)   E query/reply        (y is None in the query)
    ("F", k, x, y)      forward query/reply  (y is None in the query)
    ("I", k, x, y)      inverse query/reply  (x is None in the query)

The analysis side defines the seen-key-pair set of a view (every ordered
pair of keys that have both appeared in F/inverse queries) and the bad
event (the hidden key pair is seen). The text format is one move per line,
`i E x y` / `i F k x y` / `i I k x y`, values in hex, with `*` for the
field a query leaves open.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, TranscriptParseError

Move = tuple[str, int | None, int | None, int | None]

_KINDS = ("E", "F", "I")


def is_query(move: Move) -> bool:
    kind, _, x, y = move
    return x is None if kind == "I" else y is None


class Transcript:
    """Ordered move list; move index i is 1-based (position + 1)."""

    __slots__ = ("moves",)

    def __init__(self, moves: list[Move] | None = None):
        self.moves: list[Move] = moves if moves is not None else []

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __eq__(self, other) -> bool:
        return isinstance(other, Transcript) and self.moves == other.moves

    def append(self, move: Move) -> None:
        self.moves.append(move)

    def f_query_keys(self, upto_move: int | None = None) -> set[int]:
        """Keys appearing in F/inverse *queries* within the first moves."""
        end = len(self.moves) if upto_move is None else upto_move
        keys = set()
        for move in self.moves[:end]:
            if move[0] != "E" and is_query(move):
                keys.add(move[1])
        return keys

    def to_text(self) -> str:
        lines = []
        for i, (kind, k, x, y) in enumerate(self.moves, start=1):
            xs = "*" if x is None else format(x, "x")
            ys = "*" if y is None else format(y, "x")
            if kind == "E":
                lines.append(f"{i} E {xs} {ys}")
            else:
                lines.append(f"{i} {kind} {format(k, 'x')} {xs} {ys}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        """Parse the text form, validating indices are consecutive from 1."""
        moves = []
        for line_number, index, move in iter_text_moves(text):
            if index != len(moves) + 1:
                raise TranscriptParseError(
                    f"move index {index} out of order (expected {len(moves) + 1})",
                    line_number)
            moves.append(move)
        return cls(moves)


def iter_text_moves(text: str):
    """Yield (line_number, move_index, move) from the text format.

    Raises TranscriptParseError on malformed lines; validity of the move
    *sequence* is the business of `validate_moves`.
    """
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            index = int(tokens[0])
        except ValueError:
            raise TranscriptParseError(f"bad move index {tokens[0]!r}", line_number)
        if len(tokens) < 2 or tokens[1] not in _KINDS:
            raise TranscriptParseError("expected move kind E, F, or I", line_number)
        kind = tokens[1]
        want = 4 if kind == "E" else 5
        if len(tokens) != want:
            raise TranscriptParseError(
                f"{kind} move takes {want - 2} value fields", line_number)
        fields = tokens[2:]
        values = []
        for tok in fields:
            if tok == "*":
                values.append(None)
            else:
                try:
                    values.append(int(tok, 16))
                except ValueError:
                    raise TranscriptParseError(f"bad hex value {tok!r}", line_number)
        if kind == "E":
            k, (x, y) = None, values
        else:
            k, x, y = values
            if k is None:
                raise TranscriptParseError("key field may not be *", line_number)
        open_fields = (x is None) + (y is None)
        if open_fields > 1:
            raise TranscriptParseError("a query leaves exactly one field open", line_number)
        if open_fields == 1 and (x is None) != (kind == "I"):
            raise TranscriptParseError(
                f"{kind} query must leave the {'x' if kind == 'I' else 'y'} field open",
                line_number)
        yield line_number, index, (kind, k, x, y)


def seen_key_pairs(tr: Transcript, upto_move: int | None = None) -> set[tuple[int, int]]:
    """All ordered pairs (k1, k2) such that both keys appear in F/inverse queries.

    The set depends only on queries, never on replies; its complement in the
    full key-pair square is the remaining-key-pair set.
    """
    keys = tr.f_query_keys(upto_move)
    return {(a, b) for a in keys for b in keys}


def bad_event(tr: Transcript, crucial_keys, upto_move: int) -> bool:
    """True iff the hidden key pair is seen within the first `upto_move` moves."""
    keys = tuple(crucial_keys)
    if len(keys) != 2:
        raise DomainError(f"bad event is defined for key pairs, got {len(keys)} keys")
    if not 0 <= upto_move <= len(tr):
        raise DomainError(f"move index {upto_move} beyond transcript of {len(tr)} moves")
    seen = tr.f_query_keys(upto_move)
    return keys[0] in seen and keys[1] in seen


@dataclass(frozen=True)
class Violation:
    line_number: int
    move_index: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line_number} (move {self.move_index}): {self.message}"


def validate_moves(
    numbered_moves,
    q_max: int | None = None,
    t_max: int | None = None,
) -> list[Violation]:
    """Check a parsed move sequence for the transcript invariants.

    Verifies: indices consecutive from 1; query/reply alternation with each
    reply completing its query; no verbatim query repeats; replies mutually
    consistent (each cipher row and the E map stay partial bijections);
    seen-key-pair monotonicity; budget accounting when limits are given.
    """
    violations = []
    expected_index = 1
    pending_query = None
    seen_queries = set()
    q_used = t_used = 0
    e_map: dict[int, int] = {}
    e_inv: dict[int, int] = {}
    rows: dict[int, dict[int, int]] = {}
    rows_inv: dict[int, dict[int, int]] = {}
    f_keys: set[int] = set()
    skp_size = 0

    for line_number, index, move in numbered_moves:
        flag = lambda msg: violations.append(Violation(line_number, index, msg))
        if index != expected_index:
            flag(f"move index {index}, expected {expected_index}")
        expected_index = index + 1
        kind, k, x, y = move

        if is_query(move):
            if index % 2 == 0:
                flag("query at even move index")
            if pending_query is not None:
                flag("query while previous query is unanswered")
            key = move
            if key in seen_queries:
                flag("verbatim repeat of an earlier query")
            seen_queries.add(key)
            pending_query = move
            if kind == "E":
                q_used += 1
                if q_max is not None and q_used > q_max:
                    flag(f"E-query budget exceeded ({q_used} > {q_max})")
            else:
                t_used += 1
                if t_max is not None and t_used > t_max:
                    flag(f"F-query budget exceeded ({t_used} > {t_max})")
                f_keys.add(k)
                if len(f_keys) ** 2 < skp_size:
                    flag("seen-key-pair set shrank")
                skp_size = len(f_keys) ** 2
            continue

        # Reply move.
        if index % 2 == 1:
            flag("reply at odd move index")
        if pending_query is None:
            flag("reply without a pending query")
        else:
            pk, pkk, px, py = pending_query
            matches = pk == kind and pkk == k and (
                (pk == "I" and py == y) or (pk != "I" and px == x))
            if not matches:
                flag("reply does not complete the preceding query")
            pending_query = None
        if x is None or y is None:
            flag("reply with an open field")
            continue
        if kind == "E":
            if e_map.get(x, y) != y or e_inv.get(y, x) != x:
                flag(f"E reply contradicts earlier E replies ({x:x} -> {y:x})")
            e_map[x] = y
            e_inv[y] = x
        else:
            fwd = rows.setdefault(k, {})
            inv = rows_inv.setdefault(k, {})
            if fwd.get(x, y) != y or inv.get(y, x) != x:
                flag(f"reply breaks bijectivity of row {k:x} ({x:x} -> {y:x})")
            fwd[x] = y
            inv[y] = x

    if pending_query is not None:
        violations.append(Violation(0, expected_index - 1, "transcript ends on an unanswered query"))
    return violations


def validate_transcript(
    tr: Transcript,
    q_max: int | None = None,
    t_max: int | None = None,
) -> list[Violation]:
    numbered = ((0, i, m) for i, m in enumerate(tr.moves, start=1))
    return validate_moves(numbered, q_max=q_max, t_max=t_max)

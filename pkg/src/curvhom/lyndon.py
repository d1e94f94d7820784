"""Reduced words in the rank-2 free group and their leaf-crossing length.

The crossing count N assigns each reduced word twice its length: in the
tree-of-chambers model every generator edge carries one non-split region
with two boundary leaves, and the geodesic between chambers crosses both
leaves of every edge on the reduced path.  The overlap
s(g, h) = (N(g) + N(h) - N(g h^-1)) / 2 then measures shared leaves, and
the axioms (I)-(V) of an integer length function can be checked
exhaustively over all words up to a given length.

Two overlap conventions are provided: RIGHT uses N(g h^-1) (twice the
longest common suffix) and LEFT uses N(h^-1 g) (twice the longest common
prefix).  They are exchanged by inverting both arguments and differ on
concrete pairs; RIGHT is the default.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

# letters: +1 = a, -1 = a^-1, +2 = b, -2 = b^-1
_LETTER_NAMES = {1: "a", -1: "A", 2: "b", -2: "B"}
_NAME_LETTERS = {v: k for k, v in _LETTER_NAMES.items()}


class BadLetterError(Exception):
    """A symbol outside the 4-letter alphabet {a, A, b, B}."""


class ResourceGuardError(Exception):
    """An enumeration request exceeded the configured word-count cap."""


class OverlapConvention(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


def _norm_letter(sym) -> int:
    if isinstance(sym, int):
        if sym in _LETTER_NAMES:
            return sym
        raise BadLetterError(f"letter code {sym!r} not in {{+-1, +-2}}")
    if isinstance(sym, str) and sym in _NAME_LETTERS:
        return _NAME_LETTERS[sym]
    raise BadLetterError(f"unknown letter {sym!r} (use a, A, b, B)")


@dataclass(frozen=True)
class Word:
    """A reduced word; adjacent inverse letters are forbidden."""

    letters: tuple[int, ...]

    def __post_init__(self):
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise ValueError(f"word {self.letters} is not reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return "".join(_LETTER_NAMES[x] for x in self.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return reduce(self.letters + other.letters)

    @staticmethod
    def from_str(text: str) -> "Word":
        return reduce(ch for ch in text.replace(" ", "") if ch != "e")


IDENTITY = Word(())


def reduce(letters: Iterable[Union[int, str]]) -> Word:
    """Free reduction: cancel adjacent inverse pairs until none remain."""
    stack: list[int] = []
    for sym in letters:
        x = _norm_letter(sym)
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(tuple(stack))


def crossing_count(w: Word) -> int:
    """Leaves crossed between the base chamber and the w-chamber: each of
    the len(w) edges on the reduced path contributes its two boundary
    leaves."""
    return 2 * len(w)


def overlap(g: Word, h: Word, conv: OverlapConvention = OverlapConvention.RIGHT) -> int:
    """s(g, h) = (N(g) + N(h) - N(g h^-1)) / 2 (or N(h^-1 g) for LEFT)."""
    if conv is OverlapConvention.RIGHT:
        mixed = g * h.inverse()
    else:
        mixed = h.inverse() * g
    twice = crossing_count(g) + crossing_count(h) - crossing_count(mixed)
    assert twice % 2 == 0
    return twice // 2


def _guard(max_len: int, cap: int) -> None:
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    top = 4 * 3 ** (max_len - 1)
    if top > cap:
        raise ResourceGuardError(
            f"{top} words of length {max_len} exceed the cap of {cap}"
        )


def enumerate_reduced(max_len: int, cap: int = 20000) -> list[Word]:
    """All reduced words of length <= max_len, identity first."""
    _guard(max_len, cap)
    words: list[Word] = [IDENTITY]
    layer: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        nxt: list[tuple[int, ...]] = []
        for tail in layer:
            for x in (1, -1, 2, -2):
                if tail and tail[-1] == -x:
                    continue
                nxt.append(tail + (x,))
        words.extend(Word(t) for t in nxt)
        layer = nxt
    return words


def check_axioms(
    max_len: int,
    conv: OverlapConvention = OverlapConvention.RIGHT,
    cap: int = 20000,
) -> list[dict]:
    """Exhaustively test the length-function axioms on words up to max_len.

    (I) N(g) = 0 iff g is trivial; (II) N(g^-1) = N(g); (III) s >= 0 on
    all pairs; (IV) s(g,h) < s(g,l) implies s(h,l) = s(g,h) on all
    triples; (V) s(g,h) + s(g^-1,h^-1) > N(g) = N(h) implies g = h on all
    equal-length pairs.  Returns one record per counterexample.
    """
    words = enumerate_reduced(max_len, cap)
    n = len(words)
    violations: list[dict] = []

    def record(axiom: str, witnesses: Sequence[Word], lhs, rhs) -> None:
        violations.append(
            {
                "axiom": axiom,
                "witnesses": [str(w) for w in witnesses],
                "lhs": lhs,
                "rhs": rhs,
            }
        )

    lengths = np.array([crossing_count(w) for w in words], dtype=np.int32)
    for w, nw in zip(words, lengths):
        if (nw == 0) != (len(w) == 0):
            record("I", [w], int(nw), 0)
        ni = crossing_count(w.inverse())
        if ni != nw:
            record("II", [w], int(ni), int(nw))

    s = np.empty((n, n), dtype=np.int32)
    for i, g in enumerate(words):
        for j in range(i, n):
            v = overlap(g, words[j], conv)
            s[i, j] = v
            s[j, i] = v
    if int(s.min()) < 0:
        for i, j in zip(*np.nonzero(s < 0)):
            record("III", [words[i], words[j]], int(s[i, j]), 0)

    # (IV): for each g, wherever s(g,h) < s(g,l) demand s(h,l) == s(g,h)
    for i in range(n):
        row = s[i]
        mask = row[:, None] < row[None, :]
        bad = mask & (s != row[:, None])
        if bad.any():
            for j, k in zip(*np.nonzero(bad)):
                record(
                    "IV",
                    [words[i], words[j], words[k]],
                    int(s[j, k]),
                    int(s[i, j]),
                )

    # (V): equal-length pairs with s(g,h) + s(g^-1,h^-1) > N must be equal
    inv_index = {w.letters: i for i, w in enumerate(words)}
    inv_of = np.array([inv_index[w.inverse().letters] for w in words])
    for i in range(n):
        for j in range(i + 1, n):
            if lengths[i] != lengths[j]:
                continue
            tot = int(s[i, j]) + int(s[inv_of[i], inv_of[j]])
            if tot > int(lengths[i]):
                record("V", [words[i], words[j]], tot, int(lengths[i]))
    return violations


def non_archimedean(max_len: int, cap: int = 20000) -> list[Word]:
    """Nontrivial words with N(w^2) <= N(w); empty in a free group."""
    out = []
    for w in enumerate_reduced(max_len, cap):
        if len(w) == 0:
            continue
        if crossing_count(w * w) <= crossing_count(w):
            out.append(w)
    return out


def violations_to_json_lines(violations: list[dict]) -> str:
    import json

    return "\n".join(json.dumps(v, sort_keys=True) for v in violations)

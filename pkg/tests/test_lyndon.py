"""Reduced words, crossing counts, overlaps, and the length-function axioms."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from curvhom import lyndon
from curvhom.lyndon import (
    IDENTITY,
    BadLetterError,
    OverlapConvention,
    ResourceGuardError,
    Word,
    check_axioms,
    crossing_count,
    enumerate_reduced,
    non_archimedean,
    overlap,
    reduce,
)

R = OverlapConvention.RIGHT
L = OverlapConvention.LEFT
W = Word.from_str


# ---------------------------------------------------------------------------
# Oracles


def tree_crossing_oracle(w: Word) -> int:
    """Walk the chamber tree and count boundary-leaf crossings explicitly.

    Chambers are reduced words; stepping along letter x crosses the two
    boundary leaves of the region on the edge {node, node.x}.
    """
    crossed = set()
    node = ()
    for letter in w.letters:
        nxt = node + (letter,)
        assert not (node and node[-1] == -letter)  # reduced path never backtracks
        edge = frozenset({node, nxt})
        crossed.add((edge, 1))
        crossed.add((edge, 2))
        node = nxt
    return len(crossed)


def common_suffix_len(g: Word, h: Word) -> int:
    n = 0
    while n < len(g) and n < len(h) and g.letters[-1 - n] == h.letters[-1 - n]:
        n += 1
    return n


def common_prefix_len(g: Word, h: Word) -> int:
    n = 0
    while n < len(g) and n < len(h) and g.letters[n] == h.letters[n]:
        n += 1
    return n


# ---------------------------------------------------------------------------
# Words


def test_reduce_examples():
    assert str(reduce("abBa")) == "aa"
    assert reduce("aA") == IDENTITY
    assert str(reduce("abA")) == "abA"


def test_reduce_is_idempotent():
    w = reduce("aabBAbB b".replace(" ", ""))
    assert reduce(w.letters) == w


def test_bad_letter():
    with pytest.raises(BadLetterError):
        reduce("axb")
    with pytest.raises(BadLetterError):
        reduce([3])


def test_word_requires_reduced():
    with pytest.raises(ValueError):
        Word((1, -1))


def test_inverse_and_product():
    w = W("abA")
    assert str(w.inverse()) == "aBA"
    assert w * w.inverse() == IDENTITY
    assert str(W("ab") * W("Ba")) == "aa"


_letters = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12)


@settings(max_examples=200, deadline=None)
@given(_letters)
def test_reduce_never_leaves_cancellable_pairs(seq):
    w = reduce(seq)
    for x, y in zip(w.letters, w.letters[1:]):
        assert x != -y
    assert reduce(w.letters) == w


# ---------------------------------------------------------------------------
# Crossing count


def test_crossing_count_examples():
    assert crossing_count(IDENTITY) == 0
    assert crossing_count(W("a")) == 2 == tree_crossing_oracle(W("a"))
    assert crossing_count(W("abab")) == 8 == tree_crossing_oracle(W("abab"))


def test_crossing_count_matches_tree_oracle():
    for w in enumerate_reduced(4):
        assert crossing_count(w) == tree_crossing_oracle(w)


def test_crossing_count_inverse():
    assert crossing_count(W("ab").inverse()) == 4


# ---------------------------------------------------------------------------
# Overlap


def test_overlap_examples():
    assert overlap(W("ab"), W("b"), R) == 2
    assert overlap(W("ab"), W("a"), R) == 0
    assert crossing_count(W("ab") * W("a").inverse()) == 6
    for g in (W("a"), W("ab"), W("abA")):
        assert overlap(g, g, R) == crossing_count(g)
        assert overlap(g, g, L) == crossing_count(g)


def test_overlap_is_twice_common_segment():
    words = enumerate_reduced(4)
    for g, h in itertools.product(words[:60], words[:60]):
        assert overlap(g, h, R) == 2 * common_suffix_len(g, h)
        assert overlap(g, h, L) == 2 * common_prefix_len(g, h)


def test_conventions_conjugate_under_inversion():
    words = enumerate_reduced(4)
    for g, h in itertools.product(words, words):
        assert overlap(g, h, R) == overlap(g.inverse(), h.inverse(), L)


def test_overlap_bounded_by_lengths():
    words = enumerate_reduced(4)
    for g, h in itertools.product(words, words):
        s = overlap(g, h, R)
        assert 0 <= s <= min(crossing_count(g), crossing_count(h))


def test_crossing_triangle_inequality():
    words = enumerate_reduced(4)
    for g, h in itertools.product(words, words):
        assert crossing_count(g * h) <= crossing_count(g) + crossing_count(h)


# ---------------------------------------------------------------------------
# Axioms


def test_axioms_small_right():
    assert check_axioms(3, R) == []


def test_axioms_small_left():
    assert check_axioms(3, L) == []


def test_axiom_ii_example():
    w = W("ab")
    assert str(w.inverse()) == "BA"
    assert crossing_count(w.inverse()) == 4 == crossing_count(w)


def test_axioms_detect_violations_for_broken_length():
    # sanity: axiom (IV) really can fail; feed it a non-tree overlap by
    # checking the raw statement against a deliberately wrong s
    words = enumerate_reduced(2)
    fake = {
        (g.letters, h.letters): (len(g) + len(h)) % 3 for g in words for h in words
    }
    bad = 0
    for g, h, l in itertools.product(words[:10], repeat=3):
        sgh = fake[(g.letters, h.letters)]
        sgl = fake[(g.letters, l.letters)]
        shl = fake[(h.letters, l.letters)]
        if sgh < sgl and shl != sgh:
            bad += 1
    assert bad > 0


def test_non_archimedean_empty():
    assert non_archimedean(4) == []


def test_single_letter_is_archimedean():
    w = W("a")
    assert crossing_count(w * w) == 4 > crossing_count(w)


def test_resource_guard():
    with pytest.raises(ResourceGuardError):
        enumerate_reduced(12)
    with pytest.raises(ResourceGuardError):
        check_axioms(12)
    with pytest.raises(ValueError):
        enumerate_reduced(0)


def test_enumeration_counts():
    words = enumerate_reduced(3)
    # 1 + 4 + 12 + 36
    assert len(words) == 53
    assert len({w.letters for w in words}) == 53


def test_violations_json_lines():
    text = lyndon.violations_to_json_lines(
        [{"axiom": "IV", "witnesses": ["a", "b", "ab"], "lhs": 1, "rhs": 0}]
    )
    import json

    row = json.loads(text)
    assert row["axiom"] == "IV"
    assert row["witnesses"] == ["a", "b", "ab"]

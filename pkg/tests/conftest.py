"""Shared strategies and small builders for the test suite."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from gropes import (
    CappedGrope,
    CapRef,
    Grope,
    GroupWord,
    Intersection,
    Stage,
    Tip,
    reduce,
)

# Signed nonzero generator indices over a small alphabet.
signed_letters = st.integers(min_value=-6, max_value=6).filter(lambda i: i != 0)

raw_letter_lists = st.lists(signed_letters, max_size=12)

words = raw_letter_lists.map(lambda ls: reduce(ls))

nonempty_words = words.filter(lambda w: w.letters != ())


def dyadic_tower(depth: int, start: int = 1) -> tuple[Grope, int]:
    """A genus-1 chain of class `depth`; returns (grope, next fresh tip index)."""
    counter = start

    def slot(c: int):
        nonlocal counter
        if c == 1:
            t = Tip(f"t{counter}")
            counter += 1
            return t
        return Stage(((slot(1), slot(c - 1)),))

    root = Stage(((slot(1), slot(depth - 1)),))
    return Grope(root), counter


def two_cap_grope(label_a: GroupWord, label_b: GroupWord | None = None) -> CappedGrope:
    """Genus-1 class-2 grope, caps c1/c2, one self point per labeled cap."""
    body = Grope(Stage(((Tip("t1"), Tip("t2")),)))
    caps = {"c1": "t1", "c2": "t2"}
    points = [Intersection("i1", CapRef("c1"), CapRef("c1"), label_a)]
    if label_b is not None:
        points.append(Intersection("i2", CapRef("c2"), CapRef("c2"), label_b))
    return CappedGrope(body, caps, tuple(points))


def seeded(seed: int) -> random.Random:
    return random.Random(seed)

"""Free-group words, truncated power-series expansions, and depth.

A word in the free group F(x1, x2, ...) is stored freely reduced as a tuple
of nonzero integers: letter i > 0 is the generator x_i and -i is its inverse.
The expansion machinery substitutes x_i -> 1 + X_i into a word and multiplies
out in noncommuting variables, dropping every monomial above a degree cutoff.
The smallest degree that survives is the word's depth in the lower central
series: depth >= k exactly when the word lies in the k-th term, and a word
whose expansion is 1 at every cutoff is the identity.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import ValidationError

DEFAULT_CUTOFF = 8


def _reduced(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True, slots=True)
class GroupWord:
    """A freely reduced word; equal words compare and hash equal."""

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        letters = tuple(self.letters)
        for x in letters:
            if not isinstance(x, int) or isinstance(x, bool) or x == 0:
                raise ValidationError(f"invalid letter {x!r}: letters are nonzero integers")
        object.__setattr__(self, "letters", _reduced(letters))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    @property
    def max_generator(self) -> int:
        """Largest generator index used, 0 for the identity."""
        return max((abs(x) for x in self.letters), default=0)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(-x for x in reversed(self.letters)))

    def __pow__(self, n: int) -> "GroupWord":
        base = self if n >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(n)):
            out = out * base
        return out

    def syllables(self) -> Iterator[tuple[int, int]]:
        """Runs of equal letters as (generator index, signed exponent)."""
        run_gen, run_exp = 0, 0
        for x in self.letters:
            gen, step = abs(x), (1 if x > 0 else -1)
            if gen == run_gen and (run_exp > 0) == (step > 0):
                run_exp += step
            else:
                if run_gen:
                    yield run_gen, run_exp
                run_gen, run_exp = gen, step
        if run_gen:
            yield run_gen, run_exp

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for gen, exp in self.syllables():
            parts.append(f"x{gen}" if exp == 1 else f"x{gen}^{exp}")
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"GroupWord({self.letters!r})"


IDENTITY = GroupWord()


def generator(i: int) -> GroupWord:
    """The generator x_i (i >= 1)."""
    if i < 1:
        raise ValidationError(f"generator index must be >= 1, got {i}")
    return GroupWord((i,))


def reduce(letters: Iterable[int], rank: int | None = None) -> GroupWord:
    """Freely reduce a raw letter sequence, checking indices against rank."""
    word = GroupWord(tuple(letters))
    if rank is not None and word.max_generator > rank:
        raise ValidationError(
            f"letter index {word.max_generator} exceeds alphabet rank {rank}"
        )
    return word


def multiply(a: GroupWord, b: GroupWord) -> GroupWord:
    return a * b


def invert(a: GroupWord) -> GroupWord:
    return a.inverse()


def commutator(a: GroupWord, b: GroupWord) -> GroupWord:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


@functools.lru_cache(maxsize=None)
def unoriented_key(w: GroupWord) -> tuple[int, ...]:
    """Canonical form of a label read with no preferred orientation.

    Reversing the direction an intersection is read inverts its label, so
    labels are compared as the lexicographically smaller of the word and its
    inverse.  Cached: rewrites ask for the same few labels millions of times.
    """
    return min(w.letters, w.inverse().letters)


class TruncatedSeries:
    """1 + (terms) in noncommuting variables, truncated above a degree cutoff.

    Terms map a monomial, a tuple of positive generator indices, to a nonzero
    integer coefficient.  The constant term is implicitly 1: every series here
    is the expansion of a group element, and those are always unit series.
    """

    __slots__ = ("cutoff", "terms")

    def __init__(self, cutoff: int, terms: Mapping[tuple[int, ...], int] | None = None):
        if cutoff < 1:
            raise ValidationError(f"cutoff must be >= 1, got {cutoff}")
        self.cutoff = cutoff
        clean: dict[tuple[int, ...], int] = {}
        for mono, coeff in (terms or {}).items():
            if not mono:
                raise ValidationError("constant term is implicit and cannot be set")
            if len(mono) <= cutoff and coeff:
                clean[tuple(mono)] = coeff
        self.terms = clean

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.cutoff == other.cutoff and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.cutoff, frozenset(self.terms.items())))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self.cutoff != other.cutoff:
            raise ValidationError("cannot multiply series with different cutoffs")
        cutoff = self.cutoff
        out = dict(other.terms)
        for mono, coeff in self.terms.items():
            c = out.get(mono, 0) + coeff
            if c:
                out[mono] = c
            else:
                out.pop(mono, None)
        for ma, ca in self.terms.items():
            room = cutoff - len(ma)
            if room < 1:
                continue
            for mb, cb in other.terms.items():
                if len(mb) > room:
                    continue
                mono = ma + mb
                c = out.get(mono, 0) + ca * cb
                if c:
                    out[mono] = c
                else:
                    out.pop(mono, None)
        product = TruncatedSeries(cutoff)
        product.terms = out
        return product

    def min_degree(self) -> int | None:
        """Lowest degree with a nonzero term, None when the series is 1."""
        return min((len(m) for m in self.terms), default=None)

    def coefficient(self, mono: tuple[int, ...]) -> int:
        if not mono:
            return 1
        return self.terms.get(tuple(mono), 0)

    def __repr__(self) -> str:
        if not self.terms:
            return f"TruncatedSeries(cutoff={self.cutoff}, 1)"
        body = " + ".join(
            f"{c}*{'.'.join(f'X{i}' for i in m)}"
            for m, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        )
        return f"TruncatedSeries(cutoff={self.cutoff}, 1 + {body})"


def _letter_series(letter: int, cutoff: int) -> TruncatedSeries:
    gen = abs(letter)
    if letter > 0:
        return TruncatedSeries(cutoff, {(gen,): 1})
    terms = {(gen,) * j: (-1) ** j for j in range(1, cutoff + 1)}
    return TruncatedSeries(cutoff, terms)


def magnus(w: GroupWord, cutoff: int = DEFAULT_CUTOFF) -> TruncatedSeries:
    """Expansion of w under x_i -> 1 + X_i, truncated above the cutoff.

    The map is a homomorphism into the units of the truncated tensor algebra:
    magnus(a * b) == magnus(a) * magnus(b) at any shared cutoff.
    """
    acc = TruncatedSeries(cutoff)
    for letter in w.letters:
        acc = acc * _letter_series(letter, cutoff)
    return acc


@dataclass(frozen=True, slots=True)
class Depth:
    """Position of a word in the lower central series.

    bound is the depth value; is_exact False means only "at least bound" is
    known (the word survived past the cutoff).  bound None means the word is
    the identity and lies in every term.
    """

    bound: int | None
    is_exact: bool

    @classmethod
    def exact(cls, k: int) -> "Depth":
        return cls(k, True)

    @classmethod
    def at_least(cls, k: int) -> "Depth":
        return cls(k, False)

    @classmethod
    def infinite(cls) -> "Depth":
        return cls(None, True)

    @property
    def is_infinite(self) -> bool:
        return self.bound is None

    @property
    def lower_bound(self) -> float:
        return math.inf if self.bound is None else self.bound

    def __str__(self) -> str:
        if self.bound is None:
            return "oo"
        return str(self.bound) if self.is_exact else f">={self.bound}"


def lcs_depth(w: GroupWord, cutoff: int = DEFAULT_CUTOFF) -> Depth:
    """Depth of w in the lower central series, resolved up to the cutoff.

    A nontrivial word's expansion acquires its first terms exactly in degree
    equal to its depth, so the answer is exact whenever it is at most the
    cutoff.  Computation deepens the cutoff one degree at a time: degree-k
    terms of a product of unit series depend only on degree-<=k terms of the
    factors, so stopping early gives the same answer as expanding at the full
    cutoff directly, while cheap shallow words stay cheap.
    """
    if cutoff < 1:
        raise ValidationError(f"cutoff must be >= 1, got {cutoff}")
    if w.is_identity:
        return Depth.infinite()
    for c in range(1, cutoff + 1):
        d = magnus(w, c).min_degree()
        if d is not None:
            return Depth.exact(d)
    return Depth.at_least(cutoff + 1)

"""Gropes as rooted trees of surface stages.

A stage is a surface of genus g, recorded as g ordered pairs of slots; each
pair is a symplectic pair of curves on the surface.  A slot is either a tip
(a curve with nothing attached, ready to receive a cap) or a deeper stage
glued along that curve.  A grope is a root stage plus a closed/bounded flag.

Stages have no names: a stage is addressed by its path from the root, a
tuple of (pair index, side) steps where side 0 is the alpha curve of the
pair and side 1 the beta curve.  The root has path ().

The class of a grope measures nested commutator depth: tips have class 1,
a stage has class min over its pairs of (class(alpha) + class(beta)), and
the boundary word of a class-k grope lies in the k-th lower central series
term of the free group on its tips.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .commutators import Comm, CommutatorExpr, Gen, Inv, Prod, push_inverses
from .errors import ValidationError
from .words import IDENTITY, GroupWord, commutator, generator

Slot = Union["Tip", "Stage"]
Path = tuple[tuple[int, int], ...]

ALPHA, BETA = 0, 1
SIDE_NAMES = ("alpha", "beta")


def path_doc(path: Path) -> list[list]:
    """A path as JSON-ready [[pairIndex, "alpha"|"beta"], ...]."""
    return [[j, SIDE_NAMES[side]] for j, side in path]


@dataclass(frozen=True, slots=True)
class Tip:
    tip_id: str

    def __post_init__(self) -> None:
        if not self.tip_id:
            raise ValidationError("tip id must be a nonempty string")


@dataclass(frozen=True, slots=True)
class Stage:
    pairs: tuple[tuple[Slot, Slot], ...]

    def __post_init__(self) -> None:
        pairs = tuple(tuple(p) for p in self.pairs)
        if not pairs:
            raise ValidationError("a stage must have genus >= 1")
        for p in pairs:
            if len(p) != 2 or not all(isinstance(s, (Tip, Stage)) for s in p):
                raise ValidationError(f"each pair needs exactly two slots, got {p!r}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def genus(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, slots=True)
class Grope:
    root: Stage
    closed: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.root, Stage):
            raise ValidationError("the root of a grope is a stage")


def class_of(obj: Grope | Slot) -> int:
    """Nested commutator depth guaranteed by the branching shape."""
    if isinstance(obj, Grope):
        obj = obj.root
    if isinstance(obj, Tip):
        return 1
    return min(class_of(a) + class_of(b) for a, b in obj.pairs)


def iter_stages(obj: Grope | Stage) -> Iterator[tuple[Path, Stage]]:
    """All stages with their paths, depth-first in pair-then-side order."""
    root = obj.root if isinstance(obj, Grope) else obj

    def walk(stage: Stage, path: Path) -> Iterator[tuple[Path, Stage]]:
        yield path, stage
        for j, (a, b) in enumerate(stage.pairs):
            if isinstance(a, Stage):
                yield from walk(a, path + ((j, ALPHA),))
            if isinstance(b, Stage):
                yield from walk(b, path + ((j, BETA),))

    yield from walk(root, ())


def stage_at(obj: Grope | Stage, path: Path) -> Stage:
    stage = obj.root if isinstance(obj, Grope) else obj
    for step in path:
        j, side = step
        if not 0 <= j < stage.genus:
            raise ValidationError(f"no pair {j} at a genus-{stage.genus} stage")
        slot = stage.pairs[j][side]
        if not isinstance(slot, Stage):
            raise ValidationError(f"slot {(j, side)} holds a tip, not a stage")
        stage = slot
    return stage


def with_stage_at(root: Stage, path: Path, new: Stage) -> Stage:
    """Rebuild the spine from the root so the stage at path becomes new."""
    if not path:
        return new
    (j, side), rest = path[0], path[1:]
    child = root.pairs[j][side]
    if not isinstance(child, Stage):
        raise ValidationError(f"slot {path[0]} holds a tip, not a stage")
    rebuilt = with_stage_at(child, rest, new)
    pair = list(root.pairs[j])
    pair[side] = rebuilt
    pairs = list(root.pairs)
    pairs[j] = tuple(pair)
    return Stage(tuple(pairs))


def tips(obj: Grope | Stage) -> list[str]:
    """Tip ids depth-first, alpha before beta within each pair."""
    root = obj.root if isinstance(obj, Grope) else obj
    out: list[str] = []

    def walk(stage: Stage) -> None:
        for a, b in stage.pairs:
            for slot in (a, b):
                if isinstance(slot, Tip):
                    out.append(slot.tip_id)
                else:
                    walk(slot)

    walk(root)
    return out


def count_tips(obj: Grope | Stage) -> int:
    return len(tips(obj))


def tip_locations(obj: Grope | Stage) -> dict[str, tuple[Path, int, int]]:
    """Map each tip id to (parent stage path, pair index, side)."""
    out: dict[str, tuple[Path, int, int]] = {}
    for path, stage in iter_stages(obj):
        for j, (a, b) in enumerate(stage.pairs):
            if isinstance(a, Tip):
                out[a.tip_id] = (path, j, ALPHA)
            if isinstance(b, Tip):
                out[b.tip_id] = (path, j, BETA)
    return out


def is_dyadic(obj: Grope | Stage) -> bool:
    """True when every stage has genus 1."""
    return all(stage.genus == 1 for _, stage in iter_stages(obj))


def default_assignment(obj: Grope | Stage) -> dict[str, GroupWord]:
    """Distinct generators x1, x2, ... on tips in traversal order."""
    return {tip: generator(k + 1) for k, tip in enumerate(tips(obj))}


def boundary_word(obj: Grope | Stage, assignment: Mapping[str, GroupWord] | None = None) -> GroupWord:
    """Boundary of the bottom surface: the pair commutators multiplied out.

    Each tip contributes its assigned word, each deeper stage contributes its
    own boundary, and a stage reads [alpha, beta] across its pairs in order.
    With any assignment, the result of a class-k grope has depth >= k.
    """
    root = obj.root if isinstance(obj, Grope) else obj
    if assignment is None:
        assignment = default_assignment(root)

    def word_of(slot: Slot) -> GroupWord:
        if isinstance(slot, Tip):
            try:
                return assignment[slot.tip_id]
            except KeyError:
                raise ValidationError(f"no word assigned to tip {slot.tip_id!r}") from None
        out = IDENTITY
        for a, b in slot.pairs:
            out = out * commutator(word_of(a), word_of(b))
        return out

    return word_of(root)


def grope_from_expression(expr: CommutatorExpr) -> tuple[Grope, dict[str, GroupWord]]:
    """Build the grope whose shape mirrors a commutator expression.

    Returns the grope and the tip assignment under which its boundary word
    equals the expression's value.  Inverses are first pushed down to the
    generators ([u,v]^-1 = [v,u]), where they become tip orientations.  The
    resulting class equals the expression's weight, so the expression must
    have weight >= 2: a bare generator does not bound a surface.
    """
    counter = 0
    assignment: dict[str, GroupWord] = {}

    def fresh_tip(word: GroupWord) -> Tip:
        nonlocal counter
        counter += 1
        tip = Tip(f"t{counter}")
        assignment[tip.tip_id] = word
        return tip

    def build_slot(e: CommutatorExpr) -> Slot:
        if isinstance(e, Gen):
            return fresh_tip(generator(e.index))
        if isinstance(e, Inv):
            if isinstance(e.operand, Gen):
                return fresh_tip(generator(e.operand.index).inverse())
            raise ValidationError("inverses should have been pushed to generators")
        if isinstance(e, Comm):
            return Stage(((build_slot(e.left), build_slot(e.right)),))
        pairs: list[tuple[Slot, Slot]] = []
        for factor in e.factors:
            built = build_slot(factor)
            if not isinstance(built, Stage):
                raise ValidationError(
                    "a product factor must be a commutator to bound a surface"
                )
            pairs.extend(built.pairs)
        return Stage(tuple(pairs))

    built = build_slot(push_inverses(expr))
    if not isinstance(built, Stage):
        raise ValidationError("an expression of weight 1 does not describe a grope")
    return Grope(built), assignment


def validate_grope(obj: Grope) -> list[str]:
    """Structural violations as human-readable strings; empty means valid."""
    problems: list[str] = []
    if not isinstance(obj, Grope):
        return [f"not a grope: {obj!r}"]
    seen_objects: set[int] = set()
    seen_tips: dict[str, int] = {}

    def walk(slot: Slot) -> None:
        if id(slot) in seen_objects:
            problems.append("shared subtree: the stage tree must not alias nodes")
            return
        seen_objects.add(id(slot))
        if isinstance(slot, Tip):
            seen_tips[slot.tip_id] = seen_tips.get(slot.tip_id, 0) + 1
            return
        for a, b in slot.pairs:
            walk(a)
            walk(b)

    walk(obj.root)
    for tip_id, n in sorted(seen_tips.items()):
        if n > 1:
            problems.append(f"duplicate tip id {tip_id!r} ({n} occurrences)")
    return problems

"""Splitting moves: push genus and label variety down to simple pieces.

Two rewrites, both preserving the class of the grope:

* split_cap separates one label value off a cap that carries several.  The
  cap's stage gains one pair: the cap is divided in two (the lexicographically
  least unoriented value versus the rest) and whatever sits on the dual curve
  is replaced by two parallel copies, each inheriting all of its
  intersections.  Iterating peels off one value at a time, so a cap with n
  values ends as n caps of one value each.

* split_stage replaces a genus-g stage (g >= 2) above the first stage by g
  genus-1 stages side by side on the parent, again duplicating the dual side
  per piece.

full_split drives both to a fixed point: afterwards every cap carries at most
one label value and every stage above the first has genus 1, so all genus is
concentrated on the first stage.  Duplication can grow structures fast
(splitting a class-k grope whose caps each carry n values multiplies
first-stage genus to n^k), so both moves enforce configurable size guards.

Parallel copies get lineage names: cap c3 becomes c3.1 and c3.2, an
intersection i7 inherited by two copies becomes i7.1 and i7.2.  Surviving
sheets keep their ids, so rewrites are auditable and replayable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .capped import (
    BodyRef,
    CappedGrope,
    CapRef,
    Intersection,
    SheetRef,
    cap_order,
    cap_value_keys,
    value_keys_by_cap,
)
from .errors import DualNotCapError, GrowthLimitError, RewriteError, ValidationError
from .grope import (
    Grope,
    Path,
    Slot,
    Stage,
    Tip,
    iter_stages,
    path_doc,
    stage_at,
    tip_locations,
    tips,
    with_stage_at,
)
from .words import GroupWord, unoriented_key


@dataclass(frozen=True, slots=True)
class SplitLimits:
    """Size guards; exceeding either aborts the rewrite."""

    max_first_stage_genus: int = 10**6
    max_intersections: int = 10**7


DEFAULT_LIMITS = SplitLimits()


class _Names:
    """Deterministic lineage naming with collision avoidance."""

    def __init__(self, cg: CappedGrope):
        taken = set(cg.caps) | set(cg.caps.values())
        taken.update(p.point_id for p in cg.intersections)
        taken.update(s.sphere_id for s in cg.spheres)
        if cg.body is not None:
            taken.update(tips(cg.body))
        self.taken = taken

    def derived(self, base: str, k: int) -> str:
        name = f"{base}.{k}"
        m = 0
        while name in self.taken:
            m += 1
            name = f"{base}.{k}.{m}"
        self.taken.add(name)
        return name


def _copy_slot(slot: Slot, k: int, names: _Names, tip_map: dict[str, str]) -> Slot:
    if isinstance(slot, Tip):
        new_id = names.derived(slot.tip_id, k)
        tip_map[slot.tip_id] = new_id
        return Tip(new_id)
    return Stage(
        tuple(
            (_copy_slot(a, k, names, tip_map), _copy_slot(b, k, names, tip_map))
            for a, b in slot.pairs
        )
    )


def _shifted(path: Path, ppath: Path, pair: int, extra: int) -> Path:
    """Shift the pair index of paths passing through a later pair of ppath."""
    depth = len(ppath)
    if len(path) > depth and path[:depth] == ppath and path[depth][0] > pair:
        j, side = path[depth]
        return path[:depth] + ((j + extra, side),) + path[depth + 1 :]
    return path


def _check_limits(body: Grope, points: list[Intersection], limits: SplitLimits) -> None:
    genus = body.root.genus
    if genus > limits.max_first_stage_genus:
        raise GrowthLimitError(
            f"first-stage genus {genus} exceeds the limit {limits.max_first_stage_genus}"
        )
    if len(points) > limits.max_intersections:
        raise GrowthLimitError(
            f"{len(points)} intersections exceed the limit {limits.max_intersections}"
        )


@dataclass
class _DualCopies:
    """Parallel copies of a dual slot plus the maps to rewrite references."""

    copies: list[Slot]
    cap_maps: list[dict[str, str]]  # per copy: old cap id -> new cap id
    tip_maps: list[dict[str, str]]  # per copy: old tip id -> new tip id
    dual_caps: set[str]
    prefix: Path | None  # dual subtree path, None when the dual is a tip


def _dual_copies(
    cg: CappedGrope,
    dual: Slot,
    ppath: Path,
    pair: int,
    side: int,
    count: int,
    names: _Names,
) -> _DualCopies:
    tip_to_cap = cg.tip_to_cap
    if isinstance(dual, Tip):
        dual_caps = {tip_to_cap[dual.tip_id]} if dual.tip_id in tip_to_cap else set()
        prefix = None
    else:
        dual_caps = {tip_to_cap[t] for t in tips(dual) if t in tip_to_cap}
        prefix = ppath + ((pair, side),)
    copies: list[Slot] = []
    cap_maps: list[dict[str, str]] = []
    tip_maps: list[dict[str, str]] = []
    for k in range(1, count + 1):
        tip_map: dict[str, str] = {}
        copies.append(_copy_slot(dual, k, names, tip_map))
        tip_maps.append(tip_map)
        cap_maps.append(
            {
                tip_to_cap[old_tip]: names.derived(tip_to_cap[old_tip], k)
                for old_tip in tip_map
                if old_tip in tip_to_cap
            }
        )
    return _DualCopies(copies, cap_maps, tip_maps, dual_caps, prefix)


def _membership(dc: _DualCopies):
    """Predicate: does a reference live on the duplicated dual slot?"""

    def in_copied(end: SheetRef) -> bool:
        if isinstance(end, CapRef):
            return end.cap_id in dc.dual_caps
        if isinstance(end, BodyRef) and dc.prefix is not None:
            return end.path[: len(dc.prefix)] == dc.prefix
        return False

    return in_copied


def _copy_remapper(dc: _DualCopies, ppath: Path, pair: int, dual_side: int):
    """Rewrite a dual-slot reference into copy k's ids and paths."""

    def remap_copied(end: SheetRef, k: int) -> SheetRef:
        if isinstance(end, CapRef):
            return CapRef(dc.cap_maps[k][end.cap_id])
        assert isinstance(end, BodyRef) and dc.prefix is not None
        step = (pair + k, dual_side)
        return BodyRef(ppath + (step,) + end.path[len(dc.prefix) :])

    return remap_copied


def _transfer_dual_caps(caps: dict[str, str], old_caps: dict[str, str], dc: _DualCopies) -> None:
    """Drop the consumed dual caps and register their parallel copies."""
    for old_cap in dc.dual_caps:
        del caps[old_cap]
    for cap_map, tip_map in zip(dc.cap_maps, dc.tip_maps):
        for old_cap, new_cap in cap_map.items():
            caps[new_cap] = tip_map[old_caps[old_cap]]


def _rebuild_points(
    points: tuple[Intersection, ...],
    in_copied,
    remap_copied,
    remap_other,
    copy_count: int,
    names: _Names,
) -> list[Intersection]:
    out: list[Intersection] = []
    for p in points:
        a_in, b_in = in_copied(p.end_a), in_copied(p.end_b)
        if not a_in and not b_in:
            end_a, end_b = remap_other(p, p.end_a), remap_other(p, p.end_b)
            if end_a is p.end_a and end_b is p.end_b:
                out.append(p)  # untouched points are shared, not rebuilt
            else:
                out.append(Intersection(p.point_id, end_a, end_b, p.label))
            continue
        for k in range(copy_count):
            end_a = remap_copied(p.end_a, k) if a_in else remap_other(p, p.end_a)
            end_b = remap_copied(p.end_b, k) if b_in else remap_other(p, p.end_b)
            out.append(Intersection(names.derived(p.point_id, k + 1), end_a, end_b, p.label))
    return out


def split_cap(
    cg: CappedGrope,
    cap_id: str,
    *,
    limits: SplitLimits | None = None,
    trace: list | None = None,
    allow_stage_dual: bool = False,
) -> CappedGrope:
    """Divide a cap carrying several label values into two caps.

    The cap's pair gains a twin: one new cap takes the intersections whose
    unoriented value is lexicographically least, the other takes the rest,
    and the dual slot is replaced by two parallel copies inheriting all of
    its intersections.  A cap with at most one value is returned unchanged.

    By default the dual slot must be a cap (a tip); pass allow_stage_dual to
    parallel-copy a whole dual subtree instead, which is how full_split
    splits caps deep in the tree.
    """
    limits = limits or DEFAULT_LIMITS
    if cg.body is None:
        raise ValidationError("cannot split a fully surgered grope")
    if cap_id not in cg.caps:
        raise ValidationError(f"unknown cap {cap_id!r}")
    keys = cap_value_keys(cg, cap_id)
    if len(keys) <= 1:
        return cg
    least = min(keys)

    tip_id = cg.caps[cap_id]
    ppath, pair, side = tip_locations(cg.body)[tip_id]
    parent = stage_at(cg.body, ppath)
    dual = parent.pairs[pair][1 - side]
    if isinstance(dual, Stage) and not allow_stage_dual:
        raise DualNotCapError(
            f"the dual of cap {cap_id!r} is a stage; split the dual subtree first"
        )

    names = _Names(cg)
    new_tips = (names.derived(tip_id, 1), names.derived(tip_id, 2))
    new_caps = (names.derived(cap_id, 1), names.derived(cap_id, 2))
    dc = _dual_copies(cg, dual, ppath, pair, 1 - side, 2, names)

    def make_pair(k: int) -> tuple[Slot, Slot]:
        mine: Slot = Tip(new_tips[k])
        other = dc.copies[k]
        return (mine, other) if side == 0 else (other, mine)

    new_pairs = parent.pairs[:pair] + (make_pair(0), make_pair(1)) + parent.pairs[pair + 1 :]
    new_root = with_stage_at(cg.body.root, ppath, Stage(new_pairs))
    body = Grope(new_root, cg.body.closed)

    me = CapRef(cap_id)

    def remap_other(p: Intersection, end: SheetRef) -> SheetRef:
        if end == me:
            part = 0 if unoriented_key(p.label) == least else 1
            return CapRef(new_caps[part])
        if isinstance(end, BodyRef):
            shifted = _shifted(end.path, ppath, pair, 1)
            return end if shifted == end.path else BodyRef(shifted)
        return end

    points = _rebuild_points(
        cg.intersections,
        _membership(dc),
        _copy_remapper(dc, ppath, pair, 1 - side),
        remap_other,
        2,
        names,
    )

    caps = dict(cg.caps)
    del caps[cap_id]
    caps[new_caps[0]] = new_tips[0]
    caps[new_caps[1]] = new_tips[1]
    _transfer_dual_caps(caps, cg.caps, dc)

    out = CappedGrope(body, caps, tuple(points), cg.spheres)
    _check_limits(body, points, limits)
    if trace is not None:
        trace.append(
            {
                "op": "split_cap",
                "cap": cap_id,
                "stage": path_doc(ppath),
                "pair": pair,
                "least": str(GroupWord(least)),
                "into": list(new_caps),
                "genusBefore": parent.genus,
                "genusAfter": parent.genus + 1,
            }
        )
    return out


def split_stage(
    cg: CappedGrope,
    path: Path,
    *,
    limits: SplitLimits | None = None,
    trace: list | None = None,
) -> CappedGrope:
    """Replace a genus-g stage above the first stage by g genus-1 stages.

    Each pair of the stage becomes its own genus-1 stage on the parent, and
    the dual slot is replaced by g parallel copies, one per piece, each
    inheriting all of its intersections.  A genus-1 stage is returned
    unchanged.
    """
    limits = limits or DEFAULT_LIMITS
    if cg.body is None:
        raise ValidationError("cannot split a fully surgered grope")
    if not path:
        raise RewriteError("the first stage is never split; it absorbs the genus")
    stage = stage_at(cg.body, path)
    g = stage.genus
    if g == 1:
        return cg

    ppath, (pair, side) = path[:-1], path[-1]
    parent = stage_at(cg.body, ppath)
    dual = parent.pairs[pair][1 - side]

    names = _Names(cg)
    dc = _dual_copies(cg, dual, ppath, pair, 1 - side, g, names)

    def make_pair(k: int) -> tuple[Slot, Slot]:
        mine: Slot = Stage((stage.pairs[k],))
        other = dc.copies[k]
        return (mine, other) if side == 0 else (other, mine)

    new_pairs = (
        parent.pairs[:pair]
        + tuple(make_pair(k) for k in range(g))
        + parent.pairs[pair + 1 :]
    )
    new_root = with_stage_at(cg.body.root, ppath, Stage(new_pairs))
    body = Grope(new_root, cg.body.closed)

    def remap_other(p: Intersection, end: SheetRef) -> SheetRef:
        if not isinstance(end, BodyRef):
            return end
        if end.path == path:
            return BodyRef(ppath + ((pair, side),))
        if end.path[: len(path)] == path:
            j, s2 = end.path[len(path)]
            return BodyRef(ppath + ((pair + j, side), (0, s2)) + end.path[len(path) + 1 :])
        shifted = _shifted(end.path, ppath, pair, g - 1)
        return end if shifted == end.path else BodyRef(shifted)

    points = _rebuild_points(
        cg.intersections,
        _membership(dc),
        _copy_remapper(dc, ppath, pair, 1 - side),
        remap_other,
        g,
        names,
    )

    caps = dict(cg.caps)
    _transfer_dual_caps(caps, cg.caps, dc)

    out = CappedGrope(body, caps, tuple(points), cg.spheres)
    _check_limits(body, points, limits)
    if trace is not None:
        trace.append(
            {
                "op": "split_stage",
                "stage": path_doc(path),
                "genus": g,
                "parentGenusBefore": parent.genus,
                "parentGenusAfter": parent.genus + g - 1,
            }
        )
    return out


def full_split(
    cg: CappedGrope,
    *,
    limits: SplitLimits | None = None,
    trace: list | None = None,
) -> CappedGrope:
    """Split caps and stages to a fixed point.

    Afterwards every cap carries at most one label value and every stage
    above the first has genus 1: the first stage holds all the genus and
    every pair heads a one-value-per-cap dyadic branch.  The class of the
    grope is unchanged.
    """
    limits = limits or DEFAULT_LIMITS
    while True:
        keys = value_keys_by_cap(cg)
        for cap in cap_order(cg):
            if len(keys[cap]) > 1:
                cg = split_cap(cg, cap, limits=limits, trace=trace, allow_stage_dual=True)
                break
        else:
            deepest: Path | None = None
            for path, stage in iter_stages(cg.body):
                if path and stage.genus > 1 and (deepest is None or len(path) > len(deepest)):
                    deepest = path
            if deepest is None:
                return cg
            cg = split_stage(cg, deepest, limits=limits, trace=trace)

"""Capped gropes: a grope body, caps on its tips, and labeled intersections.

Each tip carries a cap (a disk), and caps may intersect other caps, surface
stages of the body, or the spheres produced later by surgery.  Every
intersection point carries a free-group label, read from endpoint A to
endpoint B; reading the other way inverts it, so label values are compared
through their unoriented canonical form.

Intersections between two body surfaces are never allowed.  In strict mode
both endpoints must be caps, the discipline all rewriting moves preserve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import ValidationError
from .grope import Grope, Path, iter_stages, tips, validate_grope
from .words import GroupWord, unoriented_key


@dataclass(frozen=True, slots=True)
class CapRef:
    cap_id: str


@dataclass(frozen=True, slots=True)
class BodyRef:
    path: Path

    def __post_init__(self) -> None:
        path = tuple((int(j), int(side)) for j, side in self.path)
        for j, side in path:
            if j < 0 or side not in (0, 1):
                raise ValidationError(f"bad body path step {(j, side)!r}")
        object.__setattr__(self, "path", path)


@dataclass(frozen=True, slots=True)
class SphereRef:
    sphere_id: str


SheetRef = Union[CapRef, BodyRef, SphereRef]


@dataclass(frozen=True, slots=True)
class Intersection:
    point_id: str
    end_a: SheetRef
    end_b: SheetRef
    label: GroupWord

    def __post_init__(self) -> None:
        if not self.point_id:
            raise ValidationError("intersection id must be a nonempty string")
        for end in (self.end_a, self.end_b):
            if not isinstance(end, (CapRef, BodyRef, SphereRef)):
                raise ValidationError(f"bad endpoint {end!r}")
        if isinstance(self.end_a, BodyRef) and isinstance(self.end_b, BodyRef):
            raise ValidationError(
                f"intersection {self.point_id}: two body surfaces may not intersect"
            )
        if not isinstance(self.label, GroupWord):
            raise ValidationError(f"label must be a GroupWord, got {self.label!r}")

    def label_from(self, end: SheetRef) -> GroupWord:
        """The label as read starting at the given endpoint."""
        if end == self.end_a:
            return self.label
        if end == self.end_b:
            return self.label.inverse()
        raise ValidationError(f"{end!r} is not an endpoint of {self.point_id}")


@dataclass(frozen=True, slots=True)
class PendingPushoff:
    """An intersection swept up by a contraction, awaiting pushoff.

    other is the surviving sheet; label is read from its side.
    """

    point_id: str
    other: SheetRef
    label: GroupWord


@dataclass(frozen=True, slots=True)
class SphereRecord:
    """A sphere created by contracting a genus-1 piece along two caps."""

    sphere_id: str
    piece: int
    cap_a: str
    cap_b: str
    label: GroupWord
    pending: tuple[PendingPushoff, ...] = ()


@dataclass(frozen=True)
class CappedGrope:
    """A grope with caps on all tips plus the intersection multigraph.

    caps maps cap id to the tip it caps.  body None is the fully surgered
    state: every stage has been contracted away and only spheres remain.
    Intersections are kept sorted by id, so structural equality is
    order-insensitive and serialization is canonical.
    """

    body: Grope | None
    caps: dict[str, str] = field(default_factory=dict)
    intersections: tuple[Intersection, ...] = ()
    spheres: tuple[SphereRecord, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "caps", dict(self.caps))
        pts = tuple(sorted(self.intersections, key=lambda p: p.point_id))
        object.__setattr__(self, "intersections", pts)
        object.__setattr__(self, "spheres", tuple(self.spheres))

    @property
    def tip_to_cap(self) -> dict[str, str]:
        return {tip: cap for cap, tip in self.caps.items()}

    def sphere(self, sphere_id: str) -> SphereRecord:
        for s in self.spheres:
            if s.sphere_id == sphere_id:
                return s
        raise ValidationError(f"unknown sphere {sphere_id!r}")


def incident(cg: CappedGrope, cap_id: str) -> list[Intersection]:
    """Intersections with at least one endpoint on the given cap."""
    ref = CapRef(cap_id)
    return [p for p in cg.intersections if p.end_a == ref or p.end_b == ref]


def cap_labels(cg: CappedGrope, cap_id: str) -> list[GroupWord]:
    """Label multiset at a cap, each read outward from the cap.

    A self-intersection of the cap contributes twice, once per endpoint.
    """
    ref = CapRef(cap_id)
    out = []
    for p in cg.intersections:
        if p.end_a == ref:
            out.append(p.label)
        if p.end_b == ref:
            out.append(p.label.inverse())
    return out


def cap_value_keys(cg: CappedGrope, cap_id: str) -> set[tuple[int, ...]]:
    """Distinct unoriented label values present at a cap (identity included)."""
    return {unoriented_key(p.label) for p in incident(cg, cap_id)}


def value_keys_by_cap(cg: CappedGrope) -> dict[str, set[tuple[int, ...]]]:
    """cap_value_keys for every cap at once, in a single pass over the points."""
    out: dict[str, set[tuple[int, ...]]] = {cap: set() for cap in cg.caps}
    get = out.get
    for p in cg.intersections:
        key = unoriented_key(p.label)
        end = p.end_a
        if type(end) is CapRef:
            keys = get(end.cap_id)
            if keys is not None:
                keys.add(key)
        end = p.end_b
        if type(end) is CapRef:
            keys = get(end.cap_id)
            if keys is not None:
                keys.add(key)
    return out


def label_keys(cg: CappedGrope) -> set[tuple[int, ...]]:
    """Distinct nonidentity unoriented label values over all intersections."""
    return {unoriented_key(p.label) for p in cg.intersections} - {()}


def distinct_label_count(cg: CappedGrope) -> int:
    return len(label_keys(cg))


def is_pi1_null(cg: CappedGrope) -> bool:
    """True when every intersection label reduces to the identity."""
    return all(p.label.is_identity for p in cg.intersections)


def cap_order(cg: CappedGrope) -> list[str]:
    """Cap ids in tip traversal order of the body."""
    if cg.body is None:
        return []
    by_tip = cg.tip_to_cap
    return [by_tip[t] for t in tips(cg.body) if t in by_tip]


def validate_capped(cg: CappedGrope, strict: bool = False, rank: int | None = None) -> list[str]:
    """Structural violations as human-readable strings; empty means valid."""
    problems: list[str] = []

    if cg.body is None:
        if cg.caps:
            problems.append("no body but caps remain")
        known_paths: set[Path] = set()
    else:
        problems.extend(validate_grope(cg.body))
        body_tips = tips(cg.body)
        capped_tips = list(cg.caps.values())
        if len(set(capped_tips)) != len(capped_tips):
            problems.append("two caps attached to one tip")
        missing = set(body_tips) - set(capped_tips)
        unknown = set(capped_tips) - set(body_tips)
        for t in sorted(missing):
            problems.append(f"tip {t!r} has no cap")
        for t in sorted(unknown):
            problems.append(f"cap attached to unknown tip {t!r}")
        known_paths = {path for path, _ in iter_stages(cg.body)}

    sphere_ids = [s.sphere_id for s in cg.spheres]
    if len(set(sphere_ids)) != len(sphere_ids):
        problems.append("duplicate sphere ids")

    def check_end(point_id: str, end: SheetRef) -> None:
        if isinstance(end, CapRef):
            if end.cap_id not in cg.caps:
                problems.append(f"intersection {point_id}: unknown cap {end.cap_id!r}")
        elif isinstance(end, BodyRef):
            if strict:
                problems.append(f"intersection {point_id}: body endpoint in strict mode")
            elif end.path not in known_paths:
                problems.append(f"intersection {point_id}: no stage at path {list(end.path)}")
        elif isinstance(end, SphereRef):
            if strict:
                problems.append(f"intersection {point_id}: sphere endpoint in strict mode")
            elif end.sphere_id not in sphere_ids:
                problems.append(f"intersection {point_id}: unknown sphere {end.sphere_id!r}")

    seen_points: set[str] = set()
    for p in cg.intersections:
        if p.point_id in seen_points:
            problems.append(f"duplicate intersection id {p.point_id!r}")
        seen_points.add(p.point_id)
        check_end(p.point_id, p.end_a)
        check_end(p.point_id, p.end_b)
        if rank is not None and p.label.max_generator > rank:
            problems.append(
                f"intersection {p.point_id}: label uses x{p.label.max_generator}, rank is {rank}"
            )

    for s in cg.spheres:
        for q in s.pending:
            if isinstance(q.other, CapRef) and q.other.cap_id not in cg.caps:
                problems.append(f"pending {q.point_id}: unknown cap {q.other.cap_id!r}")
            if isinstance(q.other, SphereRef) and q.other.sphere_id not in sphere_ids:
                problems.append(f"pending {q.point_id}: unknown sphere {q.other.sphere_id!r}")

    return problems

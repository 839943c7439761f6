"""Contraction and pushoff: trading a grope piece for a sphere.

Contracting a genus-1 piece along two caps that carry the same label value g
performs symmetric surgery: the piece disappears and a sphere appears.  Label
bookkeeping is what makes the sphere useful: an intersection between the two
chosen caps contributes g * g^-1 = 1, so the sphere's self-intersections are
all identity-labeled.  Every other sheet that met the piece is queued, and
pushoff resolves the queue by replacing each queued point with two parallel
crossings of the sphere whose labels cancel, again identity.  The net effect
of contract + pushoff is strictly fewer distinct label values, never more.
"""

from __future__ import annotations

from .capped import (
    BodyRef,
    CappedGrope,
    CapRef,
    Intersection,
    PendingPushoff,
    SheetRef,
    SphereRecord,
    SphereRef,
    cap_value_keys,
)
from .errors import (
    LabelMismatchError,
    MoveError,
    NotDyadicError,
    SplitFirstError,
    ValidationError,
)
from .grope import Grope, Slot, Stage, Tip, iter_stages, tips
from .words import IDENTITY, GroupWord


def piece_caps(cg: CappedGrope, pair_index: int) -> list[str]:
    """Caps of the subtree headed by a first-stage pair, in traversal order."""
    if cg.body is None:
        raise MoveError("nothing to contract: the body is fully surgered")
    root = cg.body.root
    if not 0 <= pair_index < root.genus:
        raise ValidationError(f"no pair {pair_index} at a genus-{root.genus} first stage")
    by_tip = cg.tip_to_cap
    out = []
    for slot in root.pairs[pair_index]:
        for t in ([slot.tip_id] if isinstance(slot, Tip) else tips(slot)):
            try:
                out.append(by_tip[t])
            except KeyError:
                raise ValidationError(f"tip {t!r} has no cap") from None
    return out


def _piece_is_dyadic(root: Stage, pair_index: int) -> bool:
    for slot in root.pairs[pair_index]:
        if isinstance(slot, Stage) and any(
            s.genus != 1 for _, s in iter_stages(slot)
        ):
            return False
    return True


def effective_value(cg: CappedGrope, cap_id: str) -> tuple[int, ...]:
    """The single nonidentity unoriented value at a cap, or () if none.

    Identity crossings (for example the parallel sphere crossings created by
    pushoff) carry no group element and never obstruct pairing, so they are
    ignored here; a cap is "clean" when nothing nonidentity meets it.
    """
    keys = cap_value_keys(cg, cap_id) - {()}
    if len(keys) > 1:
        raise SplitFirstError(
            f"cap {cap_id!r} carries {len(keys)} label values; split it first"
        )
    return keys.pop() if keys else ()


def contract(
    cg: CappedGrope,
    pair_index: int,
    cap_a: str,
    cap_b: str,
    *,
    piece: int | None = None,
    trace: list | None = None,
) -> tuple[CappedGrope, SphereRecord]:
    """Contract the genus-1 piece at a first-stage pair along two of its caps.

    The caps must both sit on the piece, carry one label value each, and the
    two values must agree up to orientation.  The piece's subtree must be
    dyadic (genus 1 throughout).  Returns the rewritten grope and the new
    sphere; intersections wholly inside the piece become identity-labeled
    self-intersections of the sphere, intersections reaching outside are
    queued on the sphere for pushoff.

    piece tags the sphere record with the caller's piece ordinal (defaults
    to the pair index).
    """
    if cg.body is None:
        raise MoveError("nothing to contract: the body is fully surgered")
    for s in cg.spheres:
        if s.pending:
            raise MoveError(f"sphere {s.sphere_id!r} has a pending pushoff queue")
    root = cg.body.root
    caps_here = piece_caps(cg, pair_index)
    if not _piece_is_dyadic(root, pair_index):
        raise NotDyadicError(
            f"pair {pair_index} heads a subtree with genus above 1; split stages first"
        )
    if cap_a == cap_b:
        raise MoveError("contraction needs two distinct caps")
    for c in (cap_a, cap_b):
        if c not in caps_here:
            raise MoveError(f"cap {c!r} is not on the piece at pair {pair_index}")
    key_a = effective_value(cg, cap_a)
    key_b = effective_value(cg, cap_b)
    if key_a != key_b:
        raise LabelMismatchError(
            f"caps {cap_a!r} and {cap_b!r} carry different values "
            f"({GroupWord(key_a)} vs {GroupWord(key_b)})"
        )
    label = GroupWord(key_a)

    last_pair = root.genus == 1
    piece_cap_set = set(caps_here)
    prefixes = tuple((pair_index, side) for side in (0, 1))

    def in_piece(end: SheetRef) -> bool:
        if isinstance(end, CapRef):
            return end.cap_id in piece_cap_set
        if isinstance(end, BodyRef):
            if last_pair:
                return True
            return bool(end.path) and end.path[0] in prefixes
        return False

    def remap(end: SheetRef) -> SheetRef:
        if isinstance(end, BodyRef) and end.path and end.path[0][0] > pair_index:
            (j, side), rest = end.path[0], end.path[1:]
            return BodyRef(((j - 1, side),) + rest)
        return end

    taken = {p.point_id for p in cg.intersections}
    taken.update(s.sphere_id for s in cg.spheres)
    n = len(cg.spheres)
    while f"sph{n}" in taken:
        n += 1
    sphere_id = f"sph{n}"
    sphere_ref = SphereRef(sphere_id)

    kept: list[Intersection] = []
    selfs: list[Intersection] = []
    self_log: list[dict] = []
    queued: list[PendingPushoff] = []
    for p in cg.intersections:
        a_in, b_in = in_piece(p.end_a), in_piece(p.end_b)
        if a_in and b_in:
            selfs.append(Intersection(p.point_id, sphere_ref, sphere_ref, IDENTITY))
            self_log.append({"point": p.point_id, "was": str(p.label), "result": "1"})
        elif a_in or b_in:
            other = p.end_b if a_in else p.end_a
            queued.append(PendingPushoff(p.point_id, remap(other), p.label_from(other)))
        else:
            kept.append(Intersection(p.point_id, remap(p.end_a), remap(p.end_b), p.label))

    if last_pair:
        body = None
    else:
        body = Grope(Stage(root.pairs[:pair_index] + root.pairs[pair_index + 1 :]), cg.body.closed)
    caps = {c: t for c, t in cg.caps.items() if c not in piece_cap_set}
    record = SphereRecord(
        sphere_id,
        pair_index if piece is None else piece,
        cap_a,
        cap_b,
        label,
        tuple(queued),
    )
    out = CappedGrope(body, caps, tuple(kept + selfs), cg.spheres + (record,))
    if trace is not None:
        trace.append(
            {
                "op": "contract",
                "pairIndex": pair_index,
                "piece": record.piece,
                "capA": cap_a,
                "capB": cap_b,
                "label": str(label),
                "sphere": sphere_id,
                "selfPoints": self_log,
                "queued": [q.point_id for q in queued],
            }
        )
    return out, record


def pushoff(cg: CappedGrope, sphere_id: str, *, trace: list | None = None) -> CappedGrope:
    """Resolve a sphere's pushoff queue.

    Each queued intersection with label l becomes two parallel crossings of
    the sphere by the surviving sheet; their labels l * g^-1 and its partner
    cancel to the identity, which is what gets recorded.  A sphere with an
    empty queue is returned unchanged.
    """
    record = cg.sphere(sphere_id)
    if not record.pending:
        return cg
    sphere_ref = SphereRef(sphere_id)
    taken = {p.point_id for p in cg.intersections}
    new_points: list[Intersection] = []
    logged = []
    for q in record.pending:
        created = []
        for k in (1, 2):
            name = f"{q.point_id}.{k}"
            m = 0
            while name in taken:
                m += 1
                name = f"{q.point_id}.{k}.{m}"
            taken.add(name)
            created.append(name)
            new_points.append(Intersection(name, q.other, sphere_ref, IDENTITY))
        logged.append(
            {
                "from": q.point_id,
                "hadLabel": str(q.label),
                "created": created,
                "result": "1",
            }
        )
    spheres = tuple(
        SphereRecord(s.sphere_id, s.piece, s.cap_a, s.cap_b, s.label, ())
        if s.sphere_id == sphere_id
        else s
        for s in cg.spheres
    )
    out = CappedGrope(cg.body, cg.caps, cg.intersections + tuple(new_points), spheres)
    if trace is not None:
        trace.append({"op": "pushoff", "sphere": sphere_id, "points": logged})
    return out

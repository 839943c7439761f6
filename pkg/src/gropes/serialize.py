"""Canonical JSON for gropes, capped gropes, kernels, and surgery results.

Serialization is byte-stable: object -> text -> object -> text produces
identical bytes.  Emitters write keys in a fixed order, cap tables sorted by
cap id, intersections in their stored (id-sorted) order, and two-space
indentation with a trailing newline.  Parsers reject unknown keys so format
mistakes surface early, and report a JSON-path-style location on errors.

Labels use word syntax ("1", "x1*x2^-1"); body endpoints use explicit paths
[[pairIndex, "alpha"|"beta"], ...] from the root stage.
"""

from __future__ import annotations

import json
from typing import Any

from .capped import (
    BodyRef,
    CappedGrope,
    CapRef,
    Intersection,
    PendingPushoff,
    SheetRef,
    SphereRecord,
    SphereRef,
)
from .commutators import parse_word, word_str
from .errors import ParseError, ValidationError
from .grope import ALPHA, Grope, Slot, Stage, Tip
from .pipeline import SurgeryKernel, SurgeryResult
from .words import GroupWord

_SIDE_NAMES = ("alpha", "beta")


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _check_keys(doc: dict, allowed: tuple[str, ...], ctx: str) -> None:
    extra = set(doc) - set(allowed)
    if extra:
        raise ParseError(f"{ctx}: unknown keys {sorted(extra)}")


def _get(doc: dict, key: str, kind: type, ctx: str, default: Any = ...) -> Any:
    if key not in doc:
        if default is not ...:
            return default
        raise ParseError(f"{ctx}: missing key {key!r}")
    value = doc[key]
    if kind is bool and not isinstance(value, bool):
        raise ParseError(f"{ctx}.{key}: expected a boolean, got {value!r}")
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ParseError(f"{ctx}.{key}: expected an integer, got {value!r}")
    if kind in (str, list, dict) and not isinstance(value, kind):
        raise ParseError(f"{ctx}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _word_to_doc(w: GroupWord) -> str:
    return word_str(w)


def _word_from_doc(doc: Any, ctx: str) -> GroupWord:
    if not isinstance(doc, str):
        raise ParseError(f"{ctx}: expected a word string, got {doc!r}")
    try:
        return parse_word(doc)
    except ParseError as e:
        raise ParseError(f"{ctx}: bad word {doc!r}: {e}") from None


def slot_to_doc(slot: Slot) -> dict:
    if isinstance(slot, Tip):
        return {"tip": slot.tip_id}
    return {"stage": stage_to_doc(slot)}


def stage_to_doc(stage: Stage) -> dict:
    return {"pairs": [[slot_to_doc(a), slot_to_doc(b)] for a, b in stage.pairs]}


def slot_from_doc(doc: Any, ctx: str) -> Slot:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a slot object, got {doc!r}")
    if set(doc) == {"tip"}:
        tip = _get(doc, "tip", str, ctx)
        return Tip(tip)
    if set(doc) == {"stage"}:
        return stage_from_doc(doc["stage"], f"{ctx}.stage")
    raise ParseError(f"{ctx}: a slot has exactly one of the keys 'tip' or 'stage'")


def stage_from_doc(doc: Any, ctx: str) -> Stage:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a stage object, got {doc!r}")
    _check_keys(doc, ("pairs",), ctx)
    pairs_doc = _get(doc, "pairs", list, ctx)
    if not pairs_doc:
        raise ParseError(f"{ctx}.pairs: a stage must have genus >= 1")
    pairs = []
    for j, pair in enumerate(pairs_doc):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{ctx}.pairs[{j}]: expected [alphaSlot, betaSlot]")
        pairs.append(
            (
                slot_from_doc(pair[0], f"{ctx}.pairs[{j}][0]"),
                slot_from_doc(pair[1], f"{ctx}.pairs[{j}][1]"),
            )
        )
    return Stage(tuple(pairs))


def grope_to_doc(g: Grope) -> dict:
    return {"closed": g.closed, "root": stage_to_doc(g.root)}


def grope_from_doc(doc: Any, ctx: str = "$") -> Grope:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a grope object, got {doc!r}")
    _check_keys(doc, ("closed", "root"), ctx)
    closed = _get(doc, "closed", bool, ctx, default=False)
    return Grope(stage_from_doc(_get(doc, "root", dict, ctx), f"{ctx}.root"), closed)


def end_to_doc(end: SheetRef) -> dict:
    if isinstance(end, CapRef):
        return {"cap": end.cap_id}
    if isinstance(end, SphereRef):
        return {"sphere": end.sphere_id}
    return {"body": [[j, _SIDE_NAMES[side]] for j, side in end.path]}


def end_from_doc(doc: Any, ctx: str) -> SheetRef:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ParseError(f"{ctx}: an endpoint has exactly one of 'cap', 'body', 'sphere'")
    if "cap" in doc:
        return CapRef(_get(doc, "cap", str, ctx))
    if "sphere" in doc:
        return SphereRef(_get(doc, "sphere", str, ctx))
    if "body" in doc:
        steps = _get(doc, "body", list, ctx)
        path = []
        for k, step in enumerate(steps):
            bad = (
                not isinstance(step, list)
                or len(step) != 2
                or isinstance(step[0], bool)
                or not isinstance(step[0], int)
                or step[1] not in _SIDE_NAMES
            )
            if bad:
                raise ParseError(
                    f'{ctx}.body[{k}]: expected [pairIndex, "alpha"|"beta"], got {step!r}'
                )
            path.append((step[0], _SIDE_NAMES.index(step[1])))
        return BodyRef(tuple(path))
    raise ParseError(f"{ctx}: an endpoint has exactly one of 'cap', 'body', 'sphere'")


def intersection_to_doc(p: Intersection) -> dict:
    return {
        "id": p.point_id,
        "endA": end_to_doc(p.end_a),
        "endB": end_to_doc(p.end_b),
        "label": _word_to_doc(p.label),
    }


def intersection_from_doc(doc: Any, ctx: str) -> Intersection:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected an intersection object, got {doc!r}")
    _check_keys(doc, ("id", "endA", "endB", "label"), ctx)
    try:
        return Intersection(
            _get(doc, "id", str, ctx),
            end_from_doc(_get(doc, "endA", dict, ctx), f"{ctx}.endA"),
            end_from_doc(_get(doc, "endB", dict, ctx), f"{ctx}.endB"),
            _word_from_doc(_get(doc, "label", str, ctx), f"{ctx}.label"),
        )
    except ValidationError as e:
        raise ParseError(f"{ctx}: {e}") from None


def sphere_to_doc(s: SphereRecord) -> dict:
    doc = {
        "id": s.sphere_id,
        "piece": s.piece,
        "capA": s.cap_a,
        "capB": s.cap_b,
        "label": _word_to_doc(s.label),
    }
    if s.pending:
        doc["pending"] = [
            {"id": q.point_id, "other": end_to_doc(q.other), "label": _word_to_doc(q.label)}
            for q in s.pending
        ]
    return doc


def sphere_from_doc(doc: Any, ctx: str) -> SphereRecord:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a sphere object, got {doc!r}")
    _check_keys(doc, ("id", "piece", "capA", "capB", "label", "pending"), ctx)
    pending = []
    for k, q in enumerate(_get(doc, "pending", list, ctx, default=[])):
        qctx = f"{ctx}.pending[{k}]"
        if not isinstance(q, dict):
            raise ParseError(f"{qctx}: expected an object, got {q!r}")
        _check_keys(q, ("id", "other", "label"), qctx)
        pending.append(
            PendingPushoff(
                _get(q, "id", str, qctx),
                end_from_doc(_get(q, "other", dict, qctx), f"{qctx}.other"),
                _word_from_doc(_get(q, "label", str, qctx), f"{qctx}.label"),
            )
        )
    return SphereRecord(
        _get(doc, "id", str, ctx),
        _get(doc, "piece", int, ctx),
        _get(doc, "capA", str, ctx),
        _get(doc, "capB", str, ctx),
        _word_from_doc(_get(doc, "label", str, ctx), f"{ctx}.label"),
        tuple(pending),
    )


def capped_to_doc(cg: CappedGrope) -> dict:
    doc: dict[str, Any] = {
        "closed": cg.body.closed if cg.body is not None else False,
        "root": stage_to_doc(cg.body.root) if cg.body is not None else None,
        "caps": {cap: cg.caps[cap] for cap in sorted(cg.caps)},
        "intersections": [intersection_to_doc(p) for p in cg.intersections],
    }
    if cg.spheres:
        doc["spheres"] = [sphere_to_doc(s) for s in cg.spheres]
    return doc


def capped_from_doc(doc: Any, ctx: str = "$") -> CappedGrope:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a capped grope object, got {doc!r}")
    _check_keys(doc, ("closed", "root", "caps", "intersections", "spheres"), ctx)
    root_doc = doc.get("root")
    if root_doc is None:
        body = None
    else:
        closed = _get(doc, "closed", bool, ctx, default=False)
        body = Grope(stage_from_doc(root_doc, f"{ctx}.root"), closed)
    caps_doc = _get(doc, "caps", dict, ctx, default={})
    caps = {}
    for cap, tip in caps_doc.items():
        if not isinstance(tip, str):
            raise ParseError(f"{ctx}.caps.{cap}: expected a tip id string, got {tip!r}")
        caps[cap] = tip
    points = [
        intersection_from_doc(p, f"{ctx}.intersections[{k}]")
        for k, p in enumerate(_get(doc, "intersections", list, ctx, default=[]))
    ]
    spheres = [
        sphere_from_doc(s, f"{ctx}.spheres[{k}]")
        for k, s in enumerate(_get(doc, "spheres", list, ctx, default=[]))
    ]
    return CappedGrope(body, caps, tuple(points), tuple(spheres))


def kernel_to_doc(k: SurgeryKernel) -> dict:
    return {
        "rank": k.rank,
        "gropes": [capped_to_doc(cg) for cg in k.gropes],
        "hyperbolicPairs": [list(pair) for pair in k.hyperbolic_pairs],
    }


def kernel_from_doc(doc: Any, ctx: str = "$") -> SurgeryKernel:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a kernel object, got {doc!r}")
    _check_keys(doc, ("rank", "gropes", "hyperbolicPairs"), ctx)
    rank = _get(doc, "rank", int, ctx)
    gropes = [
        capped_from_doc(g, f"{ctx}.gropes[{k}]")
        for k, g in enumerate(_get(doc, "gropes", list, ctx))
    ]
    pairs = []
    for k, pair in enumerate(_get(doc, "hyperbolicPairs", list, ctx)):
        good = (
            isinstance(pair, list)
            and len(pair) == 2
            and all(isinstance(i, int) and not isinstance(i, bool) for i in pair)
        )
        if not good:
            raise ParseError(f"{ctx}.hyperbolicPairs[{k}]: expected [i, j], got {pair!r}")
        pairs.append((pair[0], pair[1]))
    try:
        return SurgeryKernel(rank, tuple(gropes), tuple(pairs))
    except ValidationError as e:
        raise ParseError(f"{ctx}: {e}") from None


def result_to_doc(r: SurgeryResult) -> dict:
    return {
        "stats": dict(r.stats),
        "spherePairs": [
            [{"grope": gi, "sphere": si}, {"grope": gj, "sphere": sj}]
            for (gi, si), (gj, sj) in r.sphere_pairs
        ],
        "gropes": [capped_to_doc(cg) for cg in r.gropes],
        "trace": list(r.trace),
    }


def result_from_doc(doc: Any, ctx: str = "$") -> SurgeryResult:
    if not isinstance(doc, dict):
        raise ParseError(f"{ctx}: expected a result object, got {doc!r}")
    _check_keys(doc, ("stats", "spherePairs", "gropes", "trace"), ctx)
    stats = _get(doc, "stats", dict, ctx)
    gropes = [
        capped_from_doc(g, f"{ctx}.gropes[{k}]")
        for k, g in enumerate(_get(doc, "gropes", list, ctx))
    ]
    pairs = []
    for k, pair in enumerate(_get(doc, "spherePairs", list, ctx)):
        pctx = f"{ctx}.spherePairs[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{pctx}: expected a two-element list")
        ends = []
        for side in pair:
            if not isinstance(side, dict):
                raise ParseError(f"{pctx}: expected sphere reference objects")
            _check_keys(side, ("grope", "sphere"), pctx)
            ends.append((_get(side, "grope", int, pctx), _get(side, "sphere", str, pctx)))
        pairs.append((ends[0], ends[1]))
    trace = _get(doc, "trace", list, ctx, default=[])
    return SurgeryResult(tuple(gropes), tuple(pairs), tuple(trace), dict(stats))


def document_kind(doc: Any) -> str:
    """Classify a parsed JSON document by its top-level keys."""
    if not isinstance(doc, dict):
        raise ParseError("$: expected a JSON object at the top level")
    if "hyperbolicPairs" in doc:
        return "kernel"
    if "spherePairs" in doc:
        return "result"
    if "caps" in doc or "intersections" in doc or "spheres" in doc:
        return "capped"
    if "root" in doc:
        return "grope"
    raise ParseError("$: not a grope, capped grope, kernel, or result document")


def loads_document(text: str):
    """Parse any supported document, returning (kind, object)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from None
    kind = document_kind(doc)
    parser = {
        "kernel": kernel_from_doc,
        "result": result_from_doc,
        "capped": capped_from_doc,
        "grope": grope_from_doc,
    }[kind]
    return kind, parser(doc)


def dumps_grope(g: Grope) -> str:
    return canonical_dumps(grope_to_doc(g))


def dumps_capped(cg: CappedGrope) -> str:
    return canonical_dumps(capped_to_doc(cg))


def dumps_kernel(k: SurgeryKernel) -> str:
    return canonical_dumps(kernel_to_doc(k))


def dumps_result(r: SurgeryResult) -> str:
    return canonical_dumps(result_to_doc(r))

"""The surgery pipeline: from a capped-grope kernel to paired null spheres.

A kernel is a collection of capped gropes with a hyperbolic pairing: the
gropes come in dual pairs whose pieces sit parallel to each other.  When the
gropes have class at least one more than the number of distinct label values
present, every piece produced by full splitting must carry two caps with the
same value (there are more caps than values), and contracting along such a
pair followed by pushoff yields a sphere all of whose recorded intersection
labels are the identity.  Doing this to every piece of every grope converts
the kernel into families of identity-labeled spheres that inherit the
hyperbolic pairing piece by piece.

The counting argument genuinely needs class >= labels + 1, not class >=
labels; reports expose both readings because the two thresholds are easy to
conflate.  It can also fail when a piece owns a clean cap alongside caps
carrying every value exactly once; run_surgery then raises PigeonholeFailure
rather than pretending.  generate_kernel always gives every cap at least one
labeled intersection, which restores the guarantee for generated kernels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .capped import (
    BodyRef,
    CappedGrope,
    CapRef,
    Intersection,
    is_pi1_null,
    label_keys,
    validate_capped,
)
from .errors import (
    HypothesisError,
    PigeonholeFailure,
    ValidationError,
)
from .grope import SIDE_NAMES, Grope, Slot, Stage, Tip, class_of, iter_stages, tips
from .moves import contract, effective_value, piece_caps, pushoff
from .splitting import SplitLimits, full_split, split_cap, split_stage
from .words import IDENTITY, GroupWord, generator


@dataclass(frozen=True)
class SurgeryKernel:
    """Capped gropes plus the pairing of dual gropes by index."""

    rank: int
    gropes: tuple[CappedGrope, ...]
    hyperbolic_pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ValidationError(f"rank must be >= 0, got {self.rank}")
        object.__setattr__(self, "gropes", tuple(self.gropes))
        pairs = tuple(tuple(p) for p in self.hyperbolic_pairs)
        for p in pairs:
            if len(p) != 2:
                raise ValidationError(f"a hyperbolic pair has two indices, got {p!r}")
        object.__setattr__(self, "hyperbolic_pairs", pairs)


def validate_kernel(kernel: SurgeryKernel, strict: bool = False) -> list[str]:
    """Structural violations as human-readable strings; empty means valid."""
    problems: list[str] = []
    for gi, cg in enumerate(kernel.gropes):
        if cg.body is None:
            problems.append(f"grope {gi}: no body")
        for issue in validate_capped(cg, strict=strict, rank=kernel.rank):
            problems.append(f"grope {gi}: {issue}")
    seen: dict[int, int] = {}
    for k, (i, j) in enumerate(kernel.hyperbolic_pairs):
        if i == j:
            problems.append(f"pair {k}: a grope cannot be its own dual")
        for idx in (i, j):
            if not 0 <= idx < len(kernel.gropes):
                problems.append(f"pair {k}: no grope {idx}")
            elif idx in seen:
                problems.append(f"pair {k}: grope {idx} already paired (pair {seen[idx]})")
            else:
                seen[idx] = k
    unpaired = set(range(len(kernel.gropes))) - set(seen)
    for idx in sorted(unpaired):
        problems.append(f"grope {idx} is not in any hyperbolic pair")
    return problems


@dataclass(frozen=True)
class HypothesisReport:
    """Label count versus class, under both threshold conventions.

    ok is the reading the surgery actually needs (class >= labels + 1);
    boundary_ok is the weaker off-by-one reading (class >= labels) that does
    NOT suffice: with class == labels a piece can carry every value exactly
    once and the pigeonhole finds nothing.
    """

    label_count: int
    min_class: int

    @property
    def required_class(self) -> int:
        return self.label_count + 1

    @property
    def ok(self) -> bool:
        return self.min_class >= self.label_count + 1

    @property
    def boundary_ok(self) -> bool:
        return self.min_class >= self.label_count

    def as_doc(self) -> dict:
        return {
            "labelCount": self.label_count,
            "minClass": self.min_class,
            "requiredClass": self.required_class,
            "ok": self.ok,
            "boundaryOk": self.boundary_ok,
        }


def check_hypotheses(kernel: SurgeryKernel) -> HypothesisReport:
    """Count distinct nonidentity values and compare with the minimum class."""
    if not kernel.gropes:
        raise ValidationError("empty kernel")
    keys: set[tuple[int, ...]] = set()
    classes = []
    for cg in kernel.gropes:
        if cg.body is None:
            raise ValidationError("kernel gropes must have bodies")
        keys |= label_keys(cg)
        classes.append(class_of(cg.body))
    return HypothesisReport(len(keys), min(classes))


def find_duplicate_pair(
    cg: CappedGrope, pair_index: int, *, piece_name: str | None = None
) -> tuple[str, str]:
    """Two caps of the piece carrying the same value, deterministically.

    Clean caps (no label value) match each other first; otherwise the first
    same-value pair in cap traversal order wins.  Raises SplitFirstError if
    some cap still carries several values, PigeonholeFailure if all values
    on the piece are distinct.
    """
    caps_here = piece_caps(cg, pair_index)
    name = piece_name or f"pair {pair_index}"
    by_key: dict[tuple[int, ...], str] = {}
    clean_first: str | None = None
    fallback: tuple[str, str] | None = None
    for cap in caps_here:
        key = effective_value(cg, cap)
        if key == ():
            if clean_first is None:
                clean_first = cap
            else:
                return clean_first, cap
        elif key in by_key:
            if fallback is None:
                fallback = (by_key[key], cap)
        else:
            by_key[key] = cap
    if fallback is not None:
        return fallback
    raise PigeonholeFailure(
        f"{name}: all {len(caps_here)} caps carry distinct values; "
        "no contraction pair exists",
        piece=name,
    )


@dataclass(frozen=True)
class SurgeryResult:
    """Sphere families per input grope, their pairing, and the full trace."""

    gropes: tuple[CappedGrope, ...]
    sphere_pairs: tuple[tuple[tuple[int, str], tuple[int, str]], ...]
    trace: tuple[dict, ...]
    stats: dict

    def __post_init__(self) -> None:
        object.__setattr__(self, "gropes", tuple(self.gropes))
        object.__setattr__(
            self,
            "sphere_pairs",
            tuple(((gi, si), (gj, sj)) for (gi, si), (gj, sj) in self.sphere_pairs),
        )
        object.__setattr__(self, "trace", tuple(self.trace))
        object.__setattr__(self, "stats", dict(self.stats))


def run_surgery(
    kernel: SurgeryKernel,
    *,
    force: bool = False,
    limits: SplitLimits | None = None,
) -> SurgeryResult:
    """Split every grope fully, then contract and push off every piece.

    Requires check_hypotheses(kernel).ok unless force is set; force attempts
    the surgery anyway and lets PigeonholeFailure surface where the counting
    argument breaks.  The trace records every rewrite and is replayable.
    """
    problems = validate_kernel(kernel)
    if problems:
        raise ValidationError("invalid kernel: " + "; ".join(problems))
    report = check_hypotheses(kernel)
    if not report.ok and not force:
        raise HypothesisError(
            f"kernel has {report.label_count} label values but class "
            f"{report.min_class} < {report.required_class}; pass force to attempt anyway"
        )

    trace: list[dict] = []
    husks: list[CappedGrope] = []
    genera: list[int] = []
    for gi, cg in enumerate(kernel.gropes):
        steps: list[dict] = []
        work = full_split(cg, limits=limits, trace=steps)
        genus = work.body.root.genus
        genera.append(genus)
        for ordinal in range(genus):
            cap_a, cap_b = find_duplicate_pair(
                work, 0, piece_name=f"grope {gi} piece {ordinal}"
            )
            work, sphere = contract(work, 0, cap_a, cap_b, piece=ordinal, trace=steps)
            work = pushoff(work, sphere.sphere_id, trace=steps)
        husks.append(work)
        trace.extend({"grope": gi, **entry} for entry in steps)

    pairs: list[tuple[tuple[int, str], tuple[int, str]]] = []
    for i, j in kernel.hyperbolic_pairs:
        left, right = husks[i].spheres, husks[j].spheres
        if len(left) != len(right):
            raise ValidationError(
                f"gropes {i} and {j} are paired but split into "
                f"{len(left)} and {len(right)} pieces"
            )
        pairs.extend(((i, a.sphere_id), (j, b.sphere_id)) for a, b in zip(left, right))

    stats = {
        "labelCount": report.label_count,
        "minClass": report.min_class,
        "firstStageGenus": genera,
        "pieceCount": sum(genera),
        "spherePairCount": len(pairs),
        "outputPi1Null": all(is_pi1_null(h) for h in husks),
    }
    return SurgeryResult(tuple(husks), tuple(pairs), tuple(trace), stats)


def replay_trace(kernel: SurgeryKernel, trace: Iterable[dict]) -> tuple[CappedGrope, ...]:
    """Re-execute a recorded trace against the kernel it came from.

    Only the rewriting operations are replayed; informational fields in the
    entries are ignored.  Returns the final state of every grope.
    """
    states = list(kernel.gropes)
    for entry in trace:
        gi = entry["grope"]
        op = entry["op"]
        if op == "split_cap":
            states[gi] = split_cap(states[gi], entry["cap"], allow_stage_dual=True)
        elif op == "split_stage":
            path = tuple((j, SIDE_NAMES.index(side)) for j, side in entry["stage"])
            states[gi] = split_stage(states[gi], path)
        elif op == "contract":
            states[gi], _ = contract(
                states[gi],
                entry["pairIndex"],
                entry["capA"],
                entry["capB"],
                piece=entry["piece"],
            )
        elif op == "pushoff":
            states[gi] = pushoff(states[gi], entry["sphere"])
        else:
            raise ValidationError(f"unknown trace op {op!r}")
    return tuple(states)


def _random_class_slot(rng: random.Random, c: int, fresh: "list[int]") -> Slot:
    """A random slot of class exactly c; fresh holds the tip counter."""
    if c == 1:
        fresh[0] += 1
        return Tip(f"t{fresh[0]}")
    genus = 1 + (1 if rng.random() < 0.3 else 0)
    pairs = []
    for _ in range(genus):
        a = rng.randint(1, c - 1)
        pairs.append(
            (_random_class_slot(rng, a, fresh), _random_class_slot(rng, c - a, fresh))
        )
    return Stage(tuple(pairs))


def random_grope(rng: random.Random, grope_class: int, *, genus: int = 1) -> Grope:
    """A random grope of exactly the given class and first-stage genus."""
    if grope_class < 2:
        raise ValidationError(f"a grope has class >= 2, got {grope_class}")
    fresh = [0]
    pairs = []
    for _ in range(max(1, genus)):
        a = rng.randint(1, grope_class - 1)
        pairs.append(
            (
                _random_class_slot(rng, a, fresh),
                _random_class_slot(rng, grope_class - a, fresh),
            )
        )
    return Grope(Stage(tuple(pairs)))


def random_capped_grope(
    rng: random.Random,
    grope_class: int,
    labels: "list[GroupWord]",
    *,
    genus: int = 1,
    density: float = 1.0,
) -> CappedGrope:
    """One random capped grope with arbitrary cap-to-cap partners.

    Caps typically end up carrying several label values, which makes these
    good inputs for the splitting moves; they are NOT guaranteed to survive
    the surgery pigeonhole.  Every cap receives at least one intersection
    labeled from the pool (when the pool is nonempty); density scales how
    many extras appear.
    """
    body = random_grope(rng, grope_class, genus=genus)
    caps = {f"c{k + 1}": t for k, t in enumerate(tips(body))}
    cap_ids = list(caps)

    points: list[Intersection] = []
    counter = [0]

    def add_point(cap: str, label: GroupWord) -> None:
        counter[0] += 1
        partner = rng.choice(cap_ids)
        points.append(
            Intersection(f"i{counter[0]}", CapRef(cap), CapRef(partner), label)
        )

    if labels:
        for k, cap in enumerate(cap_ids):
            add_point(cap, labels[k % len(labels)])
        extras = int(density * len(cap_ids))
        for _ in range(extras):
            add_point(rng.choice(cap_ids), rng.choice(labels))
    return CappedGrope(body, caps, tuple(points))


def generate_kernel(
    seed: int,
    *,
    labels: int,
    grope_class: int | None = None,
    pair_count: int = 1,
    density: float = 1.0,
    adversarial: bool = False,
) -> SurgeryKernel:
    """A reproducible kernel: pair_count dual pairs of capped gropes.

    By default the class is labels + 1, the smallest satisfying the surgery
    hypotheses.  Each cap's value rides on a self-intersection, and extra
    points (self or cap-to-body, scaled by density) repeat the same value,
    so no contraction elsewhere can ever strip a cap down to the identity:
    at its own contraction time every cap of a piece still shows its value,
    the piece has class >= labels + 1 caps over at most `labels` values, and
    the pigeonhole is guaranteed to find a pair.

    adversarial instead builds dyadic gropes of class exactly equal to the
    label count whose caps carry pairwise distinct values (one self-labeled
    point each): splitting changes nothing, every piece sees every value
    exactly once, and surgery must fail the pigeonhole on the first piece.
    """
    if labels < 0:
        raise ValidationError(f"label count must be >= 0, got {labels}")
    rng = random.Random(seed)
    pool = [generator(i + 1) for i in range(labels)]

    if adversarial:
        if labels < 2:
            raise ValidationError("adversarial kernels need at least 2 labels")
        if grope_class is None:
            grope_class = labels
        if grope_class != labels:
            raise ValidationError("adversarial kernels use class == label count")
    elif grope_class is None:
        grope_class = max(labels + 1, 2)
    if grope_class < 2:
        raise ValidationError(f"a grope has class >= 2, got {grope_class}")

    gropes: list[CappedGrope] = []
    pairs: list[tuple[int, int]] = []
    for _ in range(max(1, pair_count)):
        if adversarial:
            fresh = [0]
            body = Grope(
                Stage(
                    (
                        (
                            _dyadic_chain(grope_class - 1, fresh),
                            _dyadic_chain(1, fresh),
                        ),
                    )
                )
            )
            tip_list = tips(body)
            caps = {f"c{k + 1}": t for k, t in enumerate(tip_list)}
            cap_ids = list(caps)
            rng.shuffle(cap_ids)
            points = tuple(
                Intersection(f"i{k + 1}", CapRef(cap), CapRef(cap), pool[k])
                for k, cap in enumerate(cap_ids)
            )
            cg = CappedGrope(body, caps, points)
        else:
            cg = _pigeonhole_safe_grope(rng, grope_class, pool, density)
        dual = CappedGrope(cg.body, dict(cg.caps), cg.intersections)
        pairs.append((len(gropes), len(gropes) + 1))
        gropes.extend((cg, dual))
    return SurgeryKernel(max(labels, 0), tuple(gropes), tuple(pairs))


def _pigeonhole_safe_grope(
    rng: random.Random,
    grope_class: int,
    pool: "list[GroupWord]",
    density: float,
) -> CappedGrope:
    """A capped grope whose caps can never be drained of their value.

    Every value a cap carries rides on at least one self-intersection, which
    no other piece's contraction can consume.  Body endpoints (including the
    first stage) exercise queueing and pushoff without changing any cap's
    value set, and occasional second-value self-points force full_split to
    actually split caps while keeping every split copy on a pool value.
    """
    body = random_grope(rng, grope_class, genus=rng.choice((1, 1, 2)))
    caps = {f"c{k + 1}": t for k, t in enumerate(tips(body))}
    stage_paths = [path for path, _ in iter_stages(body)]
    points: list[Intersection] = []
    counter = [0]

    def add_point(cap: str, label: GroupWord, to_body: bool) -> None:
        counter[0] += 1
        me = CapRef(cap)
        other = BodyRef(rng.choice(stage_paths)) if to_body else me
        points.append(Intersection(f"i{counter[0]}", me, other, label))

    for k, cap in enumerate(caps):
        value = pool[k % len(pool)] if pool else IDENTITY
        if pool:
            add_point(cap, value, to_body=False)
        elif rng.random() < min(density, 1.0):
            add_point(cap, value, to_body=False)
        extras = 0
        while extras < 2 and rng.random() < density * 0.4:
            add_point(cap, value, to_body=rng.random() < 0.5)
            extras += 1
        if len(pool) >= 2 and rng.random() < density * 0.3:
            add_point(cap, pool[(k + 1) % len(pool)], to_body=False)
    return CappedGrope(body, caps, tuple(points))


def _dyadic_chain(c: int, fresh: list[int]) -> Slot:
    """A genus-1 chain of class exactly c: [(x, [(y, ...)])]."""
    if c == 1:
        fresh[0] += 1
        return Tip(f"t{fresh[0]}")
    return Stage(((_dyadic_chain(1, fresh), _dyadic_chain(c - 1, fresh)),))

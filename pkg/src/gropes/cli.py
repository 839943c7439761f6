"""Command-line interface.

Subcommands: validate, class, tips, boundary, lcs, split, contract,
pipeline, generate, render.  Files are JSON documents; "-" reads stdin.

Exit codes: 0 success; 1 operation failed (bad preconditions, failed
validation, unmet hypotheses); 2 pigeonhole failure during surgery; 3 a
growth guard tripped; 64 usage error; 65 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import __version__
from .capped import CappedGrope, validate_capped
from .commutators import parse_expression, parse_word, word_str
from .errors import (
    GropeError,
    GrowthLimitError,
    ParseError,
    PigeonholeFailure,
    ValidationError,
)
from .grope import Grope, boundary_word, class_of, tips as grope_tips, validate_grope
from .pipeline import (
    SurgeryKernel,
    check_hypotheses,
    generate_kernel,
    run_surgery,
    validate_kernel,
)
from .render import render_dot
from .serialize import (
    canonical_dumps,
    dumps_capped,
    dumps_kernel,
    dumps_result,
    loads_document,
)
from .splitting import SplitLimits, full_split, split_cap, split_stage
from .words import DEFAULT_CUTOFF, lcs_depth

USAGE_ERROR = 64
DATA_ERROR = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> "None":
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def _load(path: str, kinds: tuple[str, ...]):
    kind, obj = loads_document(_read_text(path))
    if kind not in kinds:
        raise ParseError(f"{path}: expected a {' or '.join(kinds)} document, found {kind}")
    return kind, obj


def _body_of(kind: str, obj) -> Grope:
    if kind == "grope":
        return obj
    if obj.body is None:
        raise ValidationError("this capped grope is fully surgered; it has no body")
    return obj.body


def _limits(args) -> SplitLimits:
    default = SplitLimits()
    max_genus = args.max_genus
    if max_genus is None:
        env = os.environ.get("GROPE_MAX_GENUS")
        if env is not None:
            try:
                max_genus = int(env)
            except ValueError:
                raise ParseError(f"GROPE_MAX_GENUS must be an integer, got {env!r}") from None
    if max_genus is None:
        max_genus = default.max_first_stage_genus
    max_points = args.max_intersections
    if max_points is None:
        max_points = default.max_intersections
    return SplitLimits(max_genus, max_points)


def _write_trace(path: str | None, entries: list[dict]) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, separators=(", ", ": ")) + "\n")


_STEP = re.compile(r"(\d+)([ab])")


def _parse_stage_path(text: str):
    steps = []
    rest = text.strip()
    if rest in ("", "root"):
        raise ParseError("the first stage is never split; give a deeper path like 0a.1b")
    for part in rest.split("."):
        m = _STEP.fullmatch(part.strip())
        if m is None:
            raise ParseError(f"bad path step {part!r}: expected e.g. 0a or 2b")
        steps.append((int(m.group(1)), "ab".index(m.group(2))))
    return tuple(steps)


def cmd_validate(args) -> int:
    kind, obj = _load(args.file, ("grope", "capped", "kernel", "result"))
    if kind == "grope":
        problems = validate_grope(obj)
    elif kind == "capped":
        problems = validate_capped(obj, strict=args.strict)
    elif kind == "kernel":
        problems = validate_kernel(obj, strict=args.strict)
    else:
        problems = []
    for issue in problems:
        print(issue)
    if problems:
        return 1
    print(f"ok: valid {kind}")
    return 0


def cmd_class(args) -> int:
    kind, obj = _load(args.file, ("grope", "capped"))
    print(class_of(_body_of(kind, obj)))
    return 0


def cmd_tips(args) -> int:
    kind, obj = _load(args.file, ("grope", "capped"))
    names = grope_tips(_body_of(kind, obj))
    if args.count:
        print(len(names))
    else:
        for name in names:
            print(name)
    return 0


def cmd_boundary(args) -> int:
    kind, obj = _load(args.file, ("grope", "capped"))
    body = _body_of(kind, obj)
    assignment = None
    if args.assign:
        assignment = {}
        for item in args.assign:
            tip, eq, word = item.partition("=")
            if not eq:
                raise ParseError(f"bad assignment {item!r}: expected tip=word")
            assignment[tip] = parse_word(word)
    print(word_str(boundary_word(body, assignment)))
    return 0


def cmd_lcs(args) -> int:
    if args.word:
        word = parse_word(args.expression)
    else:
        from .commutators import evaluate

        word = evaluate(parse_expression(args.expression))
    print(lcs_depth(word, args.cutoff))
    return 0


def cmd_split(args) -> int:
    _, cg = _load(args.file, ("capped",))
    limits = _limits(args)
    trace: list[dict] = []
    if args.cap is not None:
        out = split_cap(cg, args.cap, limits=limits, trace=trace)
    elif args.stage is not None:
        out = split_stage(cg, _parse_stage_path(args.stage), limits=limits, trace=trace)
    else:
        out = full_split(cg, limits=limits, trace=trace)
    _write_trace(args.trace, trace)
    sys.stdout.write(dumps_capped(out))
    return 0


def cmd_contract(args) -> int:
    from .moves import contract, pushoff

    _, cg = _load(args.file, ("capped",))
    cap_a, comma, cap_b = args.caps.partition(",")
    if not comma or not cap_a or not cap_b:
        raise ParseError(f"bad --caps {args.caps!r}: expected capA,capB")
    trace: list[dict] = []
    out, sphere = contract(cg, args.pair, cap_a.strip(), cap_b.strip(), trace=trace)
    if not args.skip_pushoff:
        out = pushoff(out, sphere.sphere_id, trace=trace)
    _write_trace(args.trace, trace)
    sys.stdout.write(dumps_capped(out))
    return 0


def cmd_pipeline(args) -> int:
    _, kernel = _load(args.file, ("kernel",))
    if args.check:
        problems = validate_kernel(kernel)
        if problems:
            for issue in problems:
                print(issue, file=sys.stderr)
            return 1
        report = check_hypotheses(kernel)
        sys.stdout.write(canonical_dumps(report.as_doc()))
        return 0 if report.ok else 1
    result = run_surgery(kernel, force=args.force, limits=_limits(args))
    _write_trace(args.trace, list(result.trace))
    if args.stats_only:
        sys.stdout.write(canonical_dumps(result.stats))
    else:
        sys.stdout.write(dumps_result(result))
    return 0


def cmd_generate(args) -> int:
    kernel = generate_kernel(
        args.seed,
        labels=args.labels,
        grope_class=args.grope_class,
        pair_count=args.pairs,
        density=args.density,
        adversarial=args.adversarial,
    )
    sys.stdout.write(dumps_kernel(kernel))
    return 0


def cmd_render(args) -> int:
    kind, obj = _load(args.file, ("grope", "capped"))
    sys.stdout.write(render_dot(obj))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gropes", description=__doc__.split("\n\n")[1])
    parser.add_argument("--version", action="version", version=f"gropes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a document's structural invariants")
    p.add_argument("file", help="JSON document, or - for stdin")
    p.add_argument("--strict", action="store_true", help="require cap-only endpoints")

    p = add("class", cmd_class, "print the class of a grope")
    p.add_argument("file")

    p = add("tips", cmd_tips, "list tip ids in traversal order")
    p.add_argument("file")
    p.add_argument("--count", action="store_true", help="print only the number of tips")

    p = add("boundary", cmd_boundary, "print the boundary word of a grope")
    p.add_argument("file")
    p.add_argument(
        "--assign",
        action="append",
        metavar="TIP=WORD",
        help="assign a word to a tip (default: distinct generators in order)",
    )

    p = add("lcs", cmd_lcs, "lower-central-series depth of an expression's value")
    p.add_argument("expression", help="commutator expression, e.g. '[x1,x2]'")
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--word", action="store_true", help="treat the input as a plain word")

    p = add("split", cmd_split, "split caps and stages (full split by default)")
    p.add_argument("file")
    p.add_argument("--cap", help="split this cap only")
    p.add_argument("--stage", metavar="PATH", help="split this stage only, e.g. 0a.1b")
    p.add_argument("--trace", metavar="FILE", help="write one JSON line per rewrite")
    p.add_argument("--max-genus", type=int, default=None, help="first-stage genus guard")
    p.add_argument("--max-intersections", type=int, default=None)

    p = add("contract", cmd_contract, "contract a piece along two caps, then push off")
    p.add_argument("file")
    p.add_argument("--pair", type=int, required=True, help="first-stage pair index")
    p.add_argument("--caps", required=True, metavar="A,B", help="the two caps")
    p.add_argument("--skip-pushoff", action="store_true")
    p.add_argument("--trace", metavar="FILE")

    p = add("pipeline", cmd_pipeline, "run the full surgery on a kernel")
    p.add_argument("file")
    p.add_argument("--check", action="store_true", help="only report the hypotheses")
    p.add_argument("--force", action="store_true", help="attempt surgery even if unmet")
    p.add_argument("--stats-only", action="store_true")
    p.add_argument("--trace", metavar="FILE")
    p.add_argument("--max-genus", type=int, default=None)
    p.add_argument("--max-intersections", type=int, default=None)

    p = add("generate", cmd_generate, "generate a reproducible kernel")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--labels", type=int, required=True, metavar="M")
    p.add_argument("--class", dest="grope_class", type=int, default=None)
    p.add_argument("--pairs", type=int, default=1)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument(
        "--adversarial",
        action="store_true",
        help="class == labels with all-distinct values: surgery must fail",
    )

    p = add("render", cmd_render, "emit Graphviz DOT")
    p.add_argument("file")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR
    except PigeonholeFailure as e:
        print(f"pigeonhole failure: {e}", file=sys.stderr)
        return 2
    except GrowthLimitError as e:
        print(f"growth limit: {e}", file=sys.stderr)
        return 3
    except GropeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

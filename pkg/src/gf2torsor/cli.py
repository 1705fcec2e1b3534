"""Batch front end: build, check, solve, transform, experiment.

Every subcommand reads and writes the text formats of the library
modules, so runs compose through files.  Reports go to standard output;
artifacts go to --out when given, otherwise to standard output with
nothing else mixed in.  Exit codes: 0 success, 1 a checked property
failed (the report carries the witness), 2 usage or input error.

The only environment variable consulted is NO_COLOR, which disables the
coloring of summary lines in text reports.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from .gf2 import Gf2Vec
from .invar import (
    Thresholds,
    build_code_model,
    chain_invariant,
    column_corruption,
    nested_invariant,
    parse_codes,
    random_adversary,
    recover_codes,
    zero_anchors,
)
from .isomap import SharedBase, build_iso, verify_iso
from .model import (
    CosetPoint,
    Embedding,
    TwistedModel,
    check_axioms,
    extend_model,
    identity_embedding,
    parse_model,
    print_model,
    random_canonical_model,
    standard_model,
)
from .solve import (
    SystemOfSolutions,
    amalgamate,
    extend_solution,
    full_solve,
    parse_solution,
    print_solution,
    pull_back,
    random_solution,
)
from .universe import Face, Universe


def _color_enabled() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NO_COLOR")


def _status(ok: bool, label: str) -> str:
    word = "pass" if ok else "FAIL"
    if _color_enabled():
        word = f"\x1b[32m{word}\x1b[0m" if ok else f"\x1b[31m{word}\x1b[0m"
    return f"{label}: {word}"


def _read(path: str) -> str:
    return Path(path).read_text()


def _emit(text: str, out: Optional[str], note: str) -> None:
    if out:
        Path(out).write_text(text)
        print(f"{note} -> {out}")
    else:
        print(text, end="")


def _int_list(spec: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in spec.split(","))
    except ValueError:
        raise ValueError(f"expected a comma-separated integer list, got {spec!r}")


def _atom_spec(spec: str) -> tuple[int, ...]:
    # "5" means five atoms 1..5; "2,4,7" names them outright
    if "," in spec:
        return _int_list(spec)
    return tuple(range(1, int(spec) + 1))


def _load_model(path: str) -> TwistedModel:
    return parse_model(_read(path))


def _load_solution(m: TwistedModel, path: str):
    return parse_solution(m.universe, _read(path))


# ------------------------------------------------------------ handlers


def _cmd_build_standard(args) -> int:
    u = Universe.create(_atom_spec(args.atoms), args.k, args.levels, args.cutoff)
    _emit(print_model(standard_model(u)), args.out, "model")
    return 0


def _cmd_build_canonical(args) -> int:
    u = Universe.create(_atom_spec(args.atoms), args.k, args.levels, args.cutoff)
    m = random_canonical_model(u, random.Random(args.seed))
    _emit(print_model(m), args.out, "model")
    return 0


def _cmd_check_axioms(args) -> int:
    m = _load_model(args.model)
    report = check_axioms(m, bound=args.bound, samples=args.samples, seed=args.seed)
    print(report.render(args.format), end="")
    if args.format == "text":
        print(_status(report.ok, "axioms"))
    return 0 if report.ok else 1


def _cmd_solve(args) -> int:
    m = _load_model(args.model)
    if args.random:
        f = random_solution(m, random.Random(args.seed))
    else:
        f = full_solve(m, method=args.method)
    if f is None:
        print(_status(False, "solve"))
        return 1
    _emit(print_solution(m.universe, f), args.out, "solution")
    return 0


def _cmd_extend_solution(args) -> int:
    m = _load_model(args.model)
    f = _load_solution(m, args.solution)
    got = extend_solution(m, f, _int_list(args.base), args.new)
    _emit(print_solution(m.universe, got), args.out, "solution")
    return 0


def _parse_part(spec: str) -> tuple[str, str]:
    if ":" not in spec:
        raise ValueError(f"part {spec!r} must look like ':file' or '0,1:file'")
    key_text, path = spec.split(":", 1)
    return key_text, path


def _cmd_amalgamate(args) -> int:
    m = _load_model(args.model)
    base = _int_list(args.base)
    extras = _int_list(args.extras)
    parts = {}
    for spec in args.part:
        key_text, path = _parse_part(spec)
        key = frozenset() if key_text in ("", "-") else frozenset(_int_list(key_text))
        if key in parts:
            raise ValueError(f"duplicate part for subset {sorted(key)}")
        parts[key] = _load_solution(m, path)
    got = amalgamate(m, SystemOfSolutions(base, extras, parts))
    _emit(print_solution(m.universe, got), args.out, "solution")
    return 0


def _cmd_iso(args) -> int:
    src = _load_model(args.model_a)
    tgt = _load_model(args.model_b)
    f_src = _load_solution(src, args.solution_a)
    f_tgt = _load_solution(tgt, args.solution_b)
    iso = build_iso(SharedBase(src, tgt), f_src, f_tgt)
    report = verify_iso(iso, bound=args.bound, samples=args.samples, seed=args.seed)
    print(report.render(args.format), end="")
    if args.format == "text":
        print(_status(report.ok, "iso"))
    return 0 if report.ok else 1


def _parse_map(spec: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for item in spec.split(","):
        if "=" not in item:
            raise ValueError(f"map entry {item!r} must look like 'src=tgt'")
        a, b = item.split("=", 1)
        pairs.append((int(a), int(b)))
    return tuple(pairs)


def _cmd_pull_back(args) -> int:
    src = _load_model(args.model_src)
    tgt = _load_model(args.model_tgt)
    f = _load_solution(tgt, args.solution)
    if args.map:
        e = Embedding(src, tgt, _parse_map(args.map))
    else:
        e = identity_embedding(src, tgt)
    got = pull_back(e, f)
    _emit(print_solution(src.universe, got), args.out, "solution")
    return 0


def _parse_anchor(m: TwistedModel, spec: str) -> tuple[Face, CosetPoint]:
    if "=" not in spec:
        raise ValueError(f"anchor {spec!r} must look like '1,2=010'")
    face_text, bits = spec.split("=", 1)
    face = Face.of(_int_list(face_text))
    vec = Gf2Vec.from_bits(m.universe.level_family, bits)
    return face, CosetPoint(face, vec)


def _cmd_extend_model(args) -> int:
    m = _load_model(args.model)
    anchor = {f: m.coset_rep_point(f) for f in m.universe.faces}
    for spec in args.anchor:
        face, point = _parse_anchor(m, spec)
        anchor[face] = point
    target, _ = extend_model(m, _int_list(args.new_atoms), anchor)
    _emit(print_model(target), args.out, "model")
    return 0


def _cmd_invariant(args) -> int:
    m = _load_model(args.model)
    if args.chain and (args.base or args.tail or args.depth is not None):
        raise ValueError("give either --chain or the --depth/--base/--tail trio")
    anchors = (
        dict(_load_solution(m, args.solution).g_part)
        if args.solution
        else zero_anchors(m)
    )
    if args.chain:
        coset = chain_invariant(m, _int_list(args.chain), anchors)
        rendered = coset.rep.bits()
    else:
        if not (args.base and args.tail and args.depth is not None and args.thresholds):
            raise ValueError(
                "need --chain, or all of --depth, --base, --tail, --thresholds"
            )
        got = nested_invariant(
            m,
            args.depth,
            _int_list(args.base),
            _int_list(args.tail),
            anchors,
            Thresholds(_int_list(args.thresholds)),
        )
        rendered = got.render()
    if args.format == "machine":
        print(f"report=invariant class={rendered}")
        print("status=pass")
    else:
        print(f"invariant: {rendered}")
    return 0


def _cmd_demo_recovery(args) -> int:
    levels, cutoff, codes = parse_codes(_read(args.codes))
    th = Thresholds(_int_list(args.thresholds))
    m, layout = build_code_model(args.k, th, args.grid, codes, levels, cutoff)
    if args.corrupt:
        bits = args.corrupt.split(":")
        if len(bits) != 3:
            raise ValueError("corrupt spec must look like 'name:alpha:rows'")
        adversary = column_corruption(
            m, layout, bits[0], int(bits[1]), range(int(bits[2]))
        )
    elif args.budget > 0:
        adversary = random_adversary(
            m, layout, random.Random(args.seed), diffs=args.budget, support=1
        )
    else:
        adversary = zero_anchors(m)
    report = recover_codes(m, layout, adversary)
    expected = frozenset(c.name for c in codes)
    ok = report.ok and report.recovered == expected
    print(report.render(args.format), end="")
    if args.format == "machine":
        print(f"expected={','.join(sorted(expected))} match={int(ok)}")
    else:
        print(_status(ok, "demo-recovery"))
    return 0 if ok else 1


# ------------------------------------------------------------ the parser


def _add_format(p) -> None:
    p.add_argument("--format", choices=("text", "machine"), default="text")


def _add_sweep(p) -> None:
    p.add_argument("--bound", type=int, default=1 << 16)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gf2torsor",
        description="Finite parity-torsor models: build, check, solve, transform.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-standard", help="all-zero model on fresh atoms")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--atoms", required=True, help="count, or comma-separated ids")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_build_standard)

    p = sub.add_parser("build-canonical", help="random face cosets, no twists")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--atoms", required=True, help="count, or comma-separated ids")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_build_canonical)

    p = sub.add_parser("check-axioms", help="sweep the model axioms")
    p.add_argument("model")
    _add_sweep(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_check_axioms)

    p = sub.add_parser("solve", help="find a total solution")
    p.add_argument("model")
    p.add_argument("--method", choices=("greedy", "linear", "brute"), default="greedy")
    p.add_argument("--random", action="store_true", help="randomize free choices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("extend-solution", help="grow a partial solution by one atom")
    p.add_argument("model")
    p.add_argument("solution")
    p.add_argument("--base", required=True, help="atoms the solution is total on")
    p.add_argument("--new", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_extend_solution)

    p = sub.add_parser("amalgamate", help="merge a compatible system of solutions")
    p.add_argument("model")
    p.add_argument("--base", required=True)
    p.add_argument("--extras", required=True)
    p.add_argument(
        "--part",
        action="append",
        required=True,
        help="':file' for the base part, '0:file' etc. for extras subsets",
    )
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_amalgamate)

    p = sub.add_parser("iso", help="build and verify a solution-induced isomorphism")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.add_argument("solution_a")
    p.add_argument("solution_b")
    _add_sweep(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_iso)

    p = sub.add_parser("pull-back", help="restrict a solution along an embedding")
    p.add_argument("model_src")
    p.add_argument("model_tgt")
    p.add_argument("solution")
    p.add_argument("--map", help="'1=1,2=5' atom map; identity when omitted")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_pull_back)

    p = sub.add_parser("extend-model", help="enlarge the atom set of a model")
    p.add_argument("model")
    p.add_argument("--new-atoms", required=True)
    p.add_argument(
        "--anchor",
        action="append",
        default=[],
        help="'1,2=010' coset point per old face; reps fill the rest",
    )
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_extend_model)

    p = sub.add_parser("invariant", help="chain or nested invariant of a model")
    p.add_argument("model")
    p.add_argument("--chain", help="k+1 atoms, head first")
    p.add_argument("--depth", type=int)
    p.add_argument("--base")
    p.add_argument("--tail")
    p.add_argument("--thresholds")
    p.add_argument("--solution", help="anchor family taken from this solution")
    _add_format(p)
    p.set_defaults(handler=_cmd_invariant)

    p = sub.add_parser("demo-recovery", help="code recovery behind a noisy adversary")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--thresholds", required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--codes", required=True)
    p.add_argument("--budget", type=int, default=0, help="random anchor flips")
    p.add_argument(
        "--corrupt", help="'name:alpha:rows' rewrites whole rows of one column"
    )
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)
    p.set_defaults(handler=_cmd_demo_recovery)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

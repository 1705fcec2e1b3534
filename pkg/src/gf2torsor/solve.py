"""Solutions of twisted parity models and the algorithms that build them.

A solution picks one torsor point per (level, face) slot and one coset
point per face so that every applicable parity constraint holds.  This
module provides the validator, a greedy completion engine, amalgamation
of compatible partial-solution systems, single-atom extension, three
independent full solvers and pullback along embeddings.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .gf2 import Gf2System, Gf2Vec, brute_force_solve, solve_linear
from .model import (
    CosetPoint,
    Embedding,
    TorsorPoint,
    TwistedModel,
    q_holds,
)
from .universe import Cell, Face, Universe

__all__ = [
    "Solution",
    "Violation",
    "SolutionVerdict",
    "SystemOfSolutions",
    "empty_solution",
    "is_solution",
    "greedy_extend",
    "random_solution",
    "amalgamate",
    "extend_solution",
    "full_solve",
    "compile_constraints",
    "pull_back",
    "SolutionFormatError",
    "print_solution",
    "parse_solution",
]


@dataclass(frozen=True)
class Solution:
    """Partial assignment of torsor points to slots and coset points to faces."""

    g_part: dict[tuple[int, Face], TorsorPoint] = field(default_factory=dict)
    h_part: dict[Face, CosetPoint] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for (level, face), p in self.g_part.items():
            if p.level != level or p.face != face:
                raise ValueError(f"g_part key ({level}, {face}) holds point at ({p.level}, {p.face})")
        for face, p in self.h_part.items():
            if p.face != face:
                raise ValueError(f"h_part key {face} holds point at {p.face}")

    def atoms(self) -> tuple[int, ...]:
        """Atoms mentioned by the domain."""
        seen: set[int] = set()
        for _, face in self.g_part:
            seen.update(face.atoms)
        for face in self.h_part:
            seen.update(face.atoms)
        return tuple(sorted(seen))

    def restrict(self, atoms: Iterable[int]) -> Solution:
        keep = set(atoms)
        return Solution(
            {k: p for k, p in self.g_part.items() if set(k[1].atoms) <= keep},
            {f: p for f, p in self.h_part.items() if set(f.atoms) <= keep},
        )

    def extends(self, other: Solution) -> bool:
        """True when this solution contains every assignment of ``other``."""
        for k, p in other.g_part.items():
            if self.g_part.get(k) != p:
                return False
        for f, p in other.h_part.items():
            if self.h_part.get(f) != p:
                return False
        return True

    def is_total_on(self, universe: Universe, atoms: Iterable[int]) -> bool:
        for face in universe.all_faces(atoms):
            if face not in self.h_part:
                return False
            for level in universe.levels:
                if (level, face) not in self.g_part:
                    return False
        return True


def empty_solution() -> Solution:
    return Solution({}, {})


@dataclass(frozen=True)
class Violation:
    level: int
    cell: Cell
    h_face: Face

    def __str__(self) -> str:
        return f"constraint (level {self.level}, cell {self.cell}, face {self.h_face})"


@dataclass(frozen=True)
class SolutionVerdict:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


def is_solution(
    m: TwistedModel, f: Solution, scope: Optional[Iterable[int]] = None
) -> SolutionVerdict:
    """Check every applicable parity constraint within the scope.

    A constraint (level, cell, face) applies when the face has a coset
    point and the other k faces all have torsor points at that level.
    The first violated constraint is reported.  Mistyped points and a
    domain escaping the scope are errors, not verdicts.
    """
    u = m.universe
    atoms = tuple(sorted(set(scope))) if scope is not None else u.atoms
    allowed = set(atoms)
    if not allowed <= set(u.atoms):
        raise ValueError("scope must lie within the universe")
    for (level, face), p in f.g_part.items():
        if not set(face.atoms) <= allowed:
            raise ValueError(f"g_part at ({level}, {face}) escapes the scope")
        if not m.contains_torsor_point(p):
            raise ValueError(f"torsor point at ({level}, {face}) is not in the model")
    for face, p in f.h_part.items():
        if not set(face.atoms) <= allowed:
            raise ValueError(f"h_part at {face} escapes the scope")
        if not m.contains_coset_point(p):
            raise ValueError(f"coset point at {face} is not in the model")
    for cell in u.all_cells(atoms):
        faces = u.faces_of(cell)
        for h_face in faces:
            h_arg = f.h_part.get(h_face)
            if h_arg is None:
                continue
            g_faces = [x for x in faces if x != h_face]
            for level in u.levels:
                args = {}
                for x in g_faces:
                    p = f.g_part.get((level, x))
                    if p is None:
                        break
                    args[x] = p
                if len(args) != len(g_faces):
                    continue
                if not q_holds(m, level, cell, h_face, args, h_arg):
                    return SolutionVerdict(False, Violation(level, cell, h_face))
    return SolutionVerdict(True)


# ------------------------------------------------------------ greedy engine


def _complete(
    m: TwistedModel,
    f: Solution,
    atoms: Iterable[int],
    rng: Optional[random.Random] = None,
) -> Solution:
    """Complete a locally valid partial solution to a total one on ``atoms``.

    New faces receive coset points first (representatives, or random coset
    members when an rng is given); this is harmless because every cell
    with one undetermined face has a second one.  New slots are then
    swept levels-outer, faces-lexicographic; each newly applicable
    constraint pins one fresh offset coordinate, and distinct constraints
    pin distinct coordinates.
    """
    u = m.universe
    atoms = tuple(sorted(set(atoms)))
    verdict = is_solution(m, f, scope=atoms)
    if not verdict:
        raise ValueError(f"input is not a valid partial solution: {verdict.violation}")
    faces = u.all_faces(atoms)
    cells = u.all_cells(atoms)
    face_pos = u.face_index
    K = len(u.faces)
    h_part = dict(f.h_part)
    g_part = dict(f.g_part)

    new_faces = [w for w in faces if w not in h_part]
    for cell in cells:
        missing = [w for w in u.faces_of(cell) if w not in h_part]
        if len(missing) == 1:
            raise RuntimeError(
                f"completion hypothesis broken: {cell} has exactly one "
                f"undetermined face {missing[0]}"
            )
    for w in new_faces:
        if rng is None:
            h_part[w] = m.coset_rep_point(w)
        else:
            h_part[w] = m.random_coset_point(w, rng)

    for level in u.levels:
        for face in faces:
            if (level, face) in g_part:
                continue
            base_mask = rng.getrandbits(K) if rng is not None else 0
            pins: dict[int, int] = {}
            for cell in u.cells_containing(face, within=atoms):
                for w in u.faces_of(cell):
                    if w == face:
                        continue
                    others = [
                        x for x in u.faces_of(cell) if x != w and x != face
                    ]
                    if any((level, x) not in g_part for x in others):
                        continue  # fires later, when its last slot is filled
                    pos = face_pos[w]
                    need = h_part[w].vec.bit_at(level)
                    need ^= m.twist_bit(cell, w, level)
                    for x in others:
                        need ^= (g_part[(level, x)].offset.mask >> pos) & 1
                    if pins.get(pos, need) != need:
                        raise RuntimeError(
                            f"conflicting pins at ({level}, {face}), coordinate {w}"
                        )
                    pins[pos] = need
            mask = base_mask
            for pos, bit in pins.items():
                mask = (mask & ~(1 << pos)) | (bit << pos)
            g_part[(level, face)] = TorsorPoint(level, face, Gf2Vec(u.face_family, mask))

    result = Solution(g_part, h_part)
    verdict = is_solution(m, result, scope=atoms)
    if not verdict:
        raise RuntimeError(f"completion produced an invalid solution: {verdict.violation}")
    return result


def greedy_extend(m: TwistedModel, f: Solution, scope: Iterable[int]) -> Solution:
    """Extend a valid solution to a total one on the larger atom set."""
    scope = tuple(sorted(set(scope)))
    if not set(f.atoms()) <= set(scope):
        raise ValueError("scope must contain the solution's atoms")
    return _complete(m, f, scope)


def random_solution(
    m: TwistedModel, rng: random.Random, scope: Optional[Iterable[int]] = None
) -> Solution:
    """Total solution with all free choices drawn from the rng."""
    atoms = m.universe.atoms if scope is None else scope
    return _complete(m, empty_solution(), atoms, rng=rng)


# ------------------------------------------------------------ amalgamation


@dataclass(frozen=True)
class SystemOfSolutions:
    """Partial solutions on base ∪ (subset of extras), one per proper subset.

    ``parts`` is keyed by proper subsets of extras indices; the degenerate
    zero-extras system instead carries its single solution under the
    empty key.
    """

    base: tuple[int, ...]
    extras: tuple[int, ...]
    parts: dict[frozenset[int], Solution]

    def __post_init__(self) -> None:
        if len(set(self.extras)) != len(self.extras):
            raise ValueError("extras must be distinct")
        if set(self.extras) & set(self.base):
            raise ValueError("extras must lie outside the base")
        n = len(self.extras)
        if n == 0:
            expected = {frozenset()}
        else:
            expected = {
                frozenset(s)
                for s in _proper_subsets(n)
            }
        if set(self.parts) != expected:
            raise ValueError(
                f"parts must be keyed by exactly the proper subsets of range({n})"
            )

    def atom_set(self, s: frozenset[int]) -> tuple[int, ...]:
        return tuple(sorted(set(self.base) | {self.extras[i] for i in s}))

    def union_atoms(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.base) | set(self.extras)))


def _proper_subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for mask in range((1 << n) - 1):
        out.append(tuple(i for i in range(n) if mask >> i & 1))
    return out


def amalgamate(m: TwistedModel, sys: SystemOfSolutions) -> Solution:
    """Merge a compatible system and complete it over the full atom set.

    Requires strictly fewer extras than the arity k; the greedy step then
    goes through because every cell over the union that contains a face
    spanning all extras contains at least two such faces.
    """
    u = m.universe
    n = len(sys.extras)
    if n >= u.k:
        raise ValueError(f"refusing {n} extras at arity {u.k}: need fewer extras than k")
    if n == 0:
        f = sys.parts[frozenset()]
        verdict = is_solution(m, f, scope=sys.base)
        if not verdict:
            raise ValueError(f"degenerate part is invalid: {verdict.violation}")
        return f
    items = sorted(sys.parts.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    for s, f in items:
        atoms = sys.atom_set(s)
        if not f.is_total_on(u, atoms):
            raise ValueError(f"part at {set(s) or '{}'} is not total on {atoms}")
        verdict = is_solution(m, f, scope=atoms)
        if not verdict:
            raise ValueError(
                f"part at {set(s) or '{}'} is invalid: {verdict.violation}"
            )
    for i, (s, fs) in enumerate(items):
        for t, ft in items[i + 1 :]:
            # totality on the atom sets makes restrict-equality on the
            # overlap equivalent to monotonicity plus compatibility
            shared = set(sys.atom_set(s)) & set(sys.atom_set(t))
            if fs.restrict(shared) != ft.restrict(shared):
                raise ValueError(
                    f"parts at {set(s) or '{}'} and {set(t) or '{}'} disagree on overlap"
                )
    g_part: dict[tuple[int, Face], TorsorPoint] = {}
    h_part: dict[Face, CosetPoint] = {}
    for _, f in items:
        g_part.update(f.g_part)
        h_part.update(f.h_part)
    merged = Solution(g_part, h_part)
    result = _complete(m, merged, sys.union_atoms())
    for s, f in items:
        if not result.extends(f):
            raise RuntimeError(f"amalgamation failed to extend the part at {set(s)}")
    return result


def extend_solution(m: TwistedModel, f: Solution, base: Iterable[int], b: int) -> Solution:
    """Extend a total solution on ``base`` by the single atom ``b``.

    For k = 2 a direct greedy completion is the whole story.  For larger
    k the extension walks prefixes of the base, amalgamating at each step
    the two-extras system made of the prefix solution, its successor and
    the previously extended solution.
    """
    u = m.universe
    base = tuple(sorted(set(base)))
    if b in base:
        raise ValueError(f"atom {b} already belongs to the base")
    if not set(f.atoms()) <= set(base):
        raise ValueError("solution does not live on the base")
    if not f.is_total_on(u, base):
        raise ValueError("extend_solution requires a total solution on the base")
    target = tuple(sorted(base + (b,)))
    if u.k == 2:
        return _complete(m, f, target)
    current = empty_solution()  # total on the empty prefix plus b: no faces yet
    for i, a in enumerate(base):
        prefix = base[:i]
        grown = base[: i + 1]
        sys = SystemOfSolutions(
            base=prefix,
            extras=(a, b),
            parts={
                frozenset(): f.restrict(prefix),
                frozenset({0}): f.restrict(grown),
                frozenset({1}): current,
            },
        )
        current = amalgamate(m, sys)
    if not current.extends(f):
        raise RuntimeError("extension failed to preserve the base solution")
    return current


# ------------------------------------------------------------ full solvers


def compile_constraints(
    m: TwistedModel,
) -> tuple[Gf2System, dict[tuple[int, Face, Face], int], dict[tuple[Face, int], int]]:
    """Compile all constraints into one GF(2) system.

    Unknowns are the offset coordinates that constraints can see, one per
    (level, face, coordinate face) with the two faces spanning a cell,
    plus one coset-correction bit per (face, level below cutoff).  All
    other offset coordinates are irrelevant and fixed to zero.
    """
    u = m.universe
    x_index: dict[tuple[int, Face, Face], int] = {}
    for level in u.levels:
        for face in u.faces:
            for w in u.faces:
                if w != face and len(set(face.atoms) | set(w.atoms)) == u.k + 1:
                    x_index[(level, face, w)] = len(x_index)
    y_index: dict[tuple[Face, int], int] = {}
    for face in u.faces:
        for level in range(u.c):
            y_index[(face, level)] = len(x_index) + len(y_index)
    rows = []
    for level in u.levels:
        for cell in u.cells:
            for w in u.faces_of(cell):
                cols = [
                    x_index[(level, x, w)] for x in u.faces_of(cell) if x != w
                ]
                if level < u.c:
                    cols.append(y_index[(w, level)])
                rhs = m.h_twist[w].rep.bit_at(level) ^ m.twist_bit(cell, w, level)
                rows.append((tuple(sorted(cols)), rhs))
    num_vars = len(x_index) + len(y_index)
    return Gf2System(num_vars, tuple(rows)), x_index, y_index


def _assignment_to_solution(
    m: TwistedModel,
    vec: Gf2Vec,
    x_index: Mapping[tuple[int, Face, Face], int],
    y_index: Mapping[tuple[Face, int], int],
) -> Solution:
    u = m.universe
    face_pos = u.face_index
    g_part: dict[tuple[int, Face], TorsorPoint] = {}
    for level in u.levels:
        for face in u.faces:
            mask = 0
            for w in u.faces:
                idx = x_index.get((level, face, w))
                if idx is not None and vec.bit_at(idx):
                    mask |= 1 << face_pos[w]
            g_part[(level, face)] = TorsorPoint(level, face, Gf2Vec(u.face_family, mask))
    h_part: dict[Face, CosetPoint] = {}
    for face in u.faces:
        low = 0
        for level in range(u.c):
            if vec.bit_at(y_index[(face, level)]):
                low |= 1 << level
        h_part[face] = CosetPoint(
            face, m.h_twist[face].rep + Gf2Vec(u.level_family, low)
        )
    return Solution(g_part, h_part)


def full_solve(m: TwistedModel, method: str = "greedy") -> Optional[Solution]:
    """Find a total solution by the chosen method, or report none exists.

    All three methods agree on solvability; greedy cannot fail at this
    scale, while linear and brute work from the compiled system and
    decode any satisfying assignment.
    """
    if method == "greedy":
        return _complete(m, empty_solution(), m.universe.atoms)
    if method not in ("linear", "brute"):
        raise ValueError(f"unknown method {method!r}")
    system, x_index, y_index = compile_constraints(m)
    if method == "linear":
        assignment = solve_linear(system)
    else:
        # micro-instances only; the quadratic blowup is the point of the oracle
        assignment = brute_force_solve(system, limit=20)
    if assignment is None:
        return None
    f = _assignment_to_solution(m, assignment, x_index, y_index)
    verdict = is_solution(m, f)
    if not verdict:
        raise RuntimeError(f"decoded assignment is not a solution: {verdict.violation}")
    return f


# ------------------------------------------------------------ pullback


def pull_back(e: Embedding, f_target: Solution) -> Solution:
    """Transport a total solution on the target back to the source.

    Coset points are copied along the face map; each offset is restricted
    to the coordinates that come from the source, which preserves every
    parity sum because embeddings preserve both twist tables.
    """
    src, tgt = e.source.universe, e.target.universe
    if not f_target.is_total_on(tgt, tgt.atoms):
        raise ValueError("pull_back needs a total target solution")
    verdict = is_solution(e.target, f_target)
    if not verdict:
        raise ValueError(f"target solution is invalid: {verdict.violation}")
    image = {w: e.map_face(w) for w in src.faces}
    h_part = {}
    for w in src.faces:
        h_part[w] = CosetPoint(w, Gf2Vec(src.level_family, f_target.h_part[image[w]].vec.mask))
    g_part = {}
    for level in src.levels:
        for face in src.faces:
            big = f_target.g_part[(level, image[face])].offset
            support = [w for w in src.faces if image[w] in big.support()]
            g_part[(level, face)] = TorsorPoint(
                level, face, Gf2Vec.from_support(src.face_family, support)
            )
    f = Solution(g_part, h_part)
    check = is_solution(e.source, f)
    if not check:
        raise RuntimeError(f"pullback produced an invalid solution: {check.violation}")
    return f


# ------------------------------------------------------------ file format


class SolutionFormatError(ValueError):
    pass


def print_solution(u: Universe, f: Solution) -> str:
    """Canonical text form; parse_solution inverts it bit-exactly."""
    lines = []
    for face in sorted(f.h_part):
        lines.append(f"H {face} {f.h_part[face].vec.bits()}")
    for level, face in sorted(f.g_part):
        lines.append(f"G {level} {face} {f.g_part[(level, face)].offset.bits()}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_solution(u: Universe, text: str) -> Solution:
    g_part: dict[tuple[int, Face], TorsorPoint] = {}
    h_part: dict[Face, CosetPoint] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "H":
            if len(toks) != 3:
                raise SolutionFormatError(f"line {lineno}: H line needs face and bits")
            face = _parse_face(u, toks[1], lineno)
            if face in h_part:
                raise SolutionFormatError(f"line {lineno}: duplicate H line for {face}")
            try:
                vec = Gf2Vec.from_bits(u.level_family, toks[2])
            except ValueError as exc:
                raise SolutionFormatError(f"line {lineno}: {exc}") from exc
            h_part[face] = CosetPoint(face, vec)
        elif toks[0] == "G":
            if len(toks) != 4:
                raise SolutionFormatError(
                    f"line {lineno}: G line needs level, face and bits"
                )
            try:
                level = int(toks[1])
            except ValueError as exc:
                raise SolutionFormatError(f"line {lineno}: bad level {toks[1]!r}") from exc
            if not 0 <= level < u.L:
                raise SolutionFormatError(f"line {lineno}: level {level} out of range")
            face = _parse_face(u, toks[2], lineno)
            if (level, face) in g_part:
                raise SolutionFormatError(f"line {lineno}: duplicate G line")
            try:
                offset = Gf2Vec.from_bits(u.face_family, toks[3])
            except ValueError as exc:
                raise SolutionFormatError(f"line {lineno}: {exc}") from exc
            g_part[(level, face)] = TorsorPoint(level, face, offset)
        else:
            raise SolutionFormatError(f"line {lineno}: unknown directive {toks[0]!r}")
    return Solution(g_part, h_part)


def _parse_face(u: Universe, token: str, lineno: int) -> Face:
    try:
        face = Face(tuple(int(t) for t in token.split(",")))
    except ValueError as exc:
        raise SolutionFormatError(f"line {lineno}: bad face {token!r}") from exc
    if not u.has_face(face):
        raise SolutionFormatError(f"line {lineno}: {face} is not a face")
    return face

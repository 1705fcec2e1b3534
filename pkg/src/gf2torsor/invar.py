"""Coset invariants of anchored chains, with thresholded comparison.

A chain of k+1 atoms, an anchor family of torsor points and one coset
point determine a level-indexed parity defect; its coset modulo the
cutoff subgroup is an invariant of the model.  Nesting the construction
over graded base sets gives tree-shaped invariants compared up to
difference thresholds, the finite stand-in for comparison up to small
cardinality.  On top of that sit the designed code models and the
majority-vote recovery experiment.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .gf2 import CutoffCoset, Gf2Vec, coset_of
from .model import CosetPoint, TorsorPoint, TwistedModel, canonical_model
from .universe import Cell, Face, Universe

__all__ = [
    "Thresholds",
    "InvariantClass",
    "AnchorFamily",
    "zero_anchors",
    "chain_invariant",
    "nested_invariant",
    "Code",
    "CodeLayout",
    "build_code_model",
    "RecoveryEntry",
    "RecoveryReport",
    "recover_codes",
    "random_adversary",
    "column_corruption",
    "CodesFormatError",
    "print_codes",
    "parse_codes",
]

# anchor families assign a torsor point to every (level, face) they cover
AnchorFamily = dict[tuple[int, Face], TorsorPoint]


@dataclass(frozen=True)
class Thresholds:
    """Strictly increasing positive difference budgets, one per depth."""

    t: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.t:
            raise ValueError("at least one threshold is required")
        if any(x <= 0 for x in self.t):
            raise ValueError("thresholds must be positive")
        if any(a >= b for a, b in zip(self.t, self.t[1:])):
            raise ValueError("thresholds must be strictly increasing")

    def __getitem__(self, index: int) -> int:
        return self.t[index]

    def __len__(self) -> int:
        return len(self.t)

    def require(self, index: int) -> int:
        if index >= len(self.t):
            raise ValueError(f"threshold index {index} missing from {self.t}")
        return self.t[index]

    def graded_size(self, index: int) -> int:
        # size of the index-th graded base set; the residue between
        # consecutive grades must keep the full comparison budget, so
        # the sizes accumulate instead of taking the raw thresholds
        self.require(index)
        return sum(self.t[: index + 1])


@dataclass(frozen=True)
class InvariantClass:
    """Leaf: a coset.  Node: children per atom, compared up to a threshold.

    Node equality ("matches") tolerates fewer than t[threshold_index]
    recursively mismatching children.  This comparison is reflexive and
    symmetric but deliberately not transitive; it is only ever used to
    compare a computed invariant against a reference.
    """

    threshold_index: Optional[int] = None
    coset: Optional[CutoffCoset] = None
    children: Optional[dict[int, InvariantClass]] = None

    def __post_init__(self) -> None:
        if (self.coset is None) == (self.children is None):
            raise ValueError("exactly one of coset and children must be given")
        if self.coset is not None and self.threshold_index is not None:
            raise ValueError("leaves carry no threshold index")
        if self.children is not None and self.threshold_index is None:
            raise ValueError("nodes need a threshold index")

    @staticmethod
    def leaf(coset: CutoffCoset) -> InvariantClass:
        return InvariantClass(coset=coset)

    @staticmethod
    def node(threshold_index: int, children: dict[int, InvariantClass]) -> InvariantClass:
        return InvariantClass(threshold_index=threshold_index, children=dict(children))

    @property
    def is_leaf(self) -> bool:
        return self.coset is not None

    def matches(self, other: InvariantClass, th: Thresholds) -> bool:
        if self.is_leaf or other.is_leaf:
            return (
                self.is_leaf
                and other.is_leaf
                and self.coset == other.coset
            )
        if self.threshold_index != other.threshold_index:
            return False
        if set(self.children) != set(other.children):
            return False
        budget = th.require(self.threshold_index)
        mismatches = 0
        for key, child in self.children.items():
            if not child.matches(other.children[key], th):
                mismatches += 1
                if mismatches >= budget:
                    return False
        return True

    def matches_exactly(self, other: InvariantClass) -> bool:
        if self.is_leaf or other.is_leaf:
            return self.is_leaf and other.is_leaf and self.coset == other.coset
        if self.threshold_index != other.threshold_index:
            return False
        if set(self.children) != set(other.children):
            return False
        return all(
            child.matches_exactly(other.children[key])
            for key, child in self.children.items()
        )

    def render(self) -> str:
        if self.is_leaf:
            return self.coset.rep.bits()
        inner = ",".join(
            f"{key}:{self.children[key].render()}" for key in sorted(self.children)
        )
        return f"d{self.threshold_index}{{{inner}}}"


def zero_anchors(m: TwistedModel) -> AnchorFamily:
    """The total all-zero anchor family."""
    out: AnchorFamily = {}
    for level in m.universe.levels:
        for face in m.universe.faces:
            out[(level, face)] = m.zero_torsor_point(level, face)
    return out


def chain_invariant(
    m: TwistedModel,
    chain: Sequence[int],
    anchors: Mapping[tuple[int, Face], TorsorPoint],
    y: Optional[CosetPoint] = None,
) -> CutoffCoset:
    """Coset of the parity defect along a chain, anchored off its head.

    The chain's tail spans the distinguished face; the anchors supply the
    torsor arguments at the k faces through the head.  The defect bit at
    each level is the parity left over after the coset point's own bit,
    so the result does not depend on which coset point is used.
    """
    u = m.universe
    if len(chain) != u.k + 1 or len(set(chain)) != u.k + 1:
        raise ValueError(f"chain must list k+1 distinct atoms, got {chain}")
    cell = Cell.of(chain)
    u.require_cell(cell)
    h_face = Face.of(chain[1:])
    if y is None:
        y = m.coset_rep_point(h_face)
    if y.face != h_face or not m.contains_coset_point(y):
        raise ValueError(f"coset point must lie in the coset at {h_face}")
    pos = u.face_index[h_face]
    mask = 0
    for level in u.levels:
        bit = y.vec.bit_at(level) ^ m.twist_bit(cell, h_face, level)
        for g_face in u.faces_of(cell):
            if g_face == h_face:
                continue
            p = anchors.get((level, g_face))
            if p is None:
                raise ValueError(f"anchor family is missing ({level}, {g_face})")
            if p.level != level or p.face != g_face or p.offset.keys != u.face_family:
                raise ValueError(f"anchor at ({level}, {g_face}) is mistyped")
            bit ^= (p.offset.mask >> pos) & 1
        mask |= bit << level
    return coset_of(Gf2Vec(u.level_family, mask), u.c)


def nested_invariant(
    m: TwistedModel,
    depth: int,
    base: Iterable[int],
    tail: Sequence[int],
    anchors: Mapping[tuple[int, Face], TorsorPoint],
    th: Thresholds,
    completion: Optional[Mapping[tuple[int, Face], TorsorPoint]] = None,
) -> InvariantClass:
    """Tree invariant of the given depth over a graded base set.

    Depth 0 maps each base atom to the invariant of its chain onto the
    tail.  Depth d > 0 extends the anchors over the faces spanning the
    tail inside the graded subset (zero points unless a completion
    supplies that face), then recurses one level down for every base
    atom outside the subset.  The graded subsets are the sorted base's
    prefixes with the cumulative threshold sizes, so the atoms left
    above each grade still meet that grade's comparison budget.
    """
    u = m.universe
    base = tuple(sorted(set(base)))
    if not 0 <= depth <= u.k - 2:
        raise ValueError(f"depth must lie in [0, k-2], got {depth}")
    if len(tail) != u.k - depth or len(set(tail)) != len(tail):
        raise ValueError(f"tail must list {u.k - depth} distinct atoms")
    if set(tail) & set(base):
        raise ValueError("tail atoms must lie outside the base")
    if not base:
        raise ValueError("base must not be empty")
    if depth == 0:
        children = {
            a: InvariantClass.leaf(chain_invariant(m, (a,) + tuple(tail), anchors))
            for a in base
        }
        return InvariantClass.node(0, children)
    inner_size = th.graded_size(depth - 1)
    if len(base) <= inner_size:
        raise ValueError(
            f"base of size {len(base)} cannot grade at depth {depth}: "
            f"needs more than {inner_size} atoms"
        )
    inner = base[:inner_size]
    extended: AnchorFamily = dict(anchors)
    for level in u.levels:
        for combo in _faces_spanning(u, inner, tail):
            key = (level, combo)
            if key in extended:
                continue
            override = completion.get(key) if completion is not None else None
            if override is not None:
                if override.level != level or override.face != combo:
                    raise ValueError(f"completion at ({level}, {combo}) is mistyped")
                extended[key] = override
            else:
                extended[key] = m.zero_torsor_point(level, combo)
    children = {}
    for a in base[inner_size:]:
        children[a] = nested_invariant(
            m, depth - 1, inner, (a,) + tuple(tail), extended, th, completion
        )
    return InvariantClass.node(depth, children)


def _faces_spanning(u: Universe, pool: Sequence[int], tail: Sequence[int]) -> list[Face]:
    """Faces made of the whole tail plus atoms from the pool."""
    need = u.k - len(tail)
    out = []
    for extra in itertools.combinations(sorted(pool), need):
        out.append(Face.of(tuple(tail) + extra))
    return out


# ------------------------------------------------------------ code models


@dataclass(frozen=True)
class Code:
    """Named table of cosets: one entry per grid column (and band atom
    for arity three)."""

    name: str
    values: dict[tuple[int, ...], CutoffCoset]

    def __post_init__(self) -> None:
        if not self.name or any(ch.isspace() for ch in self.name):
            raise ValueError(f"code name {self.name!r} must be non-empty, no spaces")


@dataclass(frozen=True)
class CodeLayout:
    """Atom assignment and reference data of a built code model."""

    k: int
    thresholds: Thresholds
    grid: int
    codes: tuple[Code, ...]
    band: tuple[int, ...]
    pair_atoms: dict[tuple[int, int], int]
    code_atoms: dict[str, int]

    def pair_atom(self, alpha: int, beta: int) -> int:
        return self.pair_atoms[(alpha, beta)]

    def atom_code(self, atom: int) -> Code:
        for code in self.codes:
            if self.code_atoms[code.name] == atom:
                return code
        raise ValueError(f"atom {atom} is not a code atom")

    def prescribed_class(self, name: str, alpha: int) -> InvariantClass:
        """The invariant the construction promises at a code's column."""
        code = next(c for c in self.codes if c.name == name)
        if self.k == 2:
            coset = code.values[(alpha,)]
            return InvariantClass.node(
                0, {b: InvariantClass.leaf(coset) for b in self.band}
            )
        t0 = self.thresholds.graded_size(0)
        inner = self.band[:t0]
        children = {}
        for b in self.band[t0:]:
            coset = code.values[(alpha, b)]
            children[b] = InvariantClass.node(
                0, {b2: InvariantClass.leaf(coset) for b2 in inner}
            )
        return InvariantClass.node(1, children)


def build_code_model(
    k: int,
    th: Thresholds,
    grid: int,
    codes: Sequence[Code],
    levels: int,
    cutoff: int,
) -> tuple[TwistedModel, CodeLayout]:
    """Model whose designated face cosets spell out the codes.

    Atoms are a band of graded markers, a grid of column atoms and one
    atom per code.  Faces made of a code atom, a column atom and a full
    band completion receive that code's table entry; every other face
    gets the zero coset.  The reference anchor family is all zeros.
    """
    if k not in (2, 3):
        raise ValueError("code models are built for arity 2 or 3")
    th.require(k - 2)
    if grid < 1:
        raise ValueError("grid side must be positive")
    if not codes:
        raise ValueError("at least one code is required")
    names = [c.name for c in codes]
    if len(set(names)) != len(names):
        raise ValueError("code names must be distinct")
    band_size = th.graded_size(k - 2)
    band = tuple(range(band_size))
    pair_atoms = {}
    next_atom = band_size
    for alpha in range(grid):
        for beta in range(grid):
            pair_atoms[(alpha, beta)] = next_atom
            next_atom += 1
    code_atoms = {}
    for code in codes:
        code_atoms[code.name] = next_atom
        next_atom += 1
    if k == 2:
        expected_keys = {(alpha,) for alpha in range(grid)}
    else:
        t0 = th.graded_size(0)
        expected_keys = {(alpha, b) for alpha in range(grid) for b in band[t0:]}
    for code in codes:
        if set(code.values) != expected_keys:
            raise ValueError(f"code {code.name} does not cover the expected table")
        for key, coset in code.values.items():
            if coset.length != levels or coset.cutoff != cutoff:
                raise ValueError(f"code {code.name} entry {key} has wrong geometry")
    universe = Universe.create(tuple(range(next_atom)), k=k, L=levels, c=cutoff)
    layout = CodeLayout(k, th, grid, tuple(codes), band, pair_atoms, code_atoms)
    for i, a in enumerate(codes):
        for b in codes[i + 1 :]:
            if all(
                layout.prescribed_class(a.name, alpha).matches(
                    layout.prescribed_class(b.name, alpha), th
                )
                for alpha in range(grid)
            ):
                raise ValueError(f"codes {a.name} and {b.name} are equivalent")
    zero = CutoffCoset(levels, cutoff, Gf2Vec.zero(universe.level_family))
    g: dict[Face, CutoffCoset] = {f: zero for f in universe.faces}
    for code in codes:
        atom = code_atoms[code.name]
        for (alpha, beta), p_atom in pair_atoms.items():
            if k == 2:
                g[Face.of((atom, p_atom))] = code.values[(alpha,)]
            else:
                for b in band[th.graded_size(0) :]:
                    g[Face.of((atom, p_atom, b))] = code.values[(alpha, b)]
    return canonical_model(universe, g), layout


# ------------------------------------------------------------ recovery


@dataclass(frozen=True)
class RecoveryEntry:
    atom: int
    alpha: int
    agreeing: int
    majority: Optional[str]  # rendered class, None when no majority exists
    candidates: tuple[str, ...]


@dataclass
class RecoveryReport:
    entries: list[RecoveryEntry]
    assigned: dict[int, Optional[str]]
    diffs: int
    max_support: int
    grid: int

    @property
    def budget_ok(self) -> bool:
        return 2 * self.diffs * self.max_support < self.grid

    @property
    def ok(self) -> bool:
        if any(e.majority is None for e in self.entries):
            return False
        return all(name is not None for name in self.assigned.values())

    @property
    def recovered(self) -> frozenset[str]:
        return frozenset(name for name in self.assigned.values() if name is not None)

    def render(self, fmt: str = "text") -> str:
        budget = f"diffs={self.diffs} max_support={self.max_support} grid={self.grid}"
        if fmt == "machine":
            lines = [f"report=recovery {budget} budget_ok={int(self.budget_ok)}"]
            for e in self.entries:
                lines.append(
                    f"entry atom={e.atom} alpha={e.alpha} agreeing={e.agreeing} "
                    f"majority={'none' if e.majority is None else e.majority} "
                    f"candidates={','.join(e.candidates) or 'none'}"
                )
            for atom in sorted(self.assigned):
                name = self.assigned[atom]
                lines.append(f"assigned atom={atom} code={'none' if name is None else name}")
            lines.append(f"recovered={','.join(sorted(self.recovered)) or 'none'}")
            lines.append(f"status={'pass' if self.ok else 'fail'}")
            return "\n".join(lines) + "\n"
        lines = [f"recovery: {'pass' if self.ok else 'FAIL'} ({budget}, within budget: {self.budget_ok})"]
        for e in self.entries:
            maj = e.majority if e.majority is not None else "NO MAJORITY"
            lines.append(
                f"  atom {e.atom} column {e.alpha}: {e.agreeing}/{self.grid} agree, "
                f"class {maj}, candidates {list(e.candidates) or 'none'}"
            )
        for atom in sorted(self.assigned):
            name = self.assigned[atom]
            lines.append(f"  atom {atom} -> {name if name is not None else 'UNRESOLVED'}")
        return "\n".join(lines) + "\n"


def recover_codes(
    m: TwistedModel, layout: CodeLayout, adversary: Mapping[tuple[int, Face], TorsorPoint]
) -> RecoveryReport:
    """Reconstruct the code tables from invariants behind noisy anchors.

    For each code atom and grid column the invariant is computed once per
    grid row, and a class agreeing with more than half the rows is looked
    up among the prescribed ones.  The adversary may disturb anchors only
    at faces touching a code atom; its difference budget is reported.
    """
    reference = zero_anchors(m)
    if set(adversary) != set(reference):
        raise ValueError("adversary must be a total anchor family")
    code_atom_set = set(layout.code_atoms.values())
    diffs = 0
    max_support = 0
    for key, point in adversary.items():
        ref = reference[key]
        if point.level != ref.level or point.face != ref.face:
            raise ValueError(f"adversary entry at {key} is mistyped")
        delta = point.offset + ref.offset
        if delta.is_zero():
            continue
        if not set(key[1].atoms) & code_atom_set:
            raise ValueError(
                f"adversary differs from the reference at {key}, "
                "which touches no code atom"
            )
        diffs += 1
        max_support = max(max_support, delta.weight())
    th = layout.thresholds
    entries: list[RecoveryEntry] = []
    assigned: dict[int, Optional[str]] = {}
    for name in sorted(layout.code_atoms):
        atom = layout.code_atoms[name]
        common: Optional[set[str]] = None
        failed = False
        for alpha in range(layout.grid):
            invs = [
                nested_invariant(
                    m,
                    layout.k - 2,
                    layout.band,
                    (layout.pair_atom(alpha, beta), atom),
                    adversary,
                    th,
                )
                for beta in range(layout.grid)
            ]
            counts = [
                sum(1 for other in invs if inv.matches(other, th)) for inv in invs
            ]
            best = max(counts)
            winner = None
            if 2 * best > layout.grid:
                winner = invs[counts.index(best)]
            candidates = tuple(
                code.name
                for code in layout.codes
                if winner is not None
                and winner.matches(layout.prescribed_class(code.name, alpha), th)
            )
            entries.append(
                RecoveryEntry(
                    atom,
                    alpha,
                    best,
                    winner.render() if winner is not None else None,
                    candidates,
                )
            )
            if winner is None:
                failed = True
            elif common is None:
                common = set(candidates)
            else:
                common &= set(candidates)
        if failed or not common or len(common) != 1:
            assigned[atom] = None
        else:
            assigned[atom] = common.pop()
    return RecoveryReport(entries, assigned, diffs, max_support, layout.grid)


def random_adversary(
    m: TwistedModel,
    layout: CodeLayout,
    rng: random.Random,
    diffs: int = 1,
    support: int = 1,
) -> AnchorFamily:
    """Reference anchors disturbed at code-touching faces.

    Each disturbed entry flips ``support`` offset coordinates at faces
    adjacent to the anchor's face, at a level at or above the cutoff, so
    the disturbance is visible to invariants yet within the stated
    budget when diffs·support is.
    """
    u = m.universe
    out = zero_anchors(m)
    code_atom_set = set(layout.code_atoms.values())
    eligible = [f for f in u.faces if set(f.atoms) & code_atom_set]
    keys: list[tuple[int, Face]] = []
    for _ in range(1000 * diffs):
        if len(keys) == diffs:
            break
        level = rng.randrange(u.c, u.L) if u.c < u.L else rng.randrange(u.L)
        face = rng.choice(eligible)
        if (level, face) not in keys:
            keys.append((level, face))
    if len(keys) != diffs:
        raise ValueError("could not place the requested number of differences")
    for level, face in keys:
        adjacent = [
            w
            for w in u.faces
            if w != face and len(set(w.atoms) | set(face.atoms)) == u.k + 1
        ]
        picked = rng.sample(adjacent, min(support, len(adjacent)))
        out[(level, face)] = TorsorPoint(
            level, face, Gf2Vec.from_support(u.face_family, picked)
        )
    return out


def column_corruption(
    m: TwistedModel,
    layout: CodeLayout,
    name: str,
    alpha: int,
    betas: Iterable[int],
    level: Optional[int] = None,
) -> AnchorFamily:
    """Adversary that rewrites whole grid rows of one code's column.

    Every band chain of each chosen row is flipped at the given level, so
    those rows' invariants land in one consistent wrong class.  Choosing
    half the rows or more defeats the majority; the budget report shows
    the overrun.
    """
    u = m.universe
    if level is None:
        level = u.c if u.c < u.L else u.L - 1
    atom = layout.code_atoms[name]
    out = zero_anchors(m)

    def flip(face: Face, at: Face) -> None:
        key = (level, face)
        out[key] = TorsorPoint(
            level, face, out[key].offset + Gf2Vec.from_support(u.face_family, [at])
        )

    for beta in betas:
        p_atom = layout.pair_atom(alpha, beta)
        if layout.k == 2:
            for b in layout.band:
                flip(Face.of((b, atom)), Face.of((p_atom, atom)))
        else:
            t0 = layout.thresholds.graded_size(0)
            for b in layout.band[t0:]:
                h_face = Face.of((b, p_atom, atom))
                for b2 in layout.band[:t0]:
                    flip(Face.of((b2, b, atom)), h_face)
    return out


# ------------------------------------------------------------ codes format


class CodesFormatError(ValueError):
    pass


def print_codes(levels: int, cutoff: int, codes: Sequence[Code]) -> str:
    """Canonical text form; parse_codes inverts it bit-exactly."""
    lines = [f"HSCODES {levels} {cutoff}"]
    for code in codes:
        lines.append(f"CODE {code.name}")
        for key in sorted(code.values):
            head = " ".join(str(x) for x in key)
            lines.append(f"VAL {head} {code.values[key].rep.bits()}")
    return "\n".join(lines) + "\n"


def parse_codes(text: str) -> tuple[int, int, list[Code]]:
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l]
    if not lines:
        raise CodesFormatError("empty codes text")
    n0, header = lines[0]
    toks = header.split()
    if len(toks) != 3 or toks[0] != "HSCODES":
        raise CodesFormatError(f"line {n0}: expected 'HSCODES L c' header")
    try:
        levels, cutoff = int(toks[1]), int(toks[2])
    except ValueError as exc:
        raise CodesFormatError(f"line {n0}: non-integer header fields") from exc
    codes: list[Code] = []
    name: Optional[str] = None
    values: dict[tuple[int, ...], CutoffCoset] = {}

    def flush(lineno):
        if name is not None:
            if not values:
                raise CodesFormatError(f"line {lineno}: code {name} has no VAL lines")
            codes.append(Code(name, dict(values)))

    for lineno, line in lines[1:]:
        toks = line.split()
        if toks[0] == "CODE":
            if len(toks) != 2:
                raise CodesFormatError(f"line {lineno}: CODE line needs a name")
            flush(lineno)
            name = toks[1]
            values = {}
        elif toks[0] == "VAL":
            if name is None:
                raise CodesFormatError(f"line {lineno}: VAL before any CODE line")
            if len(toks) < 3:
                raise CodesFormatError(f"line {lineno}: VAL line needs key and bits")
            try:
                key = tuple(int(t) for t in toks[1:-1])
            except ValueError as exc:
                raise CodesFormatError(f"line {lineno}: non-integer key") from exc
            if key in values:
                raise CodesFormatError(f"line {lineno}: duplicate VAL key {key}")
            try:
                rep = Gf2Vec.from_bits(tuple(range(levels)), toks[-1])
                values[key] = CutoffCoset(levels, cutoff, rep)
            except ValueError as exc:
                raise CodesFormatError(f"line {lineno}: {exc}") from exc
        else:
            raise CodesFormatError(f"line {lineno}: unknown directive {toks[0]!r}")
    flush(lines[-1][0])
    if not codes:
        raise CodesFormatError("no CODE sections found")
    names = [c.name for c in codes]
    if len(set(names)) != len(names):
        raise CodesFormatError("duplicate code names")
    return levels, cutoff, codes

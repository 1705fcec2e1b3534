"""Twisted parity-torsor models over a finite universe.

A model attaches to every (level, face) slot a free torsor over the
face-indexed GF(2) group, and to every face a coset of the cutoff
subgroup inside the level-indexed group.  A parity predicate ties the
two sorts together across the k+1 faces of each cell; a sparse twist
table lets the predicate differ from the untwisted default on chosen
(cell, face) pairs.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .gf2 import CutoffCoset, Gf2Vec
from .universe import Cell, Face, Universe

__all__ = [
    "TorsorPoint",
    "CosetPoint",
    "TwistedModel",
    "Embedding",
    "standard_model",
    "canonical_model",
    "random_canonical_model",
    "q_holds",
    "q_holds_seq",
    "extend_model",
    "identity_embedding",
    "check_axioms",
    "AxiomCheck",
    "AxiomReport",
    "ModelFormatError",
    "print_model",
    "parse_model",
]


@dataclass(frozen=True)
class TorsorPoint:
    """Point of the free torsor at a (level, face) slot.

    The offset is the displacement from the slot's reference point and is
    indexed by the universe's full face family.
    """

    level: int
    face: Face
    offset: Gf2Vec


@dataclass(frozen=True)
class CosetPoint:
    """Point of the coset attached to a face; vec is level-indexed."""

    face: Face
    vec: Gf2Vec


@dataclass(eq=True)
class TwistedModel:
    """Universe plus the two twist tables.

    h_twist assigns each face its coset (total); q_twist perturbs the
    parity predicate on selected (cell, face) pairs and defaults to zero.
    Instances are treated as immutable once built.
    """

    universe: Universe
    h_twist: dict[Face, CutoffCoset]
    q_twist: dict[tuple[Cell, Face], Gf2Vec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        u = self.universe
        missing = [f for f in u.faces if f not in self.h_twist]
        if missing:
            raise ValueError(f"h_twist missing faces, first: {missing[0]}")
        extra = [f for f in self.h_twist if f not in u.face_index]
        if extra:
            raise ValueError(f"h_twist keyed by non-face: {extra[0]}")
        for f, coset in self.h_twist.items():
            if coset.length != u.L or coset.cutoff != u.c:
                raise ValueError(f"coset at {f} has wrong geometry")
        for (cell, f), vec in self.q_twist.items():
            u.require_cell(cell)
            if f not in u.faces_of(cell):
                raise ValueError(f"q_twist key ({cell}, {f}): face not in cell")
            if vec.keys != u.level_family:
                raise ValueError(f"q_twist value at ({cell}, {f}) not level-indexed")

    # ------------------------------------------------------------- lookups

    def coset(self, face: Face) -> CutoffCoset:
        return self.h_twist[face]

    def twist_vec(self, cell: Cell, face: Face) -> Gf2Vec:
        got = self.q_twist.get((cell, face))
        return got if got is not None else Gf2Vec.zero(self.universe.level_family)

    def twist_bit(self, cell: Cell, face: Face, level: int) -> int:
        got = self.q_twist.get((cell, face))
        return got.bit_at(level) if got is not None else 0

    # ------------------------------------------------------------- elements

    def zero_torsor_point(self, level: int, face: Face) -> TorsorPoint:
        return TorsorPoint(level, face, Gf2Vec.zero(self.universe.face_family))

    def coset_rep_point(self, face: Face) -> CosetPoint:
        return CosetPoint(face, self.h_twist[face].rep)

    def contains_torsor_point(self, p: TorsorPoint) -> bool:
        u = self.universe
        return (
            0 <= p.level < u.L
            and p.face in u.face_index
            and p.offset.keys == u.face_family
        )

    def contains_coset_point(self, p: CosetPoint) -> bool:
        return p.face in self.universe.face_index and self.h_twist[p.face].contains(p.vec)

    def group_size(self) -> int:
        return 1 << len(self.universe.faces)

    def group_vectors(self) -> Iterator[Gf2Vec]:
        fam = self.universe.face_family
        for mask in range(1 << len(fam)):
            yield Gf2Vec(fam, mask)

    def level_group_vectors(self) -> Iterator[Gf2Vec]:
        # the level group is the cutoff subgroup, not the full cube
        fam = self.universe.level_family
        for mask in range(1 << self.universe.c):
            yield Gf2Vec(fam, mask)

    def coset_points(self, face: Face) -> Iterator[CosetPoint]:
        for v in self.h_twist[face].members():
            yield CosetPoint(face, v)

    def random_group_vector(self, rng: random.Random) -> Gf2Vec:
        fam = self.universe.face_family
        return Gf2Vec(fam, rng.getrandbits(len(fam)))

    def random_torsor_point(self, level: int, face: Face, rng: random.Random) -> TorsorPoint:
        return TorsorPoint(level, face, self.random_group_vector(rng))

    def random_coset_point(self, face: Face, rng: random.Random) -> CosetPoint:
        low = rng.getrandbits(self.universe.c)
        vec = self.h_twist[face].rep + Gf2Vec(self.universe.level_family, low)
        return CosetPoint(face, vec)


# ------------------------------------------------------------ constructors


def standard_model(universe: Universe) -> TwistedModel:
    """Model with every face coset zero and no parity twists."""
    zero = CutoffCoset(
        universe.L, universe.c, Gf2Vec.zero(universe.level_family)
    )
    return TwistedModel(universe, {f: zero for f in universe.faces})


def canonical_model(universe: Universe, g: Mapping[Face, CutoffCoset]) -> TwistedModel:
    """Model whose face cosets are prescribed by ``g``; no parity twists."""
    return TwistedModel(universe, dict(g))


def random_canonical_model(universe: Universe, rng: random.Random) -> TwistedModel:
    g = {}
    for f in universe.faces:
        mask = rng.getrandbits(universe.L - universe.c) << universe.c
        g[f] = CutoffCoset(universe.L, universe.c, Gf2Vec(universe.level_family, mask))
    return canonical_model(universe, g)


# ------------------------------------------------------------ the predicate


def q_holds(
    m: TwistedModel,
    level: int,
    cell: Cell,
    h_face: Face,
    g_args: Mapping[Face, TorsorPoint],
    h_arg: CosetPoint,
) -> bool:
    """Parity predicate at (level, cell) with the given distinguished face.

    Holds when the offsets of the k torsor arguments, each evaluated at
    the distinguished face, sum to the coset point's level bit plus the
    cell's twist bit.
    """
    u = m.universe
    if not 0 <= level < u.L:
        raise ValueError(f"level {level} out of range")
    u.require_cell(cell)
    cell_faces = u.faces_of(cell)
    if h_face not in cell_faces:
        raise ValueError(f"{h_face} is not a face of {cell}")
    expected = set(cell_faces) - {h_face}
    if set(g_args.keys()) != expected:
        raise ValueError(
            f"torsor arguments must cover exactly the faces {sorted(expected)}"
        )
    for f, p in g_args.items():
        if p.face != f:
            raise ValueError(f"argument at {f} carries face {p.face}")
        if p.level != level:
            raise ValueError(f"argument at {f} has level {p.level}, expected {level}")
        if p.offset.keys != u.face_family:
            raise ValueError(f"argument at {f} is not offset over this universe")
    if h_arg.face != h_face:
        raise ValueError(f"coset argument carries face {h_arg.face}, expected {h_face}")
    if not m.contains_coset_point(h_arg):
        raise ValueError(f"coset argument at {h_face} lies outside its coset")
    pos = u.face_index[h_face]
    acc = h_arg.vec.bit_at(level) ^ m.twist_bit(cell, h_face, level)
    for p in g_args.values():
        acc ^= (p.offset.mask >> pos) & 1
    return acc == 0


def _verdict_fast(
    m: TwistedModel,
    level: int,
    pos: int,
    cell: Cell,
    h_face: Face,
    g_masks: Iterable[int],
    h_mask: int,
) -> bool:
    """Unvalidated parity verdict on raw masks; must match q_holds."""
    acc = (h_mask >> level) & 1
    acc ^= m.twist_bit(cell, h_face, level)
    for gm in g_masks:
        acc ^= (gm >> pos) & 1
    return acc == 0


def q_holds_seq(
    m: TwistedModel,
    level: int,
    g_args: Sequence[TorsorPoint],
    h_arg: CosetPoint,
) -> bool:
    """Positional form: infers the cell from the argument faces.

    The k torsor arguments and the coset argument must sit on the k+1
    distinct faces of a single cell; anything else is malformed.
    """
    faces = [p.face for p in g_args] + [h_arg.face]
    atoms = set()
    for f in faces:
        atoms |= set(f.atoms)
    if len(set(faces)) != len(faces) or len(atoms) != m.universe.k + 1:
        raise ValueError("arguments do not sit on the faces of a single cell")
    cell = Cell(tuple(sorted(atoms)))
    if set(faces) != set(m.universe.faces_of(cell)):
        raise ValueError("arguments do not cover all faces of the cell")
    return q_holds(m, level, cell, h_arg.face, {p.face: p for p in g_args}, h_arg)


# ------------------------------------------------------------ embeddings


@dataclass(frozen=True)
class Embedding:
    """Structure-respecting injection of one model's universe into another's.

    Requires identical (k, L, c), matching face cosets along the atom map
    and matching twist vectors on every image cell whose preimage is a
    cell of the source.
    """

    source: TwistedModel
    target: TwistedModel
    atom_map: tuple[tuple[int, int], ...]  # (source atom, target atom), sorted

    def __post_init__(self) -> None:
        src_u, tgt_u = self.source.universe, self.target.universe
        if (src_u.k, src_u.L, src_u.c) != (tgt_u.k, tgt_u.L, tgt_u.c):
            raise ValueError("embedding requires identical k, L, c")
        amap = dict(self.atom_map)
        if len(amap) != len(src_u.atoms) or set(amap) != set(src_u.atoms):
            raise ValueError("atom_map must be total on source atoms")
        if len(set(amap.values())) != len(amap):
            raise ValueError("atom_map must be injective")
        if not set(amap.values()) <= set(tgt_u.atoms):
            raise ValueError("atom_map image must lie in the target universe")
        for f in src_u.faces:
            if self.source.h_twist[f] != self.target.h_twist[self.map_face(f)]:
                raise ValueError(f"face coset not preserved at {f}")
        for cell in src_u.cells:
            tcell = self.map_cell(cell)
            for f in src_u.faces_of(cell):
                if self.source.twist_vec(cell, f) != self.target.twist_vec(
                    tcell, self.map_face(f)
                ):
                    raise ValueError(f"parity twist not preserved at ({cell}, {f})")

    @property
    def atom_dict(self) -> dict[int, int]:
        return dict(self.atom_map)

    def map_face(self, face: Face) -> Face:
        amap = dict(self.atom_map)
        return Face.of(amap[a] for a in face.atoms)

    def map_cell(self, cell: Cell) -> Cell:
        amap = dict(self.atom_map)
        return Cell.of(amap[a] for a in cell.atoms)

    def map_torsor_point(self, p: TorsorPoint) -> TorsorPoint:
        """Zero-extend the offset: image coordinates off the face image vanish."""
        tgt = self.target.universe
        support = (self.map_face(w) for w in p.offset.support())
        return TorsorPoint(
            p.level, self.map_face(p.face), Gf2Vec.from_support(tgt.face_family, support)
        )

    def map_coset_point(self, p: CosetPoint) -> CosetPoint:
        vec = Gf2Vec(self.target.universe.level_family, p.vec.mask)
        return CosetPoint(self.map_face(p.face), vec)


def identity_embedding(source: TwistedModel, target: TwistedModel) -> Embedding:
    return Embedding(source, target, tuple((a, a) for a in source.universe.atoms))


def extend_model(
    m: TwistedModel,
    new_atoms: Iterable[int],
    anchor: Mapping[Face, CosetPoint],
) -> tuple[TwistedModel, Embedding]:
    """Enlarge the atom set, keeping the source's predicate behaviour.

    ``anchor`` picks one coset point per old face.  Old cells keep their
    twist vectors; a cell with exactly one old face gets that face's
    anchor vector as its twist there; every other new entry is zero.  Old
    torsor points embed by zero-extending offsets.
    """
    u = m.universe
    new_atoms = sorted(set(new_atoms))
    if set(new_atoms) & set(u.atoms):
        raise ValueError("new atoms must be disjoint from the universe")
    for f in u.faces:
        if f not in anchor:
            raise ValueError(f"anchor missing face {f}")
        p = anchor[f]
        if p.face != f or not m.contains_coset_point(p):
            raise ValueError(f"anchor at {f} is not a point of that face's coset")
    big = Universe(tuple(sorted(set(u.atoms) | set(new_atoms))), u.k, u.L, u.c)
    zero = CutoffCoset(u.L, u.c, Gf2Vec.zero(big.level_family))
    h_twist: dict[Face, CutoffCoset] = {}
    old_atoms = set(u.atoms)
    for f in big.faces:
        if set(f.atoms) <= old_atoms:
            old = m.h_twist[Face(f.atoms)]
            h_twist[f] = CutoffCoset(u.L, u.c, Gf2Vec(big.level_family, old.rep.mask))
        else:
            h_twist[f] = zero
    q_twist: dict[tuple[Cell, Face], Gf2Vec] = {}
    for (cell, f), vec in m.q_twist.items():
        q_twist[(cell, f)] = Gf2Vec(big.level_family, vec.mask)
    for cell in big.cells:
        fresh = [a for a in cell.atoms if a not in old_atoms]
        if len(fresh) != 1:
            continue  # all-old cells copied above; cells with 2+ new atoms stay zero
        old_face = Face(tuple(a for a in cell.atoms if a != fresh[0]))
        vec = anchor[old_face].vec
        if vec.mask:
            q_twist[(cell, old_face)] = Gf2Vec(big.level_family, vec.mask)
    target = TwistedModel(big, h_twist, q_twist)
    return target, identity_embedding(m, target)


# ------------------------------------------------------------ file format


class ModelFormatError(ValueError):
    pass


def print_model(m: TwistedModel) -> str:
    """Canonical text form; parse_model inverts it bit-exactly."""
    u = m.universe
    lines = [f"HSMODEL {u.k} {u.L} {u.c}"]
    lines.append("ATOMS " + " ".join(str(a) for a in u.atoms))
    for f in u.faces:
        lines.append(f"G {f} {m.h_twist[f].rep.bits()}")
    for (cell, f), vec in sorted(m.q_twist.items()):
        if not vec.is_zero():
            lines.append(f"T {cell} {f} {vec.bits()}")
    return "\n".join(lines) + "\n"


def _parse_atom_list(token: str, lineno: int) -> tuple[int, ...]:
    try:
        atoms = tuple(int(t) for t in token.split(","))
    except ValueError as exc:
        raise ModelFormatError(f"line {lineno}: bad atom list {token!r}") from exc
    return atoms


def parse_model(text: str) -> TwistedModel:
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l]
    if not lines:
        raise ModelFormatError("empty model text")
    n0, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "HSMODEL":
        raise ModelFormatError(f"line {n0}: expected 'HSMODEL k L c' header")
    try:
        k, L, c = (int(p) for p in parts[1:])
    except ValueError as exc:
        raise ModelFormatError(f"line {n0}: non-integer header fields") from exc
    if len(lines) < 2:
        raise ModelFormatError("missing ATOMS line")
    n1, atoms_line = lines[1]
    toks = atoms_line.split()
    if not toks or toks[0] != "ATOMS":
        raise ModelFormatError(f"line {n1}: expected ATOMS line")
    try:
        atoms = tuple(int(t) for t in toks[1:])
    except ValueError as exc:
        raise ModelFormatError(f"line {n1}: non-integer atom id") from exc
    try:
        universe = Universe.create(atoms, k, L, c)
    except ValueError as exc:
        raise ModelFormatError(f"line {n1}: {exc}") from exc
    h_twist: dict[Face, CutoffCoset] = {}
    q_twist: dict[tuple[Cell, Face], Gf2Vec] = {}
    for lineno, line in lines[2:]:
        toks = line.split()
        if toks[0] == "G":
            if len(toks) != 3:
                raise ModelFormatError(f"line {lineno}: G line needs face and bits")
            face = Face(_parse_atom_list(toks[1], lineno))
            if not universe.has_face(face):
                raise ModelFormatError(f"line {lineno}: {face} is not a face")
            if face in h_twist:
                raise ModelFormatError(f"line {lineno}: duplicate G line for {face}")
            try:
                rep = Gf2Vec.from_bits(universe.level_family, toks[2])
                h_twist[face] = CutoffCoset(L, c, rep)
            except ValueError as exc:
                raise ModelFormatError(f"line {lineno}: {exc}") from exc
        elif toks[0] == "T":
            if len(toks) != 4:
                raise ModelFormatError(f"line {lineno}: T line needs cell, face, bits")
            cell = Cell(_parse_atom_list(toks[1], lineno))
            face = Face(_parse_atom_list(toks[2], lineno))
            if not universe.has_cell(cell):
                raise ModelFormatError(f"line {lineno}: {cell} is not a cell")
            if face not in universe.faces_of(cell):
                raise ModelFormatError(f"line {lineno}: {face} not a face of {cell}")
            if (cell, face) in q_twist:
                raise ModelFormatError(f"line {lineno}: duplicate T line")
            try:
                vec = Gf2Vec.from_bits(universe.level_family, toks[3])
            except ValueError as exc:
                raise ModelFormatError(f"line {lineno}: {exc}") from exc
            if vec.is_zero():
                raise ModelFormatError(f"line {lineno}: zero T entries are implicit")
            q_twist[(cell, face)] = vec
        else:
            raise ModelFormatError(f"line {lineno}: unknown directive {toks[0]!r}")
    missing = [f for f in universe.faces if f not in h_twist]
    if missing:
        raise ModelFormatError(f"missing G line for face {missing[0]}")
    try:
        return TwistedModel(universe, h_twist, q_twist)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


# ------------------------------------------------------------ axiom checking


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    mode: str  # "exhaustive" or "sampled"
    space: int
    ok: bool
    witness: Optional[str] = None


@dataclass
class AxiomReport:
    checks: list[AxiomCheck]
    bound: int
    samples: int
    seed: int

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_failure(self) -> Optional[AxiomCheck]:
        for c in self.checks:
            if not c.ok:
                return c
        return None

    @property
    def sampled_axioms(self) -> tuple[str, ...]:
        return tuple(c.axiom for c in self.checks if c.mode == "sampled")

    def render(self, fmt: str = "text") -> str:
        if fmt == "machine":
            lines = [f"report=axioms bound={self.bound} samples={self.samples} seed={self.seed}"]
            for c in self.checks:
                line = f"axiom={c.axiom} ok={int(c.ok)} mode={c.mode} space={c.space}"
                if c.witness is not None:
                    line += f" witness={c.witness.replace(' ', '_')}"
                lines.append(line)
            lines.append(f"status={'pass' if self.ok else 'fail'}")
            return "\n".join(lines) + "\n"
        lines = []
        for c in self.checks:
            status = "ok" if c.ok else "FAIL"
            line = f"  {c.axiom:<24} {status:<4} [{c.mode}, space {c.space}]"
            if c.witness is not None:
                line += f" witness: {c.witness}"
            lines.append(line)
        head = "axiom check: pass" if self.ok else "axiom check: FAIL"
        return head + "\n" + "\n".join(lines) + "\n"


def _run_sweep(
    space: int,
    points: Callable[[], Iterator],
    draw: Callable[[random.Random], object],
    test: Callable[[object], Optional[str]],
    bound: int,
    samples: int,
    rng: random.Random,
) -> tuple[str, Optional[str]]:
    """Exhaust the point iterator when the space is small, else sample."""
    if space <= bound:
        for pt in points():
            w = test(pt)
            if w is not None:
                return "exhaustive", w
        return "exhaustive", None
    for _ in range(samples):
        w = test(draw(rng))
        if w is not None:
            return "sampled", w
    return "sampled", None


def check_axioms(
    m: TwistedModel, bound: int = 1 << 16, samples: int = 1000, seed: int = 0
) -> AxiomReport:
    """Verify the theory's sentence list against this model.

    Each named check quantifies over its natural element space, sweeping
    it when it has at most ``bound`` points and drawing ``samples``
    seeded samples otherwise; the report records which mode ran.
    Failures are report content, never exceptions.
    """
    u = m.universe
    faces = u.faces
    K = len(faces)
    cells = u.cells
    Ga = 1 << K
    Ec = 1 << u.c
    fam = u.face_family
    lfam = u.level_family
    checks: list[AxiomCheck] = []

    def run(axiom, space, points, draw, test):
        rng = random.Random(f"{seed}:{axiom}")
        try:
            mode, witness = _run_sweep(space, points, draw, test, bound, samples, rng)
        except Exception as exc:  # corrupted model data; report, never raise
            mode = "exhaustive" if space <= bound else "sampled"
            witness = f"check raised {type(exc).__name__}: {exc}"
        checks.append(AxiomCheck(axiom, mode, space, witness is None, witness))

    def rand_vec(rng):
        return Gf2Vec(fam, rng.getrandbits(K))

    # structure-membership: faces and cells are exactly the k- and
    # (k+1)-subsets, and atom membership agrees with containment
    def _membership_points():
        for f in faces:
            yield ("face", f)
        for cellx in cells:
            yield ("cell", cellx)
        for a in u.atoms:
            for f in faces:
                yield ("in", a, f)

    def _membership_test(pt):
        if pt[0] == "face":
            f = pt[1]
            if len(f.atoms) != u.k or not set(f.atoms) <= set(u.atoms):
                return f"malformed face {f}"
        elif pt[0] == "cell":
            cellx = pt[1]
            if len(cellx.atoms) != u.k + 1 or not set(cellx.atoms) <= set(u.atoms):
                return f"malformed cell {cellx}"
            if set(u.faces_of(cellx)) - set(faces):
                return f"cell {cellx} has a foreign face"
        else:
            _, a, f = pt
            if (a in f) != (a in f.atoms):
                return f"membership mismatch at ({a}, {f})"
        return None

    n_mem = K + len(cells) + len(u.atoms) * K
    if len(faces) != math.comb(len(u.atoms), u.k):
        checks.append(AxiomCheck("structure-membership", "exhaustive", n_mem, False, "face count"))
    else:
        run(
            "structure-membership",
            n_mem,
            _membership_points,
            lambda rng: ("in", rng.choice(u.atoms), rng.choice(faces)),
            _membership_test,
        )

    # structure-sorts: the ground sorts are disjoint and correctly sized
    def _sorts_test(_):
        tagged = (
            {("atom", a) for a in u.atoms}
            | {("face", f) for f in faces}
            | {("level", l) for l in u.levels}
            | {("scalar", b) for b in (0, 1)}
        )
        if len(tagged) != len(u.atoms) + K + u.L + 2:
            return "sort collision"
        return None

    run("structure-sorts", 1, lambda: iter([None]), lambda rng: None, _sorts_test)

    # structure-levels: all level constants present, cutoff within range
    run(
        "structure-levels",
        u.L,
        lambda: iter(u.levels),
        lambda rng: rng.randrange(u.L),
        lambda l: None if 0 <= l < u.L and u.c <= u.L else f"bad level {l}",
    )

    # typing-slots: slot addresses are (level, face); reference points typed
    def _slot_points():
        for l in u.levels:
            for f in faces:
                yield (l, f)

    def _slot_test(pt):
        l, f = pt
        p = m.zero_torsor_point(l, f)
        if p.level != l or p.face != f or not m.contains_torsor_point(p):
            return f"slot ({l}, {f}) reference point mistyped"
        return None

    run(
        "typing-slots",
        u.L * K,
        _slot_points,
        lambda rng: (rng.randrange(u.L), rng.choice(faces)),
        _slot_test,
    )

    # structure-coverage: each face's coset has 2^c points inside its coset,
    # each slot's torsor is a full group-sized orbit (checked on a shift)
    def _coverage_points():
        for f in faces:
            yield ("face", f)
        for l in u.levels:
            for f in faces:
                yield ("slot", l, f)

    def _coverage_test(pt):
        if pt[0] == "face":
            f = pt[1]
            pts = list(m.coset_points(f))
            if len(set(pts)) != Ec:
                return f"coset at {f} has wrong size"
            if any(not m.contains_coset_point(p) for p in pts):
                return f"coset point at {f} outside its coset"
        else:
            _, l, f = pt
            if not m.contains_torsor_point(
                TorsorPoint(l, f, Gf2Vec(fam, (1 << K) - 1))
            ):
                return f"full-support offset rejected at ({l}, {f})"
        return None

    run(
        "structure-coverage",
        K * Ec + u.L * K,
        _coverage_points,
        lambda rng: ("slot", rng.randrange(u.L), rng.choice(faces)),
        _coverage_test,
    )

    # typing-face-projection: coordinate extraction matches support
    def _pi_points():
        for f in faces:
            for mask in range(Ga):
                yield (f, Gf2Vec(fam, mask))

    def _pi_test(pt):
        f, x = pt
        if x.bit(f) != int(f in x.support()):
            return f"projection mismatch at ({f}, {x.bits()})"
        return None

    run(
        "typing-face-projection",
        K * Ga,
        _pi_points,
        lambda rng: (rng.choice(faces), rand_vec(rng)),
        _pi_test,
    )

    # typing-level-projection: level-group vectors vanish at and above the cutoff
    def _rho_points():
        for l in u.levels:
            for x in m.level_group_vectors():
                yield (l, x)

    def _rho_test(pt):
        l, x = pt
        b = x.bit_at(l)
        if l >= u.c and b:
            return f"level-group vector {x.bits()} supported at {l} >= cutoff"
        return None

    run(
        "typing-level-projection",
        u.L * Ec,
        _rho_points,
        lambda rng: (rng.randrange(u.L), Gf2Vec(lfam, rng.getrandbits(u.c))),
        _rho_test,
    )

    # typing-slot-action: acting on a slot's reference point stays in the slot
    def _gact_points():
        for l in u.levels:
            for f in faces:
                for mask in range(Ga):
                    yield (l, f, Gf2Vec(fam, mask))

    def _gact_test(pt):
        l, f, a = pt
        y = TorsorPoint(l, f, m.zero_torsor_point(l, f).offset + a)
        if not m.contains_torsor_point(y):
            return f"action left the slot at ({l}, {f})"
        return None

    run(
        "typing-slot-action",
        u.L * K * Ga,
        _gact_points,
        lambda rng: (rng.randrange(u.L), rng.choice(faces), rand_vec(rng)),
        _gact_test,
    )

    # typing-face-action: the cutoff subgroup maps each coset into itself
    def _hact_points():
        for f in faces:
            for p in m.coset_points(f):
                for b in m.level_group_vectors():
                    yield (f, p, b)

    def _hact_test(pt):
        f, p, b = pt
        q = CosetPoint(f, p.vec + b)
        if not m.contains_coset_point(q):
            return f"face action left the coset at {f}"
        return None

    def _hact_draw(rng):
        f = rng.choice(faces)
        return (f, m.random_coset_point(f, rng), Gf2Vec(lfam, rng.getrandbits(u.c)))

    run("typing-face-action", K * Ec * Ec, _hact_points, _hact_draw, _hact_test)

    # group-scalars: the two-element group
    def _scalar_test(pt):
        a, b, c0 = pt
        if (a ^ b) ^ c0 != a ^ (b ^ c0) or a ^ b != b ^ a or a ^ a != 0 or a ^ 0 != a:
            return f"scalar law broken at {pt}"
        return None

    run(
        "group-scalars",
        8,
        lambda: itertools.product((0, 1), repeat=3),
        lambda rng: tuple(rng.randrange(2) for _ in range(3)),
        _scalar_test,
    )

    # group-faces: identity, self-inverse, commutativity, projection
    # linearity and containment of the coordinate basis
    def _gfaces_points():
        for mask in range(Ga):
            yield ("unary", Gf2Vec(fam, mask))
        for m1 in range(Ga):
            for m2 in range(Ga):
                yield ("pair", Gf2Vec(fam, m1), Gf2Vec(fam, m2))
        for f in faces:
            for m1 in range(Ga):
                for m2 in range(Ga):
                    yield ("proj", f, Gf2Vec(fam, m1), Gf2Vec(fam, m2))
        for i in range(K):
            yield ("basis", i)

    def _gfaces_test(pt):
        if pt[0] == "unary":
            x = pt[1]
            zero = Gf2Vec.zero(fam)
            if x + zero != x or not (x + x).is_zero():
                return f"identity or self-inverse broken at {x.bits()}"
        elif pt[0] == "pair":
            _, x, y = pt
            if x + y != y + x:
                return "commutativity broken"
        elif pt[0] == "proj":
            _, f, x, y = pt
            if (x + y).bit(f) != x.bit(f) ^ y.bit(f):
                return f"projection not additive at {f}"
        else:
            if Gf2Vec(fam, 1 << pt[1]).weight() != 1:
                return "coordinate basis vector malformed"
        return None

    def _gfaces_draw(rng):
        kind = rng.choice(("unary", "pair", "proj"))
        if kind == "unary":
            return ("unary", rand_vec(rng))
        if kind == "pair":
            return ("pair", rand_vec(rng), rand_vec(rng))
        return ("proj", rng.choice(faces), rand_vec(rng), rand_vec(rng))

    run(
        "group-faces",
        Ga + Ga * Ga + K * Ga * Ga + K,
        _gfaces_points,
        _gfaces_draw,
        _gfaces_test,
    )

    # group-levels: cutoff subgroup closed under addition, projections additive
    def _glevels_points():
        for l in u.levels:
            for x in m.level_group_vectors():
                for y in m.level_group_vectors():
                    yield (l, x, y)

    def _glevels_test(pt):
        l, x, y = pt
        z = x + y
        if z.mask >> u.c:
            return "cutoff subgroup not closed"
        if z.bit_at(l) != x.bit_at(l) ^ y.bit_at(l):
            return f"level projection not additive at {l}"
        return None

    run(
        "group-levels",
        u.L * Ec * Ec,
        _glevels_points,
        lambda rng: (
            rng.randrange(u.L),
            Gf2Vec(lfam, rng.getrandbits(u.c)),
            Gf2Vec(lfam, rng.getrandbits(u.c)),
        ),
        _glevels_test,
    )

    # torsor-slots: the face group acts freely and transitively on each slot;
    # the action is symmetric and composes (composition checked against the
    # coordinate basis, which generates)
    def _tslots_points():
        for l in u.levels:
            for f in faces:
                for mask in range(Ga):
                    yield ("orbit", l, f, Gf2Vec(fam, mask))
                for mask in range(Ga):
                    yield ("sym", l, f, Gf2Vec(fam, mask))
                for i in range(K):
                    for mask in range(Ga):
                        yield ("comp", l, f, Gf2Vec(fam, 1 << i), Gf2Vec(fam, mask))

    def _tslots_test(pt):
        kind, l, f = pt[0], pt[1], pt[2]
        base = m.zero_torsor_point(l, f)
        if kind == "orbit":
            a = pt[3]
            y = TorsorPoint(l, f, base.offset + a)
            back = y.offset + base.offset
            if back != a:
                return f"action not free at ({l}, {f})"
        elif kind == "sym":
            a = pt[3]
            y = TorsorPoint(l, f, base.offset + a)
            if base.offset + y.offset != a:  # displacement is symmetric
                return f"displacement asymmetry at ({l}, {f})"
        else:
            a, b = pt[3], pt[4]
            via = (base.offset + a) + b
            direct = base.offset + (a + b)
            if via != direct:
                return f"action does not compose at ({l}, {f})"
        return None

    def _tslots_draw(rng):
        l, f = rng.randrange(u.L), rng.choice(faces)
        kind = rng.choice(("orbit", "sym", "comp"))
        if kind == "comp":
            return (kind, l, f, Gf2Vec(fam, 1 << rng.randrange(K)), rand_vec(rng))
        return (kind, l, f, rand_vec(rng))

    run(
        "torsor-slots",
        u.L * K * (Ga + Ga + K * Ga),
        _tslots_points,
        _tslots_draw,
        _tslots_test,
    )

    # torsor-faces: the cutoff subgroup acts freely and transitively on each
    # face's coset
    def _tfaces_points():
        for f in faces:
            for b_mask in range(Ec):
                yield (f, Gf2Vec(lfam, b_mask))

    def _tfaces_test(pt):
        f, b = pt
        rep = m.coset_rep_point(f)
        q = CosetPoint(f, rep.vec + b)
        if not m.contains_coset_point(q):
            return f"coset action left the coset at {f}"
        if (q.vec + rep.vec) != b:
            return f"coset action not free at {f}"
        return None

    run(
        "torsor-faces",
        K * Ec,
        _tfaces_points,
        lambda rng: (rng.choice(faces), Gf2Vec(lfam, rng.getrandbits(u.c))),
        _tfaces_test,
    )

    # parity-shape: twist tables well formed; the predicate only accepts
    # argument tuples sitting on a cell and ignores argument order
    def _shape_points():
        yield ("tables",)
        for cellx in cells:
            cfs = u.faces_of(cellx)
            for h_face in cfs:
                for l in u.levels:
                    for bits in range(1 << u.k):
                        yield ("perm", cellx, h_face, l, bits)

    def _shape_test(pt):
        if pt[0] == "tables":
            for f in faces:
                if f not in m.h_twist:
                    return f"h_twist not total, missing {f}"
            for (cellx, f), vec in m.q_twist.items():
                if not u.has_cell(cellx):
                    return f"q_twist keyed by non-cell {cellx}"
                if f not in u.faces_of(cellx):
                    return f"q_twist key ({cellx}, {f}) has a face outside the cell"
                if vec.keys != lfam:
                    return f"q_twist value at ({cellx}, {f}) mis-indexed"
            return None
        _, cellx, h_face, l, bits = pt
        cfs = u.faces_of(cellx)
        g_faces = [f for f in cfs if f != h_face]
        pos = u.face_index[h_face]
        args = []
        for i, f in enumerate(g_faces):
            mask = ((bits >> i) & 1) << pos
            args.append(TorsorPoint(l, f, Gf2Vec(fam, mask)))
        h_arg = m.coset_rep_point(h_face)
        baseline = q_holds_seq(m, l, args, h_arg)
        for perm in itertools.permutations(args):
            if q_holds_seq(m, l, list(perm), h_arg) != baseline:
                return f"argument order changed the verdict at ({l}, {cellx})"
        return None

    def _shape_draw(rng):
        cellx = rng.choice(cells)
        return (
            "perm",
            cellx,
            rng.choice(u.faces_of(cellx)),
            rng.randrange(u.L),
            rng.getrandbits(u.k),
        )

    shape_space = 1 + len(cells) * (u.k + 1) * u.L * (1 << u.k)
    run("parity-shape", shape_space, _shape_points, _shape_draw, _shape_test)

    # parity-coherence: replacing a single argument moves the verdict by
    # exactly the matching projection bit.  The verdict is affine in the
    # argument bits, so the base sweep over the h-face coordinates plus
    # every basis direction decides the whole space.
    def _coherence_points():
        for cellx in cells:
            cfs = u.faces_of(cellx)
            for h_face in cfs:
                for l in u.levels:
                    h_choices = 2 if l < u.c else 1
                    for bits in range(1 << u.k):
                        for h_low in range(h_choices):
                            yield (cellx, h_face, l, bits, h_low)

    def _coherence_test(pt):
        # base point and the h-face direction go through the public
        # evaluator; remaining basis directions use the fast parity path
        # (tests pin fast-path agreement with q_holds separately)
        cellx, h_face, l, bits, h_low = pt
        cfs = u.faces_of(cellx)
        g_faces = [f for f in cfs if f != h_face]
        pos = u.face_index[h_face]
        args = {
            f: TorsorPoint(l, f, Gf2Vec(fam, ((bits >> i) & 1) << pos))
            for i, f in enumerate(g_faces)
        }
        h_vec = m.h_twist[h_face].rep
        if h_low and l < u.c:
            h_vec = h_vec + Gf2Vec(lfam, 1 << l)
        h_arg = CosetPoint(h_face, h_vec)
        base = q_holds(m, l, cellx, h_face, args, h_arg)
        g_masks = [args[f].offset.mask for f in g_faces]
        for slot in range(len(g_faces)):
            moved_pub = dict(args)
            moved_pub[g_faces[slot]] = TorsorPoint(
                l, g_faces[slot], args[g_faces[slot]].offset + Gf2Vec(fam, 1 << pos)
            )
            if q_holds(m, l, cellx, h_face, moved_pub, h_arg) == base:
                return f"replacement at the slot face did not flip at ({l}, {cellx})"
            for i in range(K):
                moved = list(g_masks)
                moved[slot] ^= 1 << i
                flipped = _verdict_fast(m, l, pos, cellx, h_face, moved, h_arg.vec.mask)
                if flipped != (base ^ (i == pos)):
                    return f"replacement law broken at ({l}, {cellx}, {g_faces[slot]})"
        for j in range(u.c):
            h_mask = h_arg.vec.mask ^ (1 << j)
            flipped = _verdict_fast(m, l, pos, cellx, h_face, g_masks, h_mask)
            if flipped != (base ^ (j == l)):
                return f"coset replacement law broken at ({l}, {cellx})"
        return None

    def _coherence_draw(rng):
        cellx = rng.choice(cells)
        h_face = rng.choice(u.faces_of(cellx))
        l = rng.randrange(u.L)
        return (cellx, h_face, l, rng.getrandbits(u.k), rng.getrandbits(1))

    coh_space = len(cells) * (u.k + 1) * u.L * (1 << u.k) * 2 * (u.k * K + u.c)
    run("parity-coherence", coh_space, _coherence_points, _coherence_draw, _coherence_test)

    # parity-extension: a single new point can satisfy any finite batch of
    # constraints whose cells share its slot face; the witness is built by
    # pinning one offset coordinate per constraint
    def _extension_instances():
        for l in u.levels:
            for f in faces:
                outside = [a for a in u.atoms if a not in f.atoms]
                for r in range(1, len(outside) + 1):
                    for chosen in itertools.combinations(outside, r):
                        size = 1 << (len(chosen) * u.k)
                        for argbits in range(size):
                            yield (l, f, chosen, argbits)

    def _extension_count():
        total = 0
        for f in faces:
            outside = len(u.atoms) - u.k
            for r in range(1, outside + 1):
                total += math.comb(outside, r) * (1 << (r * u.k))
        return total * u.L

    def _extension_test(pt):
        l, f, chosen, argbits = pt
        batch = []
        bit_cursor = 0
        for a in chosen:
            cellx = Cell.of(f.atoms + (a,))
            cfs = u.faces_of(cellx)
            h_face = next(x for x in cfs if a in x)  # a face through the new atom
            others = [x for x in cfs if x not in (f, h_face)]
            pos = u.face_index[h_face]
            g_args = {}
            for x in others:
                bit = (argbits >> bit_cursor) & 1
                bit_cursor += 1
                g_args[x] = TorsorPoint(l, x, Gf2Vec(fam, bit << pos))
            h_low = (argbits >> bit_cursor) & 1
            bit_cursor += 1
            h_vec = m.h_twist[h_face].rep
            if l < u.c and h_low:
                h_vec = h_vec + Gf2Vec(lfam, 1 << l)
            batch.append((cellx, h_face, g_args, CosetPoint(h_face, h_vec)))
        # build the witness: pin the offset at each constraint's h-face
        mask = 0
        for cellx, h_face, g_args, h_arg in batch:
            pos = u.face_index[h_face]
            need = h_arg.vec.bit_at(l) ^ m.twist_bit(cellx, h_face, l)
            for p in g_args.values():
                need ^= (p.offset.mask >> pos) & 1
            mask |= need << pos
        witness = TorsorPoint(l, f, Gf2Vec(fam, mask))
        for cellx, h_face, g_args, h_arg in batch:
            full = dict(g_args)
            full[f] = witness
            if not q_holds(m, l, cellx, h_face, full, h_arg):
                return f"extension witness failed at ({l}, {cellx})"
        return None

    def _extension_draw(rng):
        f = rng.choice(faces)
        outside = [a for a in u.atoms if a not in f.atoms]
        r = rng.randrange(1, len(outside) + 1)
        chosen = tuple(sorted(rng.sample(outside, r)))
        return (
            rng.randrange(u.L),
            f,
            chosen,
            rng.getrandbits(len(chosen) * u.k),
        )

    run(
        "parity-extension",
        _extension_count(),
        _extension_instances,
        _extension_draw,
        _extension_test,
    )

    return AxiomReport(checks, bound, samples, seed)

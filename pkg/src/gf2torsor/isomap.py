"""Isomorphisms between models sharing a universe, built from solutions.

Two models over the same universe share their ground data (atoms, faces,
levels, both groups); only the twist tables may differ.  Any pair of
total solutions induces a sort-preserving bijection that is the identity
on the shared part: each slot and each face coset is translated by the
difference of the two base points.  The verifier checks that claim
predicate by predicate.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .gf2 import Gf2Vec
from .model import CosetPoint, TorsorPoint, TwistedModel, _run_sweep, _verdict_fast, q_holds
from .solve import Solution, is_solution

__all__ = [
    "SharedBase",
    "IsoMap",
    "IsoCheck",
    "IsoReport",
    "build_iso",
    "verify_iso",
]


@dataclass(frozen=True)
class SharedBase:
    """Two models over one universe; the ground structure is literally shared."""

    source: TwistedModel
    target: TwistedModel

    def __post_init__(self) -> None:
        if self.source.universe != self.target.universe:
            raise ValueError("shared base requires identical universes")


@dataclass(frozen=True)
class IsoMap:
    """Solution-induced isomorphism; identity on everything but the torsors.

    A point with offset a from the source base point maps to the point
    with offset a from the target base point, and likewise for coset
    points along the level-group action.
    """

    base: SharedBase
    f_source: Solution
    f_target: Solution

    def map_torsor_point(self, p: TorsorPoint) -> TorsorPoint:
        anchor = self.f_source.g_part[(p.level, p.face)]
        image = self.f_target.g_part[(p.level, p.face)]
        return TorsorPoint(p.level, p.face, image.offset + (p.offset + anchor.offset))

    def map_coset_point(self, p: CosetPoint) -> CosetPoint:
        anchor = self.f_source.h_part[p.face]
        image = self.f_target.h_part[p.face]
        return CosetPoint(p.face, image.vec + (p.vec + anchor.vec))

    def inverse(self) -> IsoMap:
        return IsoMap(
            SharedBase(self.base.target, self.base.source), self.f_target, self.f_source
        )


def build_iso(pid: SharedBase, f_m: Solution, f_n: Solution) -> IsoMap:
    """Isomorphism sending the first solution's base points to the second's."""
    u = pid.source.universe
    for name, model, f in (("source", pid.source, f_m), ("target", pid.target, f_n)):
        if not f.is_total_on(u, u.atoms):
            raise ValueError(f"{name} solution is not total")
        verdict = is_solution(model, f)
        if not verdict:
            raise ValueError(f"{name} solution is invalid: {verdict.violation}")
    return IsoMap(pid, f_m, f_n)


@dataclass(frozen=True)
class IsoCheck:
    check: str
    mode: str
    space: int
    ok: bool
    witness: Optional[str] = None


@dataclass
class IsoReport:
    checks: list[IsoCheck]
    bound: int
    samples: int
    seed: int

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_failure(self) -> Optional[IsoCheck]:
        for c in self.checks:
            if not c.ok:
                return c
        return None

    def render(self, fmt: str = "text") -> str:
        if fmt == "machine":
            lines = [f"report=iso bound={self.bound} samples={self.samples} seed={self.seed}"]
            for c in self.checks:
                line = f"check={c.check} ok={int(c.ok)} mode={c.mode} space={c.space}"
                if c.witness is not None:
                    line += f" witness={c.witness.replace(' ', '_')}"
                lines.append(line)
            lines.append(f"status={'pass' if self.ok else 'fail'}")
            return "\n".join(lines) + "\n"
        lines = []
        for c in self.checks:
            status = "ok" if c.ok else "FAIL"
            line = f"  {c.check:<24} {status:<4} [{c.mode}, space {c.space}]"
            if c.witness is not None:
                line += f" witness: {c.witness}"
            lines.append(line)
        head = "iso check: pass" if self.ok else "iso check: FAIL"
        return head + "\n" + "\n".join(lines) + "\n"


def verify_iso(
    iso: IsoMap, bound: int = 1 << 16, samples: int = 1000, seed: int = 0
) -> IsoReport:
    """Check the map sort by sort and predicate by predicate.

    Every check quantifies over a structured space (base points, basis
    directions and argument quotients, which decide the full space for
    maps affine over GF(2)); spaces above the bound are sampled instead
    and the report says so.
    """
    src, tgt = iso.base.source, iso.base.target
    u = src.universe
    faces = u.faces
    K = len(faces)
    fam = u.face_family
    lfam = u.level_family
    Ec = 1 << u.c
    checks: list[IsoCheck] = []

    def run(check, space, points, draw, test):
        rng = random.Random(f"{seed}:{check}")
        try:
            mode, witness = _run_sweep(space, points, draw, test, bound, samples, rng)
        except Exception as exc:  # a broken map is a finding, not a crash
            mode = "exhaustive" if space <= bound else "sampled"
            witness = f"check raised {type(exc).__name__}: {exc}"
        checks.append(IsoCheck(check, mode, space, witness is None, witness))

    # base-identity: the ground structure really is shared
    def _base_test(_):
        if src.universe != tgt.universe:
            return "universes differ"
        if fam != tgt.universe.face_family or lfam != tgt.universe.level_family:
            return "index families differ"
        return None

    run("base-identity", 1, lambda: iter([None]), lambda rng: None, _base_test)

    # slot-translation: on each slot the map is translation by the base
    # point difference; sweep base, basis directions and the full-ones
    # point, which decides affine maps entirely
    def _slot_points():
        for level in u.levels:
            for face in faces:
                for mask in [0, (1 << K) - 1] + [1 << i for i in range(K)]:
                    yield (level, face, mask)

    def _slot_test(pt):
        level, face, mask = pt
        anchor = iso.f_source.g_part[(level, face)]
        x = TorsorPoint(level, face, anchor.offset + Gf2Vec(fam, mask))
        y = iso.map_torsor_point(x)
        if (y.level, y.face) != (level, face):
            return f"slot address moved at ({level}, {face})"
        d = iso.f_target.g_part[(level, face)].offset + anchor.offset
        if y.offset + x.offset != d:
            return f"not a translation on slot ({level}, {face})"
        return None

    run(
        "slot-translation",
        u.L * K * (K + 2),
        _slot_points,
        lambda rng: (rng.randrange(u.L), rng.choice(faces), rng.getrandbits(K)),
        _slot_test,
    )

    # slot-action: the map commutes with the face-group action
    def _action_points():
        for level in u.levels:
            for face in faces:
                for i in range(K + 1):
                    yield (level, face, (1 << i) - 1 if i == K else 1 << i)

    def _action_test(pt):
        level, face, mask = pt
        a = Gf2Vec(fam, mask)
        x = iso.f_source.g_part[(level, face)]
        moved = iso.map_torsor_point(TorsorPoint(level, face, x.offset + a))
        still = iso.map_torsor_point(x)
        if moved.offset != still.offset + a:
            return f"action not preserved at ({level}, {face})"
        return None

    run(
        "slot-action",
        u.L * K * (K + 1),
        _action_points,
        lambda rng: (rng.randrange(u.L), rng.choice(faces), rng.getrandbits(K)),
        _action_test,
    )

    # slot-bijectivity: the inverse map returns every swept point
    inv = iso.inverse()

    def _biject_test(pt):
        level, face, mask = pt
        x = TorsorPoint(level, face, Gf2Vec(fam, mask))
        back = inv.map_torsor_point(iso.map_torsor_point(x))
        if back != x:
            return f"inverse round trip failed at ({level}, {face})"
        return None

    run(
        "slot-bijectivity",
        u.L * K * (K + 2),
        _slot_points,
        lambda rng: (rng.randrange(u.L), rng.choice(faces), rng.getrandbits(K)),
        _biject_test,
    )

    # face-cosets: each face's coset maps onto the target coset by a
    # translation, bijectively; the cutoff group is small, sweep it whole
    def _face_points():
        for face in faces:
            for low in range(Ec):
                yield (face, low)

    def _face_test(pt):
        face, low = pt
        x = CosetPoint(face, src.h_twist[face].rep + Gf2Vec(lfam, low))
        y = iso.map_coset_point(x)
        if y.face != face:
            return f"face address moved at {face}"
        if not tgt.contains_coset_point(y):
            return f"image left the target coset at {face}"
        d = iso.f_target.h_part[face].vec + iso.f_source.h_part[face].vec
        if y.vec + x.vec != d:
            return f"not a translation on the coset at {face}"
        if inv.map_coset_point(y) != x:
            return f"inverse round trip failed at {face}"
        return None

    run(
        "face-cosets",
        K * Ec,
        _face_points,
        lambda rng: (rng.choice(faces), rng.getrandbits(u.c)),
        _face_test,
    )

    # face-action: the cutoff-group action commutes with the map
    def _hact_points():
        for face in faces:
            for j in range(u.c):
                yield (face, j)

    def _hact_test(pt):
        face, j = pt
        b = Gf2Vec(lfam, 1 << j)
        x = iso.f_source.h_part[face]
        moved = iso.map_coset_point(CosetPoint(face, x.vec + b))
        still = iso.map_coset_point(x)
        if moved.vec != still.vec + b:
            return f"coset action not preserved at {face}"
        return None

    run(
        "face-action",
        K * u.c,
        _hact_points,
        lambda rng: (rng.choice(faces), rng.randrange(u.c)),
        _hact_test,
    )

    # parity preservation, both directions: verdicts agree on the argument
    # quotient at each constraint, and stay equal along every basis move
    def _parity_points(which):
        def gen():
            for cell in u.cells:
                for h_face in u.faces_of(cell):
                    for level in u.levels:
                        for bits in range(1 << u.k):
                            for low in range(Ec):
                                yield (which, cell, h_face, level, bits, low)

        return gen

    def _parity_test(pt):
        which, cell, h_face, level, bits, low = pt
        fwd = iso if which == "forward" else inv
        a_model = fwd.base.source
        b_model = fwd.base.target
        g_faces = [x for x in u.faces_of(cell) if x != h_face]
        pos = u.face_index[h_face]
        args = {}
        for i, x in enumerate(g_faces):
            base_pt = fwd.f_source.g_part[(level, x)]
            delta = Gf2Vec(fam, ((bits >> i) & 1) << pos)
            args[x] = TorsorPoint(level, x, base_pt.offset + delta)
        h_arg = CosetPoint(
            h_face, fwd.f_source.h_part[h_face].vec + Gf2Vec(lfam, low)
        )
        mapped = {x: fwd.map_torsor_point(p) for x, p in args.items()}
        h_mapped = fwd.map_coset_point(h_arg)
        va = q_holds(a_model, level, cell, h_face, args, h_arg)
        vb = q_holds(b_model, level, cell, h_face, mapped, h_mapped)
        if va != vb:
            return f"parity verdict changed at ({level}, {cell}, {h_face})"
        # basis moves: the two sides must keep agreeing in every direction
        a_masks = [args[x].offset.mask for x in g_faces]
        b_masks = [mapped[x].offset.mask for x in g_faces]
        for slot in range(len(g_faces)):
            for i in range(K):
                fa = _verdict_fast(
                    a_model, level, pos, cell, h_face,
                    [mk ^ ((1 << i) if j == slot else 0) for j, mk in enumerate(a_masks)],
                    h_arg.vec.mask,
                )
                fb = _verdict_fast(
                    b_model, level, pos, cell, h_face,
                    [mk ^ ((1 << i) if j == slot else 0) for j, mk in enumerate(b_masks)],
                    h_mapped.vec.mask,
                )
                if fa != fb:
                    return f"parity agreement broke along a basis move at ({level}, {cell})"
        for j in range(u.c):
            fa = _verdict_fast(
                a_model, level, pos, cell, h_face, a_masks, h_arg.vec.mask ^ (1 << j)
            )
            fb = _verdict_fast(
                b_model, level, pos, cell, h_face, b_masks, h_mapped.vec.mask ^ (1 << j)
            )
            if fa != fb:
                return f"parity agreement broke along a coset move at ({level}, {cell})"
        return None

    parity_space = len(u.cells) * (u.k + 1) * u.L * (1 << u.k) * Ec * (1 + u.k * K + u.c)

    def _parity_draw(which):
        def draw(rng):
            cell = rng.choice(u.cells)
            return (
                which,
                cell,
                rng.choice(u.faces_of(cell)),
                rng.randrange(u.L),
                rng.getrandbits(u.k),
                rng.getrandbits(u.c),
            )

        return draw

    run(
        "parity-forward",
        parity_space,
        _parity_points("forward"),
        _parity_draw("forward"),
        _parity_test,
    )
    run(
        "parity-backward",
        parity_space,
        _parity_points("backward"),
        _parity_draw("backward"),
        _parity_test,
    )

    return IsoReport(checks, bound, samples, seed)

"""Exact GF(2) linear algebra over arbitrary finite index families.

Vectors are integer bitmasks addressed through an ordered tuple of keys,
so one type serves level-indexed vectors, face-indexed vectors and bare
solver unknowns.  Cosets of the cutoff subgroup (vectors supported below
a fixed position) carry a canonical representative and compare
bit-exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Optional, Sequence

__all__ = [
    "Gf2Vec",
    "Gf2System",
    "CutoffCoset",
    "solve_linear",
    "brute_force_solve",
    "coset_of",
    "BRUTE_FORCE_VAR_LIMIT",
]

# Exhaustive assignment search is the independent oracle for solve_linear;
# it must stay affordable, hence the hard variable cap.
BRUTE_FORCE_VAR_LIMIT = 24


@dataclass(frozen=True)
class Gf2Vec:
    """GF(2) vector indexed by an ordered family of hashable keys.

    Bit i of ``mask`` is the coordinate at ``keys[i]``.  Addition is xor
    and requires literally the same key family.
    """

    keys: tuple[Hashable, ...]
    mask: int = 0

    def __post_init__(self) -> None:
        if self.mask < 0:
            raise ValueError("mask must be non-negative")
        if self.mask >> len(self.keys):
            raise ValueError(
                f"mask {self.mask:#x} has bits beyond the {len(self.keys)} keys"
            )

    @staticmethod
    def zero(keys: Sequence[Hashable]) -> "Gf2Vec":
        return Gf2Vec(tuple(keys), 0)

    @staticmethod
    def from_support(keys: Sequence[Hashable], support) -> "Gf2Vec":
        keys = tuple(keys)
        pos = {k: i for i, k in enumerate(keys)}
        mask = 0
        for k in support:
            mask |= 1 << pos[k]
        return Gf2Vec(keys, mask)

    @staticmethod
    def from_bits(keys: Sequence[Hashable], bits: str) -> "Gf2Vec":
        keys = tuple(keys)
        if len(bits) != len(keys):
            raise ValueError(f"expected {len(keys)} bits, got {len(bits)}")
        mask = 0
        for i, ch in enumerate(bits):
            if ch == "1":
                mask |= 1 << i
            elif ch != "0":
                raise ValueError(f"bad bit character {ch!r}")
        return Gf2Vec(keys, mask)

    def bit(self, key: Hashable) -> int:
        return (self.mask >> self.keys.index(key)) & 1

    def bit_at(self, pos: int) -> int:
        if not 0 <= pos < len(self.keys):
            raise ValueError(f"position {pos} out of range")
        return (self.mask >> pos) & 1

    def bits(self) -> str:
        return "".join(str((self.mask >> i) & 1) for i in range(len(self.keys)))

    def support(self) -> tuple[Hashable, ...]:
        return tuple(k for i, k in enumerate(self.keys) if (self.mask >> i) & 1)

    def weight(self) -> int:
        return self.mask.bit_count()

    def is_zero(self) -> bool:
        return self.mask == 0

    def __add__(self, other: "Gf2Vec") -> "Gf2Vec":
        if self.keys is not other.keys and self.keys != other.keys:
            raise ValueError("cannot add vectors over different key families")
        return Gf2Vec(self.keys, self.mask ^ other.mask)

    __xor__ = __add__

    def __len__(self) -> int:
        return len(self.keys)


def vec_add(a: Gf2Vec, b: Gf2Vec) -> Gf2Vec:
    """Coordinatewise xor; errors on mismatched key families."""
    return a + b


@dataclass(frozen=True)
class Gf2System:
    """Linear system over GF(2): each row is (variable indices, rhs bit)."""

    num_vars: int
    rows: tuple[tuple[tuple[int, ...], int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for variables, rhs in self.rows:
            if rhs not in (0, 1):
                raise ValueError(f"rhs must be 0 or 1, got {rhs}")
            for v in variables:
                if not 0 <= v < self.num_vars:
                    raise ValueError(f"variable index {v} out of range")

    def row_masks(self) -> list[tuple[int, int]]:
        out = []
        for variables, rhs in self.rows:
            m = 0
            for v in variables:
                m ^= 1 << v  # repeated index cancels, as xor should
            out.append((m, rhs))
        return out

    def satisfies(self, assignment: Gf2Vec) -> bool:
        if len(assignment) != self.num_vars:
            raise ValueError("assignment length does not match num_vars")
        a = assignment.mask
        return all((m & a).bit_count() & 1 == rhs for m, rhs in self.row_masks())


def solve_linear(system: Gf2System) -> Optional[Gf2Vec]:
    """Gaussian elimination over GF(2).

    Returns the canonical solution with every free variable set to 0, or
    None when the system is inconsistent (a reduced row reads 0 = 1).
    """
    n = system.num_vars
    rhs_bit = 1 << n
    pivots: dict[int, int] = {}  # column -> row mask (vars | rhs<<n)
    for m, rhs in system.row_masks():
        row = m | (rhs_bit if rhs else 0)
        for col, prow in pivots.items():
            if (row >> col) & 1:
                row ^= prow
        vars_part = row & (rhs_bit - 1)
        if vars_part == 0:
            if row:  # [0 ... 0 | 1]
                return None
            continue
        col = (vars_part & -vars_part).bit_length() - 1
        for other_col in list(pivots):
            if (pivots[other_col] >> col) & 1:
                pivots[other_col] ^= row
        pivots[col] = row
    mask = 0
    for col, row in pivots.items():
        # after full reduction the row is pivot column + free columns only,
        # so with free variables at 0 the pivot value is the rhs bit
        if row >> n:
            mask |= 1 << col
    return Gf2Vec(tuple(range(n)), mask)


def brute_force_solve(
    system: Gf2System, limit: int = BRUTE_FORCE_VAR_LIMIT
) -> Optional[Gf2Vec]:
    """Exhaustive assignment search, independent of solve_linear.

    Tries assignments in increasing mask order and returns the first
    satisfying one, so the result is deterministic.  Refuses systems with
    more than ``limit`` variables.
    """
    n = system.num_vars
    if n > limit:
        raise ValueError(f"brute force refused: {n} variables exceeds limit {limit}")
    masks = system.row_masks()
    keys = tuple(range(n))
    for assignment in range(1 << n):
        if all((m & assignment).bit_count() & 1 == rhs for m, rhs in masks):
            return Gf2Vec(keys, assignment)
    return None


@dataclass(frozen=True)
class CutoffCoset:
    """Coset of the cutoff subgroup inside length-``length`` vectors.

    The cutoff subgroup consists of all vectors supported strictly below
    ``cutoff``; the stored representative has those positions zeroed, so
    equal cosets compare equal bit-exactly.
    """

    length: int
    cutoff: int
    rep: Gf2Vec

    def __post_init__(self) -> None:
        if not 0 < self.cutoff <= self.length:
            raise ValueError(f"need 0 < cutoff <= length, got {self.cutoff}, {self.length}")
        if self.rep.keys != tuple(range(self.length)):
            raise ValueError("representative must be indexed by 0..length-1")
        if self.rep.mask & ((1 << self.cutoff) - 1):
            raise ValueError("representative must vanish below the cutoff")

    def contains(self, v: Gf2Vec) -> bool:
        if v.keys != self.rep.keys:
            return False
        return (v.mask ^ self.rep.mask) < (1 << self.cutoff)

    def members(self) -> Iterator[Gf2Vec]:
        """All 2^cutoff members, representative first."""
        for low in range(1 << self.cutoff):
            yield Gf2Vec(self.rep.keys, self.rep.mask | low)

    def size(self) -> int:
        return 1 << self.cutoff


def coset_of(v: Gf2Vec, cutoff: int) -> CutoffCoset:
    """Coset of the cutoff subgroup containing v.

    Canonicalizes by zeroing every coordinate below the cutoff; constant
    on cutoff-subgroup orbits and injective on canonical representatives.
    """
    length = len(v.keys)
    if v.keys != tuple(range(length)):
        raise ValueError("coset_of expects a vector indexed by 0..L-1")
    if not 0 < cutoff <= length:
        raise ValueError(f"need 0 < cutoff <= length, got {cutoff}, {length}")
    rep = Gf2Vec(v.keys, v.mask & ~((1 << cutoff) - 1))
    return CutoffCoset(length, cutoff, rep)


def all_vectors(keys: Sequence[Hashable]) -> Iterator[Gf2Vec]:
    """Every vector over the family, in mask order.  Exponential; micro scale only."""
    keys = tuple(keys)
    for mask in range(1 << len(keys)):
        yield Gf2Vec(keys, mask)


def basis_vectors(keys: Sequence[Hashable]) -> Iterator[Gf2Vec]:
    keys = tuple(keys)
    for i in range(len(keys)):
        yield Gf2Vec(keys, 1 << i)


def random_vector(keys: Sequence[Hashable], rng) -> Gf2Vec:
    keys = tuple(keys)
    return Gf2Vec(keys, rng.getrandbits(len(keys)) if keys else 0)


def enumerate_systems(num_vars: int, num_rows: int) -> Iterator[Gf2System]:
    """All systems of the given shape; only sensible for tiny parameters."""
    row_space = []
    for mask in range(1 << num_vars):
        variables = tuple(i for i in range(num_vars) if (mask >> i) & 1)
        for rhs in (0, 1):
            row_space.append((variables, rhs))
    for rows in itertools.product(row_space, repeat=num_rows):
        yield Gf2System(num_vars, tuple(rows))

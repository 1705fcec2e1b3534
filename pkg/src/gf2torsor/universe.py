"""Finite combinatorial ground data: atoms, faces, cells.

A universe fixes an atom set, the face arity k, the number of levels L
and the support cutoff c.  Faces are the k-element atom subsets, cells
the (k+1)-element ones; every enumeration here is lexicographic so that
downstream constructions and reports are reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

__all__ = ["Face", "Cell", "Universe"]


@dataclass(frozen=True, order=True)
class Face:
    """A k-element atom subset, stored sorted."""

    atoms: tuple[int, ...]

    def __post_init__(self) -> None:
        if list(self.atoms) != sorted(set(self.atoms)):
            raise ValueError(f"face atoms must be sorted and distinct: {self.atoms}")

    @staticmethod
    def of(atoms: Iterable[int]) -> "Face":
        return Face(tuple(sorted(set(atoms))))

    def __contains__(self, atom: int) -> bool:
        return atom in self.atoms

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.atoms)


@dataclass(frozen=True, order=True)
class Cell:
    """A (k+1)-element atom subset, stored sorted."""

    atoms: tuple[int, ...]

    def __post_init__(self) -> None:
        if list(self.atoms) != sorted(set(self.atoms)):
            raise ValueError(f"cell atoms must be sorted and distinct: {self.atoms}")

    @staticmethod
    def of(atoms: Iterable[int]) -> "Cell":
        return Cell(tuple(sorted(set(atoms))))

    def __contains__(self, atom: int) -> bool:
        return atom in self.atoms

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.atoms)


@dataclass(frozen=True)
class Universe:
    """Atom set plus the three size parameters (k, L, c).

    k >= 2 keeps every cell wide enough that constraint propagation never
    wedges; 0 < c <= L makes the cutoff subgroup proper unless c == L.
    """

    atoms: tuple[int, ...]
    k: int
    L: int
    c: int

    def __post_init__(self) -> None:
        if list(self.atoms) != sorted(set(self.atoms)):
            raise ValueError("atoms must be sorted and distinct")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if len(self.atoms) < self.k:
            raise ValueError(
                f"need at least k={self.k} atoms, got {len(self.atoms)}"
            )
        if self.L < 1:
            raise ValueError(f"need at least one level, got L={self.L}")
        if not 0 < self.c <= self.L:
            raise ValueError(f"need 0 < c <= L, got c={self.c}, L={self.L}")

    @staticmethod
    def create(atoms: Iterable[int], k: int, L: int, c: int) -> "Universe":
        return Universe(tuple(sorted(set(atoms))), k, L, c)

    # ---------------------------------------------------------- enumeration

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        """All k-element subsets of the atoms, lexicographic."""
        return tuple(Face(t) for t in itertools.combinations(self.atoms, self.k))

    @cached_property
    def face_index(self) -> dict[Face, int]:
        return {f: i for i, f in enumerate(self.faces)}

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(Cell(t) for t in itertools.combinations(self.atoms, self.k + 1))

    @cached_property
    def levels(self) -> tuple[int, ...]:
        return tuple(range(self.L))

    @cached_property
    def face_family(self) -> tuple[Face, ...]:
        # key family for face-indexed Gf2Vec instances; alias kept separate
        # from .faces so callers signal intent
        return self.faces

    @cached_property
    def level_family(self) -> tuple[int, ...]:
        return tuple(range(self.L))

    # ---------------------------------------------------------- membership

    def has_face(self, face: Face) -> bool:
        return len(face.atoms) == self.k and set(face.atoms) <= set(self.atoms)

    def has_cell(self, cell: Cell) -> bool:
        return len(cell.atoms) == self.k + 1 and set(cell.atoms) <= set(self.atoms)

    def require_face(self, face: Face) -> None:
        if not self.has_face(face):
            raise ValueError(f"not a face of this universe: {face}")

    def require_cell(self, cell: Cell) -> None:
        if not self.has_cell(cell):
            raise ValueError(f"not a cell of this universe: {cell}")

    # ---------------------------------------------------------- incidence

    def faces_of(self, cell: Cell) -> tuple[Face, ...]:
        """The k+1 faces of a cell, lexicographic."""
        self.require_cell(cell)
        out = []
        for drop in range(len(cell.atoms) - 1, -1, -1):
            out.append(Face(cell.atoms[:drop] + cell.atoms[drop + 1 :]))
        return tuple(out)

    def cells_containing(
        self, face: Face, within: Optional[Iterable[int]] = None
    ) -> tuple[Cell, ...]:
        """Cells over ``within`` (default: all atoms) having this face."""
        self.require_face(face)
        pool = self.atoms if within is None else tuple(sorted(set(within)))
        if not set(face.atoms) <= set(pool):
            return ()
        out = []
        for extra in pool:
            if extra not in face.atoms:
                out.append(Cell(tuple(sorted(face.atoms + (extra,)))))
        return tuple(sorted(out))

    def all_faces(self, within: Iterable[int]) -> tuple[Face, ...]:
        """All faces whose atoms lie in ``within``, lexicographic."""
        pool = sorted(set(within))
        if not set(pool) <= set(self.atoms):
            raise ValueError(f"atoms {sorted(set(pool) - set(self.atoms))} not in universe")
        return tuple(Face(t) for t in itertools.combinations(pool, self.k))

    def all_cells(self, within: Iterable[int]) -> tuple[Cell, ...]:
        pool = sorted(set(within))
        if not set(pool) <= set(self.atoms):
            raise ValueError(f"atoms {sorted(set(pool) - set(self.atoms))} not in universe")
        return tuple(Cell(t) for t in itertools.combinations(pool, self.k + 1))

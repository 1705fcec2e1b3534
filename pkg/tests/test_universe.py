import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from gf2torsor.universe import Cell, Face, Universe


def test_face_requires_sorted_distinct():
    with pytest.raises(ValueError):
        Face((2, 1))
    with pytest.raises(ValueError):
        Face((1, 1))
    assert Face.of([3, 1]) == Face((1, 3))


def test_universe_parameter_validation():
    with pytest.raises(ValueError):
        Universe((0, 1, 2), 1, 3, 1)  # k too small
    with pytest.raises(ValueError):
        Universe((0,), 2, 3, 1)  # too few atoms
    with pytest.raises(ValueError):
        Universe((0, 1), 2, 0, 1)  # no levels
    with pytest.raises(ValueError):
        Universe((0, 1), 2, 3, 0)  # cutoff must be positive
    with pytest.raises(ValueError):
        Universe((0, 1), 2, 3, 4)  # cutoff beyond levels


def test_faces_of_k2():
    u = Universe.create(range(4), 2, 3, 1)
    got = u.faces_of(Cell.of([1, 2, 3]))
    assert got == (Face.of([1, 2]), Face.of([1, 3]), Face.of([2, 3]))


def test_faces_of_k3_counts():
    u = Universe.create(range(5), 3, 3, 1)
    cell = Cell.of([0, 2, 3, 4])
    faces = u.faces_of(cell)
    assert len(faces) == 4
    assert len(set(faces)) == 4
    for f in faces:
        assert set(f.atoms) <= set(cell.atoms)
    # the faces of a cell cover the cell
    assert set().union(*(set(f.atoms) for f in faces)) == set(cell.atoms)


def test_cells_containing_example():
    u = Universe.create(range(1, 5), 2, 3, 1)
    got = u.cells_containing(Face.of([1, 2]))
    assert got == (Cell.of([1, 2, 3]), Cell.of([1, 2, 4]))


def test_cells_containing_within_face_only():
    u = Universe.create(range(1, 5), 2, 3, 1)
    assert u.cells_containing(Face.of([1, 2]), within=[1, 2]) == ()


def test_cells_containing_count_law():
    u = Universe.create(range(7), 3, 2, 1)
    for face in u.faces:
        got = u.cells_containing(face)
        assert len(got) == len(u.atoms) - u.k


def test_all_faces_small():
    u = Universe.create(range(5), 2, 3, 1)
    assert u.all_faces([0, 1]) == (Face.of([0, 1]),)
    assert u.all_faces([2, 3, 4]) == (
        Face.of([2, 3]),
        Face.of([2, 4]),
        Face.of([3, 4]),
    )


def test_all_faces_binomial_count():
    u = Universe.create(range(8), 3, 2, 1)
    for n in range(3, 9):
        got = u.all_faces(range(n))
        assert len(got) == math.comb(n, 3)


def test_enumeration_is_stable():
    u1 = Universe.create(range(6), 2, 4, 2)
    u2 = Universe.create(range(6), 2, 4, 2)
    assert u1.faces == u2.faces
    assert u1.cells == u2.cells
    assert u1.faces == tuple(sorted(u1.faces))


def test_face_cell_round_trip():
    # removing then re-adding an atom recovers the cell through its faces
    u = Universe.create(range(6), 2, 3, 1)
    for cell in u.cells:
        for face in u.faces_of(cell):
            rest = set(cell.atoms) - set(face.atoms)
            assert len(rest) == 1
            assert Cell.of(face.atoms + tuple(rest)) == cell


@given(st.integers(2, 3), st.integers(0, 20))
def test_faces_of_matches_combinations(k, seed):
    rng = random.Random(seed)
    n = rng.randrange(k + 1, 8)
    u = Universe.create(range(n), k, 2, 1)
    cell = Cell(tuple(sorted(rng.sample(range(n), k + 1))))
    want = tuple(Face(t) for t in itertools.combinations(cell.atoms, k))
    assert u.faces_of(cell) == want


def test_face_membership_checks():
    u = Universe.create(range(4), 2, 3, 1)
    assert u.has_face(Face.of([0, 3]))
    assert not u.has_face(Face.of([0, 7]))
    with pytest.raises(ValueError):
        u.require_cell(Cell.of([0, 1, 9]))
    with pytest.raises(ValueError):
        u.all_faces([0, 9])

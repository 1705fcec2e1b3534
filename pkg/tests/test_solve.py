"""Tests for solution validity, greedy completion, amalgamation and solvers."""
import itertools
import random

import pytest

from gf2torsor import (
    Cell,
    CosetPoint,
    Face,
    Gf2Vec,
    TorsorPoint,
    Universe,
    extend_model,
    random_canonical_model,
    standard_model,
)
from gf2torsor.solve import (
    Solution,
    SolutionFormatError,
    SystemOfSolutions,
    Violation,
    amalgamate,
    compile_constraints,
    empty_solution,
    extend_solution,
    full_solve,
    greedy_extend,
    is_solution,
    parse_solution,
    print_solution,
    pull_back,
    random_solution,
)

U3 = Universe.create((1, 2, 3), k=2, L=2, c=1)
F12, F13, F23 = Face.of((1, 2)), Face.of((1, 3)), Face.of((2, 3))
CELL123 = Cell.of((1, 2, 3))


def zero_solution(m, atoms=None):
    """All-zero total assignment, built directly rather than by any solver."""
    u = m.universe
    atoms = u.atoms if atoms is None else atoms
    g_part = {}
    h_part = {}
    for face in u.all_faces(atoms):
        h_part[face] = m.coset_rep_point(face)
        for level in u.levels:
            g_part[(level, face)] = m.zero_torsor_point(level, face)
    return Solution(g_part, h_part)


# ------------------------------------------------------------ is_solution


def test_empty_solution_is_vacuously_valid():
    m = standard_model(U3)
    assert is_solution(m, empty_solution())
    assert is_solution(m, empty_solution(), scope=(1, 2))


def test_zero_assignment_solves_standard_model():
    m = standard_model(U3)
    verdict = is_solution(m, zero_solution(m))
    assert verdict.ok and verdict.violation is None


def test_single_flipped_bit_reports_the_broken_constraint():
    m = standard_model(U3)
    f = zero_solution(m)
    f.g_part[(0, F12)] = TorsorPoint(0, F12, Gf2Vec.from_support(U3.face_family, [F23]))
    verdict = is_solution(m, f)
    assert not verdict
    assert verdict.violation == Violation(0, CELL123, F23)


def test_is_solution_rejects_foreign_elements():
    m = standard_model(U3)
    f = zero_solution(m)
    with pytest.raises(ValueError, match="scope"):
        is_solution(m, f, scope=(1, 2))
    bad_h = zero_solution(m)
    bad_h.h_part[F12] = CosetPoint(F12, Gf2Vec(U3.level_family, 2))
    with pytest.raises(ValueError, match="not in the model"):
        is_solution(m, bad_h)
    bad_g = zero_solution(m)
    bad_g.g_part[(0, F12)] = TorsorPoint(0, F12, Gf2Vec((0, 1, 2), 0))
    with pytest.raises(ValueError, match="not in the model"):
        is_solution(m, bad_g)


def test_solution_shape_validation():
    m = standard_model(U3)
    with pytest.raises(ValueError, match="holds point"):
        Solution({(0, F12): m.zero_torsor_point(1, F12)}, {})
    with pytest.raises(ValueError, match="holds point"):
        Solution({}, {F12: m.coset_rep_point(F13)})


# ------------------------------------------------------------ greedy engine


def test_greedy_extend_same_scope_returns_input():
    m = standard_model(U3)
    f = zero_solution(m)
    assert greedy_extend(m, f, (1, 2, 3)) == f


def test_greedy_from_empty_on_standard_model_is_all_zero():
    u = Universe.create((1, 2, 3, 4), k=2, L=2, c=1)
    m = standard_model(u)
    f = greedy_extend(m, empty_solution(), u.atoms)
    assert f == zero_solution(m)


def test_greedy_extend_random_canonical_models():
    for seed in range(10):
        rng = random.Random(seed)
        u = Universe.create(tuple(range(6)), k=2, L=4, c=2)
        m = random_canonical_model(u, rng)
        f = greedy_extend(m, empty_solution(), u.atoms)
        assert f.is_total_on(u, u.atoms)
        assert is_solution(m, f)


def test_greedy_extend_arity_three():
    for seed in range(5):
        rng = random.Random(seed)
        u = Universe.create(tuple(range(5)), k=3, L=3, c=1)
        m = random_canonical_model(u, rng)
        f = greedy_extend(m, empty_solution(), u.atoms)
        assert is_solution(m, f)


def test_greedy_extend_preserves_the_input():
    rng = random.Random(42)
    u = Universe.create(tuple(range(5)), k=2, L=3, c=2)
    m = random_canonical_model(u, rng)
    small = greedy_extend(m, empty_solution(), (0, 1, 2))
    big = greedy_extend(m, small, u.atoms)
    assert big.extends(small)
    assert big.restrict((0, 1, 2)) == small
    assert is_solution(m, big)


def test_greedy_extend_is_deterministic():
    rng = random.Random(3)
    u = Universe.create(tuple(range(5)), k=2, L=3, c=1)
    m = random_canonical_model(u, rng)
    a = greedy_extend(m, empty_solution(), u.atoms)
    b = greedy_extend(m, empty_solution(), u.atoms)
    assert print_solution(u, a) == print_solution(u, b)


def test_greedy_extend_rejects_escaping_scope():
    m = standard_model(U3)
    f = zero_solution(m)
    with pytest.raises(ValueError, match="contain"):
        greedy_extend(m, f, (1, 2))


def test_random_solution_valid_and_seed_stable():
    u = Universe.create(tuple(range(5)), k=2, L=3, c=2)
    m = random_canonical_model(u, random.Random(0))
    a = random_solution(m, random.Random(1))
    b = random_solution(m, random.Random(1))
    c = random_solution(m, random.Random(2))
    assert is_solution(m, a)
    assert a == b
    assert a != c  # different seed explores a different fibre


def test_completion_vacuity_observation_exhaustive():
    # every cell with at least one face outside [A]^k has at least two,
    # for any A inside any B of size up to 7
    for k in (2, 3):
        for n in range(k + 1, 8):
            atoms = tuple(range(n))
            u = Universe.create(atoms, k=k, L=1, c=1)
            for r in range(n + 1):
                for a_set in itertools.combinations(atoms, r):
                    inside = set(a_set)
                    for cell in u.cells:
                        fresh = [
                            w for w in u.faces_of(cell) if not set(w.atoms) <= inside
                        ]
                        assert len(fresh) != 1


def test_union_domain_observation_exhaustive():
    # for fewer extras than k, a cell containing one face spanning all
    # extras contains at least two such faces
    for k in (2, 3):
        for m_extras in range(1, k):
            for n_base in range(k, 5):
                base = tuple(range(n_base))
                extras = tuple(range(100, 100 + m_extras))
                u = Universe.create(base + extras, k=k, L=1, c=1)
                for cell in u.cells:
                    spanning = [
                        w
                        for w in u.faces_of(cell)
                        if set(extras) <= set(w.atoms)
                    ]
                    assert len(spanning) != 1


# ------------------------------------------------------------ amalgamation


def test_amalgamate_single_extra():
    u = Universe.create(tuple(range(5)), k=2, L=3, c=1)
    m = random_canonical_model(u, random.Random(8))
    base = (0, 1, 2, 3)
    f0 = greedy_extend(m, empty_solution(), base)
    sys = SystemOfSolutions(base, (4,), {frozenset(): f0})
    f = amalgamate(m, sys)
    assert f.extends(f0)
    assert f.is_total_on(u, u.atoms)
    assert is_solution(m, f)


def test_amalgamate_zero_extras_is_identity():
    m = standard_model(U3)
    f = zero_solution(m)
    sys = SystemOfSolutions((1, 2, 3), (), {frozenset(): f})
    assert amalgamate(m, sys) == f


def test_amalgamate_refuses_k_extras():
    u = Universe.create(tuple(range(6)), k=2, L=2, c=1)
    m = standard_model(u)
    f = greedy_extend(m, empty_solution(), (0, 1, 2, 3))
    sys = SystemOfSolutions(
        (0, 1, 2, 3),
        (4, 5),
        {
            frozenset(): f,
            frozenset({0}): greedy_extend(m, f, (0, 1, 2, 3, 4)),
            frozenset({1}): greedy_extend(m, f, (0, 1, 2, 3, 5)),
        },
    )
    with pytest.raises(ValueError, match="fewer extras than k"):
        amalgamate(m, sys)


def test_amalgamate_two_extras_at_arity_three():
    u = Universe.create(tuple(range(6)), k=3, L=2, c=1)
    m = random_canonical_model(u, random.Random(4))
    base = (0, 1, 2, 3)
    f_base = greedy_extend(m, empty_solution(), base)
    f0 = greedy_extend(m, f_base, base + (4,))
    f1 = greedy_extend(m, f_base, base + (5,))
    sys = SystemOfSolutions(
        base,
        (4, 5),
        {frozenset(): f_base, frozenset({0}): f0, frozenset({1}): f1},
    )
    f = amalgamate(m, sys)
    for part in (f_base, f0, f1):
        assert f.extends(part)
    assert is_solution(m, f)


def test_amalgamate_rejects_disagreeing_parts():
    u = Universe.create(tuple(range(6)), k=3, L=2, c=1)
    m = random_canonical_model(u, random.Random(4))
    base = (0, 1, 2, 3)
    f_base = greedy_extend(m, empty_solution(), base)
    stray = random_solution(m, random.Random(9), scope=base + (4,))
    assert not stray.extends(f_base)  # seeds picked so the parts clash
    f1 = greedy_extend(m, f_base, base + (5,))
    sys = SystemOfSolutions(
        base,
        (4, 5),
        {frozenset(): f_base, frozenset({0}): stray, frozenset({1}): f1},
    )
    with pytest.raises(ValueError, match="disagree"):
        amalgamate(m, sys)


def test_amalgamate_rejects_partial_parts():
    u = Universe.create(tuple(range(5)), k=2, L=2, c=1)
    m = standard_model(u)
    base = (0, 1, 2, 3)
    f0 = greedy_extend(m, empty_solution(), base)
    trimmed = Solution(dict(f0.g_part), dict(f0.h_part))
    del trimmed.h_part[Face.of((0, 1))]
    sys = SystemOfSolutions(base, (4,), {frozenset(): trimmed})
    with pytest.raises(ValueError, match="not total"):
        amalgamate(m, sys)


def test_system_of_solutions_validation():
    m = standard_model(U3)
    f = zero_solution(m)
    with pytest.raises(ValueError, match="proper subsets"):
        SystemOfSolutions((1, 2, 3), (4, 5), {frozenset(): f})
    with pytest.raises(ValueError, match="outside the base"):
        SystemOfSolutions((1, 2, 3), (3,), {frozenset(): f})
    with pytest.raises(ValueError, match="distinct"):
        SystemOfSolutions((1, 2, 3), (4, 4), {frozenset(): f, frozenset({0}): f})


# ------------------------------------------------------------ extension


def test_extend_solution_arity_two():
    u = Universe.create(tuple(range(4)), k=2, L=3, c=2)
    m = random_canonical_model(u, random.Random(5))
    f = random_solution(m, random.Random(6), scope=(0, 1, 2))
    g = extend_solution(m, f, (0, 1, 2), 3)
    assert g.extends(f)
    assert g.restrict((0, 1, 2)) == f
    assert g.is_total_on(u, u.atoms)
    assert is_solution(m, g)


def test_extend_solution_arity_three():
    for seed in range(3):
        u = Universe.create(tuple(range(5)), k=3, L=2, c=1)
        m = random_canonical_model(u, random.Random(seed))
        base = (0, 1, 2, 3)
        f = random_solution(m, random.Random(seed + 50), scope=base)
        g = extend_solution(m, f, base, 4)
        assert g.extends(f)
        assert g.restrict(base) == f
        assert is_solution(m, g)


def test_extend_solution_from_empty_base():
    m = standard_model(U3)
    g = extend_solution(m, empty_solution(), (), 1)
    assert g == empty_solution()  # one atom carries no faces


def test_extend_solution_rejects_known_atom():
    m = standard_model(U3)
    f = zero_solution(m)
    with pytest.raises(ValueError, match="already belongs"):
        extend_solution(m, f, (1, 2, 3), 3)


# ------------------------------------------------------------ full solvers


def test_compiled_system_shape_micro():
    m = standard_model(U3)
    system, x_index, y_index = compile_constraints(m)
    assert len(x_index) == 12
    assert len(y_index) == 3
    assert system.num_vars == 15
    assert len(system.rows) == 6


def test_full_solve_all_methods_on_standard_model():
    m = standard_model(U3)
    for method in ("greedy", "linear", "brute"):
        f = full_solve(m, method)
        assert f is not None
        assert is_solution(m, f)
        assert f.is_total_on(U3, U3.atoms)


def test_solver_verdicts_agree_on_micro_sweep():
    # every canonical model on three atoms: solvable by all three routes
    u = U3
    faces = u.faces
    from gf2torsor import CutoffCoset, canonical_model

    for bits in range(1 << len(faces)):
        g = {}
        for i, face in enumerate(faces):
            mask = ((bits >> i) & 1) << 1  # the single level above the cutoff
            g[face] = CutoffCoset(u.L, u.c, Gf2Vec(u.level_family, mask))
        m = canonical_model(u, g)
        got = {method: full_solve(m, method) for method in ("greedy", "linear", "brute")}
        assert all(f is not None for f in got.values())


def test_full_solve_handles_twisted_models():
    u = Universe.create((1, 2, 3), k=2, L=2, c=1)
    m = standard_model(u)
    anchors = {f: m.coset_rep_point(f) for f in u.faces}
    anchors[F12] = CosetPoint(F12, Gf2Vec(u.level_family, 1))
    big, _ = extend_model(m, [4], anchors)
    for method in ("greedy", "linear"):
        f = full_solve(big, method)
        assert f is not None and is_solution(big, f)


def test_full_solve_brute_refuses_large_systems():
    u = Universe.create((1, 2, 3, 4), k=2, L=2, c=1)
    m = standard_model(u)
    with pytest.raises(ValueError, match="refused"):
        full_solve(m, "brute")
    with pytest.raises(ValueError, match="unknown method"):
        full_solve(m, "dance")


# ------------------------------------------------------------ pullback


def test_pull_back_along_identity_is_identity():
    from gf2torsor import identity_embedding

    m = standard_model(U3)
    f = random_solution(m, random.Random(12))
    emb = identity_embedding(m, m)
    assert pull_back(emb, f) == f


def test_pull_back_from_extension():
    u = Universe.create((1, 2, 3), k=2, L=2, c=1)
    m = standard_model(u)
    anchors = {f: m.coset_rep_point(f) for f in u.faces}
    anchors[F13] = CosetPoint(F13, Gf2Vec(u.level_family, 1))
    big, emb = extend_model(m, [4, 5], anchors)
    f_big = random_solution(big, random.Random(2))
    f = pull_back(emb, f_big)
    assert f.is_total_on(u, u.atoms)
    assert is_solution(m, f)
    for face in u.faces:
        assert f.h_part[face].vec.mask == f_big.h_part[face].vec.mask


def test_pull_back_requires_valid_total_target():
    from gf2torsor import identity_embedding

    m = standard_model(U3)
    emb = identity_embedding(m, m)
    with pytest.raises(ValueError, match="total"):
        pull_back(emb, empty_solution())
    f = random_solution(m, random.Random(1))
    f.g_part[(0, F12)] = TorsorPoint(
        0, F12, f.g_part[(0, F12)].offset + Gf2Vec.from_support(U3.face_family, [F23])
    )
    with pytest.raises(ValueError, match="invalid"):
        pull_back(emb, f)


# ------------------------------------------------------------ file format


def test_print_solution_frozen_example():
    f = Solution(
        {(0, F12): TorsorPoint(0, F12, Gf2Vec(U3.face_family, 4))},
        {F12: CosetPoint(F12, Gf2Vec(U3.level_family, 1))},
    )
    assert print_solution(U3, f) == "H 1,2 10\nG 0 1,2 001\n"
    assert parse_solution(U3, "H 1,2 10\nG 0 1,2 001\n") == f


def test_solution_round_trip_random():
    u = Universe.create(tuple(range(5)), k=2, L=3, c=2)
    m = random_canonical_model(u, random.Random(0))
    f = random_solution(m, random.Random(33))
    text = print_solution(u, f)
    assert parse_solution(u, text) == f
    assert print_solution(u, parse_solution(u, text)) == text


def test_parse_solution_empty_text():
    assert parse_solution(U3, "") == empty_solution()


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("H 1,5 10\n", "not a face"),
        ("H 1,2 10\nH 1,2 10\n", "duplicate"),
        ("G 9 1,2 001\n", "out of range"),
        ("G 0 1,2 001\nG 0 1,2 001\n", "duplicate"),
        ("Q 1,2 10\n", "unknown directive"),
        ("H 1,2 1\n", "bits"),
        ("G 0 1,2 01\n", "bits"),
        ("H 1,2\n", "needs"),
    ],
)
def test_parse_solution_rejects_malformed_text(text, fragment):
    with pytest.raises(SolutionFormatError, match=fragment):
        parse_solution(U3, text)

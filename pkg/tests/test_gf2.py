import random

import pytest
from hypothesis import given, strategies as st

from gf2torsor.gf2 import (
    BRUTE_FORCE_VAR_LIMIT,
    CutoffCoset,
    Gf2System,
    Gf2Vec,
    all_vectors,
    brute_force_solve,
    coset_of,
    enumerate_systems,
    solve_linear,
    vec_add,
)

K3 = (0, 1, 2)
K4 = (0, 1, 2, 3)


def bits(keys, s):
    return Gf2Vec.from_bits(keys, s)


# ---------------------------------------------------------------- vec_add


def test_vec_add_example():
    assert vec_add(bits(K3, "101"), bits(K3, "001")) == bits(K3, "100")


def test_vec_add_identity_and_self_inverse():
    v = bits(K4, "0110")
    zero = Gf2Vec.zero(K4)
    assert v + zero == v
    assert v + v == zero


def test_vec_add_family_mismatch():
    with pytest.raises(ValueError):
        vec_add(bits(K3, "101"), bits(K4, "1010"))
    with pytest.raises(ValueError):
        vec_add(bits(K3, "101"), Gf2Vec(("a", "b", "c"), 1))


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
def test_vec_add_group_laws_exhaustive_width(a, b, c):
    # 4-bit vectors; hypothesis covers the whole cube over many runs
    x, y, z = (Gf2Vec(K4, m) for m in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert (x + x).is_zero()


@given(st.integers(0, 60), st.data())
def test_vec_add_group_laws_random_width(width, data):
    keys = tuple(range(width))
    hi = (1 << width) - 1 if width else 0
    x = Gf2Vec(keys, data.draw(st.integers(0, hi)))
    y = Gf2Vec(keys, data.draw(st.integers(0, hi)))
    z = Gf2Vec(keys, data.draw(st.integers(0, hi)))
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x


def test_vec_bits_round_trip():
    for mask in range(16):
        v = Gf2Vec(K4, mask)
        assert Gf2Vec.from_bits(K4, v.bits()) == v


def test_vec_support_and_bit():
    v = bits(K4, "0110")
    assert v.support() == (1, 2)
    assert [v.bit(k) for k in K4] == [0, 1, 1, 0]
    assert v.weight() == 2


def test_vec_rejects_stray_bits():
    with pytest.raises(ValueError):
        Gf2Vec((0, 1), 4)


# ------------------------------------------------- brute force (the oracle)


def test_brute_force_empty_system():
    assert brute_force_solve(Gf2System(0, ())) == Gf2Vec((), 0)


def test_brute_force_xor_triangle_inconsistent():
    # x0+x1=1, x1+x2=1, x0+x2=1 sums to 0=1
    sys = Gf2System(3, (((0, 1), 1), ((1, 2), 1), ((0, 2), 1)))
    assert brute_force_solve(sys) is None


def test_brute_force_limit():
    with pytest.raises(ValueError):
        brute_force_solve(Gf2System(BRUTE_FORCE_VAR_LIMIT + 1, ()))


def test_brute_force_returns_first_satisfying():
    sys = Gf2System(2, (((0, 1), 1),))
    sol = brute_force_solve(sys)
    assert sol is not None and sol.mask == 1  # x0=1,x1=0 precedes x0=0,x1=1


# ---------------------------------------------------------------- solve_linear


def test_solve_linear_single_row():
    sys = Gf2System(2, (((0, 1), 1),))
    sol = solve_linear(sys)
    assert sol is not None and sys.satisfies(sol)


def test_solve_linear_inconsistent():
    sys = Gf2System(1, (((0,), 0), ((0,), 1)))
    assert solve_linear(sys) is None


def test_solve_linear_free_vars_zero():
    # x0 = 1, x1 free, x2 free
    sys = Gf2System(3, (((0,), 1),))
    sol = solve_linear(sys)
    assert sol == bits((0, 1, 2), "100")


def test_solve_linear_repeated_variable_cancels():
    # x0 + x0 + x1 = 1 is just x1 = 1
    sys = Gf2System(2, (((0, 0, 1), 1),))
    sol = solve_linear(sys)
    assert sol is not None and sol.bit(1) == 1 and sol.bit(0) == 0


def test_solve_linear_agrees_with_brute_force_exhaustively():
    # every system with 3 variables and up to 2 rows
    for rows in (0, 1, 2):
        for sys in enumerate_systems(3, rows):
            got = solve_linear(sys)
            want = brute_force_solve(sys)
            assert (got is None) == (want is None)
            if got is not None:
                assert sys.satisfies(got)


def test_solve_linear_agrees_with_brute_force_random():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randrange(1, 9)
        rows = []
        for _ in range(rng.randrange(0, 7)):
            width = rng.randrange(0, n + 1)
            rows.append((tuple(rng.sample(range(n), width)), rng.randrange(2)))
        sys = Gf2System(n, tuple(rows))
        got = solve_linear(sys)
        want = brute_force_solve(sys)
        assert (got is None) == (want is None)
        if got is not None:
            assert sys.satisfies(got)


# ---------------------------------------------------------------- cosets


def test_coset_of_example():
    got = coset_of(bits(K4, "1101"), 2)
    assert got.rep == bits(K4, "0001")
    assert got.length == 4 and got.cutoff == 2


def test_coset_of_zero():
    z = coset_of(Gf2Vec.zero(K4), 2)
    assert z.rep.is_zero()


def test_coset_of_constant_on_orbits():
    # exhaustive over 4-bit vectors and both interesting cutoffs
    for cutoff in (1, 2, 3):
        for v in all_vectors(K4):
            base = coset_of(v, cutoff)
            for low in range(1 << cutoff):
                shifted = v + Gf2Vec(K4, low)
                assert coset_of(shifted, cutoff) == base


def test_coset_of_injective_on_canonical_reps():
    seen = {}
    for v in all_vectors(K4):
        c = coset_of(v, 2)
        if c.rep.mask in seen:
            assert seen[c.rep.mask] == c
        else:
            seen[c.rep.mask] = c
    assert len(seen) == 4  # 2^(4-2) distinct cosets


def test_coset_members_and_contains():
    c = coset_of(bits(K4, "0011"), 2)
    members = list(c.members())
    assert len(members) == 4 and members[0] == c.rep
    for m in members:
        assert c.contains(m)
    assert c.contains(bits(K4, "0111"))  # differs only below the cutoff
    assert not c.contains(bits(K4, "0001"))  # differs at position 2


def test_coset_rejects_nonzero_low_rep():
    with pytest.raises(ValueError):
        CutoffCoset(4, 2, bits(K4, "1001"))


def test_coset_of_rejects_bad_cutoff():
    with pytest.raises(ValueError):
        coset_of(bits(K4, "0000"), 0)
    with pytest.raises(ValueError):
        coset_of(bits(K4, "0000"), 5)

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listdefect import (
    CapExceeded,
    ConflictParams,
    GreedyExhausted,
    NodeType,
    bound_d1_d2,
    build_or_load_type_table,
    build_type_table,
    mu_g,
    psi_g_member,
    residue_restrict,
    tau_g_conflict,
)
from listdefect.conflict import colex_combinations, tau_of, tau_prime_of


def test_mu_examples():
    assert mu_g(5, {1, 4, 7, 10}, 2) == 2
    assert mu_g(9, {9}, 0) == 1
    assert mu_g(9, {8}, 0) == 0
    assert mu_g(9, (), 3) == 0


def test_tau_conflict_examples():
    assert tau_g_conflict((1, 4), (2, 8), tau=1, g=1)
    assert not tau_g_conflict((1, 2), (100, 200), tau=1, g=3)
    s = (4, 9, 16)
    assert tau_g_conflict(s, s, tau=len(s), g=0)


@settings(max_examples=200, deadline=None)
@given(
    st.frozensets(st.integers(0, 30), max_size=6),
    st.frozensets(st.integers(0, 30), max_size=6),
    st.integers(1, 5),
    st.integers(0, 3),
)
def test_tau_conflict_symmetric(c1, c2, tau, g):
    assert tau_g_conflict(tuple(c1), tuple(c2), tau, g) == tau_g_conflict(
        tuple(c2), tuple(c1), tau, g
    )


def test_psi_examples():
    k1 = ((1, 2), (3, 4))
    k2 = ((1, 5), (2, 6))
    assert not psi_g_member(k1, k2, tau_prime=2, tau=1, g=0)
    assert psi_g_member(k1, k2, tau_prime=1, tau=1, g=0)
    assert not psi_g_member(k1, (), tau_prime=1, tau=1, g=0)


def test_psi_with_intersections_for_g0():
    # within one residue class and g=0, conflict is just |C1 cap C2| >= tau
    k1 = ((0, 3), (3, 6), (6, 9))
    k2 = ((3, 9), (0, 6))
    for tau in (1, 2):
        expected_members = sum(
            1
            for c1 in k1
            if any(len(set(c1) & set(c2)) >= tau for c2 in k2)
        )
        for tp in (1, 2, 3):
            assert psi_g_member(k1, k2, tp, tau, 0) == (expected_members >= tp)


@settings(max_examples=120, deadline=None)
@given(
    st.frozensets(st.integers(0, 40), min_size=1, max_size=6),
    st.frozensets(st.integers(0, 40), min_size=1, max_size=6),
    st.integers(1, 4),
    st.integers(0, 2),
)
def test_same_residue_g_conflict_is_intersection(c1, c2, tau, g):
    """Within one residue class mod 2g+1, the g-conflict is an intersection test."""
    mod = 2 * g + 1
    a = mod * 3  # spread colors so distinct ones are > 2g apart
    r1 = tuple(sorted(x * a for x in c1))
    r2 = tuple(sorted(x * a for x in c2))
    assert tau_g_conflict(r1, r2, tau, g) == (len(set(r1) & set(r2)) >= tau)


def test_residue_restrict_examples():
    assert residue_restrict([3, 5, 8, 10, 13], 1) == (1, (10, 13))
    assert residue_restrict([4, 7, 9], 0) == (0, (4, 7, 9))
    assert residue_restrict([11], 2) == (1, (11,))
    a, kept = residue_restrict(list(range(17)), 2)
    assert len(kept) >= 17 // 5


def test_bound_d1_d2_examples():
    assert bound_d1_d2(k=2, ell=4, k_prime=1, tau=1, tau_prime=1) == (6, 24)
    assert bound_d1_d2(k=2, ell=4, k_prime=1, tau=3, tau_prime=1)[0] == 0
    d1, d2 = bound_d1_d2(k=3, ell=9, k_prime=2, tau=2, tau_prime=1)
    assert d1 == 3 * 7  # C(3,2) * C(7,1)
    assert d2 == 4 * (2 * d1) * (len(list(itertools.combinations(range(9), 3))) - 1)


def test_tau_formula_values():
    assert tau_of(1, 16, 16) == 32
    assert tau_prime_of(1, 16, 16) == 2**27
    p = ConflictParams(h=1, color_space_size=16, m=16)
    assert (p.tau, p.tau_prime) == (32, 2**27)
    q = ConflictParams(h=2, color_space_size=4, m=4, scale_override=(3, 5))
    assert (q.tau, q.tau_prime) == (3, 5)
    with pytest.raises(Exception):
        ConflictParams(h=1, color_space_size=4, m=4, scale_override=(2, 100))


def test_colex_order():
    got = list(colex_combinations(4, 2))
    assert got == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
    assert list(colex_combinations(3, 0)) == [()]
    assert list(colex_combinations(2, 3)) == []


def _table_params(g=0):
    return ConflictParams(h=1, color_space_size=10, m=4, g=g, scale_override=(2, 2))


def test_single_type_gets_first_family():
    params = _table_params()
    t = NodeType(0, (1, 3, 5, 7), 1)
    table = build_type_table(params, [t], {1: 2}, 2)
    # colex: members (1,3),(1,5),(3,5),... first 2-member family is the
    # first colex pair of members
    assert table.families[0] == ((1, 3), (1, 5))
    assert table.verify()


def test_disjoint_types_never_conflict():
    params = _table_params()
    t1 = NodeType(0, (0, 2, 4, 6), 1)
    t2 = NodeType(1, (1, 3, 5, 7), 1)
    table = build_type_table(params, [t1, t2], {1: 2}, 2)
    assert table.verify()
    assert not psi_g_member(table.families[0], table.families[1], 2, 2, 0)


def test_two_element_lists_single_member_families():
    # k = |list| leaves one candidate set; the family is capped there
    params = _table_params()
    types = [NodeType(c, (a, a + 2), 1) for c, a in [(0, 0), (1, 4), (0, 6), (1, 1)]]
    table = build_type_table(params, types, {1: 2}, 2)
    assert all(len(f) == 1 for f in table.families)
    assert table.verify()


def test_greedy_exhausts_when_family_impossible():
    params = _table_params()
    with pytest.raises(GreedyExhausted):
        build_type_table(params, [NodeType(0, (1, 2), 1)], {1: 3}, 2)


def test_cap_exceeded():
    params = ConflictParams(h=1, color_space_size=40, m=2, g=0, scale_override=(2, 2))
    t = NodeType(0, tuple(range(30)), 1)
    with pytest.raises(CapExceeded):
        build_type_table(params, [t], {1: 10}, 4, candidate_cap=1000)


def test_table_determinism_and_order_independence():
    params = ConflictParams(h=1, color_space_size=15, m=2, g=1, scale_override=(2, 2))
    types = []
    for c in range(2):
        for base in (0, 3, 6):
            types.append(NodeType(c, tuple(range(base, base + 9, 3)), 1))
    table = build_type_table(params, types, {1: 2}, 2)
    rng = random.Random(0)
    for _ in range(3):
        shuffled = types[:]
        rng.shuffle(shuffled)
        again = build_type_table(params, shuffled, {1: 2}, 2)
        assert again.to_bytes() == table.to_bytes()
    assert table.verify()


def test_table_cache_round_trip(tmp_path):
    params = _table_params()
    types = [NodeType(0, (0, 2, 4, 6), 1), NodeType(1, (1, 3, 5, 7), 1)]
    t1 = build_or_load_type_table(params, types, {1: 2}, 2, cache_dir=str(tmp_path))
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    t2 = build_or_load_type_table(params, types, {1: 2}, 2, cache_dir=str(tmp_path))
    assert t2.to_bytes() == t1.to_bytes()


def test_table_cache_env_var(tmp_path, monkeypatch):
    from listdefect.conflict import CACHE_ENV

    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    params = _table_params()
    types = [NodeType(0, (0, 2, 4, 6), 1)]
    t1 = build_or_load_type_table(params, types, {1: 2}, 2)
    assert list(tmp_path.iterdir())
    t2 = build_or_load_type_table(params, types, {1: 2}, 2)
    assert t2.to_bytes() == t1.to_bytes()

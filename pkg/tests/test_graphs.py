import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listdefect import (
    ColoredGraph,
    ColoringOutput,
    InvalidGraph,
    LdcInstance,
    MissingColor,
    MissingOrientation,
    check_existence_condition,
    instance_from_json,
    instance_to_json,
    validate_ldc,
)
from listdefect.errors import ColorNotInList

from conftest import complete_graph


def test_monochromatic_edge_zero_defect_invalid():
    g = ColoredGraph.build(2, [(0, 1)], init_colors=[0, 1], m=2)
    inst = LdcInstance.build([7], [[7], [7]], [{7: 0}, {7: 0}])
    rep = validate_ldc(g, inst, ColoringOutput((7, 7)))
    assert not rep.valid
    assert rep.conflicts == (1, 1)


def test_defect_one_absorbs_conflict():
    g = ColoredGraph.build(2, [(0, 1)], init_colors=[0, 1], m=2)
    inst = LdcInstance.build([7], [[7], [7]], [{7: 1}, {7: 1}])
    assert validate_ldc(g, inst, ColoringOutput((7, 7))).valid


def test_oriented_path_defect_one_valid():
    # u -> v -> w, all colored 3: each node has at most one out-neighbor of 3
    g = ColoredGraph.build(
        3, [(0, 1), (1, 2)], orientation=[(0, 1), (1, 2)], init_colors=[0, 1, 0], m=2
    )
    inst = LdcInstance.build([3], [[3]] * 3, [{3: 1}] * 3, flavor="oriented")
    rep = validate_ldc(g, inst, ColoringOutput((3, 3, 3)))
    assert rep.valid and rep.conflicts == (1, 1, 0)


def test_validate_errors():
    g = ColoredGraph.build(2, [(0, 1)], init_colors=[0, 1], m=2)
    inst = LdcInstance.build([1, 2], [[1], [2]], [{1: 0}, {2: 0}])
    with pytest.raises(MissingColor):
        validate_ldc(g, inst, ColoringOutput((1, None)))
    with pytest.raises(ColorNotInList):
        validate_ldc(g, inst, ColoringOutput((2, 2)))
    arb = LdcInstance.build([1, 2], [[1], [2]], [{1: 0}, {2: 0}], flavor="arbdefective")
    with pytest.raises(MissingOrientation):
        validate_ldc(g, arb, ColoringOutput((1, 2)))
    ori = LdcInstance.build([1, 2], [[1], [2]], [{1: 0}, {2: 0}], flavor="oriented")
    with pytest.raises(MissingOrientation):
        validate_ldc(g, ori, ColoringOutput((1, 2)))


def test_graph_construction_rejects_junk():
    with pytest.raises(InvalidGraph):
        ColoredGraph.build(2, [(0, 0)])
    with pytest.raises(InvalidGraph):
        ColoredGraph.build(2, [(0, 1), (1, 0)])
    with pytest.raises(InvalidGraph):
        ColoredGraph.build(2, [(0, 1)], init_colors=[1, 1], m=2)
    with pytest.raises(InvalidGraph):
        ColoredGraph.build(3, [(0, 1), (1, 2)], orientation=[(0, 1)])


def test_beta_floors_at_one():
    g = ColoredGraph.build(2, [(0, 1)], orientation=[(0, 1)])
    assert g.outdegree(1) == 0
    assert g.beta(1) == 1


def test_existence_condition_examples():
    k4 = complete_graph(4)
    two = LdcInstance.build([0, 1], [[0, 1]] * 4, [{0: 1, 1: 1}] * 4)
    assert check_existence_condition(k4, two) == [True] * 4
    three = LdcInstance.build([0, 1, 2], [[0, 1, 2]] * 4, [{0: 0, 1: 0, 2: 0}] * 4)
    assert check_existence_condition(k4, three) == [False] * 4  # boundary is strict
    k5 = complete_graph(5)
    arb = LdcInstance.build([0, 1], [[0, 1]] * 5, [{0: 1, 1: 1}] * 5, flavor="arbdefective")
    assert check_existence_condition(k5, arb) == [True] * 5


def test_json_round_trip_stable():
    g = ColoredGraph.build(
        3, [(0, 1), (1, 2)], orientation=[(0, 1), (2, 1)], init_colors=[0, 1, 0], m=2
    )
    inst = LdcInstance.build([0, 1, 5], [[0, 5], [1], [0, 1]],
                             [{0: 1, 5: 0}, {1: 2}, {0: 0, 1: 0}], flavor="oriented", g=1)
    text = instance_to_json(g, inst)
    g2, inst2 = instance_from_json(text)
    assert instance_to_json(g2, inst2) == text
    assert g2.out_neighbors == g.out_neighbors


@st.composite
def small_colored_case(draw):
    n = draw(st.integers(2, 6))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if draw(st.booleans()):
                edges.append((u, v))
    g = ColoredGraph.build(n, edges)
    space = list(range(6))
    lists, defects, colors = [], [], []
    for v in range(n):
        size = draw(st.integers(1, 4))
        lst = sorted(draw(st.permutations(space))[:size])
        lists.append(lst)
        defects.append({x: draw(st.integers(0, 3)) for x in lst})
        colors.append(draw(st.sampled_from(lst)))
    gg = draw(st.integers(0, 2))
    inst = LdcInstance.build(space, lists, defects, g=gg)
    return g, inst, ColoringOutput(tuple(colors))


@settings(max_examples=150, deadline=None)
@given(small_colored_case())
def test_validator_matches_bruteforce_recount(case):
    """Oracle equivalence: an independent neighbor scan agrees."""
    g, inst, out = case
    rep = validate_ldc(g, inst, out)
    for v in range(g.n):
        count = 0
        for u in range(g.n):
            if u != v and u in g.adjacency[v] and abs(out.colors[u] - out.colors[v]) <= inst.g:
                count += 1
        assert rep.conflicts[v] == count
        assert (count <= inst.defects[v][out.colors[v]]) == (v not in rep.violating_nodes())


@settings(max_examples=100, deadline=None)
@given(small_colored_case(), st.integers(0, 5))
def test_validator_monotone_in_defects(case, bump):
    g, inst, out = case
    before = validate_ldc(g, inst, out).valid
    raised = LdcInstance.build(
        inst.color_space,
        inst.lists,
        [{x: d + bump for x, d in dv.items()} for dv in inst.defects],
        flavor=inst.flavor,
        g=inst.g,
    )
    after = validate_ldc(g, raised, out).valid
    assert after or not before


def test_proper_coloring_valid_under_all_flavors():
    g = ColoredGraph.build(
        3, [(0, 1), (1, 2)], orientation=[(0, 1), (2, 1)], init_colors=[0, 1, 0], m=2
    )
    lists = [[0, 1], [0, 1, 2], [0, 2]]
    defects = [{x: 0 for x in l} for l in lists]
    out = ColoringOutput((0, 1, 2), ((0, 1), (2, 1)))
    for flavor in ("defective", "oriented", "arbdefective"):
        inst = LdcInstance.build([0, 1, 2], lists, defects, flavor=flavor)
        assert validate_ldc(g, inst, out).valid

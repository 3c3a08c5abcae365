"""Centralized ground-truth solvers.

``sequential_ldc`` is the potential-function recoloring algorithm: start
anywhere, repeatedly recolor an unhappy node to a color whose conflict
count fits its defect.  The potential

    Phi = M + sum_v (deg(v) - d_v(x_v))

(M = number of monochromatic edges) strictly drops by at least 1 per
recoloring and starts at most 3|E|, which bounds the recoloring count.

``sequential_arbdefective`` solves the doubled-defect instance, then
orients each color class along an Euler tour (after evening out odd
degrees with virtual matching edges), giving per-color outdegree at most
ceil(class_degree/2) <= d_v(x).

``exhaustive_solve`` is the brute-force oracle for tiny instances; for
arbdefective instances it checks orientation feasibility per color class
with a unit-capacity flow.

All three are deterministic: ties always break toward the smallest id,
color or candidate.  Proximity g > 0 is not supported here; the
sequential arguments are specific to exact color equality.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

from .errors import CapExceeded, ConditionViolated, InvalidInstance
from .graphs import (
    FLAVOR_ARBDEFECTIVE,
    FLAVOR_DEFECTIVE,
    FLAVOR_ORIENTED,
    ColoredGraph,
    ColoringOutput,
    LdcInstance,
    check_existence_condition,
)


@dataclass
class PotentialState:
    """Snapshot of the recoloring walk, for auditing the potential."""

    colors: list[int]
    monochromatic_edges: int
    potential: int
    unhappy: list[int]

    @staticmethod
    def recompute(graph: ColoredGraph, inst: LdcInstance, colors: list[int]) -> "PotentialState":
        mono = sum(
            1 for u, v in graph.edges() if colors[u] == colors[v]
        )
        pot = mono + sum(
            graph.degree(v) - inst.defects[v][colors[v]] for v in range(graph.n)
        )
        unhappy = [
            v
            for v in range(graph.n)
            if sum(1 for u in graph.adjacency[v] if colors[u] == colors[v])
            > inst.defects[v][colors[v]]
        ]
        return PotentialState(list(colors), mono, pot, unhappy)


@dataclass
class RecoloringStats:
    recolorings: int
    phi_initial: int
    phi_history: tuple[int, ...]


def sequential_ldc(
    graph: ColoredGraph, inst: LdcInstance
) -> tuple[ColoringOutput, RecoloringStats]:
    """List defective coloring by potential-function recoloring.

    Requires the per-node condition sum(d_v(x)+1) > deg(v) (refuses to run
    otherwise) and g = 0.  Initial color: first list color.  Unhappy node:
    lowest id.  New color: lowest color with a fitting conflict count.
    """
    if inst.g != 0:
        raise InvalidInstance("sequential solver requires g = 0")
    cond = [
        sum(d + 1 for d in inst.defects[v].values()) > graph.degree(v)
        for v in range(graph.n)
    ]
    if not all(cond):
        bad = cond.index(False)
        raise ConditionViolated(f"existence condition fails at node {bad}")

    n = graph.n
    colors = [inst.lists[v][0] for v in range(n)]
    # per-node counter of neighbor colors
    nbr_count: list[dict[int, int]] = [dict() for _ in range(n)]
    for v in range(n):
        for u in graph.adjacency[v]:
            nbr_count[v][colors[u]] = nbr_count[v].get(colors[u], 0) + 1

    def conflicts(v: int, x: int) -> int:
        return nbr_count[v].get(x, 0)

    mono = sum(1 for u, w in graph.edges() if colors[u] == colors[w])
    phi = mono + sum(graph.degree(v) - inst.defects[v][colors[v]] for v in range(n))
    phi_history = [phi]
    cap = 3 * graph.edge_count()

    heap = [v for v in range(n) if conflicts(v, colors[v]) > inst.defects[v][colors[v]]]
    heapq.heapify(heap)
    steps = 0
    while heap:
        v = heapq.heappop(heap)
        if conflicts(v, colors[v]) <= inst.defects[v][colors[v]]:
            continue  # stale entry
        old = colors[v]
        new = None
        for y in inst.lists[v]:
            if conflicts(v, y) <= inst.defects[v][y]:
                new = y
                break
        assert new is not None, "existence condition guarantees a fitting color"
        colors[v] = new
        # only M and v's own defect term change
        phi_new = phi + (conflicts(v, new) - conflicts(v, old)) + (
            inst.defects[v][old] - inst.defects[v][new]
        )
        assert phi_new <= phi - 1, "potential must strictly decrease"
        phi = phi_new
        phi_history.append(phi)
        steps += 1
        assert steps <= cap, "recoloring count exceeded 3|E|"
        for u in graph.adjacency[v]:
            cnt = nbr_count[u]
            cnt[old] -= 1
            if not cnt[old]:
                del cnt[old]
            cnt[new] = cnt.get(new, 0) + 1
            if conflicts(u, colors[u]) > inst.defects[u][colors[u]]:
                heapq.heappush(heap, u)
        if conflicts(v, new) > inst.defects[v][new]:
            heapq.heappush(heap, v)

    return (
        ColoringOutput(tuple(colors)),
        RecoloringStats(steps, phi_history[0], tuple(phi_history)),
    )


# -- Euler orientation --------------------------------------------------------


def _euler_orient(n: int, multi_edges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Orient a multigraph with all degrees even along Euler circuits.

    Deterministic iterative Hierholzer, always following the lowest
    available (edge id, endpoint).  The recorded traversal directions
    decompose into closed trails, so every node ends up with outdegree
    exactly half its multigraph degree.  Returns one directed pair per
    edge, in edge-id order.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (edge id, other end)
    for eid, (u, v) in enumerate(multi_edges):
        adj[u].append((eid, v))
        adj[v].append((eid, u))
    for lst in adj:
        lst.sort(reverse=True)  # pop() yields the smallest (eid, w)
    used = [False] * len(multi_edges)
    directed: list[Optional[tuple[int, int]]] = [None] * len(multi_edges)

    for start in range(n):
        stack = [start]
        while stack:
            v = stack[-1]
            while adj[v] and used[adj[v][-1][0]]:
                adj[v].pop()
            if adj[v]:
                eid, w = adj[v].pop()
                used[eid] = True
                directed[eid] = (v, w)
                stack.append(w)
            else:
                stack.pop()
    assert all(d is not None for d in directed), "Euler orientation missed an edge"
    return [d for d in directed if d is not None]


def sequential_arbdefective(
    graph: ColoredGraph, inst: LdcInstance
) -> tuple[ColoringOutput, RecoloringStats]:
    """List arbdefective coloring: doubled defects, then Euler orientation.

    Requires sum(2 d_v(x)+1) > deg(v) per node.  First solves the list
    defective instance with defects 2 d_v(x); in each color class, nodes of
    odd class-degree are greedily paired in id order by virtual edges (the
    pairs need not be actual edges), making all degrees even; each class is
    then oriented along Euler circuits, so the real-edge outdegree of v is
    at most ceil(class_degree(v)/2) <= d_v(x).  Edges between different
    color classes are oriented from the lower to the higher id.
    """
    if inst.g != 0:
        raise InvalidInstance("sequential solver requires g = 0")
    cond = check_existence_condition(
        graph,
        LdcInstance(inst.color_space, inst.lists, inst.defects, FLAVOR_ARBDEFECTIVE, 0),
    )
    if not all(cond):
        raise ConditionViolated(f"existence condition fails at node {cond.index(False)}")

    doubled = LdcInstance(
        inst.color_space,
        inst.lists,
        tuple({x: 2 * d for x, d in dv.items()} for dv in inst.defects),
        FLAVOR_DEFECTIVE,
        0,
    )
    out, stats = sequential_ldc(graph, doubled)
    colors = list(out.colors)

    oriented: list[tuple[int, int]] = []
    by_color: dict[int, list[int]] = {}
    for v in range(graph.n):
        by_color.setdefault(colors[v], []).append(v)
    for x, nodes in sorted(by_color.items()):
        class_edges = [
            (u, v) for u, v in graph.edges() if colors[u] == x and colors[v] == x
        ]
        deg: dict[int, int] = {v: 0 for v in nodes}
        for u, v in class_edges:
            deg[u] += 1
            deg[v] += 1
        odd = sorted(v for v in nodes if deg[v] % 2 == 1)
        virtual = [(odd[i], odd[i + 1]) for i in range(0, len(odd), 2)]
        directed = _euler_orient(graph.n, class_edges + virtual)
        oriented.extend(directed[: len(class_edges)])
        # per-node outdegree check: at most ceil(deg/2) <= d_v(x)
        outdeg: dict[int, int] = {v: 0 for v in nodes}
        for a, b in directed[: len(class_edges)]:
            outdeg[a] += 1
        for v in nodes:
            assert outdeg[v] <= (deg[v] + 1) // 2 <= inst.defects[v][x], (
                f"Euler orientation violated the defect bound at node {v}"
            )
    for u, v in graph.edges():
        if colors[u] != colors[v]:
            oriented.append((u, v))
    return ColoringOutput(tuple(colors), tuple(sorted(oriented))), stats


# -- exhaustive oracle ---------------------------------------------------------


def _max_flow(n_nodes: int, arcs: list[tuple[int, int, int]], s: int, t: int):
    """Tiny BFS (Edmonds-Karp) max flow; returns (value, flow per arc)."""
    head: list[list[int]] = [[] for _ in range(n_nodes)]
    to: list[int] = []
    cap: list[int] = []
    for u, v, c in arcs:
        head[u].append(len(to)); to.append(v); cap.append(c)
        head[v].append(len(to)); to.append(u); cap.append(0)
    flow = 0
    while True:
        parent_arc = [-1] * n_nodes
        parent_arc[s] = -2
        queue = [s]
        for u in queue:
            if u == t:
                break
            for aid in head[u]:
                if cap[aid] > 0 and parent_arc[to[aid]] == -1:
                    parent_arc[to[aid]] = aid
                    queue.append(to[aid])
        if parent_arc[t] == -1:
            break
        # unit capacities on the paths we care about: push 1
        push = None
        v = t
        while v != s:
            aid = parent_arc[v]
            push = cap[aid] if push is None else min(push, cap[aid])
            v = to[aid ^ 1]
        v = t
        while v != s:
            aid = parent_arc[v]
            cap[aid] -= push
            cap[aid ^ 1] += push
            v = to[aid ^ 1]
        flow += push
    used = [arcs[i][2] - cap[2 * i] for i in range(len(arcs))]
    return flow, used


def _orient_class(
    nodes: list[int],
    class_edges: list[tuple[int, int]],
    caps: dict[int, int],
) -> Optional[list[tuple[int, int]]]:
    """Orientation of class_edges with outdeg(v) <= caps[v], or None.

    Unit flow: source -> edge -> endpoint -> sink(cap caps[v]); feasible
    iff the max flow saturates all edges; the endpoint absorbing an edge
    pays for it, i.e. the edge points away from it.
    """
    if not class_edges:
        return []
    index = {v: i for i, v in enumerate(nodes)}
    s = 0
    e0 = 1
    v0 = e0 + len(class_edges)
    t = v0 + len(nodes)
    arcs: list[tuple[int, int, int]] = []
    for i, (u, v) in enumerate(class_edges):
        arcs.append((s, e0 + i, 1))
        arcs.append((e0 + i, v0 + index[u], 1))
        arcs.append((e0 + i, v0 + index[v], 1))
    for v in nodes:
        arcs.append((v0 + index[v], t, caps[v]))
    value, used = _max_flow(t + 1, arcs, s, t)
    if value < len(class_edges):
        return None
    oriented = []
    for i, (u, v) in enumerate(class_edges):
        to_u = used[3 * i + 1]
        oriented.append((u, v) if to_u else (v, u))
    return oriented


def exhaustive_solve(
    graph: ColoredGraph, inst: LdcInstance, cap: int = 10_000_000
) -> Optional[ColoringOutput]:
    """Brute-force solver and unsatisfiability prover for tiny instances.

    Enumerates list assignments depth-first in id order with monotone
    conflict pruning; for arbdefective instances every complete coloring is
    additionally checked for a feasible bounded-outdegree orientation per
    color class (flow-based).  Returns a valid output or None when no
    valid coloring exists.  Refuses instances whose assignment space
    exceeds ``cap``.
    """
    space = 1
    for lst in inst.lists:
        space *= max(1, len(lst))
        if space > cap:
            raise CapExceeded(f"assignment space exceeds {cap}")
    if inst.flavor == FLAVOR_ARBDEFECTIVE and inst.g != 0:
        raise InvalidInstance("arbdefective exhaustive search requires g = 0")
    if inst.flavor == FLAVOR_ORIENTED and graph.out_neighbors is None:
        raise InvalidInstance("oriented instance on an unoriented graph")

    n = graph.n
    colors: list[Optional[int]] = [None] * n
    if inst.flavor == FLAVOR_ORIENTED:
        relevant = graph.out_neighbors
    else:
        relevant = graph.adjacency

    def count_at(v: int, x: int) -> int:
        return sum(
            1 for u in relevant[v] if colors[u] is not None and abs(colors[u] - x) <= inst.g
        )

    def affects(u: int, v: int) -> bool:
        # does v's color count toward u's conflicts?
        return v in relevant[u]

    def final_check() -> Optional[ColoringOutput]:
        if inst.flavor != FLAVOR_ARBDEFECTIVE:
            return ColoringOutput(tuple(colors))
        oriented: list[tuple[int, int]] = []
        by_color: dict[int, list[int]] = {}
        for v in range(n):
            by_color.setdefault(colors[v], []).append(v)
        for x, nodes in sorted(by_color.items()):
            class_edges = [
                (u, v) for u, v in graph.edges() if colors[u] == x and colors[v] == x
            ]
            res = _orient_class(nodes, class_edges, {v: inst.defects[v][x] for v in nodes})
            if res is None:
                return None
            oriented.extend(res)
        for u, v in graph.edges():
            if colors[u] != colors[v]:
                oriented.append((u, v))
        return ColoringOutput(tuple(colors), tuple(sorted(oriented)))

    def dfs(v: int) -> Optional[ColoringOutput]:
        if v == n:
            return final_check()
        for x in inst.lists[v]:
            if inst.flavor != FLAVOR_ARBDEFECTIVE:
                if count_at(v, x) > inst.defects[v][x]:
                    continue
                ok = True
                for u in range(v):
                    if (
                        affects(u, v)
                        and abs(colors[u] - x) <= inst.g
                        and count_at(u, colors[u]) + 1 > inst.defects[u][colors[u]]
                    ):
                        ok = False
                        break
                if not ok:
                    continue
            else:
                # necessary condition: class edges must fit total capacity
                pass
            colors[v] = x
            res = dfs(v + 1)
            if res is not None:
                return res
            colors[v] = None
        return None

    return dfs(0)

"""Deterministic instance generation for benchmarks and sweeps.

Every generator is a pure function of its parameters and seed; repeated
calls yield byte-identical JSON.  Graph families: ring, clique,
random-gnp, random-dag, power-law.  List models: degree-plus-one (proper
list coloring), uniform-k (k random colors, defects zero), defect-budget
(defects drawn and then raised until a target per-node condition holds).
"""

from __future__ import annotations

import math
import random

from .conflict import tau_of
from .errors import InfeasibleParams
from .graphs import ColoredGraph, LdcInstance

FAMILIES = ("ring", "clique", "random-gnp", "random-dag", "power-law")
LIST_MODELS = ("degree-plus-one", "uniform-k", "defect-budget")
TARGETS = ("eq1", "eq2", "eq5", "eq6")


def _greedy_init_coloring(n: int, adj: list[list[int]]) -> tuple[list[int], int]:
    colors = [-1] * n
    for v in range(n):
        used = {colors[u] for u in adj[v] if colors[u] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return colors, (max(colors) + 1 if n else 1)


def make_graph(
    family: str,
    n: int,
    degree_target: int,
    seed: int,
    oriented: bool = True,
) -> ColoredGraph:
    """Build one graph of the family; orientation is acyclic by node order
    (random-dag uses a random permutation instead)."""
    rng = random.Random(("graph", family, n, degree_target, seed).__repr__())
    if family not in FAMILIES:
        raise InfeasibleParams(f"unknown family {family!r}")
    if n < 1:
        raise InfeasibleParams("n must be positive")
    edges: list[tuple[int, int]] = []
    if family == "ring":
        if n < 3:
            raise InfeasibleParams("ring needs n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif family == "clique":
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif family in ("random-gnp", "random-dag"):
        p = min(1.0, degree_target / max(1, n - 1))
        edges = [
            (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
        ]
    elif family == "power-law":
        # preferential attachment with degree_target//2 links per new node
        k = max(1, degree_target // 2)
        targets: list[int] = []
        for v in range(1, n):
            pool = targets if targets else [0]
            chosen = set()
            for _ in range(min(k, v)):
                chosen.add(pool[rng.randrange(len(pool))] if pool else 0)
            for u in sorted(chosen):
                edges.append((u, v))
                targets.extend([u, v])

    perm = list(range(n))
    if family == "random-dag":
        rng.shuffle(perm)
    orientation = None
    if oriented:
        orientation = [
            (u, v) if perm[u] < perm[v] else (v, u) for u, v in edges
        ]
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    init, m = _greedy_init_coloring(n, adj)
    return ColoredGraph.build(n, edges, orientation=orientation, init_colors=init, m=m)


def _target_threshold(
    target: str, graph: ColoredGraph, v: int, space_size: int, g: int, alpha: float
) -> tuple[int, int]:
    """(exponent, required sum) for the defect-budget model at node v."""
    deg = graph.degree(v)
    if target == "eq1":
        return 1, deg + 1
    if target == "eq2":
        return 1, deg + 1  # sum(2d+1) > deg handled by the caller via exponent flag
    if target == "eq5":
        beta = graph.beta(v) if graph.out_neighbors is not None else max(1, deg)
        h = max(1, beta.bit_length())
        tau = tau_of(h, space_size, graph.m)
        return 2, math.ceil(alpha * beta**2 * tau * h * (2 * g + 1))
    if target == "eq6":
        beta = graph.beta(v) if graph.out_neighbors is not None else max(1, deg)
        h = max(1, beta.bit_length())
        hp = max(1, math.ceil(math.log2(8 * h)))
        tau = tau_of(h, space_size, graph.m)
        taubar = tau_of(hp, h, graph.m)
        return 2, math.ceil(alpha**2 * beta**2 * tau * taubar * hp**2)
    raise InfeasibleParams(f"unknown target {target!r}")


def make_instance(
    graph: ColoredGraph,
    list_model: str,
    seed: int,
    space_size: int = 32,
    k: int = 4,
    flavor: str = "defective",
    g: int = 0,
    target: str = "eq1",
    max_defect: int = 3,
    alpha: float = 1.0,
) -> LdcInstance:
    """Draw lists (and defects, for the defect-budget model) per node.

    defect-budget draws defects in [0, max_defect] and then raises them
    round-robin until the target condition holds at every node.
    """
    rng = random.Random(("inst", list_model, seed, space_size, k, flavor, g, target).__repr__())
    if list_model not in LIST_MODELS:
        raise InfeasibleParams(f"unknown list model {list_model!r}")
    if space_size < 1:
        raise InfeasibleParams("empty color space")
    space = list(range(space_size))
    lists: list[list[int]] = []
    defects: list[dict[int, int]] = []
    for v in range(graph.n):
        if list_model == "degree-plus-one":
            size = graph.degree(v) + 1
            if size > space_size:
                raise InfeasibleParams(
                    f"degree+1 = {size} exceeds the color space at node {v}"
                )
            lst = sorted(rng.sample(space, size))
            lists.append(lst)
            defects.append({x: 0 for x in lst})
        elif list_model == "uniform-k":
            if k > space_size:
                raise InfeasibleParams("k exceeds the color space")
            lst = sorted(rng.sample(space, k))
            lists.append(lst)
            defects.append({x: 0 for x in lst})
        else:
            size = min(space_size, max(1, k))
            lst = sorted(rng.sample(space, size))
            dv = {x: rng.randint(0, max_defect) for x in lst}
            exponent, need = _target_threshold(target, graph, v, space_size, g, alpha)
            double = 2 if target == "eq2" else 1

            def total() -> int:
                return sum((double * d + 1) ** exponent for d in dv.values())

            guard = 0
            while total() < need:
                x = lst[guard % len(lst)]
                dv[x] += 1
                guard += 1
                if guard > 10_000_000:
                    raise InfeasibleParams("defect budget did not converge")
            lists.append(lst)
            defects.append(dv)
    return LdcInstance.build(space, lists, defects, flavor=flavor, g=g)

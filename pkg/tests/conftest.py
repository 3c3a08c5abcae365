"""Shared builders for the test suite."""

from __future__ import annotations

import random

from listdefect import ColoredGraph, LdcInstance


def complete_graph(n: int) -> ColoredGraph:
    return ColoredGraph.build(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def ring_graph(n: int, oriented: bool = False) -> ColoredGraph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return ColoredGraph.build(n, edges, orientation=edges if oriented else None)


def random_dag(n: int, max_out: int, p: float, seed: int) -> ColoredGraph:
    """Random DAG with outdegree capped at max_out, oriented low-to-high."""
    rng = random.Random(seed)
    edges = []
    outdeg = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if outdeg[u] < max_out and rng.random() < p:
                edges.append((u, v))
                outdeg[u] += 1
    return ColoredGraph.build(n, edges, orientation=edges)


def uniform_instance(
    graph: ColoredGraph,
    space_size: int,
    list_size: int,
    defect: int,
    seed: int,
    flavor: str = "oriented",
    g: int = 0,
) -> LdcInstance:
    rng = random.Random(seed)
    space = list(range(space_size))
    lists = [sorted(rng.sample(space, list_size)) for _ in range(graph.n)]
    return LdcInstance.build(
        space, lists, [{x: defect for x in l} for l in lists], flavor=flavor, g=g
    )


def blockspread_instance(graph: ColoredGraph, seed: int) -> LdcInstance:
    """|C| = 256 split into 16 blocks of 16; each list takes one color per
    block, every defect is 7.  Satisfies the space-reduction condition with
    kappa = 4 at every level for outdegrees up to 2."""
    rng = random.Random(seed)
    space = list(range(256))
    lists = [
        sorted(16 * b + rng.randrange(16) for b in range(16)) for _ in range(graph.n)
    ]
    return LdcInstance.build(
        space, lists, [{x: 7 for x in l} for l in lists], flavor="oriented", g=0
    )

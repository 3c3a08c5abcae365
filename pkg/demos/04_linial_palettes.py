"""Palette shrinking: from n ids down to O(max_degree^2) colors.

One round maps a P-coloring to a q^2-coloring by viewing colors as low
degree polynomials over GF(q) and picking an evaluation point that
separates a node from its neighbors.  The schedule below shows the
chosen primes and degrees per round.
"""

import random

from listdefect import ColoredGraph, defective_linial, linial_coloring, linial_palette, linial_schedule

for n in (64, 512):
    sched, palette = linial_schedule(n, 2)
    print(f"ring n={n}: schedule {sched} -> palette {palette}")
    ring = ColoredGraph.build(n, [(i, (i + 1) % n) for i in range(n)])
    out, trace = linial_coloring(ring)
    assert all(out.colors[u] != out.colors[v] for u, v in ring.edges())
    print(f"  rounds {trace.rounds_elapsed}, colors used {len(set(out.colors))}")

rng = random.Random(0)
n = 300
edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 6 / n]
g = ColoredGraph.build(n, edges)
out, trace = linial_coloring(g)
print(
    f"gnp n={n} max_degree={g.max_degree()}: palette {linial_palette(g)}"
    f" (8*D^2 = {8 * g.max_degree() ** 2}), rounds {trace.rounds_elapsed}"
)

# the oriented defective variant tolerates d same-color out-neighbors
dag_edges = [(u, v) for u, v in edges]
dag = ColoredGraph.build(n, dag_edges, orientation=dag_edges)
out, _ = defective_linial(dag, 2)
worst = max(
    sum(1 for u in dag.out_neighbors[v] if out.colors[u] == out.colors[v])
    for v in range(n)
)
print(f"defective d=2: {len(set(out.colors))} colors, worst same-color outdegree {worst}")

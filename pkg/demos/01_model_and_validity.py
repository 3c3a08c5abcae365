"""Walk through the data model: graphs, instances, the three validity flavors.

A list defective coloring allows every node v at most d_v(x) neighbors of
its chosen color x.  The oriented variant counts only out-neighbors of a
given edge orientation; the arbdefective variant lets the algorithm
choose the orientation itself.
"""

from listdefect import (
    ColoredGraph,
    ColoringOutput,
    LdcInstance,
    check_existence_condition,
    validate_ldc,
)

# a 5-cycle with an orientation following the cycle
n = 5
edges = [(i, (i + 1) % n) for i in range(n)]
graph = ColoredGraph.build(n, edges, orientation=edges)
print("graph: 5-cycle, degrees", [graph.degree(v) for v in range(n)])

space = [0, 1, 2, 7]
lists = [[0, 1], [0, 7], [1, 2], [0, 1], [2, 7]]
defects = [{0: 1, 1: 0}, {0: 0, 7: 1}, {1: 1, 2: 0}, {0: 0, 1: 1}, {2: 0, 7: 0}]

for flavor in ("defective", "oriented", "arbdefective"):
    inst = LdcInstance.build(space, lists, defects, flavor=flavor)
    coloring = ColoringOutput(
        (0, 7, 1, 1, 2),
        orientation_out=tuple(edges) if flavor == "arbdefective" else None,
    )
    report = validate_ldc(graph, inst, coloring)
    print(f"{flavor:>12}: valid={report.valid} conflicts={report.conflicts}")

# the existence conditions of the sequential solvers
inst = LdcInstance.build(space, lists, defects, flavor="defective")
print("sum(d+1) > deg per node:", check_existence_condition(graph, inst))

# proximity: with g=1, colors 0 and 1 collide as well
close = LdcInstance.build(space, lists, defects, flavor="defective", g=1)
report = validate_ldc(graph, close, ColoringOutput((0, 7, 1, 1, 2)))
print("g=1 conflicts:", report.conflicts, "valid:", report.valid)

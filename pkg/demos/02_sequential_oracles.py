"""The centralized solvers: recoloring walk, Euler orientation, brute force.

The recoloring walk starts from the first color of every list and keeps
fixing an unhappy node; the potential M + sum(deg - d) drops by at least
one per step, so it stops within 3|E| recolorings.  The arbdefective
solver doubles the defects, solves the undirected problem, and orients
each color class along an Euler tour.
"""

from listdefect import (
    ColoredGraph,
    LdcInstance,
    exhaustive_solve,
    sequential_arbdefective,
    sequential_ldc,
    validate_ldc,
)

k4 = ColoredGraph.build(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
inst = LdcInstance.build([0, 1], [[0, 1]] * 4, [{0: 1, 1: 1}] * 4)
out, stats = sequential_ldc(k4, inst)
print("K4 colors:", out.colors)
print("potential walk:", stats.phi_history, f"({stats.recolorings} recolorings)")
print("valid:", validate_ldc(k4, inst, out).valid)

# a monochromatic triangle with arbdefect 1: the Euler tour orients the
# cycle so everyone has exactly one same-color out-neighbor
k3 = ColoredGraph.build(3, [(0, 1), (0, 2), (1, 2)])
mono = LdcInstance.build([9], [[9]] * 3, [{9: 1}] * 3, flavor="arbdefective")
out, _ = sequential_arbdefective(k3, mono)
print("\ntriangle orientation:", out.orientation_out)

# tightness of the existence bound on cliques: sum(d+1) = Delta is not enough
for delta in (2, 3, 4):
    clique = ColoredGraph.build(
        delta + 1, [(u, v) for u in range(delta + 1) for v in range(u + 1, delta + 1)]
    )
    tight = LdcInstance.build([0], [[0]] * (delta + 1), [{0: delta - 1}] * (delta + 1))
    loose = LdcInstance.build([0], [[0]] * (delta + 1), [{0: delta}] * (delta + 1))
    print(
        f"K_{delta+1}: sum={delta} ->",
        "UNSAT" if exhaustive_solve(clique, tight) is None else "SAT",
        f"| sum={delta+1} ->",
        "UNSAT" if exhaustive_solve(clique, loose) is None else "SAT",
    )

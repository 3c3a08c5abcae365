"""Initial proper colorings: iterated polynomial color reduction.

One reduction round maps a P-coloring to a q^2-coloring: a color is a
polynomial of degree at most e over GF(q) (its base-q digits), and a node
picks an evaluation point where it differs from all conflicting
neighbors.  Distinct polynomials of degree <= e agree on at most e
points, so with D relevant neighbors there are at most D*e bad points;
any prime q > D*e leaves a good point, and q > D*e/(d+1) leaves a point
with at most d collisions (the defective variant).  Rounds repeat while
they shrink the palette; the defective step, when requested, runs once at
the end.

The whole schedule is a function of the public quantities (n, max degree
or max outdegree, defect), so every node derives it locally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import MissingOrientation
from .graphs import ColoredGraph, ColoringOutput
from .runtime import NodeView, RawField, RoundTrace, run


def _is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x < 4:
        return True
    if x % 2 == 0:
        return False
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def _e_min(q: int, palette: int) -> int:
    """Smallest e >= 1 with q**(e+1) >= palette."""
    e = 1
    power = q * q
    while power < palette:
        e += 1
        power *= q
    return e


def _reduction_round(palette: int, base: int, defect: int) -> Optional[tuple[int, int]]:
    """Smallest prime q (with its degree e) that shrinks the palette.

    Needs q**(e+1) >= palette, q*(defect+1) > base*e and q*q < palette;
    returns None when no prime shrinks the palette any further.
    """
    q = 2
    while q * q < palette:
        if _is_prime(q):
            e = _e_min(q, palette)
            if q * (defect + 1) > base * e:
                return q, e
        q += 1
    return None


def linial_schedule(
    palette0: int, base: int, defect: int = 0
) -> tuple[list[tuple[int, int, int]], int]:
    """Reduction schedule [(q, e, round_defect)...] and the final palette.

    Proper rounds (round_defect 0) run while they shrink; a single
    defective round is appended at the end when ``defect`` >= 1, because
    defective colorings cannot seed another polynomial round (equal
    colors mean equal polynomials).
    """
    sched: list[tuple[int, int, int]] = []
    palette = palette0
    while True:
        step = _reduction_round(palette, base, 0)
        if step is None:
            break
        q, e = step
        sched.append((q, e, 0))
        palette = q * q
    if defect >= 1:
        step = _reduction_round(palette, base, defect)
        if step is not None:
            q, e = step
            sched.append((q, e, defect))
            palette = q * q
    return sched, palette


def _poly_eval(color: int, q: int, e: int, a: int) -> int:
    value = 0
    c = color
    power = 1
    for _ in range(e + 1):
        value = (value + (c % q) * power) % q
        c //= q
        power = (power * a) % q
    return value


@dataclass
class _LinialProgram:
    schedule: list[tuple[int, int, int]]
    palettes: list[int]  # palette entering each reduction step
    oriented: bool
    trivial_color: Optional[int]  # everyone outputs this at init (degenerate graphs)

    def init(self, view: NodeView):
        if self.trivial_color is not None:
            return None, self.trivial_color
        if not self.schedule:
            return None, view.node
        relevant = view.out_neighbors if self.oriented else view.neighbors
        return {"view": view, "color": view.node, "relevant": relevant}, None

    def _bits(self, step_idx: int) -> int:
        p = self.palettes[step_idx]
        return max(1, (p - 1).bit_length())

    def step(self, state, inbox, round_no: int):
        view = state["view"]
        if round_no > 1:
            # apply reduction round_no-2 using last round's colors
            q, e, d = self.schedule[round_no - 2]
            mine = state["color"]
            others = [
                inbox[u]["color"].value for u in state["relevant"] if u in inbox
            ]
            chosen = None
            for a in range(q):
                val = _poly_eval(mine, q, e, a)
                collisions = sum(
                    1 for c in others if _poly_eval(c, q, e, a) == val
                )
                if collisions <= d:
                    chosen = a * q + val
                    break
            assert chosen is not None, "prime choice guarantees a good point"
            state["color"] = chosen
            if round_no - 1 == len(self.schedule):
                return state, {}, chosen
        msg = {"color": RawField(state["color"], self._bits(round_no - 1))}
        outbox = {u: msg for u in view.neighbors}
        return state, outbox, None


def _make_program(graph: ColoredGraph, base: int, defect: int, oriented: bool):
    if graph.n == 0:
        return _LinialProgram([], [], oriented, trivial_color=0), 1
    if base == 0:
        # no conflicts possible at all
        return _LinialProgram([], [], oriented, trivial_color=0), 1
    sched, palette = linial_schedule(graph.n, base, defect)
    palettes = [graph.n] + [q * q for q, _, _ in sched]
    return _LinialProgram(sched, palettes, oriented, None), palette


def linial_program(graph: ColoredGraph):
    """The proper-coloring reduction as a NodeProgram value."""
    program, _ = _make_program(graph, graph.max_degree(), 0, oriented=False)
    return program


def defective_linial_program(graph: ColoredGraph, d: int):
    """The oriented d-defective reduction as a NodeProgram value."""
    if graph.out_neighbors is None:
        raise MissingOrientation("defective_linial needs an oriented graph")
    beta = max((graph.outdegree(v) for v in range(graph.n)), default=0)
    if d >= beta:
        return _LinialProgram([], [], True, trivial_color=0)
    program, _ = _make_program(graph, graph.max_beta(), d, oriented=True)
    return program


def linial_coloring(graph: ColoredGraph) -> tuple[ColoringOutput, RoundTrace]:
    """Proper coloring with an O(max_degree^2)-size palette.

    Unique ids seed an n-coloring; each reduction round shrinks the
    palette as long as some prime q with q*q < palette admits the degree
    bound.  Isolated-node graphs finish with color 0 in zero rounds.
    """
    trace = run(graph, linial_program(graph))
    return ColoringOutput(tuple(trace.outputs)), trace


def linial_palette(graph: ColoredGraph) -> int:
    """Declared final palette size of linial_coloring on this graph."""
    if graph.n == 0 or graph.max_degree() == 0:
        return 1
    _, palette = linial_schedule(graph.n, graph.max_degree(), 0)
    return palette


def defective_linial(graph: ColoredGraph, d: int) -> tuple[ColoringOutput, RoundTrace]:
    """Oriented d-defective coloring: at most d out-neighbors share a color.

    Proper (oriented) reduction rounds first, then one defective round
    with the collision budget d.  When d already dominates every
    outdegree a single color suffices.
    """
    trace = run(graph, defective_linial_program(graph, d))
    return ColoringOutput(tuple(trace.outputs)), trace


def defective_linial_palette(graph: ColoredGraph, d: int) -> int:
    beta = max((graph.outdegree(v) for v in range(graph.n)), default=0)
    if d >= beta:
        return 1
    _, palette = linial_schedule(graph.n, graph.max_beta(), d)
    return palette

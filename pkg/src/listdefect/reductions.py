"""Recursive color-space reduction and the degree-halving framework.

Space reduction: partition the color space into p contiguous chunks,
solve a p-color OLDC to pick a chunk per node (defects are the budgets
beta_{v,i} derived from the per-chunk share of the defect energy), then
recurse inside each chunk on the nodes that picked it.  Nodes in
different chunks can never conflict, so the recursion is sound by
construction and each level costs one inner-solver run.

Degree halving: repeatedly color a portion of the graph so that the
uncolored subgraph's maximum degree at least halves per stage.  A stage
computes a q-color arbdefective decomposition with arbdefect delta,
iterates over its classes, and extends the partial coloring on the
class-i nodes that still have many uncolored neighbors, using an inner
oriented-LDC solver on the residual lists (colors not yet exhausted by
colored neighbors).  Edges always point from later-colored to
earlier-colored nodes, so finished nodes never gain same-color
out-neighbors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

from .errors import (
    ConditionViolated,
    FailFast,
    InvalidInstance,
    MissingOrientation,
    NodeFailure,
)
from .graphs import (
    FLAVOR_ARBDEFECTIVE,
    FLAVOR_DEFECTIVE,
    FLAVOR_ORIENTED,
    ColoredGraph,
    ColoringOutput,
    LdcInstance,
    validate_ldc,
)
from .linial import defective_linial, defective_linial_palette, linial_coloring
from .oldc_basic import OldcConfig, multi_defect_oldc
from .oldc_main import MainConfig, main_oldc
from .oracle import sequential_arbdefective, sequential_ldc
from .runtime import RoundTrace, concat_traces, merge_parallel


# -- inner solvers ---------------------------------------------------------------


class InnerSolver(Protocol):
    """An oriented LDC solver with a declared (nu, kappa) guarantee.

    ``solve`` must color every node of the (oriented) graph so that each
    node v has at most d_v(x_v) out-neighbors of its color, or raise a
    FailFast error.  ``kappa(p)`` is the list-size strengthening the
    solver needs at maximum list size p.
    """

    nu: float

    def kappa(self, p: int) -> float: ...

    def solve(
        self, graph: ColoredGraph, inst: LdcInstance
    ) -> tuple[ColoringOutput, RoundTrace]: ...


@dataclass
class OracleInner:
    """Centralized fallback: list defective coloring on the undirected
    graph, which dominates any oriented variant.  nu = 0, kappa = 1."""

    nu: float = 0.0

    def kappa(self, p: int) -> float:
        return 1.0

    def solve(self, graph, inst):
        undirected = LdcInstance(
            inst.color_space, inst.lists, inst.defects, FLAVOR_DEFECTIVE, inst.g
        )
        out, _ = sequential_ldc(graph, undirected)
        return out, RoundTrace(outputs=list(out.colors))


@dataclass
class BasicInner:
    """The basic OLDC algorithm as an inner solver (nu = 1)."""

    config: OldcConfig = field(default_factory=OldcConfig)
    kappa_value: float = 4.0

    nu: float = 1.0

    def kappa(self, p: int) -> float:
        return self.kappa_value

    def solve(self, graph, inst):
        return multi_defect_oldc(graph, inst, config=self.config)


@dataclass
class MainInner:
    """The full OLDC algorithm as an inner solver (nu = 1)."""

    config: MainConfig = field(default_factory=MainConfig)
    kappa_value: float = 4.0

    nu: float = 1.0

    def kappa(self, p: int) -> float:
        return self.kappa_value

    def solve(self, graph, inst):
        return main_oldc(graph, inst, self.config)


# -- recursive color-space reduction ----------------------------------------------


@dataclass(frozen=True)
class SpacePartition:
    """Contiguous partition of a (padded) color space into p^k cells."""

    colors: tuple[int, ...]  # sorted, padded with dummies above max
    p: int
    depth: int

    @staticmethod
    def build(color_space: Sequence[int], p: int) -> "SpacePartition":
        colors = tuple(sorted(color_space))
        if p < 2:
            raise InvalidInstance("branching factor p must be at least 2")
        depth = max(1, math.ceil(math.log(max(2, len(colors)), p)))
        padded = list(colors)
        top = (colors[-1] if colors else 0) + 1
        while len(padded) < p**depth:
            padded.append(top)
            top += 1
        return SpacePartition(tuple(padded), p, depth)

    def chunks(self, colors: Sequence[int]) -> list[tuple[int, ...]]:
        size = len(colors) // self.p
        return [tuple(colors[i * size : (i + 1) * size]) for i in range(self.p)]


def space_reduced_oldc(
    graph: ColoredGraph,
    inst: LdcInstance,
    p: int,
    inner: InnerSolver,
) -> tuple[ColoringOutput, RoundTrace]:
    """Solve an oriented LDC instance by recursive space reduction.

    Per node the strengthened condition
        sum (d_v(x)+1)^(1+nu) >= beta_v^(1+nu) * kappa(p)^k,   k = ceil(log_p |C|)
    must hold.  Each level solves a p-color choice instance with the
    inner solver and recurses on the induced subgraphs; sub-runs of one
    level merge in parallel (disjoint node sets), levels concatenate.
    """
    if graph.out_neighbors is None:
        raise MissingOrientation("space reduction needs an orientation")
    if inst.flavor != FLAVOR_ORIENTED:
        raise InvalidInstance("space reduction expects an oriented instance")
    if p >= len(inst.color_space):
        return inner.solve(graph, inst)
    part = SpacePartition.build(inst.color_space, p)
    k = part.depth
    nu = inner.nu
    kappa_p = inner.kappa(p)
    for v in range(graph.n):
        total = sum((d + 1) ** (1 + nu) for d in inst.defects[v].values())
        if total < graph.beta(v) ** (1 + nu) * kappa_p**k:
            raise ConditionViolated(
                f"node {v}: strengthened condition fails at p={p}, k={k}"
            )
    return _reduce_level(graph, inst, part.colors, p, inner, k)


def _reduce_level(
    graph: ColoredGraph,
    inst: LdcInstance,
    colors: tuple[int, ...],
    p: int,
    inner: InnerSolver,
    k: int,
) -> tuple[ColoringOutput, RoundTrace]:
    if k <= 1 or len(colors) <= p:
        return inner.solve(graph, inst)
    nu = inner.nu
    kappa_p = inner.kappa(p)
    size = len(colors) // p
    chunk_of = {c: i for i, c in enumerate(colors)}
    chunks = [set(colors[i * size : (i + 1) * size]) for i in range(p)]

    choice_lists: list[tuple[int, ...]] = []
    choice_defects: list[dict[int, int]] = []
    lists_by_chunk: list[dict[int, list[int]]] = [dict() for _ in range(graph.n)]
    for v in range(graph.n):
        beta_v = graph.beta(v)
        for x in inst.lists[v]:
            lists_by_chunk[v].setdefault(chunk_of[x] // size, []).append(x)
        lam_sum = 0.0
        defects_v: dict[int, int] = {}
        for i, xs in sorted(lists_by_chunk[v].items()):
            energy = sum((inst.defects[v][x] + 1) ** (1 + nu) for x in xs)
            lam = energy / (beta_v ** (1 + nu) * kappa_p**k)
            lam_sum += lam
            defects_v[i] = math.floor(
                (lam * beta_v ** (1 + nu) * kappa_p) ** (1 / (1 + nu))
            )
        if lam_sum < 1.0 - 1e-9:
            raise NodeFailure(f"chunk shares sum to {lam_sum:.3f} < 1", node=v)
        choice_lists.append(tuple(sorted(defects_v)))
        choice_defects.append(defects_v)

    choice_inst = LdcInstance.build(
        list(range(p)), choice_lists, choice_defects, flavor=FLAVOR_ORIENTED, g=0
    )
    choice_out, choice_trace = inner.solve(graph, choice_inst)

    by_chunk: dict[int, list[int]] = {}
    for v in range(graph.n):
        by_chunk.setdefault(choice_out.colors[v], []).append(v)

    colors_out: list[Optional[int]] = [None] * graph.n
    sub_traces = []
    for i, members in sorted(by_chunk.items()):
        sub, keep = graph.subgraph(members)
        sub_space = tuple(sorted(chunks[i]))
        sub_inst = LdcInstance.build(
            sub_space,
            [lists_by_chunk[v][i] for v in keep],
            [
                {x: inst.defects[v][x] for x in lists_by_chunk[v][i]}
                for v in keep
            ],
            flavor=FLAVOR_ORIENTED,
            g=0,
        )
        # the chunk choice bounds the within-chunk outdegree by the defect
        for idx, v in enumerate(keep):
            within = len(sub.out_neighbors[idx])
            if within > choice_defects[v][i]:
                raise NodeFailure(
                    f"chunk outdegree {within} exceeds budget {choice_defects[v][i]}",
                    node=v,
                )
        sub_out, sub_trace = _reduce_level(sub, sub_inst, sub_space, p, inner, k - 1)
        sub_traces.append(sub_trace)
        for idx, v in enumerate(keep):
            colors_out[v] = sub_out.colors[idx]
            # the final color's chunk path must match the choice
            assert sub_out.colors[idx] in chunks[i], "color escaped its chunk"

    trace = concat_traces([choice_trace, merge_parallel(sub_traces)])
    output = ColoringOutput(tuple(colors_out))
    report = validate_ldc(graph, inst, output)
    if not report.valid:
        raise NodeFailure(f"space reduction output invalid at {report.violating_nodes()}")
    trace.outputs = list(output.colors)
    return output, trace


def preset_time(
    graph: ColoredGraph, inst: LdcInstance, inner: InnerSolver
) -> tuple[ColoringOutput, RoundTrace]:
    """Branching factor 2**ceil(sqrt(log2 beta * log2 kappa)) (time preset)."""
    beta = graph.max_beta()
    kl = max(2.0, inner.kappa(inst.max_list_size))
    exponent = math.ceil(math.sqrt(max(1.0, math.log2(max(2, beta))) * math.log2(kl)))
    p = max(2, min(2**exponent, len(inst.color_space)))
    return space_reduced_oldc(graph, inst, p, inner)


def preset_message(
    graph: ColoredGraph, inst: LdcInstance, inner: InnerSolver, r: int
) -> tuple[ColoringOutput, RoundTrace]:
    """Branching factor ceil(|C|**(1/r)) (message-size preset); r = 1 means
    no reduction at all."""
    if r < 1:
        raise InvalidInstance("r must be at least 1")
    if r == 1:
        return inner.solve(graph, inst)
    p = max(2, math.ceil(len(inst.color_space) ** (1.0 / r)))
    return space_reduced_oldc(graph, inst, p, inner)


def message_preset_p(space_size: int, r: int) -> int:
    return space_size if r == 1 else max(2, math.ceil(space_size ** (1.0 / r)))


# -- arbdefective subroutine -------------------------------------------------------


def arbdefective_subroutine(
    graph: ColoredGraph, q: int, delta: int
) -> tuple[ColoringOutput, RoundTrace]:
    """A delta-arbdefective q-coloring with an explicit orientation.

    Requires q*(delta+1) > max degree.  When the graph carries an
    orientation whose defective coloring already fits q colors, the
    distributed defective variant is used; otherwise the doubled-defect
    sequential route (which always applies here).  Pluggable: the
    framework accepts any callable with this signature.
    """
    delta_max = graph.max_degree()
    if q * (delta + 1) <= delta_max:
        raise ConditionViolated(f"q(delta+1)={q*(delta+1)} <= max degree {delta_max}")
    if graph.out_neighbors is not None and defective_linial_palette(graph, delta) <= q:
        out, trace = defective_linial(graph, delta)
        oriented = tuple(graph.oriented_edges())
        out = ColoringOutput(out.colors, oriented)
        return out, trace
    inst = LdcInstance.build(
        list(range(q)),
        [list(range(q))] * graph.n,
        [{x: delta for x in range(q)}] * graph.n,
        flavor=FLAVOR_ARBDEFECTIVE,
        g=0,
    )
    out, _ = sequential_arbdefective(graph, inst)
    return out, RoundTrace(outputs=list(out.colors))


# -- degree-halving framework ------------------------------------------------------


@dataclass
class PartialColoring:
    """Colors assigned so far plus the bookkeeping the framework relies on."""

    colors: list[Optional[int]]
    taken: dict[tuple[int, int], int]  # (node, color) -> colored neighbors with it
    oriented: list[tuple[int, int]]

    @staticmethod
    def empty(n: int) -> "PartialColoring":
        return PartialColoring([None] * n, {}, [])

    def a(self, v: int, x: int) -> int:
        return self.taken.get((v, x), 0)

    def assign(self, graph: ColoredGraph, v: int, x: int) -> None:
        self.colors[v] = x
        for u in graph.adjacency[v]:
            self.taken[(u, x)] = self.taken.get((u, x), 0) + 1


@dataclass
class StageRow:
    stage: int
    class_index: int
    colored: int
    max_uncolored_degree: int
    rounds: int
    max_bits: int

    @staticmethod
    def header() -> str:
        return "stage,class,colored_count,max_uncolored_degree,rounds,max_bits"

    def csv(self) -> str:
        return (
            f"{self.stage},{self.class_index},{self.colored},"
            f"{self.max_uncolored_degree},{self.rounds},{self.max_bits}"
        )


@dataclass
class FrameworkConfig:
    inner: InnerSolver = field(default_factory=OracleInner)
    fallback_to_oracle: bool = True
    subroutine: Callable[[ColoredGraph, int, int], tuple[ColoringOutput, RoundTrace]] = (
        arbdefective_subroutine
    )
    max_stages: Optional[int] = None


def degree_halving_framework(
    graph: ColoredGraph,
    inst: LdcInstance,
    config: Optional[FrameworkConfig] = None,
) -> tuple[ColoringOutput, RoundTrace, list[StageRow]]:
    """Solve a list arbdefective instance with sum (d_v(x)+1) > deg(v).

    Each stage runs the arbdefective decomposition on the uncolored
    subgraph and colors, class by class, the nodes that still have at
    least half the stage degree uncolored; the residual lists always
    satisfy the inner solver's sequential condition, so with the oracle
    fallback every stage completes and the uncolored maximum degree at
    least halves.  The returned orientation covers every edge: within an
    inner batch it follows the decomposition, across batches it points
    from later-colored to earlier-colored (so finished nodes never gain
    same-color out-neighbors), and ties between simultaneously uncolored
    nodes resolve by coloring time.
    """
    config = config or FrameworkConfig()
    if inst.flavor != FLAVOR_ARBDEFECTIVE:
        raise InvalidInstance("framework expects an arbdefective instance")
    if inst.g != 0:
        raise InvalidInstance("framework requires g = 0")
    n = graph.n
    for v in range(n):
        if sum(d + 1 for d in inst.defects[v].values()) <= graph.degree(v):
            raise ConditionViolated(f"node {v}: sum(d+1) <= deg")

    partial = PartialColoring.empty(n)
    uncolored = set(range(n))
    traces: list[RoundTrace] = []
    rows: list[StageRow] = []
    order_colored: dict[int, int] = {}
    clock = 0
    stage = 0
    delta0 = graph.max_degree()
    max_stages = config.max_stages or (max(1, delta0).bit_length() + 2)

    def residual(v: int) -> tuple[list[int], dict[int, int]]:
        lst = [x for x in inst.lists[v] if partial.a(v, x) <= inst.defects[v][x]]
        dd = {x: inst.defects[v][x] - partial.a(v, x) for x in lst}
        # shrink to uncolored degree + 1 worth of budget
        deg_u = sum(1 for u in graph.adjacency[v] if u in uncolored)
        keep: list[int] = []
        budget = 0
        for x in lst:
            keep.append(x)
            budget += dd[x] + 1
            if budget > deg_u:
                break
        return keep, {x: dd[x] for x in keep}

    while uncolored:
        stage += 1
        if stage > max_stages:
            raise NodeFailure(f"degree halving stalled after {max_stages} stages")
        sub_nodes = sorted(uncolored)
        stage_graph, keep = graph.subgraph(sub_nodes)
        back = {i: v for i, v in enumerate(keep)}
        delta_s = stage_graph.max_degree()
        if delta_s == 0:
            for v in sub_nodes:
                lst, _ = residual(v)
                assert lst, "residual condition left an empty list"
                partial.assign(graph, v, lst[0])
                order_colored[v] = clock
                clock += 1
            uncolored.clear()
            rows.append(StageRow(stage, 0, len(sub_nodes), 0, 0, 0))
            break

        factor = max(
            1.0,
            inst.max_list_size ** (config.inner.nu / (1 + config.inner.nu))
            * config.inner.kappa(inst.max_list_size) ** (1 / (1 + config.inner.nu)),
        )
        delta = max(0, math.floor(delta_s / (2 * factor)))
        q = delta_s // (delta + 1) + 1
        dec_out, dec_trace = config.subroutine(stage_graph, q, delta)
        traces.append(dec_trace)
        dec_outn: list[list[int]] = [[] for _ in keep]
        for a, b in dec_out.orientation_out or ():
            dec_outn[a].append(b)

        def is_active(i: int) -> bool:
            v = back[i]
            if v not in uncolored:
                return False
            deg_u = sum(1 for u in graph.adjacency[v] if u in uncolored)
            if 2 * deg_u >= delta_s:
                return True
            # defect absorbs the whole remaining neighborhood: color now
            return any(
                partial.a(v, x) <= inst.defects[v][x]
                and inst.defects[v][x] - partial.a(v, x) >= deg_u
                for x in inst.lists[v]
            )

        for cls in range(q):
            members = [i for i in range(len(keep)) if dec_out.colors[i] == cls]
            active = [i for i in members if is_active(i)]
            if not active:
                rows.append(StageRow(stage, cls, 0, delta_s, 0, 0))
                continue
            batch_nodes = [back[i] for i in active]
            batch_graph, batch_keep = stage_graph.subgraph(active)
            ori = []
            active_index = {i: j for j, i in enumerate(active)}
            for i in active:
                for b in dec_outn[i]:
                    if b in active_index:
                        ori.append((active_index[i], active_index[b]))
            batch_graph = ColoredGraph.build(
                batch_graph.n,
                batch_graph.edges(),
                orientation=ori,
                init_colors=batch_graph.init_colors,
                m=batch_graph.m,
            )
            lists_b, defects_b = [], []
            for v in batch_nodes:
                lst, dd = residual(v)
                if not lst:
                    raise NodeFailure("empty residual list", node=v)
                total = sum(d + 1 for d in dd.values())
                deg_u = sum(1 for u in graph.adjacency[v] if u in uncolored)
                if total <= deg_u:
                    raise NodeFailure(
                        f"residual budget {total} at uncolored degree {deg_u}", node=v
                    )
                lists_b.append(lst)
                defects_b.append(dd)
            space_b = sorted({x for l in lists_b for x in l})
            inst_b = LdcInstance.build(
                space_b, lists_b, defects_b, flavor=FLAVOR_ORIENTED, g=0
            )
            try:
                out_b, tr_b = config.inner.solve(batch_graph, inst_b)
            except FailFast:
                if not config.fallback_to_oracle:
                    raise
                out_b, tr_b = OracleInner().solve(batch_graph, inst_b)
            traces.append(tr_b)
            for j, v in enumerate(batch_nodes):
                partial.assign(graph, v, out_b.colors[j])
                order_colored[v] = clock
            clock += 1
            uncolored.difference_update(batch_nodes)
            # batch-internal orientation follows the decomposition
            for a, b in batch_graph.oriented_edges():
                partial.oriented.append((batch_nodes[a], batch_nodes[b]))
            rows.append(
                StageRow(stage, cls, len(batch_nodes), delta_s, tr_b.rounds_elapsed, tr_b.max_bits())
            )
            # safety: a colored node never exceeds its defect later on
            _check_partial_safety(graph, inst, partial, order_colored)

        still = [v for v in uncolored]
        for v in still:
            deg_u = sum(1 for u in graph.adjacency[v] if u in uncolored)
            if 2 * deg_u > delta_s:
                raise NodeFailure(
                    f"degree halving failed: uncolored degree {deg_u} of {delta_s}", node=v
                )
            lst, dd = residual(v)
            if sum(d + 1 for d in dd.values()) <= deg_u:
                raise NodeFailure("residual condition lost", node=v)

    # orient the remaining (cross-batch) edges from later- to earlier-colored;
    # equal coloring times only happen inside a batch, whose edges are done
    seen = {(min(a, b), max(a, b)) for a, b in partial.oriented}
    for u, v in graph.edges():
        if (u, v) in seen:
            continue
        assert order_colored[u] != order_colored[v], "batch edge left unoriented"
        partial.oriented.append((u, v) if order_colored[u] > order_colored[v] else (v, u))

    output = ColoringOutput(tuple(partial.colors), tuple(sorted(partial.oriented)))
    report = validate_ldc(graph, inst, output)
    if not report.valid:
        raise NodeFailure(f"framework output invalid at {report.violating_nodes()}")
    trace = concat_traces(traces)
    trace.outputs = list(output.colors)
    return output, trace, rows


def _check_partial_safety(graph, inst, partial, order_colored):
    outn: dict[int, list[int]] = {}
    for a, b in partial.oriented:
        outn.setdefault(a, []).append(b)
    for v, x in enumerate(partial.colors):
        if x is None:
            continue
        same = sum(1 for u in outn.get(v, ()) if partial.colors[u] == x)
        if same > inst.defects[v][x]:
            raise NodeFailure(f"partial safety violated: {same} > d", node=v)


# -- the CONGEST pipeline ----------------------------------------------------------


@dataclass
class PipelineConfig:
    space_exponent: int = 2
    r: Optional[int] = None
    bits_budget: Optional[int] = None
    inner_scale: Optional[tuple[int, int]] = None
    alpha: float = 16.0
    use_distributed_inner: bool = True


@dataclass
class _SpaceReducedInner:
    """Message-preset space-reduced main algorithm as the framework inner."""

    r: int
    main_config: MainConfig
    nu: float = 1.0
    kappa_value: float = 4.0

    def kappa(self, p: int) -> float:
        return self.kappa_value

    def solve(self, graph, inst):
        inner = MainInner(config=self.main_config, kappa_value=self.kappa_value)
        return preset_message(graph, inst, inner, self.r)


def congest_pipeline(
    graph: ColoredGraph,
    inst: LdcInstance,
    config: Optional[PipelineConfig] = None,
) -> tuple[ColoringOutput, RoundTrace, list[StageRow]]:
    """degree+1 list coloring under a CONGEST bit budget.

    Composes the initial-coloring subroutine, the message-preset
    space-reduced main OLDC as the framework inner solver (with the
    oracle fallback the down-scaled parameters usually force), and the
    degree-halving framework.  Every message of every distributed phase
    is checked against the bit budget.
    """
    config = config or PipelineConfig()
    delta = graph.max_degree()
    space = len(inst.color_space)
    if space > max(4, delta + 1) ** config.space_exponent:
        raise InvalidInstance(
            f"color space of {space} exceeds degree^{config.space_exponent}"
        )
    r = config.r or 2 * config.space_exponent
    budget = config.bits_budget
    if budget is None:
        chunk = message_preset_p(space, r)
        budget = 8 * (
            chunk * max(1, math.ceil(math.log2(max(2, space))))
            + max(1, math.ceil(math.log2(max(2, graph.n))))
            + 16
        )

    out0, trace0 = linial_coloring(graph)
    for r_bits in trace0.max_message_bits:
        if r_bits > budget:
            raise NodeFailure(f"initial coloring message of {r_bits} bits over budget {budget}")
    m = max(out0.colors) + 1 if graph.n else 1
    colored = ColoredGraph.build(
        graph.n,
        graph.edges(),
        orientation=[(u, v) for u, v in graph.oriented_edges()] if graph.out_neighbors else None,
        init_colors=list(out0.colors),
        m=m,
    )

    arb = LdcInstance(
        inst.color_space, inst.lists, inst.defects, FLAVOR_ARBDEFECTIVE, 0
    )
    main_cfg = MainConfig(
        alpha=config.alpha,
        stage1_scale=config.inner_scale,
        stage2_scale=config.inner_scale,
        bits_per_message=budget,
    )
    inner: InnerSolver
    if config.use_distributed_inner:
        inner = _SpaceReducedInner(r=r, main_config=main_cfg)
    else:
        inner = OracleInner()
    fw_cfg = FrameworkConfig(inner=inner, fallback_to_oracle=True)
    out, trace, rows = degree_halving_framework(colored, arb, fw_cfg)
    for r_bits in trace.max_message_bits:
        if r_bits > budget:
            raise NodeFailure(f"pipeline message of {r_bits} bits over budget {budget}")
    full_trace = concat_traces([trace0, trace])
    full_trace.outputs = list(out.colors)
    return out, full_trace, rows

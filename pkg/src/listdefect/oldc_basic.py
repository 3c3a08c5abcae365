"""Basic generalized oriented list defective coloring.

Single-defect pipeline (each node carries one defect value d_v):

  0.  Nodes whose defect already covers their outdegree skip the
      machinery and take their first list color.
  1.  Every other node restricts its list to the largest residue class
      modulo 2g+1, forms its type (initial color, restricted list,
      gamma class) and reads its family K_v from the shared type table
      (problem P2, solved without communication).
  2.  Round 1 broadcasts the type descriptor (skippers broadcast their
      color instead); round 2 picks C_v in K_v minimizing the number of
      same-or-lower-class out-neighbors whose family could conflict
      (problem P1) and broadcasts its index.
  3.  Gamma classes then decide in descending order: each node takes the
      frequency-minimizing color of C_v, where the frequency counts
      proximity-g occurrences in undecided same-or-lower-class
      out-neighbors' C_u plus decided out-neighbors' colors.

The gamma class of a node is the smallest i with 2**i >= 2*beta_v/(d_v+1)
and candidate sizes are k_i = 2**i * tau, k' = 2**h * tau'.  Every
pigeonhole step of the analysis is asserted numerically at run time and
aborts the run (NodeFailure) when the configured, possibly down-scaled,
parameters cannot support it; a run never emits an unvalidated coloring.

The multi-defect reduction rounds beta_v up and each d_v(x)+1 down to
powers of two, buckets colors by the resulting ratio and hands the
highest-energy bucket to the single-defect pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .conflict import (
    ConflictParams,
    NodeType,
    build_or_load_type_table,
    mu_g,
    residue_restrict,
    tau_g_conflict,
)
from .errors import ListTooSmall, MissingOrientation, NodeFailure
from .graphs import (
    FLAVOR_ORIENTED,
    ColoredGraph,
    ColoringOutput,
    LdcInstance,
    validate_ldc,
)
from .runtime import (
    ColorListField,
    IndexField,
    InitColorField,
    Pow2DefectField,
    RawField,
    RoundTrace,
    run,
)


@dataclass
class OldcConfig:
    """Run configuration shared by the OLDC algorithms.

    alpha scales every list-size requirement; scale_override replaces the
    derived (tau, tau') pair for down-scaled runs.
    """

    alpha: float = 6.0
    scale_override: Optional[tuple[int, int]] = None
    h_override: Optional[int] = None
    candidate_cap: int = 200_000
    cache_dir: Optional[str] = None
    max_rounds: int = 10_000
    bits_per_message: Optional[int] = None
    record_messages: bool = False


def gamma_class_of(beta_v: int, d_v: int) -> int:
    """Smallest i >= 1 with 2**i >= 2*beta_v/(d_v+1)."""
    i = 1
    while (1 << i) * (d_v + 1) < 2 * beta_v:
        i += 1
    return i


def _pow2_floor(x: int) -> int:
    return 1 << (x.bit_length() - 1)


def _pow2_ceil(x: int) -> int:
    return 1 << (x - 1).bit_length()


@dataclass
class _NodeStatics:
    """Read-only per-node data closed over by the node program."""

    skip_color: Optional[int] = None
    defect: int = 0
    gamma: int = 0
    family: tuple[tuple[int, ...], ...] = ()
    restricted: tuple[int, ...] = ()


@dataclass
class _SingleDefectProgram:
    """Node program for the single-defect pipeline; shares the type table."""

    statics: list[_NodeStatics]
    space_size: int
    h: int
    tau: int
    tau_prime: int
    g: int
    beta_max: int
    family_by_node: dict[int, tuple[tuple[int, ...], ...]]

    def init(self, view):
        st = self.statics[view.node]
        state = {
            "view": view,
            "decided": {},     # out-neighbor -> color
            "csets": {},       # out-neighbor -> C_u
            "classes": {},     # out-neighbor -> gamma class
            "cset": None,
            "p1_checked": False,
        }
        return state, None

    def _decision_round(self, gamma: int) -> int:
        return 3 + self.h - gamma

    def step(self, state, inbox, round_no: int):
        view = state["view"]
        st = self.statics[view.node]
        out_set = set(view.out_neighbors)

        for u, msg in inbox.items():
            if "decided" in msg:
                state["decided"][u] = msg["decided"].colors[0]
            if "color" in msg:
                state["decided"][u] = msg["color"].colors[0]
            if "class" in msg:
                state["classes"][u] = msg["class"].value
            if "cset" in msg and u in self.family_by_node:
                state["csets"][u] = self.family_by_node[u][msg["cset"].index]

        if round_no == 1:
            if st.skip_color is not None:
                msg = {"decided": ColorListField((st.skip_color,), self.space_size)}
                return state, {u: msg for u in view.neighbors}, st.skip_color
            msg = {
                "init": InitColorField(view.init_color, view.m),
                "list": ColorListField(st.restricted, self.space_size),
                "defect": Pow2DefectField(st.defect, self.beta_max),
                "class": RawField(st.gamma, max(1, self.h.bit_length())),
            }
            return state, {u: msg for u in view.neighbors}, None

        if round_no == 2:
            fam = st.family
            peers = [
                u
                for u in view.out_neighbors
                if u in state["classes"] and state["classes"][u] <= st.gamma
            ]
            best_idx, best_d = 0, None
            for idx, cand in enumerate(fam):
                d_c = sum(
                    1
                    for u in peers
                    if any(
                        tau_g_conflict(cand, c2, self.tau, self.g)
                        for c2 in self.family_by_node[u]
                    )
                )
                if best_d is None or d_c < best_d:
                    best_idx, best_d = idx, d_c
            beta_v = max(1, len(view.out_neighbors))
            # pigeonhole over the family: best <= beta (tau'-1)/|K| < (d+1)/2
            if best_d * len(fam) > beta_v * (self.tau_prime - 1):
                raise NodeFailure(
                    f"P1 pigeonhole failed: {best_d} conflicts over family of {len(fam)}"
                )
            if 2 * beta_v * (self.tau_prime - 1) >= (st.defect + 1) * len(fam):
                raise NodeFailure(
                    "family too small for the defect budget: "
                    f"beta={beta_v} tau'={self.tau_prime} |K|={len(fam)} d={st.defect}"
                )
            state["cset"] = st.family[best_idx]
            msg = {"cset": IndexField(best_idx, len(fam))}
            return state, {u: msg for u in view.neighbors}, None

        if round_no == 3 and not state["p1_checked"]:
            state["p1_checked"] = True
            conflicts = sum(
                1
                for u, c_u in state["csets"].items()
                if u in out_set
                and state["classes"][u] <= st.gamma
                and tau_g_conflict(c_u, state["cset"], self.tau, self.g)
            )
            if 2 * conflicts > st.defect:
                raise NodeFailure(
                    f"P1 violated: {conflicts} conflicting same-or-lower out-neighbors"
                )

        if round_no == self._decision_round(st.gamma):
            undecided = [
                u
                for u in view.out_neighbors
                if u in state["csets"] and state["classes"][u] <= st.gamma
            ]
            best_x, best_f = None, None
            for x in state["cset"]:
                f = sum(mu_g(x, state["csets"][u], self.g) for u in undecided)
                f += sum(
                    1
                    for u in view.out_neighbors
                    if u in state["decided"] and abs(state["decided"][u] - x) <= self.g
                )
                if best_f is None or f < best_f:
                    best_x, best_f = x, f
            if best_f is None or best_f > st.defect:
                raise NodeFailure(
                    f"frequency bound failed: min frequency {best_f}, defect {st.defect}"
                )
            msg = {"color": ColorListField((best_x,), self.space_size)}
            return state, {u: msg for u in view.neighbors}, best_x

        return state, {}, None


def single_defect_program(
    graph: ColoredGraph,
    color_space: Sequence[int],
    lists: Sequence[Sequence[int]],
    defects: Sequence[int],
    g: int,
    config: Optional[OldcConfig] = None,
) -> _SingleDefectProgram:
    """The single-defect pipeline as a NodeProgram value.

    Precomputes the type table and per-node statics; the returned program
    is a pure state machine suitable for the round engine.
    """
    program, _ = _prepare_single_defect(
        graph, color_space, lists, defects, g, config or OldcConfig()
    )
    return program


def _prepare_single_defect(
    graph: ColoredGraph,
    color_space: Sequence[int],
    lists: Sequence[Sequence[int]],
    defects: Sequence[int],
    g: int,
    config: OldcConfig,
    h_arg: Optional[int] = None,
    predecided: Optional[dict[int, int]] = None,
) -> tuple["_SingleDefectProgram", LdcInstance]:
    if graph.out_neighbors is None:
        raise MissingOrientation("oriented coloring needs an orientation")
    n = graph.n
    predecided = dict(predecided or {})
    lists = [tuple(sorted(set(l))) for l in lists]
    statics = [_NodeStatics() for _ in range(n)]
    space_size = len(color_space)
    beta_max = graph.max_beta()

    classed: list[int] = []
    for v in range(n):
        if v in predecided:
            statics[v].skip_color = predecided[v]
            continue
        if not lists[v]:
            raise ListTooSmall(f"node {v} has an empty color list")
        outdeg = graph.outdegree(v)
        if outdeg <= defects[v]:
            statics[v].skip_color = lists[v][0]
            continue
        beta_v = max(1, outdeg)
        statics[v].defect = defects[v]
        statics[v].gamma = gamma_class_of(beta_v, defects[v])
        classed.append(v)

    # h may be given (or overridden) but must cover every realized class
    h = h_arg or config.h_override or 1
    h = max(h, max((statics[v].gamma for v in classed), default=1))
    params = ConflictParams(
        h=h,
        color_space_size=space_size,
        m=graph.m,
        g=g,
        scale_override=config.scale_override,
    )
    tau, tau_prime = params.tau, params.tau_prime

    types: list[NodeType] = []
    for v in classed:
        beta_v = max(1, graph.outdegree(v))
        need = config.alpha * (beta_v / (defects[v] + 1)) ** 2 * tau * (2 * g + 1)
        if len(lists[v]) < need:
            raise ListTooSmall(
                f"node {v}: |L|={len(lists[v])} < {need:.1f} required at alpha={config.alpha}"
            )
        _, restricted = residue_restrict(lists[v], g)
        k_i = (1 << statics[v].gamma) * tau
        if len(restricted) < k_i:
            raise ListTooSmall(
                f"node {v}: residue-restricted list of {len(restricted)} "
                f"cannot host candidate sets of size {k_i}"
            )
        statics[v].restricted = restricted
        types.append(NodeType(graph.init_colors[v], restricted, statics[v].gamma))

    k_by_class = {i: (1 << i) * tau for i in range(1, h + 1)}
    k_prime = (1 << h) * tau_prime
    table = build_or_load_type_table(
        params, types, k_by_class, k_prime,
        candidate_cap=config.candidate_cap, cache_dir=config.cache_dir,
    )
    family_by_node: dict[int, tuple[tuple[int, ...], ...]] = {}
    for v, t in zip(classed, types):
        fam = table.family_of(t)
        statics[v].family = fam
        family_by_node[v] = fam

    program = _SingleDefectProgram(
        statics=statics,
        space_size=space_size,
        h=h,
        tau=tau,
        tau_prime=tau_prime,
        g=g,
        beta_max=beta_max,
        family_by_node=family_by_node,
    )
    inst = LdcInstance.build(
        color_space,
        [list(lists[v]) if v not in predecided else [predecided[v]] for v in range(n)],
        [
            {x: defects[v] for x in lists[v]}
            if v not in predecided
            else {predecided[v]: graph.outdegree(v)}
            for v in range(n)
        ],
        flavor=FLAVOR_ORIENTED,
        g=g,
    )
    return program, inst


def _run_single_defect(
    graph: ColoredGraph,
    color_space: Sequence[int],
    lists: Sequence[Sequence[int]],
    defects: Sequence[int],
    g: int,
    config: OldcConfig,
    h_arg: Optional[int] = None,
    predecided: Optional[dict[int, int]] = None,
) -> tuple[ColoringOutput, RoundTrace]:
    program, inst = _prepare_single_defect(
        graph, color_space, lists, defects, g, config, h_arg, predecided
    )
    trace = run(
        graph,
        program,
        max_rounds=config.max_rounds,
        bits_per_message=config.bits_per_message,
        record_messages=config.record_messages,
    )
    output = ColoringOutput(tuple(trace.outputs))
    report = validate_ldc(graph, inst, output)
    if not report.valid:
        raise NodeFailure(f"output failed validation at nodes {report.violating_nodes()}")
    return output, trace


def single_defect_oldc(
    graph: ColoredGraph,
    color_space: Sequence[int],
    lists: Sequence[Sequence[int]],
    defects: Sequence[int],
    g: int,
    config: Optional[OldcConfig] = None,
) -> tuple[ColoringOutput, RoundTrace]:
    """Generalized OLDC with one defect value per node.

    Every node ends with at most d_v out-neighbors whose color is within
    distance g of its own, or the run aborts fail-fast.
    """
    return _run_single_defect(graph, color_space, lists, defects, g, config or OldcConfig())


def multi_defect_oldc(
    graph: ColoredGraph,
    inst: LdcInstance,
    h: Optional[int] = None,
    config: Optional[OldcConfig] = None,
) -> tuple[ColoringOutput, RoundTrace]:
    """Full OLDC with per-color defects, by reduction to the single-defect case.

    Rounds beta_v up and d_v(x)+1 down to powers of two, partitions each
    list into same-ratio buckets and keeps the bucket maximizing
    |L_{v,i}| * (d+1)^2 (at least a 1/h fraction of the total); nodes
    with a color whose defect covers their outdegree skip the machinery
    and take the first such color.
    """
    config = config or OldcConfig()
    if graph.out_neighbors is None:
        raise MissingOrientation("oriented coloring needs an orientation")
    if inst.flavor != FLAVOR_ORIENTED:
        raise MissingOrientation("multi_defect_oldc expects an oriented instance")
    n = graph.n
    g = inst.g

    predecided: dict[int, int] = {}
    reduced_lists: list[tuple[int, ...]] = [()] * n
    reduced_defect: list[int] = [0] * n
    max_class = 1
    machinery: list[int] = []
    for v in range(n):
        if not inst.lists[v]:
            raise ListTooSmall(f"node {v} has an empty color list")
        outdeg = graph.outdegree(v)
        first_cover = next((x for x in inst.lists[v] if inst.defects[v][x] >= outdeg), None)
        if first_cover is not None:
            predecided[v] = first_cover
            continue
        beta_hat = _pow2_ceil(max(1, outdeg))
        buckets: dict[int, list[int]] = {}
        for x in inst.lists[v]:
            dhat1 = _pow2_floor(inst.defects[v][x] + 1)
            cls = gamma_class_of(beta_hat, dhat1 - 1)
            buckets.setdefault(cls, []).append(x)
        energy = {
            cls: len(xs) * (_pow2_floor(inst.defects[v][xs[0]] + 1)) ** 2
            for cls, xs in buckets.items()
        }
        total = sum(
            _pow2_floor(inst.defects[v][x] + 1) ** 2 for x in inst.lists[v]
        )
        star = min(energy, key=lambda c: (-energy[c], c))
        h_count = len(buckets)
        assert energy[star] * h_count >= total, "best bucket must carry >= 1/h of the energy"
        xs = buckets[star]
        reduced_lists[v] = tuple(sorted(xs))
        reduced_defect[v] = _pow2_floor(inst.defects[v][xs[0]] + 1) - 1
        max_class = max(max_class, star)
        machinery.append(v)

    h_used = max(h or config.h_override or 1, max_class)
    params = ConflictParams(
        h=h_used, color_space_size=len(inst.color_space), m=graph.m, g=g,
        scale_override=config.scale_override,
    )
    tau = params.tau
    for v in machinery:
        beta_hat = _pow2_ceil(max(1, graph.outdegree(v)))
        total = sum(_pow2_floor(inst.defects[v][x] + 1) ** 2 for x in inst.lists[v])
        need = config.alpha * beta_hat**2 * tau * h_used * (2 * g + 1)
        if total < need:
            raise ListTooSmall(
                f"node {v}: defect energy {total} < {need:.1f} "
                f"(alpha={config.alpha}, tau={tau}, h={h_used}, g={g})"
            )

    out, trace = _run_single_defect(
        graph,
        inst.color_space,
        reduced_lists,
        reduced_defect,
        g,
        config,
        h_arg=h_used,
        predecided=predecided,
    )
    report = validate_ldc(graph, inst, out)
    if not report.valid:
        raise NodeFailure(f"output failed validation at nodes {report.violating_nodes()}")
    return out, trace

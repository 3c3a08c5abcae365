"""Two-phase OLDC and the full algorithm with lambda-based class selection.

The two-phase algorithm assumes gamma classes are already assigned.
Phase I walks the classes in ascending order: a node first drops its bad
colors (those already claimed by more than d/4 lower-class candidate
sets), solves the standard in-class P2 via a per-class type table and
picks a candidate set C_v conflicting with at most d/4 same-class
out-neighbors.  Phase II walks the classes in descending order and picks
the color of C_v least claimed by decided out-neighbors and compatible
same-class candidate sets, adding at most d/2.  The budget decomposition
(d/4 lower + d/4 ignored same-class + d/2 higher/star) is asserted per
node and recorded in the trace audit.

The full algorithm first rounds everything to powers of four, splits
every list into same-defect buckets mu with energies D_{v,mu}, converts
the energy profile into a class-assignment OLDC instance (colors are
candidate classes, defects are the delta budgets) solved by the basic
algorithm with proximity g = floor(log2 h), and then runs the two-phase
algorithm on the buckets the assignment selected.

Both routines are phased: each communication step is executed as a
broadcast segment on the round engine (send, then collect), so traces
carry honest per-round bit accounting; per-class type tables are built
between segments from the realized types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .conflict import ConflictParams, NodeType, build_or_load_type_table, tau_of
from .errors import (
    InvalidInstance,
    ListTooSmall,
    MissingOrientation,
    NodeFailure,
)
from .graphs import (
    FLAVOR_ORIENTED,
    ColoredGraph,
    ColoringOutput,
    LdcInstance,
    validate_ldc,
)
from .oldc_basic import OldcConfig, _pow2_ceil, _pow2_floor, multi_defect_oldc
from .runtime import (
    ColorListField,
    IndexField,
    InitColorField,
    Pow2DefectField,
    RawField,
    RoundTrace,
    concat_traces,
    run,
)


# -- broadcast segments --------------------------------------------------------


@dataclass
class _SegmentProgram:
    """One broadcast step: the given nodes send, everyone collects."""

    senders: dict[int, Mapping]

    def init(self, view):
        return view, None

    def step(self, view, inbox, round_no):
        if round_no == 1:
            msg = self.senders.get(view.node)
            outbox = {u: msg for u in view.neighbors} if msg is not None else {}
            return view, outbox, None
        return view, {}, dict(inbox)


def _broadcast_segment(
    graph: ColoredGraph, senders: dict[int, Mapping], config: OldcConfig
) -> tuple[RoundTrace, list[dict[int, Mapping]]]:
    if not senders:
        return RoundTrace(), [{} for _ in range(graph.n)]
    trace = run(
        graph,
        _SegmentProgram(senders),
        max_rounds=4,
        bits_per_message=config.bits_per_message,
        record_messages=config.record_messages,
    )
    return trace, list(trace.outputs)


# -- two-phase algorithm ---------------------------------------------------------


@dataclass(frozen=True)
class ClassBudget:
    """Gamma classes plus the parameters of the per-class defect budgets."""

    classes: dict[int, int]  # machinery node -> class in [1..h]
    defects: dict[int, int]  # machinery node -> single defect
    h: int
    q: int

    def __post_init__(self):
        if self.q < 1 or self.h < 1:
            raise InvalidInstance("ClassBudget needs h, q >= 1")
        if any(not (1 <= i <= self.h) for i in self.classes.values()):
            raise InvalidInstance("class outside [1..h]")


@dataclass
class _TwoPhaseNode:
    colors: tuple[int, ...] = ()
    defect: int = 0
    gamma: int = 0
    cset: tuple[int, ...] = ()
    family: tuple[tuple[int, ...], ...] = ()
    known_types: dict = field(default_factory=dict)    # u -> (class, list)
    known_csets: dict = field(default_factory=dict)    # u -> C_u
    known_colors: dict = field(default_factory=dict)   # u -> final color
    audit: tuple = ()


def two_phase_oldc(
    graph: ColoredGraph,
    color_space: Sequence[int],
    lists: Sequence[Sequence[int]],
    budget: ClassBudget,
    config: Optional[OldcConfig] = None,
    predecided: Optional[dict[int, int]] = None,
) -> tuple[ColoringOutput, RoundTrace]:
    """Solve a single-defect OLDC instance under an explicit class budget.

    Requires per machinery node:
      4 * max(beta_within_class, beta_v / q) <= (d_v + 1) * 2**class
      |L_v| >= [alpha * 4**class
                + (4/(d_v+1)) * sum of beta_{v,j} * 2**j
                  over j in [class - floor(log2 q), class - 1]] * tau

    ``predecided`` nodes broadcast a fixed color up front and only count
    toward their neighbors' budgets.
    """
    config = config or OldcConfig()
    if graph.out_neighbors is None:
        raise MissingOrientation("two-phase OLDC needs an orientation")
    n = graph.n
    predecided = dict(predecided or {})
    lists = [tuple(sorted(set(l))) for l in lists]
    machinery = sorted(budget.classes)
    if set(machinery) | set(predecided) != set(range(n)) or set(machinery) & set(predecided):
        raise InvalidInstance("every node needs exactly one of: class or predecided color")

    h, q = budget.h, budget.q
    params = ConflictParams(
        h=h,
        color_space_size=len(color_space),
        m=graph.m,
        g=0,
        scale_override=config.scale_override,
    )
    tau, tau_prime = params.tau, params.tau_prime
    space_size = len(color_space)
    beta_max = graph.max_beta()

    nodes = {v: _TwoPhaseNode() for v in machinery}
    beta_within: dict[int, dict[int, int]] = {}
    for v in machinery:
        node = nodes[v]
        node.colors = lists[v]
        node.defect = budget.defects[v]
        node.gamma = budget.classes[v]
        per_class: dict[int, int] = {}
        for u in graph.out_neighbors[v]:
            if u in budget.classes:
                j = budget.classes[u]
                per_class[j] = per_class.get(j, 0) + 1
        beta_within[v] = per_class
        beta_v = graph.beta(v)
        b_same = per_class.get(node.gamma, 0)
        if 4 * max(b_same * q, beta_v) > (node.defect + 1) * (1 << node.gamma) * q:
            raise NodeFailure(
                f"class budget invariant fails: beta_same={b_same} beta={beta_v} "
                f"q={q} d={node.defect} class={node.gamma}",
                node=v,
            )
        log_q = q.bit_length() - 1
        tail = sum(
            per_class.get(j, 0) * (1 << j)
            for j in range(max(1, node.gamma - log_q), node.gamma)
        )
        need = (config.alpha * 4**node.gamma + 4 * tail / (node.defect + 1)) * tau
        if len(lists[v]) < need:
            raise ListTooSmall(
                f"node {v}: |L|={len(lists[v])} < {need:.1f} under the two-phase condition"
            )

    traces: list[RoundTrace] = []

    # decided colors go out first so every budget sees them
    decided_msgs = {
        v: {"decided": ColorListField((c,), space_size)} for v, c in predecided.items()
    }
    tr, delivered = _broadcast_segment(graph, decided_msgs, config)
    traces.append(tr)
    for v in machinery:
        for u, msg in delivered[v].items():
            nodes[v].known_colors[u] = msg["decided"].colors[0]

    by_class: dict[int, list[int]] = {}
    for v in machinery:
        by_class.setdefault(nodes[v].gamma, []).append(v)

    # Phase I, ascending classes
    pruned: dict[int, tuple[int, ...]] = {}
    for i in range(1, h + 1):
        members = by_class.get(i, [])
        if not members:
            continue
        for v in members:
            node = nodes[v]
            lower_claims: dict[int, int] = {}
            d_total = 0
            for u, c_u in node.known_csets.items():
                if u in graph.out_neighbors[v] and budget.classes.get(u, h + 1) < i:
                    d_total += len(c_u)
                    for x in c_u:
                        if x in node.colors:
                            lower_claims[x] = lower_claims.get(x, 0) + 1
            bad = tuple(
                x for x in node.colors if 4 * lower_claims.get(x, 0) > node.defect
            )
            if len(bad) * (node.defect + 1) > 4 * d_total:
                raise NodeFailure(
                    f"bad-color bound violated: |B|={len(bad)} D={d_total}", node=v
                )
            keep = tuple(x for x in node.colors if x not in set(bad))
            k_i = (1 << i) * tau
            if len(keep) < k_i:
                raise ListTooSmall(
                    f"node {v}: pruned list of {len(keep)} cannot host sets of size {k_i}"
                )
            pruned[v] = keep

        # in-class P2: broadcast types, then assign via a fresh table
        type_msgs = {
            v: {
                "init": InitColorField(graph.init_colors[v], graph.m),
                "list": ColorListField(pruned[v], space_size),
                "defect": Pow2DefectField(nodes[v].defect, beta_max),
                "class": RawField(i, max(1, h.bit_length())),
            }
            for v in members
        }
        tr, delivered = _broadcast_segment(graph, type_msgs, config)
        traces.append(tr)
        for v in machinery:
            for u, msg in delivered[v].items():
                nodes[v].known_types[u] = (msg["class"].value, msg["list"].colors, msg["init"].color)

        class_types = {v: NodeType(graph.init_colors[v], pruned[v], i) for v in members}
        table = build_or_load_type_table(
            params,
            list(class_types.values()),
            {i: (1 << i) * tau},
            (1 << i) * tau_prime,
            candidate_cap=config.candidate_cap,
            cache_dir=config.cache_dir,
        )
        cset_msgs = {}
        for v in members:
            node = nodes[v]
            fam = table.family_of(class_types[v])
            node.family = fam
            peers = [
                u
                for u in graph.out_neighbors[v]
                if node.known_types.get(u, (None,))[0] == i
            ]
            peer_fams = [
                table.family_of(NodeType(node.known_types[u][2], node.known_types[u][1], i))
                for u in peers
            ]
            best_idx, best_d = 0, None
            for idx, cand in enumerate(fam):
                cand_set = set(cand)
                d_c = sum(
                    1
                    for pf in peer_fams
                    if any(len(cand_set & set(c2)) >= tau for c2 in pf)
                )
                if best_d is None or d_c < best_d:
                    best_idx, best_d = idx, d_c
            b_same = beta_within[v].get(i, 0)
            if best_d * len(fam) > b_same * (tau_prime - 1):
                raise NodeFailure(
                    f"phase-I pigeonhole failed: {best_d} over family of {len(fam)}", node=v
                )
            if 4 * b_same * (tau_prime - 1) >= (node.defect + 1) * len(fam):
                raise NodeFailure(
                    f"phase-I average bound fails: beta_same={b_same} |K|={len(fam)}", node=v
                )
            if 4 * best_d > node.defect:
                raise NodeFailure(f"phase-I selection exceeds d/4: {best_d}", node=v)
            node.cset = fam[best_idx]
            cset_msgs[v] = {"cset": IndexField(best_idx, len(fam))}
        tr, delivered = _broadcast_segment(graph, cset_msgs, config)
        traces.append(tr)
        for v in machinery:
            for u, msg in delivered[v].items():
                cls, lst, init = nodes[v].known_types[u]
                fam_u = table.family_of(NodeType(init, lst, cls))
                nodes[v].known_csets[u] = fam_u[msg["cset"].index]

    # Phase II, descending classes
    colors: dict[int, int] = dict(predecided)
    for i in range(h, 0, -1):
        members = by_class.get(i, [])
        if not members:
            continue
        color_msgs = {}
        for v in members:
            node = nodes[v]
            cset = set(node.cset)
            star = [
                u
                for u in graph.out_neighbors[v]
                if budget.classes.get(u) == i
                and len(set(node.known_csets[u]) & cset) < tau
            ]
            ignored = sum(
                1
                for u in graph.out_neighbors[v]
                if budget.classes.get(u) == i
                and len(set(node.known_csets[u]) & cset) >= tau
            )
            decided_hits = {
                u: c for u, c in node.known_colors.items() if u in graph.out_neighbors[v]
            }
            multiset = len(decided_hits) + sum(
                len(set(node.known_csets[u]) & cset) for u in star
            )
            if 2 * multiset >= (1 << i) * (node.defect + 1) * tau:
                raise NodeFailure(
                    f"phase-II multiset bound fails: {multiset}", node=v
                )
            best_x, best_f = None, None
            for x in node.cset:
                f_x = sum(1 for c in decided_hits.values() if c == x)
                f_x += sum(1 for u in star if x in node.known_csets[u])
                if best_f is None or f_x < best_f:
                    best_x, best_f = x, f_x
            if 2 * best_f > node.defect:
                raise NodeFailure(
                    f"phase-II frequency bound fails: {best_f} > d/2", node=v
                )
            lower_hits = sum(
                1
                for u in graph.out_neighbors[v]
                if budget.classes.get(u, h + 1) < i and best_x in node.known_csets[u]
            )
            if 4 * lower_hits > node.defect:
                raise NodeFailure(f"lower-class budget exceeded: {lower_hits}", node=v)
            node.audit = (lower_hits, ignored, best_f)
            colors[v] = best_x
            color_msgs[v] = {"color": ColorListField((best_x,), space_size)}
        tr, delivered = _broadcast_segment(graph, color_msgs, config)
        traces.append(tr)
        for v in machinery:
            for u, msg in delivered[v].items():
                nodes[v].known_colors[u] = msg["color"].colors[0]

    output = ColoringOutput(tuple(colors[v] for v in range(n)))
    trace = concat_traces(traces)
    trace.outputs = list(output.colors)
    trace.audit = [
        (v, *nodes[v].audit) if v in nodes else (v, 0, 0, 0) for v in range(n)
    ]

    inst = LdcInstance.build(
        color_space,
        [lists[v] if v in budget.classes else (predecided[v],) for v in range(n)],
        [
            {x: budget.defects[v] for x in lists[v]}
            if v in budget.classes
            else {predecided[v]: graph.outdegree(v)}
            for v in range(n)
        ],
        flavor=FLAVOR_ORIENTED,
        g=0,
    )
    report = validate_ldc(graph, inst, output)
    if not report.valid:
        raise NodeFailure(f"two-phase output invalid at {report.violating_nodes()}")
    return output, trace

# -- lambda profiles and the full algorithm -------------------------------------


def _pow4_ceil(x: float) -> int:
    p = 1
    while p < x:
        p *= 4
    return p


@dataclass(frozen=True)
class LambdaProfile:
    """Per-node energy profile steering the class assignment.

    Buckets are keyed by mu with R_v / (rounded defect + 1)^2 = 4**mu;
    lam[mu] is 0 when the bucket holds under a 1/(2h) fraction of the
    energy and the power of four 4**floor(log4 share) otherwise.  The
    class candidates are the deduplicated values f(mu) = mu - r + 2
    within [1..h]; in Case II (some lam >= 1/4) a single bucket wins.
    """

    r_big: int                      # R_v, a power of four
    buckets: dict[int, tuple[int, ...]]
    energy: dict[int, int]
    total_energy: int
    lam: dict[int, Fraction]
    class_of_mu: dict[int, Optional[int]]
    case2: bool
    mu_case2: Optional[int]
    class_list: tuple[int, ...]
    deltas: dict[int, int]          # class -> delta budget
    mu_of_class: dict[int, int]

    def kept_lambda_sum(self) -> Fraction:
        return sum(
            (self.lam[mu] for mu, c in self.class_of_mu.items() if c is not None),
            Fraction(0),
        )


def lambda_profile(
    defects_by_color: Mapping[int, int],
    beta_v: int,
    h: int,
    alpha: int,
    taubar: int,
    hprime: int,
) -> LambdaProfile:
    """Build the energy profile of one node.

    ``alpha``, ``taubar`` and ``hprime`` must already be powers of four
    (beta_v is rounded up here), so R_v and every delta come out exact.
    """
    if not defects_by_color:
        raise InvalidInstance("empty list")
    beta_hat = _pow2_ceil(max(1, beta_v))
    r_big = alpha * beta_hat**2 * taubar * hprime**2
    s = r_big.bit_length() - 1  # r_big = 2**s, s even
    assert r_big == 1 << s and s % 2 == 0, "R_v must be a power of four"

    buckets: dict[int, list[int]] = {}
    for x, d in sorted(defects_by_color.items()):
        dhat1 = _pow2_floor(d + 1)
        mu = s // 2 - (dhat1.bit_length() - 1)
        buckets.setdefault(mu, []).append(x)
    energy = {
        mu: len(xs) * (r_big >> (2 * mu)) for mu, xs in buckets.items()
    }
    total = sum(energy.values())

    lam: dict[int, Fraction] = {}
    for mu, e in energy.items():
        if 2 * h * e < total:
            lam[mu] = Fraction(0)
        else:
            r = 0
            while e << (2 * r) < total:
                r += 1
            lam[mu] = Fraction(1, 1 << (2 * r))

    case2_mu = next((mu for mu in sorted(lam) if lam[mu] >= Fraction(1, 4)), None)
    class_of_mu: dict[int, Optional[int]] = {}
    deltas: dict[int, int] = {}
    mu_of_class: dict[int, int] = {}
    if case2_mu is not None:
        # classes start at 1; raising the class only weakens the budget bound
        cls = max(1, case2_mu)
        for mu in buckets:
            class_of_mu[mu] = cls if mu == case2_mu else None
        deltas[cls] = math.isqrt(r_big) // 4
        mu_of_class[cls] = case2_mu
        return LambdaProfile(
            r_big, {m: tuple(xs) for m, xs in buckets.items()}, energy, total,
            lam, class_of_mu, True, case2_mu, (cls,), deltas, mu_of_class,
        )

    seen_f: set[int] = set()
    for mu in sorted(buckets):
        if lam[mu] == 0:
            class_of_mu[mu] = None
            continue
        r = (lam[mu].denominator.bit_length() - 1) // 2
        f = mu - r + 2
        if f < 1 or f > h or f in seen_f:
            class_of_mu[mu] = None
            continue
        seen_f.add(f)
        class_of_mu[mu] = f
        lam_r = r_big >> (2 * r)
        deltas[f] = math.isqrt(lam_r)
        mu_of_class[f] = mu
    return LambdaProfile(
        r_big, {m: tuple(xs) for m, xs in buckets.items()}, energy, total,
        lam, class_of_mu, False, None, tuple(sorted(deltas)), deltas, mu_of_class,
    )


@dataclass
class MainConfig:
    """Configuration of the full algorithm (powers of four enforced)."""

    alpha: float = 16.0
    tau_override: Optional[int] = None
    taubar_override: Optional[int] = None
    q_override: Optional[int] = None
    h_override: Optional[int] = None
    stage1_scale: Optional[tuple[int, int]] = None  # (tau, tau') of the class assignment
    stage2_scale: Optional[tuple[int, int]] = None  # (tau, tau') of the two-phase run
    candidate_cap: int = 200_000
    cache_dir: Optional[str] = None
    bits_per_message: Optional[int] = None
    record_messages: bool = False


def main_oldc(
    graph: ColoredGraph,
    inst: LdcInstance,
    config: Optional[MainConfig] = None,
) -> tuple[ColoringOutput, RoundTrace]:
    """Full OLDC: lambda-profile class assignment, then the two-phase run.

    Requires per node sum (d_v(x)+1)^2 >= alpha^2 * beta_hat^2 * tau *
    taubar * h'^2 after rounding (checked as energy >= alpha * tau * R_v).
    Stage 1 solves the class-assignment OLDC (colors 1..h, proximity
    floor(log2 h)) with the basic algorithm; stage 2 hands the selected
    buckets to the two-phase algorithm.  Every stage is fail-fast.
    """
    config = config or MainConfig()
    if graph.out_neighbors is None:
        raise MissingOrientation("main OLDC needs an orientation")
    if inst.flavor != FLAVOR_ORIENTED or inst.g != 0:
        raise InvalidInstance("main OLDC expects an oriented g=0 instance")
    n = graph.n

    beta_hat_all = max(_pow2_ceil(max(1, graph.outdegree(v))) for v in range(n)) if n else 1
    h = config.h_override or max(1, beta_hat_all.bit_length() - 1)
    hprime = _pow4_ceil(max(1.0, math.log2(8 * h)))
    alpha = _pow4_ceil(config.alpha)
    tau = _pow4_ceil(config.tau_override or tau_of(h, len(inst.color_space), graph.m))
    taubar = _pow4_ceil(config.taubar_override or tau_of(hprime, h, graph.m))
    q = config.q_override or min(h, tau)
    g1 = max(0, h.bit_length() - 1)

    predecided: dict[int, int] = {}
    profiles: dict[int, LambdaProfile] = {}
    for v in range(n):
        if not inst.lists[v]:
            raise ListTooSmall(f"node {v} has an empty color list")
        outdeg = graph.outdegree(v)
        first_cover = next(
            (x for x in inst.lists[v] if inst.defects[v][x] >= outdeg), None
        )
        if first_cover is not None:
            predecided[v] = first_cover
            continue
        prof = lambda_profile(inst.defects[v], graph.beta(v), h, alpha, taubar, hprime)
        # solvability condition, in the exact form energy >= alpha * tau * R
        if prof.total_energy < alpha * tau * prof.r_big:
            raise ListTooSmall(
                f"node {v}: defect energy {prof.total_energy} below "
                f"alpha*tau*R = {alpha * tau * prof.r_big}"
            )
        if not prof.case2 and 20 * prof.kept_lambda_sum() < 1:
            raise NodeFailure(
                f"kept lambda mass {prof.kept_lambda_sum()} below 1/20", node=v
            )
        if not prof.class_list:
            raise NodeFailure("no admissible class for node", node=v)
        profiles[v] = prof

    machinery = sorted(profiles)
    h_eff = max([h] + [max(p.class_list) for p in profiles.values()])

    traces: list[RoundTrace] = []
    classes: dict[int, int] = {}
    if machinery:
        # stage 1: assign classes by solving an OLDC over the class space
        sub, keep = graph.subgraph(machinery)
        stage1_inst = LdcInstance.build(
            list(range(1, h_eff + 1)),
            [profiles[v].class_list for v in machinery],
            [
                {i: profiles[v].deltas[i] for i in profiles[v].class_list}
                for v in machinery
            ],
            flavor=FLAVOR_ORIENTED,
            g=g1,
        )
        stage1_cfg = OldcConfig(
            alpha=1.0,
            scale_override=config.stage1_scale,
            candidate_cap=config.candidate_cap,
            cache_dir=config.cache_dir,
            bits_per_message=config.bits_per_message,
            record_messages=config.record_messages,
        )
        out1, tr1 = multi_defect_oldc(sub, stage1_inst, h=hprime, config=stage1_cfg)
        traces.append(tr1)
        classes = {keep[i]: out1.colors[i] for i in range(len(keep))}

    # stage 2: two-phase on the buckets picked by the class assignment
    lists2: list[tuple[int, ...]] = [()] * n
    defects2: dict[int, int] = {}
    for v in machinery:
        prof = profiles[v]
        i_v = classes[v]
        mu_v = prof.mu_of_class[i_v]
        lists2[v] = prof.buckets[mu_v]
        d1 = math.isqrt(prof.r_big >> (2 * mu_v))
        defects2[v] = d1 - 1
        b_same = sum(
            1 for u in graph.out_neighbors[v] if classes.get(u) == i_v
        )
        beta_v = graph.beta(v)
        if 4 * max(b_same * q, beta_v) > d1 * (1 << i_v) * q:
            raise NodeFailure(
                f"stage-1 classes break the class budget: beta_same={b_same}", node=v
            )
    for v, c in predecided.items():
        lists2[v] = (c,)

    budget = ClassBudget(
        classes=classes,
        defects=defects2,
        h=h_eff,
        q=q,
    )
    cfg2 = OldcConfig(
        alpha=config.alpha / 16,
        scale_override=config.stage2_scale,
        candidate_cap=config.candidate_cap,
        cache_dir=config.cache_dir,
        bits_per_message=config.bits_per_message,
        record_messages=config.record_messages,
    )
    out2, tr2 = two_phase_oldc(
        graph, inst.color_space, lists2, budget, cfg2, predecided=predecided
    )
    traces.append(tr2)

    output = out2
    report = validate_ldc(graph, inst, output)
    if not report.valid:
        raise NodeFailure(f"main OLDC output invalid at {report.violating_nodes()}")
    trace = concat_traces(traces)
    trace.outputs = list(output.colors)
    return output, trace

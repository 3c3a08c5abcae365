"""Deterministic synchronous round engine with per-message bit accounting.

LOCAL mode is an unbounded per-message budget; CONGEST mode caps the bit
size of every message.  Messages are dicts of typed fields; the cost of a
message is the sum of its field costs, additive and independent of
execution order:

    color list      min(|C|, len * ceil(log2 |C|))   bitmask vs enumeration
    pow-2 defect    ceil(log2 log2 beta) + 1
    K-table index   ceil(log2 size)
    initial color   ceil(log2 m)
    raw field       explicit bit width

Node programs are pure state machines.  ``init`` may already produce an
output (a zero-round program); ``step`` consumes the inbox of the previous
round and returns the new state, an outbox and optionally the final
output.  Once a node has produced its output it no longer steps; messages
from its final step are still delivered.  Rounds are counted until the
last output is produced; trailing silent rounds are not counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Protocol, Sequence

from .errors import BudgetViolation, NodeFailure, RoundLimitExceeded
from .graphs import ColoredGraph


def _log2ceil(x: int) -> int:
    return 0 if x <= 1 else (x - 1).bit_length()


# -- message fields ----------------------------------------------------------


@dataclass(frozen=True)
class ColorListField:
    """A list of colors from a color space of the given size."""

    colors: tuple[int, ...]
    space_size: int

    def bit_cost(self) -> int:
        return min(self.space_size, len(self.colors) * _log2ceil(self.space_size))


@dataclass(frozen=True)
class Pow2DefectField:
    """A defect value known to be (roughly) a power of two below beta."""

    value: int
    beta: int

    def bit_cost(self) -> int:
        return _log2ceil(max(1, _log2ceil(max(2, self.beta)))) + 1


@dataclass(frozen=True)
class IndexField:
    """An index into a table of known size (e.g. a K-family)."""

    index: int
    table_size: int

    def bit_cost(self) -> int:
        return _log2ceil(self.table_size)


@dataclass(frozen=True)
class InitColorField:
    color: int
    m: int

    def bit_cost(self) -> int:
        return _log2ceil(self.m)


@dataclass(frozen=True)
class RawField:
    """Any payload with an explicitly declared bit width."""

    value: Any
    bits: int

    def bit_cost(self) -> int:
        return self.bits


Message = Mapping[str, Any]


def message_bits(msg: Message) -> int:
    """Canonical bit cost of a message: the sum over its fields."""
    return sum(f.bit_cost() for f in msg.values())


# -- node programs -----------------------------------------------------------


@dataclass(frozen=True)
class NodeView:
    """What a node knows at time zero."""

    node: int
    neighbors: tuple[int, ...]
    out_neighbors: Optional[tuple[int, ...]]
    init_color: int
    m: int
    n: int


class NodeProgram(Protocol):
    def init(self, view: NodeView) -> tuple[Any, Optional[Any]]:
        """Return (state, output or None).  A non-None output ends the node
        before any communication (a zero-round program)."""

    def step(
        self, state: Any, inbox: dict[int, Message], round_no: int
    ) -> tuple[Any, dict[int, Message], Optional[Any]]:
        """Process the inbox of round ``round_no``; return
        (state, outbox, output or None).  Must be pure in (state, inbox,
        round_no)."""


# -- traces -------------------------------------------------------------------


@dataclass
class RoundTrace:
    """Per-run record: round count, per-round max message bits, outputs."""

    rounds_elapsed: int = 0
    max_message_bits: list[int] = field(default_factory=list)
    outputs: list[Any] = field(default_factory=list)
    output_rounds: Optional[list[int]] = None
    failure: Optional[str] = None
    messages: Optional[list[tuple[int, int, int, int]]] = None  # (round, u, v, bits)
    audit: Optional[list] = None  # algorithm-specific per-node budget rows

    def max_bits(self) -> int:
        return max(self.max_message_bits, default=0)

    def to_csv(self) -> str:
        lines = ["round,max_bits,nodes_output_so_far"]
        per_round_done: dict[int, int] = {}
        for rnd in self.output_rounds or []:
            per_round_done[rnd] = per_round_done.get(rnd, 0) + 1
        done = per_round_done.get(0, 0)
        lines.append(f"0,0,{done}")
        for r in range(1, len(self.max_message_bits) + 1):
            done += per_round_done.get(r, 0)
            lines.append(f"{r},{self.max_message_bits[r - 1]},{done}")
        return "\n".join(lines) + "\n"

    def to_json(self, verbose: bool = False) -> str:
        doc: dict[str, Any] = {
            "rounds_elapsed": self.rounds_elapsed,
            "max_message_bits": self.max_message_bits,
            "outputs": self.outputs,
            "failure": self.failure,
        }
        if self.output_rounds is not None:
            doc["output_rounds"] = self.output_rounds
        if self.audit is not None:
            doc["audit"] = [list(row) for row in self.audit]
        if verbose and self.messages is not None:
            doc["messages"] = self.messages
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def concat_traces(traces: Sequence[RoundTrace]) -> RoundTrace:
    """Sequential composition of phased runs: rounds add up."""
    merged = RoundTrace()
    offset = 0
    for t in traces:
        merged.max_message_bits.extend(t.max_message_bits)
        if t.messages:
            merged.messages = (merged.messages or []) + [
                (r + offset, u, v, b) for (r, u, v, b) in t.messages
            ]
        offset += t.rounds_elapsed
    merged.rounds_elapsed = offset
    return merged


def merge_parallel(traces: Sequence[RoundTrace]) -> RoundTrace:
    """Parallel composition of runs on disjoint node sets: rounds take the
    max, per-round bits the elementwise max."""
    merged = RoundTrace()
    merged.rounds_elapsed = max((t.rounds_elapsed for t in traces), default=0)
    width = max((len(t.max_message_bits) for t in traces), default=0)
    merged.max_message_bits = [
        max((t.max_message_bits[i] for t in traces if i < len(t.max_message_bits)), default=0)
        for i in range(width)
    ]
    msgs: list[tuple[int, int, int, int]] = []
    for t in traces:
        if t.messages:
            msgs.extend(t.messages)
    if msgs:
        merged.messages = sorted(msgs)
    return merged


# -- the engine ---------------------------------------------------------------


def run(
    graph: ColoredGraph,
    program: NodeProgram,
    max_rounds: int = 10_000,
    bits_per_message: Optional[int] = None,
    record_messages: bool = False,
) -> RoundTrace:
    """Execute a node program on every node until all outputs are in.

    Nodes step in id order inside a round; messages sent in round r are
    readable only in round r+1 (communication is bidirectional even on
    oriented graphs).  In budgeted mode any over-size message aborts the
    run with a BudgetViolation naming edge, round and size.
    """
    views = [
        NodeView(
            node=v,
            neighbors=graph.adjacency[v],
            out_neighbors=None if graph.out_neighbors is None else graph.out_neighbors[v],
            init_color=graph.init_colors[v],
            m=graph.m,
            n=graph.n,
        )
        for v in range(graph.n)
    ]
    states: list[Any] = [None] * graph.n
    outputs: list[Any] = [None] * graph.n
    done = [False] * graph.n
    output_round = [0] * graph.n

    for v in range(graph.n):
        try:
            states[v], out = program.init(views[v])
        except NodeFailure as exc:
            exc.node = v if exc.node is None else exc.node
            exc.round_no = 0
            raise
        if out is not None:
            outputs[v] = out
            done[v] = True

    trace = RoundTrace(outputs=outputs, output_rounds=output_round)
    if record_messages:
        trace.messages = []
    inboxes: list[dict[int, Message]] = [{} for _ in range(graph.n)]

    rnd = 0
    while not all(done):
        rnd += 1
        if rnd > max_rounds:
            raise RoundLimitExceeded(f"{sum(done)}/{graph.n} nodes decided after {max_rounds} rounds")
        next_inboxes: list[dict[int, Message]] = [{} for _ in range(graph.n)]
        round_max = 0
        for v in range(graph.n):
            if done[v]:
                continue
            try:
                states[v], outbox, out = program.step(states[v], inboxes[v], rnd)
            except NodeFailure as exc:
                exc.node = v if exc.node is None else exc.node
                exc.round_no = rnd
                raise
            for u, msg in outbox.items():
                if u not in views[v].neighbors:
                    raise NodeFailure(f"message to non-neighbor {u}", node=v, round_no=rnd)
                size = message_bits(msg)
                if bits_per_message is not None and size > bits_per_message:
                    raise BudgetViolation((v, u), rnd, size, bits_per_message)
                round_max = max(round_max, size)
                if trace.messages is not None:
                    trace.messages.append((rnd, v, u, size))
                next_inboxes[u][v] = msg
            if out is not None:
                outputs[v] = out
                done[v] = True
                output_round[v] = rnd
        trace.max_message_bits.append(round_max)
        inboxes = next_inboxes

    trace.rounds_elapsed = max(output_round, default=0)
    # trailing silent rounds are not counted
    del trace.max_message_bits[trace.rounds_elapsed:]
    return trace


def broadcast(view_neighbors: Sequence[int], msg: Message) -> dict[int, Message]:
    """Same message to every neighbor."""
    return {u: msg for u in view_neighbors}

"""The synchronous round engine and its bit accounting.

Node programs are pure state machines; a message is a dict of typed
fields and its cost is the sum of field costs.  A CONGEST run passes a
per-message budget; any oversize message aborts the run with the edge,
round and size.
"""

from listdefect import BudgetViolation, ColoredGraph, RawField, run

ring = ColoredGraph.build(6, [(i, (i + 1) % 6) for i in range(6)])


class FloodIds:
    """Every node learns all ids; payloads are costed at 16 bits."""

    def init(self, view):
        return {"view": view, "seen": {view.node}}, None

    def step(self, state, inbox, round_no):
        for msg in inbox.values():
            state["seen"].update(msg["ids"].value)
        payload = {"ids": RawField(tuple(sorted(state["seen"])), 16)}
        outbox = {u: payload for u in state["view"].neighbors}
        done = len(state["seen"]) == state["view"].n and round_no > 1
        return state, outbox, len(state["seen"]) if done else None


trace = run(ring, FloodIds())
print("rounds:", trace.rounds_elapsed)
print("per-round max bits:", trace.max_message_bits)
print(trace.to_csv())

try:
    run(ring, FloodIds(), bits_per_message=8)
except BudgetViolation as exc:
    print("budget 8 bits:", exc)

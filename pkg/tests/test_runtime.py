import pytest

from listdefect import (
    BudgetViolation,
    ColoredGraph,
    ColorListField,
    IndexField,
    InitColorField,
    Pow2DefectField,
    RawField,
    RoundLimitExceeded,
    message_bits,
    run,
)
from listdefect.errors import NodeFailure

from conftest import ring_graph


PATH3 = ColoredGraph.build(3, [(0, 1), (1, 2)], init_colors=[0, 1, 0], m=2)


class ZeroRound:
    def init(self, view):
        return None, view.node

    def step(self, state, inbox, rnd):  # pragma: no cover
        raise AssertionError("zero-round program must not step")


class FloodIds:
    def __init__(self, bits):
        self.bits = bits

    def init(self, view):
        return {"view": view, "seen": {view.node}}, None

    def step(self, state, inbox, rnd):
        for msg in inbox.values():
            state["seen"].update(msg["ids"].value)
        payload = {"ids": RawField(tuple(sorted(state["seen"])), self.bits)}
        out = {u: payload for u in state["view"].neighbors}
        done = len(state["seen"]) == state["view"].n and rnd > 1
        return state, out, tuple(sorted(state["seen"])) if done else None


def test_zero_round_program():
    tr = run(PATH3, ZeroRound())
    assert tr.rounds_elapsed == 0
    assert tr.max_bits() == 0
    assert tr.outputs == [0, 1, 2]


def test_flood_budget_violation():
    with pytest.raises(BudgetViolation) as exc:
        run(PATH3, FloodIds(64), bits_per_message=32)
    assert exc.value.round_no == 1
    assert exc.value.size == 64


def test_flood_within_budget():
    tr = run(PATH3, FloodIds(64), bits_per_message=64)
    assert all(out == (0, 1, 2) for out in tr.outputs)


def test_single_round_exchange_accounting():
    class OneShot:
        def init(self, view):
            return view, None

        def step(self, view, inbox, rnd):
            if rnd == 1:
                return view, {u: {"p": RawField(0, 17)} for u in view.neighbors}, None
            return view, {}, sorted(inbox)

    tr = run(PATH3, OneShot())
    assert tr.max_message_bits[0] == 17
    # isolation: round-1 messages become readable in round 2 only
    assert tr.outputs[0] == [1] and tr.outputs[1] == [0, 2]


def test_round_limit():
    class Forever:
        def init(self, view):
            return view, None

        def step(self, view, inbox, rnd):
            return view, {}, None

    with pytest.raises(RoundLimitExceeded):
        run(PATH3, Forever(), max_rounds=5)


def test_node_failure_carries_context():
    class Fails:
        def init(self, view):
            return view, None

        def step(self, view, inbox, rnd):
            if view.node == 1 and rnd == 2:
                raise NodeFailure("boom")
            return view, {}, view.node if rnd >= 3 else None

    with pytest.raises(NodeFailure) as exc:
        run(PATH3, Fails())
    assert exc.value.node == 1 and exc.value.round_no == 2


def test_bit_costs_additive():
    msg = {
        "list": ColorListField((3, 5, 9), 256),
        "defect": Pow2DefectField(4, 16),
        "idx": IndexField(2, 8),
        "init": InitColorField(1, 12),
        "raw": RawField("x", 5),
    }
    expected = min(256, 3 * 8) + (2 + 1) + 3 + 4 + 5
    assert message_bits(msg) == expected
    # bitmask beats enumeration for long lists over small spaces
    dense = {"list": ColorListField(tuple(range(6)), 8)}
    assert message_bits(dense) == 8


def test_determinism_and_trace_export():
    tr1 = run(PATH3, FloodIds(16))
    tr2 = run(PATH3, FloodIds(16))
    assert tr1.to_json(verbose=True) == tr2.to_json(verbose=True)
    csv = tr1.to_csv()
    assert csv.splitlines()[0] == "round,max_bits,nodes_output_so_far"
    assert csv.splitlines()[-1].endswith(",3")


def test_ring_flood_rounds():
    ring = ring_graph(8)
    tr = run(ring, FloodIds(16))
    # diameter 4, one extra round to detect completion
    assert tr.rounds_elapsed == 5

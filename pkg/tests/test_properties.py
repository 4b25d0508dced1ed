"""Randomized invariant tests for the protocol state machines.

These throw arbitrary (including Byzantine-shaped) message sequences at a
single node and check the structural invariants that the proofs lean on.
"""
from hypothesis import given, settings, strategies as st

from byzreg.rbcast import RDeliver, ReliableBroadcast
from byzreg.register import RegisterNode

N, T = 4, 1

values = st.sampled_from(["a", "b", "c"])
origins = st.integers(min_value=0, max_value=N - 1)
senders = st.integers(min_value=0, max_value=N - 1)
sns = st.integers(min_value=1, max_value=4)


rb_events = st.lists(
    st.one_of(
        st.tuples(st.just("app"), origins, values, sns),
        st.tuples(st.just("echo"), origins, values, sns, senders),
        st.tuples(st.just("ready"), origins, values, sns, senders),
    ),
    max_size=120)


def drive_rb(node, events):
    delivered = []
    for event in events:
        if event[0] == "app":
            out = node.on_app(*event[1:])
        elif event[0] == "echo":
            out = node.on_echo(*event[1:])
        else:
            out = node.on_ready(*event[1:])
        delivered.extend(e for e in out if isinstance(e, RDeliver))
    return delivered


@settings(max_examples=200, deadline=None)
@given(rb_events)
def test_rb_integrity_and_fifo_under_arbitrary_input(events):
    node = ReliableBroadcast(0, N, T)
    delivered = drive_rb(node, events)
    per_origin = {}
    for d in delivered:
        per_origin.setdefault(d.origin, []).append(d.sn)
    for origin, seq in per_origin.items():
        # in order, gap-free, no duplicates
        assert seq == list(range(1, len(seq) + 1)), (origin, seq)
        assert node.next_sn[origin] == len(seq) + 1


@settings(max_examples=200, deadline=None)
@given(rb_events)
def test_rb_delivery_requires_a_ready_quorum(events):
    node = ReliableBroadcast(0, N, T)
    ready_votes = {}
    for event in events:
        if event[0] == "ready":
            _, origin, value, sn, sender = event
            ready_votes.setdefault((origin, value, sn), set()).add(sender)
    delivered = drive_rb(node, events)
    for d in delivered:
        votes = ready_votes.get((d.origin, d.value, d.sn), set())
        assert len(votes) >= 2 * T + 1


reg_events = st.lists(st.tuples(origins, values, sns), max_size=60)


@settings(max_examples=200, deadline=None)
@given(reg_events)
def test_register_sn_is_monotone_and_contiguous(deliveries):
    node = RegisterNode(0, N, T)
    highest = [0] * N
    for writer, value, sn in deliveries:
        node.on_write_rdeliver(writer, value, sn)
        for j in range(N):
            assert node.registers[j].sn >= highest[j]
            highest[j] = node.registers[j].sn
    for j in range(N):
        # whatever arrived, the applied prefix has no holes
        applied = node.registers[j].sn
        assert all(sn > applied for sn in node.write_buffer[j])

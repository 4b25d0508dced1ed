"""Post-hoc trace verifier.

Everything here is a pure function over a recorded trace. The checker
derives, per register, the sequence of values the correct processes
applied (the register's history), resolves every completed read to a
position in that history, and then decides:

* per-writer agreement: all correct processes apply the same value at each
  position of each register;
* the three consistency properties over non-overlapping operations of
  correct processes: a read never returns a value at or past a write that
  started strictly after it finished, never returns a value older than a
  write that finished before it started, and a later read never returns an
  older value than an earlier one;
* the broadcast-layer properties (validity, integrity, uniformity,
  termination) over the recorded deliveries;
* liveness: on runs that reached quiescence, every started operation
  finished;
* message cost: every completed read costs at most 4n sends among correct
  processes and every write at most 2n^2 + 2n, with exact equality in
  fault-free runs;
* a linearization witness: a total order of the operations that an
  independent validator accepts (each operation at a single point inside
  its interval, reads returning the closest preceding write).

Every FAIL verdict carries the sequence numbers of the events that exhibit
the violation, so it can be replayed against the stored trace.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .messages import Value
from .netsim import Trace

PASS = "PASS"
FAIL = "FAIL"
VACUOUS = "VACUOUS"
NONTERMINATING = "NONTERMINATING"


@dataclass(frozen=True)
class Verdict:
    prop: str
    status: str
    detail: str = ""
    counterexample: tuple[int, ...] = ()

    def __str__(self):
        note = f" ({self.detail})" if self.detail else ""
        return f"{self.prop}: {self.status}{note}"


@dataclass
class OperationRecord:
    kind: str  # "WRITE" | "READ"
    op_id: str
    invoker: int
    target: int
    start_seq: int
    end_seq: int | None
    value: Value = None
    index: int | None = None  # position in the target register's history

    def completed(self) -> bool:
        return self.end_seq is not None


@dataclass
class History:
    """Per-register write sequences plus resolved operation records."""

    values: dict[int, list[Value]]  # writer -> [H[1], H[2], ...]
    first_apply_seq: dict[tuple[int, int], int]  # (writer, x) -> event seq
    ops: list[OperationRecord]
    derivation_verdicts: list[Verdict] = field(default_factory=list)

    def reads_of(self, target: int) -> list[OperationRecord]:
        return [op for op in self.ops
                if op.kind == "READ" and op.target == target and op.completed()]

    def writes_of(self, target: int) -> list[OperationRecord]:
        return [op for op in self.ops
                if op.kind == "WRITE" and op.target == target]


# ---------------------------------------------------------------------------
# history derivation
# ---------------------------------------------------------------------------

def derive_histories(trace: Trace) -> History:
    correct = set(trace.correct_nodes())
    applies: dict[int, dict[int, list[tuple[int, Value, int]]]] = {}
    for event in trace.events:
        if event["kind"] != "STATE_CHANGE" or event["node"] not in correct:
            continue
        p = event["payload"]
        applies.setdefault(p["writer"], {}).setdefault(event["node"], []) \
            .append((p["sn"], p["value"], event["seq"]))

    verdicts: list[Verdict] = []
    values: dict[int, list[Value]] = {}
    first_seq: dict[tuple[int, int], int] = {}
    agreement_ok = True
    for writer, per_node in sorted(applies.items()):
        by_pos: dict[int, tuple[Value, int]] = {}
        for node, seq_applies in sorted(per_node.items()):
            expected = 1
            for sn, value, seq in seq_applies:
                if sn != expected:
                    agreement_ok = False
                    verdicts.append(Verdict(
                        "per-writer-agreement", FAIL,
                        f"p{node} applied sn {sn} of reg[{writer}] out of order "
                        f"(expected {expected})", (seq,)))
                expected = sn + 1
                if sn not in by_pos:
                    by_pos[sn] = (value, seq)
                else:
                    seen_value, seen_seq = by_pos[sn]
                    if seen_value != value:
                        agreement_ok = False
                        verdicts.append(Verdict(
                            "per-writer-agreement", FAIL,
                            f"reg[{writer}] position {sn}: {seen_value!r} vs "
                            f"{value!r} at different correct nodes",
                            (seen_seq, seq)))
                first_seq[(writer, sn)] = min(
                    first_seq.get((writer, sn), seq), seq)
        values[writer] = [by_pos[x][0] for x in range(1, len(by_pos) + 1)
                          if x in by_pos]
    if agreement_ok:
        verdicts.append(Verdict("per-writer-agreement", PASS))

    ops = _collect_ops(trace)
    resolution_failures = []
    for op in ops:
        if op.kind == "WRITE" or not op.completed():
            continue
        hist = values.get(op.target, [])
        x = op.index or 0
        if x == 0:
            continue  # initial value
        if x > len(hist) or hist[x - 1] != op.value:
            resolution_failures.append(op)
    if resolution_failures:
        bad = resolution_failures[0]
        verdicts.append(Verdict(
            "read-resolution", FAIL,
            f"read {bad.op_id} returned ({bad.value!r}, {bad.index}) which is "
            f"not an entry of reg[{bad.target}]'s history",
            (bad.start_seq, bad.end_seq)))
    else:
        verdicts.append(Verdict("read-resolution", PASS))

    return History(values=values, first_apply_seq=first_seq, ops=ops,
                   derivation_verdicts=verdicts)


def _collect_ops(trace: Trace) -> list[OperationRecord]:
    ops: dict[str, OperationRecord] = {}
    for event in trace.events:
        p = event["payload"]
        if event["kind"] == "OP_START":
            ops[p["id"]] = OperationRecord(
                kind=p["op"], op_id=p["id"], invoker=event["node"],
                target=p["target"], start_seq=event["seq"], end_seq=None,
                value=p.get("value"))
        elif event["kind"] == "OP_END":
            rec = ops[p["id"]]
            rec.end_seq = event["seq"]
            rec.value = p["value"]
            rec.index = p["sn"]
    # a correct writer numbers its writes consecutively, so a write that
    # never completed still has a known history position
    by_writer: dict[int, list[OperationRecord]] = {}
    for op in ops.values():
        if op.kind == "WRITE":
            by_writer.setdefault(op.invoker, []).append(op)
    for writes in by_writer.values():
        writes.sort(key=lambda o: o.start_seq)
        for pos, op in enumerate(writes, start=1):
            if op.index is None:
                op.index = pos
    return list(ops.values())


# ---------------------------------------------------------------------------
# consistency properties
# ---------------------------------------------------------------------------

def check_safety(history: History, trace: Trace) -> list[Verdict]:
    """The three ordered-pair properties over correct processes' operations."""
    byz = set(trace.byzantine)
    verdicts = []
    verdicts.append(_check_read_then_write(history, byz))
    verdicts.append(_check_write_then_read(history))
    verdicts.append(_check_no_read_inversion(history))
    return verdicts


def _write_starts(history: History, target: int,
                  byz: set[int]) -> list[tuple[int, int, int | None]]:
    """(index, start_seq, end_seq) for every write of target's register.

    For a correct writer these are the operation's own events. A faulty
    writer has no observable invocation, so position x "starts" when the
    first correct process applies it; it has no end.
    """
    if target not in byz:
        return [(op.index, op.start_seq, op.end_seq)
                for op in history.writes_of(target) if op.index is not None]
    out = []
    for x in range(1, len(history.values.get(target, [])) + 1):
        out.append((x, history.first_apply_seq[(target, x)], None))
    return out


def _check_read_then_write(history: History, byz: set[int]) -> Verdict:
    checked = 0
    for target in sorted(set(history.values) | {op.target for op in history.ops}):
        writes = _write_starts(history, target, byz)
        for read in history.reads_of(target):
            for (y, w_start, _w_end) in writes:
                if read.end_seq < w_start:
                    checked += 1
                    if not read.index < y:
                        return Verdict(
                            "read-followed-by-write", FAIL,
                            f"read {read.op_id} of reg[{target}] returned index "
                            f"{read.index} but finished before write {y} started",
                            (read.start_seq, read.end_seq, w_start))
    if checked == 0:
        return Verdict("read-followed-by-write", VACUOUS,
                       "no read strictly precedes a write")
    return Verdict("read-followed-by-write", PASS, f"{checked} pairs")


def _check_write_then_read(history: History) -> Verdict:
    checked = 0
    for target in sorted(history.values):
        writes = [op for op in history.writes_of(target)
                  if op.completed() and op.index is not None]
        for read in history.reads_of(target):
            for w in writes:
                if w.end_seq < read.start_seq:
                    checked += 1
                    if not w.index <= read.index:
                        return Verdict(
                            "write-followed-by-read", FAIL,
                            f"write {w.op_id} (index {w.index}) finished before "
                            f"read {read.op_id} started, which returned index "
                            f"{read.index}",
                            (w.start_seq, w.end_seq,
                             read.start_seq, read.end_seq))
    if checked == 0:
        return Verdict("write-followed-by-read", VACUOUS,
                       "no completed write strictly precedes a read")
    return Verdict("write-followed-by-read", PASS, f"{checked} pairs")


def _check_no_read_inversion(history: History) -> Verdict:
    checked = 0
    targets = {op.target for op in history.ops if op.kind == "READ"}
    for target in sorted(targets):
        reads = history.reads_of(target)
        for r1, r2 in itertools.permutations(reads, 2):
            if r1.end_seq < r2.start_seq:
                checked += 1
                if not r1.index <= r2.index:
                    return Verdict(
                        "no-read-inversion", FAIL,
                        f"read {r1.op_id} returned index {r1.index}, then read "
                        f"{r2.op_id} (started after {r1.op_id} ended) returned "
                        f"older index {r2.index}",
                        (r1.start_seq, r1.end_seq,
                         r2.start_seq, r2.end_seq))
    if checked == 0:
        return Verdict("no-read-inversion", VACUOUS,
                       "no two reads of one register are strictly ordered")
    return Verdict("no-read-inversion", PASS, f"{checked} pairs")


# ---------------------------------------------------------------------------
# reliable broadcast properties
# ---------------------------------------------------------------------------

def check_rb(trace: Trace) -> list[Verdict]:
    correct = set(trace.correct_nodes())
    broadcast_values: dict[tuple[int, int], set] = {}
    first_app_seq: dict[tuple[int, int], int] = {}
    for event in trace.events:
        if event["kind"] != "SEND" or event["payload"]["tag"] != "APP":
            continue
        key = (event["sender"], event["payload"]["sn"])
        broadcast_values.setdefault(key, set()).add(event["payload"]["value"])
        first_app_seq.setdefault(key, event["seq"])

    deliveries = []  # (node, origin, value, sn, seq)
    for event in trace.events:
        if event["kind"] == "RDELIVER" and event["node"] in correct:
            p = event["payload"]
            deliveries.append((event["node"], p["origin"], p["value"],
                               p["sn"], event["seq"]))

    verdicts = [
        _rb_validity(deliveries, broadcast_values, correct),
        _rb_integrity(deliveries),
        _rb_uniformity(deliveries, correct, trace.quiescent()),
        _rb_termination(deliveries, broadcast_values, first_app_seq, correct,
                        trace.quiescent()),
    ]
    return verdicts


def _rb_validity(deliveries, broadcast_values, correct) -> Verdict:
    checked = 0
    for node, origin, value, sn, seq in deliveries:
        if origin not in correct:
            continue
        checked += 1
        if value not in broadcast_values.get((origin, sn), set()):
            return Verdict(
                "rb-validity", FAIL,
                f"p{node} delivered ({value!r}, {sn}) from correct p{origin}, "
                "which never broadcast it", (seq,))
    if checked == 0:
        return Verdict("rb-validity", VACUOUS, "no deliveries from correct origins")
    return Verdict("rb-validity", PASS, f"{checked} deliveries")


def _rb_integrity(deliveries) -> Verdict:
    if not deliveries:
        return Verdict("rb-integrity", VACUOUS, "no deliveries")
    seen: dict[tuple[int, int, int], int] = {}
    for node, origin, _value, sn, seq in deliveries:
        key = (node, origin, sn)
        if key in seen:
            return Verdict(
                "rb-integrity", FAIL,
                f"p{node} delivered sn {sn} from p{origin} twice",
                (seen[key], seq))
        seen[key] = seq
    return Verdict("rb-integrity", PASS, f"{len(deliveries)} deliveries")


def _rb_uniformity(deliveries, correct, quiescent) -> Verdict:
    if not deliveries:
        return Verdict("rb-uniformity", VACUOUS, "no deliveries")
    per_instance: dict[tuple[int, int], dict[int, tuple[Value, int]]] = {}
    for node, origin, value, sn, seq in deliveries:
        per_instance.setdefault((origin, sn), {})[node] = (value, seq)
    for (origin, sn), per_node in sorted(per_instance.items()):
        entries = sorted(per_node.items())
        (n0, (v0, s0)) = entries[0]
        for node, (value, seq) in entries[1:]:
            if value != v0:
                return Verdict(
                    "rb-uniformity", FAIL,
                    f"({origin}, {sn}): p{n0} delivered {v0!r} but p{node} "
                    f"delivered {value!r}", (s0, seq))
        if quiescent and set(per_node) != correct:
            missing = sorted(correct - set(per_node))
            return Verdict(
                "rb-uniformity", FAIL,
                f"({origin}, {sn}) was delivered by p{n0} but never by "
                f"{['p%d' % m for m in missing]} (run is quiescent)", (s0,))
    note = f"{len(per_instance)} instances"
    if not quiescent:
        note += "; all-or-none part skipped (run not quiescent)"
    return Verdict("rb-uniformity", PASS, note)


def _rb_termination(deliveries, broadcast_values, first_app_seq, correct,
                    quiescent) -> Verdict:
    if not quiescent:
        return Verdict("rb-termination", VACUOUS, "run not quiescent")
    expected = [key for key in broadcast_values if key[0] in correct]
    if not expected:
        return Verdict("rb-termination", VACUOUS, "no broadcasts by correct origins")
    delivered_by: dict[tuple[int, int], set[int]] = {}
    for node, origin, _value, sn, _seq in deliveries:
        delivered_by.setdefault((origin, sn), set()).add(node)
    for key in sorted(expected):
        nodes = delivered_by.get(key, set())
        if nodes != correct:
            missing = sorted(correct - nodes)
            return Verdict(
                "rb-termination", FAIL,
                f"broadcast {key} from a correct origin never delivered at "
                f"{['p%d' % m for m in missing]}", (first_app_seq[key],))
    return Verdict("rb-termination", PASS, f"{len(expected)} broadcasts")


# ---------------------------------------------------------------------------
# liveness
# ---------------------------------------------------------------------------

def check_termination(trace: Trace) -> Verdict:
    if not trace.quiescent():
        detail = f"run ended {trace.outcome}"
        if trace.diagnostics:
            detail += ": " + "; ".join(trace.diagnostics)
        return Verdict("termination", NONTERMINATING, detail)
    open_ops = []
    for event in trace.events:
        if event["kind"] == "OP_START":
            open_ops.append((event["payload"]["id"], event["seq"]))
        elif event["kind"] == "OP_END":
            open_ops = [(i, s) for (i, s) in open_ops
                        if i != event["payload"]["id"]]
    if open_ops:
        return Verdict("termination", FAIL,
                       f"operations never completed: "
                       f"{[i for i, _ in open_ops]}",
                       tuple(s for _, s in open_ops))
    return Verdict("termination", PASS)


# ---------------------------------------------------------------------------
# linearization witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinItem:
    kind: str  # "write" | "read"
    index: int
    start: int | None  # None: unconstrained below
    end: int | None  # None: unconstrained above
    label: str


def _register_items(history: History, target: int,
                    byz: set[int]) -> list[LinItem]:
    items = [LinItem("write", 0, None, -1, "init")]
    for (x, start, end) in _write_starts(history, target, byz):
        items.append(LinItem("write", x, start, end, f"write[{x}]"))
    for read in history.reads_of(target):
        items.append(LinItem("read", read.index, read.start_seq, read.end_seq,
                             read.op_id))
    return items


def build_linearization(history: History, trace: Trace
                        ) -> tuple[dict[int, list[LinItem]], Verdict]:
    """Construct a witness order per register and validate it independently.

    Writes appear in history order; each read is placed right after the
    write whose value it returned, reads of the same position ordered by
    their start. The validator re-checks the order from scratch.
    """
    byz = set(trace.byzantine)
    orders: dict[int, list[LinItem]] = {}
    targets = sorted(set(history.values)
                     | {op.target for op in history.ops if op.kind == "READ"})
    for target in targets:
        items = _register_items(history, target, byz)
        writes = sorted([i for i in items if i.kind == "write"],
                        key=lambda i: i.index)
        reads = sorted([i for i in items if i.kind == "read"],
                       key=lambda i: (i.index, i.start))
        sequence: list[LinItem] = []
        for w in writes:
            sequence.append(w)
            sequence.extend(r for r in reads if r.index == w.index)
        orders[target] = sequence
        if len(sequence) != len(writes) + len(reads):
            placed = {id(i) for i in sequence}
            lost = [r.label for r in reads if id(r) not in placed]
            return orders, Verdict(
                "linearization", FAIL,
                f"reg[{target}]: reads {lost} returned indices outside the "
                "history", ())
        ok, reason = validate_linearization(sequence)
        if not ok:
            return orders, Verdict(
                "linearization", FAIL,
                f"reg[{target}]: {reason}",
                tuple(i.start for i in sequence if i.start is not None))
    return orders, Verdict("linearization", PASS,
                           f"{len(targets)} registers" if targets else "empty")


def validate_linearization(sequence: list[LinItem]) -> tuple[bool, str]:
    """Independent check of the three linearizability conditions.

    Distinct in-interval points exist for the proposed order exactly when
    the running maximum of interval starts stays strictly below every
    operation's end: points can then be placed at that maximum plus
    arbitrarily small increasing offsets. Event sequence numbers are
    unique, so the comparison is exact integer arithmetic. On top of the
    placement check, every read must return the value of the closest
    preceding write.
    """
    floor = None  # running max of starts; None means unconstrained so far
    last_write_index = None
    for item in sequence:
        if item.start is not None and (floor is None or item.start > floor):
            floor = item.start
        if item.end is not None and floor is not None and floor >= item.end:
            return False, (f"{item.label} cannot be placed inside its "
                           f"interval after its predecessors")
        if item.kind == "write":
            if last_write_index is not None and item.index != last_write_index + 1:
                return False, f"writes out of history order at {item.label}"
            last_write_index = item.index
        else:
            if item.index != last_write_index:
                return False, (f"{item.label} returns index {item.index} but "
                               f"follows write {last_write_index}")
    return True, ""


def brute_force_linearizable(items: list[LinItem]) -> bool:
    """Try every total order; for cross-checking small traces only."""
    init = [i for i in items if i.label == "init"]
    rest = [i for i in items if i.label != "init"]
    for perm in itertools.permutations(rest):
        ok, _ = validate_linearization(init + list(perm))
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# message-cost accounting
# ---------------------------------------------------------------------------

@dataclass
class OpCost:
    op_id: str
    kind: str
    invoker: int
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class CostReport:
    per_op: dict[str, OpCost]
    unattributed: int
    verdict: Verdict

    def by_kind(self, kind: str) -> list[OpCost]:
        return [c for c in self.per_op.values() if c.kind == kind]


def count_messages(trace: Trace, history: History | None = None) -> CostReport:
    """Attribute every send by a correct process to the operation it serves.

    Broadcast-layer messages and write acks belong to the write instance
    they carry; read requests and state replies belong to the read they
    quote; catch-up traffic belongs to the read of that register the
    requester had open when the message was sent.
    """
    if history is None:
        history = derive_histories(trace)
    correct = set(trace.correct_nodes())
    n, t = trace.n, trace.t

    write_key: dict[tuple[int, int], str] = {}
    read_key: dict[tuple[int, int, int], str] = {}
    reader_ops: dict[int, list[OperationRecord]] = {}
    per_op: dict[str, OpCost] = {}
    rsn_counter: dict[tuple[int, int], int] = {}
    for op in sorted(history.ops, key=lambda o: o.start_seq):
        per_op[op.op_id] = OpCost(op.op_id, op.kind, op.invoker)
        if op.kind == "WRITE":
            write_key[(op.invoker, op.index if op.index is not None
                       else _next_wsn(write_key, op.invoker))] = op.op_id
        else:
            rsn = rsn_counter.get((op.invoker, op.target), 0) + 1
            rsn_counter[(op.invoker, op.target)] = rsn
            read_key[(op.invoker, op.target, rsn)] = op.op_id
            reader_ops.setdefault(op.invoker, []).append(op)

    unattributed = 0

    def read_op_at(invoker: int, target: int, seq: int) -> str | None:
        best = None
        for op in reader_ops.get(invoker, []):
            if op.target == target and op.start_seq <= seq:
                best = op.op_id
        return best

    for event in trace.events:
        if event["kind"] != "SEND" or event["sender"] not in correct:
            continue
        p = event["payload"]
        tag = p["tag"]
        op_id = None
        if tag == "APP":
            op_id = write_key.get((event["sender"], p["sn"]))
        elif tag in ("ECHO", "READY"):
            op_id = write_key.get((p["origin"], p["sn"]))
        elif tag == "WRITE_DONE":
            op_id = write_key.get((event["receiver"], p["sn"]))
        elif tag == "READ":
            op_id = read_key.get((event["sender"], p["target"], p["rsn"]))
        elif tag == "STATE":
            op_id = read_key.get((event["receiver"], p["target"], p["rsn"]))
        elif tag == "CATCH_UP":
            op_id = read_op_at(event["sender"], p["target"], event["seq"])
        elif tag == "CATCH_UP_DONE":
            op_id = read_op_at(event["receiver"], p["target"], event["seq"])
        if op_id is None or op_id not in per_op:
            unattributed += 1  # e.g. replies to a Byzantine requester
            continue
        counts = per_op[op_id].counts
        counts[tag] = counts.get(tag, 0) + 1

    read_bound = 4 * n
    write_bound = 2 * n * n + 2 * n
    verdict = Verdict("message-cost", VACUOUS, "no completed operations")
    for op in sorted(history.ops, key=lambda o: o.start_seq):
        if not op.completed():
            continue
        cost = per_op[op.op_id]
        bound = read_bound if op.kind == "READ" else write_bound
        if cost.total > bound:
            verdict = Verdict(
                "message-cost", FAIL,
                f"{op.kind.lower()} {op.op_id} cost {cost.total} sends among "
                f"correct processes, bound {bound}",
                (op.start_seq, op.end_seq))
            break
    else:
        completed = [o for o in history.ops if o.completed()]
        if completed:
            verdict = Verdict("message-cost", PASS,
                              f"{len(completed)} operations within bounds")
    return CostReport(per_op=per_op, unattributed=unattributed, verdict=verdict)


def _next_wsn(write_key: dict, invoker: int) -> int:
    return 1 + sum(1 for (w, _sn) in write_key if w == invoker)


# ---------------------------------------------------------------------------
# quorum arithmetic
# ---------------------------------------------------------------------------

def min_quorum_intersection(n: int, t: int) -> int:
    """Smallest possible overlap of two (n-t)-subsets of n processes."""
    return max(0, 2 * (n - t) - n)


def min_quorum_intersection_enumerated(n: int, t: int) -> int:
    """Brute-force oracle for the formula above; usable for small n only."""
    universe = range(n)
    best = n
    for q1 in itertools.combinations(universe, n - t):
        s1 = set(q1)
        for q2 in itertools.combinations(universe, n - t):
            best = min(best, len(s1.intersection(q2)))
    return best


def quorum_intersection_holds(n: int, t: int) -> bool:
    """Any two (n-t)-quorums share at least t+1 processes."""
    return min_quorum_intersection(n, t) >= t + 1


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    trace: Trace
    history: History
    verdicts: list[Verdict]
    cost: CostReport
    linearizations: dict[int, list[LinItem]]

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == FAIL]

    def nonterminating(self) -> bool:
        return any(v.status == NONTERMINATING for v in self.verdicts)

    def ok(self, expect_nonterminating: bool = False) -> bool:
        if self.failures():
            return False
        if self.nonterminating() and not expect_nonterminating:
            return False
        return True

    def summary_lines(self) -> list[str]:
        return [str(v) for v in self.verdicts]


def run_all_checks(trace: Trace) -> CheckReport:
    history = derive_histories(trace)
    verdicts = list(history.derivation_verdicts)
    safety = check_safety(history, trace)
    verdicts.extend(safety)
    verdicts.extend(check_rb(trace))
    verdicts.append(check_termination(trace))
    cost = count_messages(trace, history)
    verdicts.append(cost.verdict)
    linearizations: dict[int, list[LinItem]] = {}
    if not any(v.status == FAIL for v in verdicts):
        linearizations, lin_verdict = build_linearization(history, trace)
        verdicts.append(lin_verdict)
    return CheckReport(trace=trace, history=history, verdicts=verdicts,
                       cost=cost, linearizations=linearizations)

"""Deterministic discrete-event network simulator.

The network is a complete graph of reliable, authenticated, non-FIFO
asynchronous channels. Nothing is ever lost or corrupted; asynchrony is
modeled by letting a scheduler pick any in-flight message to deliver next.
A fairness bound keeps transit times finite: once a message has been
passed over that many times it is delivered before any fresher one, oldest
first.

Logical time is the number of deliveries so far. Each run produces a
trace: one structured record per event with a fixed field order, so a
(scenario, seed) pair reproduces the identical byte stream. The trace is
the only input the checker ever looks at.
"""
from __future__ import annotations

import hashlib
import json
import random
import zlib
from dataclasses import dataclass, field

from .adversary import AdversaryStrategy, build_strategy
from .errors import SimulationClosedError
from .messages import Message
from .rbcast import RDeliver, Send
from .register import Apply, Complete, RegisterNode
from .scenario import ScenarioConfig, WorkloadOp

OUTCOME_QUIESCENT = "QUIESCENT"
OUTCOME_BUDGET = "BUDGET_EXCEEDED"
OUTCOME_STUCK = "STUCK"


class PendingMessage:
    __slots__ = ("id", "sender", "receiver", "payload", "enqueue_time")

    def __init__(self, mid: int, sender: int, receiver: int,
                 payload: Message, enqueue_time: int):
        self.id = mid
        self.sender = sender
        self.receiver = receiver
        self.payload = payload
        self.enqueue_time = enqueue_time


class _InFlightPool:
    """In-flight message multiset with O(1) oldest/random access."""

    def __init__(self):
        self._by_id: dict[int, PendingMessage] = {}
        self._order: list[int] = []
        self._pos: dict[int, int] = {}

    def __len__(self):
        return len(self._by_id)

    def add(self, msg: PendingMessage) -> None:
        self._by_id[msg.id] = msg
        self._pos[msg.id] = len(self._order)
        self._order.append(msg.id)

    def remove(self, mid: int) -> PendingMessage:
        msg = self._by_id.pop(mid)
        idx = self._pos.pop(mid)
        last = self._order.pop()
        if last != mid:
            self._order[idx] = last
            self._pos[last] = idx
        return msg

    def oldest(self) -> PendingMessage:
        return next(iter(self._by_id.values()))

    def pick_random(self, rng: random.Random) -> PendingMessage:
        return self._by_id[self._order[rng.randrange(len(self._order))]]

    def get(self, mid: int) -> PendingMessage | None:
        return self._by_id.get(mid)

    def snapshot(self) -> list[PendingMessage]:
        return [self._by_id[m] for m in sorted(self._by_id)]


@dataclass
class Trace:
    """Complete record of one run plus the metadata the checker needs."""

    scenario_name: str
    n: int
    t: int
    seed: int
    scheduler: str
    byzantine: tuple[int, ...]
    outcome: str
    expect_nonterminating: bool
    events: list[dict] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def correct_nodes(self) -> list[int]:
        return [p for p in range(self.n) if p not in self.byzantine]

    def quiescent(self) -> bool:
        return self.outcome == OUTCOME_QUIESCENT

    def meta_record(self) -> dict:
        return {
            "kind": "META",
            "scenario": self.scenario_name,
            "n": self.n,
            "t": self.t,
            "seed": self.seed,
            "scheduler": self.scheduler,
            "byzantine": list(self.byzantine),
            "outcome": self.outcome,
        }

    def jsonl(self) -> str:
        lines = [json.dumps(self.meta_record(), separators=(",", ":"))]
        lines.extend(json.dumps(e, separators=(",", ":")) for e in self.events)
        return "\n".join(lines) + "\n"

    def trace_hash(self) -> str:
        return hashlib.sha256(self.jsonl().encode()).hexdigest()


class Simulation:
    """One run of a scenario. Drive with step() or run() to completion."""

    def __init__(self, scenario: ScenarioConfig):
        scenario.validate()
        self.scenario = scenario
        self.n = scenario.n
        self.t = scenario.t
        self.rng = random.Random(scenario.seed)
        self.byzantine = scenario.byzantine_nodes()
        self.strategy: AdversaryStrategy | None = None
        if scenario.adversary is not None:
            self.strategy = build_strategy(scenario.adversary, self.n, self.t,
                                           scenario.seed)
        init = scenario.init_values
        self.nodes: dict[int, RegisterNode] = {
            pid: RegisterNode(pid, self.n, self.t, initial_values=init,
                              mutations=scenario.mutations)
            for pid in range(self.n) if pid not in self.byzantine
        }
        self.pool = _InFlightPool()
        self.time = 0
        self._seq = 0
        self._next_mid = 0
        self.events: list[dict] = []
        self.halted = False
        self._op_state = {op.id: "waiting" for op in scenario.workload}
        self._running: dict[int, WorkloadOp] = {}  # process -> live entry

    # -- trace plumbing ------------------------------------------------------

    def _snapshot(self, pid: int) -> str:
        if pid in self.byzantine:
            digest = self.strategy.digest(pid) if self.strategy else ("?", pid)
        else:
            digest = self.nodes[pid].digest()
        return format(zlib.crc32(repr(digest).encode()), "08x")

    def _record(self, kind: str, node: int, sender, receiver,
                payload: dict) -> dict:
        event = {
            "seq": self._seq,
            "time": self.time,
            "kind": kind,
            "node": node,
            "sender": sender,
            "receiver": receiver,
            "payload": payload,
            "snapshot": self._snapshot(node),
        }
        self._seq += 1
        self.events.append(event)
        return event

    # -- network interface ----------------------------------------------------

    def enqueue(self, sender: int, receiver: int, payload: Message) -> int:
        """Put a message in flight; returns its unique event id."""
        if self.halted:
            raise SimulationClosedError("cannot enqueue after the run halted")
        if not (0 <= sender < self.n and 0 <= receiver < self.n):
            raise ValueError("sender/receiver out of range")
        mid = self._next_mid
        self._next_mid += 1
        self.pool.add(PendingMessage(mid, sender, receiver, payload, self.time))
        self._record("SEND", sender, sender, receiver, payload.to_wire())
        return mid

    def _choose(self) -> PendingMessage:
        oldest = self.pool.oldest()
        if self.time - oldest.enqueue_time >= self.scenario.fairness_bound:
            return oldest
        policy = self.scenario.scheduler
        if policy == "FIFO":
            return oldest
        if policy == "RANDOM":
            return self.pool.pick_random(self.rng)
        # ADVERSARIAL_REORDER: the adversary inspects the in-flight multiset
        if self.strategy is not None:
            mid = self.strategy.pick_delivery(self.pool.snapshot())
            if mid is not None:
                msg = self.pool.get(mid)
                if msg is not None:
                    return msg
        return self.pool.pick_random(self.rng)

    # -- node effects -----------------------------------------------------------

    def _process_effects(self, pid: int, effects) -> None:
        for eff in effects:
            if isinstance(eff, Send):
                self.enqueue(pid, eff.dest, eff.payload)
            elif isinstance(eff, RDeliver):
                self._record("RDELIVER", pid, eff.origin, pid,
                             {"origin": eff.origin, "value": eff.value,
                              "sn": eff.sn})
            elif isinstance(eff, Apply):
                self._record("STATE_CHANGE", pid, eff.writer, pid,
                             {"writer": eff.writer, "value": eff.value,
                              "sn": eff.sn})
            elif isinstance(eff, Complete):
                self._complete_op(pid, eff)
            else:
                raise TypeError(f"unknown effect {eff!r}")

    def _complete_op(self, pid: int, eff: Complete) -> None:
        entry = self._running.pop(pid, None)
        if entry is None:
            raise RuntimeError(f"completion with no running op at p{pid}")
        self._op_state[entry.id] = "done"
        self._record("OP_END", pid, pid, None,
                     {"op": eff.kind.upper(), "id": entry.id,
                      "target": eff.target, "value": eff.value, "sn": eff.sn})

    def _byz_sends(self, pid: int, sends: list[Send]) -> None:
        for send in sends[:self.scenario.send_cap()]:
            self.enqueue(pid, send.dest, send.payload)

    # -- workload -----------------------------------------------------------------

    def _fireable(self, entry: WorkloadOp) -> bool:
        if self._op_state[entry.id] != "waiting":
            return False
        if entry.at is not None and self.time < entry.at:
            return False
        if entry.after is not None and self._op_state[entry.after] != "done":
            return False
        if entry.process not in self.byzantine and entry.process in self._running:
            return False  # process busy; retried once its op completes
        return True

    def _fire_workload(self) -> None:
        fired = True
        while fired:
            fired = False
            for entry in self.scenario.workload:
                if not self._fireable(entry):
                    continue
                fired = True
                if entry.process in self.byzantine:
                    # handed to the strategy; completion is not observable
                    self._op_state[entry.id] = "done"
                    if self.strategy is not None:
                        self._byz_sends(entry.process,
                                        self.strategy.on_workload(
                                            entry.process, entry))
                    continue
                node = self.nodes[entry.process]
                self._op_state[entry.id] = "running"
                self._running[entry.process] = entry
                self._record("OP_START", entry.process, entry.process, None,
                             {"op": entry.op.upper(), "id": entry.id,
                              "target": entry.target if entry.op == "read"
                              else entry.process,
                              "value": entry.value})
                if entry.op == "write":
                    self._process_effects(entry.process,
                                          node.begin_write(entry.value))
                else:
                    self._process_effects(entry.process,
                                          node.begin_read(entry.target))

    def _advance_idle_time(self) -> bool:
        """With an empty network, jump to the next time-triggered entry."""
        candidates = []
        for entry in self.scenario.workload:
            if self._op_state[entry.id] != "waiting" or entry.at is None:
                continue
            if entry.after is not None and self._op_state[entry.after] != "done":
                continue
            if (entry.process not in self.byzantine
                    and entry.process in self._running):
                continue
            if entry.at > self.time:
                candidates.append(entry.at)
        if not candidates:
            return False
        self.time = min(candidates)
        return True

    # -- main loop ------------------------------------------------------------------

    def step(self) -> dict | None:
        """Deliver one message; returns its DELIVER event, or None at rest."""
        self._fire_workload()
        if len(self.pool) == 0:
            return None
        msg = self._choose()
        self.pool.remove(msg.id)
        self.time += 1
        event = self._record("DELIVER", msg.receiver, msg.sender, msg.receiver,
                             msg.payload.to_wire())
        if msg.receiver in self.byzantine:
            if self.strategy is not None:
                self._byz_sends(msg.receiver,
                                self.strategy.on_deliver(msg.receiver,
                                                         msg.sender,
                                                         msg.payload))
        else:
            node = self.nodes[msg.receiver]
            self._process_effects(msg.receiver,
                                  node.handle(msg.sender, msg.payload))
        return event

    def run(self) -> Trace:
        deliveries = 0
        while True:
            if deliveries >= self.scenario.step_budget:
                outcome = OUTCOME_BUDGET
                break
            if self.step() is not None:
                deliveries += 1
                continue
            if self._advance_idle_time():
                continue
            if all(state == "done" for state in self._op_state.values()):
                outcome = OUTCOME_QUIESCENT
            else:
                outcome = OUTCOME_STUCK
            break
        self.halted = True
        return Trace(
            scenario_name=self.scenario.name,
            n=self.n, t=self.t, seed=self.scenario.seed,
            scheduler=self.scenario.scheduler,
            byzantine=tuple(sorted(self.byzantine)),
            outcome=outcome,
            expect_nonterminating=self.scenario.expect_nonterminating,
            events=self.events,
            diagnostics=self._diagnostics(outcome))

    def _diagnostics(self, outcome: str) -> list[str]:
        if outcome == OUTCOME_QUIESCENT:
            return []
        notes = [f"{opid}: {state}" for opid, state in self._op_state.items()
                 if state != "done"]
        for pid in sorted(self.nodes):
            notes.extend(self.nodes[pid].guard_diagnostics())
        if len(self.pool):
            notes.append(f"{len(self.pool)} messages still in flight")
        return notes


def run_scenario_once(scenario: ScenarioConfig, seed: int | None = None) -> Trace:
    """Convenience wrapper: run one seed of a scenario to completion."""
    if seed is not None:
        scenario = scenario.with_seed(seed)
    return Simulation(scenario).run()

"""Scenario configuration: model parameters, adversary assignment, workload.

A scenario is a single JSON document. The workload is an ordered script of
operations; each entry fires once its trigger is satisfied ("at" a logical
time, or "after" another entry has completed) and its process is idle.
Entries on adversary-controlled processes are handed to the strategy and
count as completed immediately.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ScenarioError

SCHEDULERS = ("FIFO", "RANDOM", "ADVERSARIAL_REORDER")

DEFAULT_FAIRNESS_BOUND = 1000
DEFAULT_STEP_BUDGET = 200_000


@dataclass(frozen=True)
class WorkloadOp:
    id: str
    process: int
    op: str  # "write" | "read"
    value: object = None  # writes
    target: int | None = None  # reads
    at: int | None = None
    after: str | None = None


@dataclass(frozen=True)
class AdversarySpec:
    name: str
    nodes: tuple[int, ...]
    params: dict = field(default_factory=dict)


@dataclass
class ScenarioConfig:
    name: str
    n: int
    t: int
    seed: int = 0
    scheduler: str = "RANDOM"
    workload: list[WorkloadOp] = field(default_factory=list)
    adversary: AdversarySpec | None = None
    fairness_bound: int = DEFAULT_FAIRNESS_BOUND
    step_budget: int = DEFAULT_STEP_BUDGET
    init_values: list | None = None
    mutations: frozenset[str] = frozenset()
    allow_t_violation: bool = False
    expect_nonterminating: bool = False
    adversary_send_cap: int | None = None  # defaults to 4n sends per event

    def byzantine_nodes(self) -> frozenset[int]:
        return frozenset(self.adversary.nodes) if self.adversary else frozenset()

    def send_cap(self) -> int:
        return self.adversary_send_cap if self.adversary_send_cap else 4 * self.n

    def validate(self) -> None:
        if self.n < 1:
            raise ScenarioError("n must be positive")
        if self.t < 0:
            raise ScenarioError("t must be non-negative")
        if self.n <= 3 * self.t and not self.allow_t_violation:
            raise ScenarioError(
                f"n > 3t required (got n={self.n}, t={self.t}); "
                "set allow_t_violation to run anyway")
        if self.scheduler not in SCHEDULERS:
            raise ScenarioError(f"unknown scheduler {self.scheduler!r}; "
                                f"expected one of {SCHEDULERS}")
        if self.fairness_bound < 1:
            raise ScenarioError("fairness_bound must be at least 1")
        if self.step_budget < 1:
            raise ScenarioError("step_budget must be at least 1")
        if self.init_values is not None and len(self.init_values) != self.n:
            raise ScenarioError("init_values must list one value per process")
        byz = self.byzantine_nodes()
        if self.adversary is not None:
            from .adversary import STRATEGIES  # late import to avoid a cycle
            if self.adversary.name not in STRATEGIES:
                raise ScenarioError(
                    f"unknown adversary {self.adversary.name!r}; "
                    f"expected one of {sorted(STRATEGIES)}")
            if not byz:
                raise ScenarioError("adversary requires a non-empty node list")
            if any(p < 0 or p >= self.n for p in byz):
                raise ScenarioError("adversary nodes out of range")
            if len(byz) > self.t and not self.allow_t_violation:
                raise ScenarioError(
                    f"adversary controls {len(byz)} nodes but t={self.t}")
        ids = set()
        for entry in self.workload:
            if entry.id in ids:
                raise ScenarioError(f"duplicate workload id {entry.id!r}")
            ids.add(entry.id)
            if entry.process < 0 or entry.process >= self.n:
                raise ScenarioError(f"workload {entry.id}: process out of range")
            if entry.op == "write":
                pass
            elif entry.op == "read":
                if entry.target is None or not (0 <= entry.target < self.n):
                    raise ScenarioError(
                        f"workload {entry.id}: read needs a target in [0, n)")
            else:
                raise ScenarioError(
                    f"workload {entry.id}: op must be 'write' or 'read'")
            if entry.at is None and entry.after is None:
                raise ScenarioError(
                    f"workload {entry.id}: needs an 'at' time or an 'after' ref")
            if entry.at is not None and entry.at < 0:
                raise ScenarioError(f"workload {entry.id}: 'at' must be >= 0")
        for entry in self.workload:
            if entry.after is not None and entry.after not in ids:
                raise ScenarioError(
                    f"workload {entry.id}: 'after' references unknown id "
                    f"{entry.after!r}")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "name": self.name,
            "n": self.n,
            "t": self.t,
            "seed": self.seed,
            "scheduler": self.scheduler,
            "fairness_bound": self.fairness_bound,
            "step_budget": self.step_budget,
            "workload": [
                {k: v for k, v in (
                    ("id", op.id), ("process", op.process), ("op", op.op),
                    ("value", op.value), ("target", op.target),
                    ("at", op.at), ("after", op.after)) if v is not None}
                for op in self.workload
            ],
        }
        if self.adversary is not None:
            doc["adversary"] = {"name": self.adversary.name,
                                "nodes": list(self.adversary.nodes),
                                "params": dict(self.adversary.params)}
        if self.init_values is not None:
            doc["init_values"] = self.init_values
        if self.mutations:
            doc["mutations"] = sorted(self.mutations)
        if self.allow_t_violation:
            doc["allow_t_violation"] = True
        if self.expect_nonterminating:
            doc["expect_nonterminating"] = True
        if self.adversary_send_cap is not None:
            doc["adversary_send_cap"] = self.adversary_send_cap
        return doc

    @classmethod
    def from_dict(cls, doc: dict, validate: bool = True) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ScenarioError("scenario document must be a JSON object")
        for req in ("name", "n", "t"):
            if req not in doc:
                raise ScenarioError(f"scenario is missing required field {req!r}")
        known = {"name", "n", "t", "seed", "scheduler", "workload", "adversary",
                 "fairness_bound", "step_budget", "init_values", "mutations",
                 "allow_t_violation", "expect_nonterminating",
                 "adversary_send_cap"}
        unknown = set(doc) - known
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        workload = []
        for i, raw in enumerate(doc.get("workload", [])):
            if "id" not in raw or "process" not in raw or "op" not in raw:
                raise ScenarioError(
                    f"workload entry #{i} needs 'id', 'process' and 'op'")
            workload.append(WorkloadOp(
                id=str(raw["id"]), process=int(raw["process"]),
                op=str(raw["op"]), value=raw.get("value"),
                target=raw.get("target"), at=raw.get("at"),
                after=raw.get("after")))
        adversary = None
        if doc.get("adversary") is not None:
            raw = doc["adversary"]
            if "name" not in raw or "nodes" not in raw:
                raise ScenarioError("adversary needs 'name' and 'nodes'")
            adversary = AdversarySpec(name=str(raw["name"]),
                                      nodes=tuple(int(p) for p in raw["nodes"]),
                                      params=dict(raw.get("params", {})))
        cfg = cls(
            name=str(doc["name"]), n=int(doc["n"]), t=int(doc["t"]),
            seed=int(doc.get("seed", 0)),
            scheduler=str(doc.get("scheduler", "RANDOM")),
            workload=workload, adversary=adversary,
            fairness_bound=int(doc.get("fairness_bound", DEFAULT_FAIRNESS_BOUND)),
            step_budget=int(doc.get("step_budget", DEFAULT_STEP_BUDGET)),
            init_values=doc.get("init_values"),
            mutations=frozenset(doc.get("mutations", ())),
            allow_t_violation=bool(doc.get("allow_t_violation", False)),
            expect_nonterminating=bool(doc.get("expect_nonterminating", False)),
            adversary_send_cap=doc.get("adversary_send_cap"))
        if validate:
            cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path, validate: bool = True) -> "ScenarioConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}, "
                                f"column {exc.colno}: {exc.msg}") from exc
        try:
            return cls.from_dict(doc, validate=validate)
        except ScenarioError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return dataclasses.replace(self, seed=seed)


def max_tolerated(n: int) -> int:
    """Largest t with n > 3t."""
    return (n - 1) // 3


def standard_workload(n: int, byz: frozenset[int],
                      byz_writes: bool) -> list[WorkloadOp]:
    """Mixed write/read script used by the safety/liveness matrix.

    Chains enough operations sequentially that every consistency property
    has at least one non-vacuous pair, then adds a couple of concurrent
    operations so the scheduler has real freedom.
    """
    byz_target = max(byz) if byz else 0
    ops = [
        WorkloadOp("w1", 0, "write", value="x1", at=0),
        WorkloadOp("r1", 1, "read", target=0, after="w1"),
        WorkloadOp("w2", 0, "write", value="x2", after="r1"),
        WorkloadOp("r2", 2, "read", target=0, after="w2"),
        WorkloadOp("w3", 0, "write", value="x3", after="w2"),
        WorkloadOp("r3", 1, "read", target=0, after="r2"),
        WorkloadOp("r4", 2, "read", target=byz_target, at=1),
    ]
    if byz_writes and byz:
        ops.append(WorkloadOp("bw1", byz_target, "write", value="e", at=0))
    return ops


def matrix_scenario(n: int, strategy: str | None, seed: int = 0, *,
                    mutations: frozenset[str] = frozenset()) -> ScenarioConfig:
    """One cell of the (n, adversary) evaluation matrix."""
    t = max_tolerated(n)
    byz = frozenset(range(n - t, n)) if strategy else frozenset()
    adversary = None
    scheduler = "RANDOM"
    params: dict = {}
    if strategy:
        if strategy == "COLLUDE_DELAY":
            scheduler = "ADVERSARIAL_REORDER"
            params = {"favored": 1, "victim": 2}
        adversary = AdversarySpec(strategy, tuple(sorted(byz)), params)
    name = f"matrix-n{n}-{strategy.lower() if strategy else 'fault-free'}"
    cfg = ScenarioConfig(
        name=name, n=n, t=t, seed=seed, scheduler=scheduler,
        workload=standard_workload(
            n, byz, byz_writes=strategy in ("EQUIVOCATE_WRITE", "SEQ_SKIP")),
        adversary=adversary, fairness_bound=200, step_budget=100_000,
        mutations=mutations)
    cfg.validate()
    return cfg

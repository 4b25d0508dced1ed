"""Checker tests over synthetic traces and hand-built histories.

Synthetic traces let each verifier be pointed at a violation directly,
so the failure detectors are exercised without needing a broken protocol.
"""
import itertools

import pytest

from byzreg.checker import (FAIL, PASS, VACUOUS, History, LinItem,
                            OperationRecord, brute_force_linearizable,
                            build_linearization, check_rb, check_safety,
                            check_termination, count_messages,
                            derive_histories, min_quorum_intersection,
                            min_quorum_intersection_enumerated,
                            quorum_intersection_holds, run_all_checks,
                            validate_linearization)
from byzreg.netsim import Simulation, Trace
from byzreg.scenario import ScenarioConfig, WorkloadOp


def make_trace(events, n=4, t=1, byz=(), outcome="QUIESCENT"):
    return Trace(scenario_name="synthetic", n=n, t=t, seed=0,
                 scheduler="RANDOM", byzantine=tuple(byz), outcome=outcome,
                 expect_nonterminating=False, events=list(events))


_seq = itertools.count()


def ev(kind, node, payload, sender=None, receiver=None, seq=None):
    seq = next(_seq) if seq is None else seq
    return {"seq": seq, "time": seq, "kind": kind, "node": node,
            "sender": node if sender is None else sender,
            "receiver": receiver, "payload": payload, "snapshot": "0"}


def apply_ev(node, writer, value, sn, seq=None):
    return ev("STATE_CHANGE", node, {"writer": writer, "value": value,
                                     "sn": sn}, sender=writer, seq=seq)


def op_start(node, kind, op_id, target, seq=None, value=None):
    return ev("OP_START", node, {"op": kind, "id": op_id, "target": target,
                                 "value": value}, seq=seq)


def op_end(node, kind, op_id, target, value, sn, seq=None):
    return ev("OP_END", node, {"op": kind, "id": op_id, "target": target,
                               "value": value, "sn": sn}, seq=seq)


class TestDeriveHistories:
    def test_single_write_by_correct_process(self):
        events = [apply_ev(node, 1, "x", 1) for node in (0, 1, 2)]
        hist = derive_histories(make_trace(events, byz=(3,)))
        assert hist.values[1] == ["x"]
        assert all(v.status == PASS for v in hist.derivation_verdicts)

    def test_byzantine_gap_excluded(self):
        # sn 1 applied everywhere; sn 3 was delivered but never applied,
        # so it simply does not appear as a STATE_CHANGE
        events = [apply_ev(node, 3, "a", 1) for node in (0, 1, 2)]
        hist = derive_histories(make_trace(events, byz=(3,)))
        assert hist.values[3] == ["a"]

    def test_zero_writes_and_initial_read(self):
        events = [op_start(1, "READ", "r1", 0),
                  op_end(1, "READ", "r1", 0, None, 0)]
        hist = derive_histories(make_trace(events))
        assert hist.values == {}
        verdicts = {v.prop: v.status for v in hist.derivation_verdicts}
        assert verdicts["read-resolution"] == PASS

    def test_conflicting_applies_fail_agreement(self):
        events = [apply_ev(0, 3, "a", 1), apply_ev(1, 3, "b", 1)]
        hist = derive_histories(make_trace(events, byz=(3,)))
        fails = [v for v in hist.derivation_verdicts if v.status == FAIL]
        assert fails and fails[0].prop == "per-writer-agreement"
        assert len(fails[0].counterexample) == 2

    def test_read_of_unknown_value_fails_resolution(self):
        events = [op_start(1, "READ", "r1", 0),
                  op_end(1, "READ", "r1", 0, "ghost", 4)]
        hist = derive_histories(make_trace(events))
        fails = [v for v in hist.derivation_verdicts if v.status == FAIL]
        assert fails and fails[0].prop == "read-resolution"


class TestCheckSafety:
    def _history(self, events, byz=()):
        trace = make_trace(events, byz=byz)
        return derive_histories(trace), trace

    def test_sequential_write_then_read_passes(self):
        events = [
            op_start(0, "WRITE", "w1", 0, seq=0),
            apply_ev(0, 0, "a", 1, seq=1),
            apply_ev(1, 0, "a", 1, seq=2),
            op_end(0, "WRITE", "w1", 0, "a", 1, seq=3),
            op_start(1, "READ", "r1", 0, seq=4),
            op_end(1, "READ", "r1", 0, "a", 1, seq=5),
        ]
        hist, trace = self._history(events)
        verdicts = {v.prop: v for v in check_safety(hist, trace)}
        assert verdicts["write-followed-by-read"].status == PASS
        assert verdicts["read-followed-by-write"].status == VACUOUS

    def test_read_inversion_detected_with_counterexample(self):
        events = [
            op_start(0, "WRITE", "w1", 0, seq=0),
            apply_ev(0, 0, "a", 1, seq=1),
            apply_ev(1, 0, "a", 1, seq=2),
            apply_ev(0, 0, "b", 2, seq=3),
            apply_ev(1, 0, "b", 2, seq=4),
            op_end(0, "WRITE", "w1", 0, "a", 1, seq=5),
            op_start(1, "READ", "r1", 0, seq=6),
            op_end(1, "READ", "r1", 0, "b", 2, seq=7),
            op_start(2, "READ", "r2", 0, seq=8),
            op_end(2, "READ", "r2", 0, "a", 1, seq=9),
        ]
        hist, trace = self._history(events)
        verdicts = {v.prop: v for v in check_safety(hist, trace)}
        inv = verdicts["no-read-inversion"]
        assert inv.status == FAIL
        assert inv.counterexample == (6, 7, 8, 9)

    def test_fully_concurrent_ops_are_vacuous(self):
        events = [
            op_start(1, "READ", "r1", 0, seq=0),
            op_start(2, "READ", "r2", 0, seq=1),
            op_end(1, "READ", "r1", 0, None, 0, seq=2),
            op_end(2, "READ", "r2", 0, None, 0, seq=3),
        ]
        hist, trace = self._history(events)
        verdicts = {v.prop: v for v in check_safety(hist, trace)}
        assert verdicts["no-read-inversion"].status == VACUOUS

    def test_read_from_the_future_detected(self):
        # the read finishes before any correct node applies write 1, yet
        # returns index 1
        events = [
            op_start(1, "READ", "r1", 0, seq=0),
            op_end(1, "READ", "r1", 0, "a", 1, seq=1),
            op_start(0, "WRITE", "w1", 0, seq=2),
            apply_ev(0, 0, "a", 1, seq=3),
            apply_ev(1, 0, "a", 1, seq=4),
            op_end(0, "WRITE", "w1", 0, "a", 1, seq=5),
        ]
        hist, trace = self._history(events)
        verdicts = {v.prop: v for v in check_safety(hist, trace)}
        assert verdicts["read-followed-by-write"].status == FAIL

    def test_byzantine_write_start_is_first_apply(self):
        # read ends at seq 1; the faulty writer's value first applies later,
        # so returning it is a read from the future
        events = [
            op_start(1, "READ", "r1", 3, seq=0),
            op_end(1, "READ", "r1", 3, "evil", 1, seq=1),
            apply_ev(0, 3, "evil", 1, seq=2),
            apply_ev(1, 3, "evil", 1, seq=3),
        ]
        hist, trace = self._history(events, byz=(3,))
        verdicts = {v.prop: v for v in check_safety(hist, trace)}
        assert verdicts["read-followed-by-write"].status == FAIL


class TestCheckRb:
    def _app_send(self, origin, value, sn):
        return ev("SEND", origin, {"tag": "APP", "value": value, "sn": sn},
                  receiver=0)

    def rdeliver(self, node, origin, value, sn):
        return ev("RDELIVER", node, {"origin": origin, "value": value,
                                     "sn": sn}, sender=origin, receiver=node)

    def test_clean_run_all_pass(self):
        events = [self._app_send(0, "x", 1)]
        events += [self.rdeliver(node, 0, "x", 1) for node in (0, 1, 2)]
        verdicts = {v.prop: v.status
                    for v in check_rb(make_trace(events, byz=(3,)))}
        assert verdicts == {"rb-validity": PASS, "rb-integrity": PASS,
                            "rb-uniformity": PASS, "rb-termination": PASS}

    def test_double_delivery_fails_integrity(self):
        events = [self._app_send(0, "x", 1),
                  self.rdeliver(1, 0, "x", 1),
                  self.rdeliver(1, 0, "x", 1)]
        verdicts = {v.prop: v.status for v in check_rb(make_trace(events))}
        assert verdicts["rb-integrity"] == FAIL

    def test_split_values_fail_uniformity(self):
        events = [self.rdeliver(0, 3, "a", 1), self.rdeliver(1, 3, "b", 1)]
        verdicts = {v.prop: v.status
                    for v in check_rb(make_trace(events, byz=(3,)))}
        assert verdicts["rb-uniformity"] == FAIL

    def test_partial_delivery_fails_uniformity_only_when_quiescent(self):
        events = [self.rdeliver(0, 3, "a", 1)]
        quiescent = make_trace(events, byz=(3,))
        cut_short = make_trace(events, byz=(3,), outcome="BUDGET_EXCEEDED")
        assert {v.prop: v.status for v in check_rb(quiescent)}[
            "rb-uniformity"] == FAIL
        assert {v.prop: v.status for v in check_rb(cut_short)}[
            "rb-uniformity"] == PASS

    def test_spurious_delivery_fails_validity(self):
        events = [self.rdeliver(1, 0, "forged", 1)]
        verdicts = {v.prop: v.status for v in check_rb(make_trace(events))}
        assert verdicts["rb-validity"] == FAIL

    def test_missing_delivery_fails_termination(self):
        events = [self._app_send(0, "x", 1), self.rdeliver(0, 0, "x", 1)]
        verdicts = {v.prop: v.status for v in check_rb(make_trace(events))}
        assert verdicts["rb-termination"] == FAIL


class TestCheckTermination:
    def test_budget_run_is_nonterminating(self):
        trace = make_trace([], outcome="BUDGET_EXCEEDED")
        trace.diagnostics = ["r1: running"]
        verdict = check_termination(trace)
        assert verdict.status == "NONTERMINATING"
        assert "r1" in verdict.detail

    def test_zero_operations_pass(self):
        assert check_termination(make_trace([])).status == PASS


class TestLinearization:
    def _read(self, op_id, invoker, index, start, end):
        return OperationRecord("READ", op_id, invoker, 0, start, end,
                               value=f"v{index}", index=index)

    def _write(self, op_id, index, start, end):
        return OperationRecord("WRITE", op_id, 0, 0, start, end,
                               value=f"v{index}", index=index)

    def _history(self, ops, n_writes):
        values = {0: [f"v{x}" for x in range(1, n_writes + 1)]}
        return History(values=values, first_apply_seq={}, ops=ops)

    def test_concurrent_reads_of_same_write_sit_together(self):
        ops = [self._write("w1", 1, 0, 5),
               self._read("r1", 1, 1, 1, 6),
               self._read("r2", 2, 1, 2, 7)]
        hist = self._history(ops, 1)
        orders, verdict = build_linearization(hist, make_trace([]))
        assert verdict.status == PASS
        assert [i.label for i in orders[0]] == ["init", "write[1]", "r1", "r2"]

    def test_read_concurrent_with_writes_lands_after_its_write(self):
        # writes 1..5 back to back; a read overlapping writes 3..5 returns 4
        ops = [self._write(f"w{x}", x, 10 * x, 10 * x + 5)
               for x in range(1, 6)]
        ops.append(self._read("r1", 1, 4, 31, 55))
        hist = self._history(ops, 5)
        orders, verdict = build_linearization(hist, make_trace([]))
        assert verdict.status == PASS
        labels = [i.label for i in orders[0]]
        assert labels.index("r1") == labels.index("write[4]") + 1

    def test_empty_history_is_trivially_linearizable(self):
        orders, verdict = build_linearization(
            self._history([], 0), make_trace([]))
        assert verdict.status == PASS

    def test_real_time_violation_rejected_by_validator(self):
        items = [LinItem("write", 0, None, -1, "init"),
                 LinItem("read", 0, 10, 12, "late"),
                 LinItem("read", 0, 0, 2, "early")]
        ok, reason = validate_linearization(items)
        assert not ok and "early" in reason

    def test_brute_force_agrees_on_impossible_history(self):
        # both writes finish, then two sequential reads return 2 then 1:
        # no order can satisfy both reads
        items = [
            LinItem("write", 0, None, -1, "init"),
            LinItem("write", 1, 0, 1, "write[1]"),
            LinItem("write", 2, 2, 3, "write[2]"),
            LinItem("read", 2, 4, 5, "r1"),
            LinItem("read", 1, 6, 7, "r2"),
        ]
        assert not brute_force_linearizable(items)

    def test_brute_force_agrees_with_witness_on_real_runs(self):
        cfg = ScenarioConfig(
            name="tiny", n=4, t=1, seed=0,
            workload=[
                WorkloadOp("w1", 0, "write", value="a", at=0),
                WorkloadOp("r1", 1, "read", target=0, after="w1"),
                WorkloadOp("w2", 0, "write", value="b", after="w1"),
                WorkloadOp("r2", 2, "read", target=0, after="r1"),
            ])
        cfg.validate()
        for seed in range(10):
            trace = Simulation(cfg.with_seed(seed)).run()
            report = run_all_checks(trace)
            assert report.ok(), report.failures()
            for target, sequence in report.linearizations.items():
                ok, reason = validate_linearization(sequence)
                assert ok, reason
                assert brute_force_linearizable(sequence)


class TestCostAccounting:
    def test_fault_free_run_has_exact_costs(self):
        cfg = ScenarioConfig(
            name="golden", n=4, t=1, seed=0,
            workload=[
                WorkloadOp("w1", 0, "write", value="a", at=0),
                WorkloadOp("r1", 1, "read", target=0, after="w1"),
            ])
        cfg.validate()
        trace = Simulation(cfg).run()
        report = count_messages(trace)
        assert report.per_op["w1"].counts == {
            "APP": 4, "ECHO": 16, "READY": 16, "WRITE_DONE": 4}
        assert report.per_op["r1"].counts == {
            "READ": 4, "STATE": 4, "CATCH_UP": 4, "CATCH_UP_DONE": 4}
        assert report.verdict.status == PASS
        assert report.unattributed == 0


class TestQuorumArithmetic:
    @pytest.mark.parametrize("n,t", [(4, 1), (5, 1), (7, 2), (8, 2), (10, 3)])
    def test_formula_matches_enumeration(self, n, t):
        assert (min_quorum_intersection(n, t)
                == min_quorum_intersection_enumerated(n, t))

    def test_intersection_bound_holds_up_to_fifty(self):
        pairs = [(n, t) for n in range(2, 51) for t in range(0, n)
                 if 3 * t < n]
        assert pairs
        for n, t in pairs:
            assert min_quorum_intersection(n, t) == n - 2 * t
            assert quorum_intersection_holds(n, t), (n, t)

    def test_bound_fails_when_t_exceeds_a_third(self):
        assert not quorum_intersection_holds(6, 2)
        assert not quorum_intersection_holds(9, 3)

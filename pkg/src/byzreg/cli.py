"""Command-line runner: execute scenarios, sweep seeds, report verdicts.

Subcommands:

* ``run``     one scenario, one or more seeds; writes traces and verdict
              reports, exits non-zero on any failure.
* ``sweep``   seed range with aggregate statistics and a per-operation
              message-cost table; reports the first failing seed with a
              replay command.
* ``replay``  re-run one (scenario, seed) pair and print its trace hash.
* ``list``    bundled scenario names.

A scenario argument is a path to a JSON file, or the name of a bundled
scenario (see ``byzreg list``).
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
from importlib import resources
from pathlib import Path

from .checker import CheckReport, run_all_checks
from .errors import ScenarioError
from .netsim import Simulation, Trace
from .scenario import ScenarioConfig


def bundled_scenario_names() -> list[str]:
    root = resources.files("byzreg").joinpath("scenarios")
    return sorted(p.name.removesuffix(".json")
                  for p in root.iterdir() if p.name.endswith(".json"))


def resolve_scenario(ref: str, validate: bool = True) -> ScenarioConfig:
    path = Path(ref)
    if path.exists():
        return ScenarioConfig.load(path, validate=validate)
    bundle = resources.files("byzreg").joinpath("scenarios", f"{ref}.json")
    if bundle.is_file():
        return ScenarioConfig.from_dict(json.loads(bundle.read_text()),
                                        validate=validate)
    raise ScenarioError(
        f"{ref!r} is neither a file nor a bundled scenario "
        f"(bundled: {', '.join(bundled_scenario_names())})")


def parse_seeds(args, default: int) -> list[int]:
    if args.seeds:
        lo, _, hi = args.seeds.partition(":")
        try:
            return list(range(int(lo), int(hi)))
        except ValueError:
            raise ScenarioError(f"--seeds expects A:B, got {args.seeds!r}")
    if args.seed is not None:
        return [args.seed]
    return [default]


def load_with_overrides(args) -> ScenarioConfig:
    """Resolve the scenario with CLI flag overrides applied before validation."""
    return apply_overrides(resolve_scenario(args.scenario, validate=False), args)


def apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "allow_t_violation", False):
        cfg.allow_t_violation = True
    if getattr(args, "expect_nonterminating", False):
        cfg.expect_nonterminating = True
    for name in getattr(args, "mutate", None) or []:
        cfg.mutations = cfg.mutations | {name}
    cfg.validate()
    return cfg


def run_one(cfg: ScenarioConfig, seed: int) -> tuple[Trace, CheckReport]:
    trace = Simulation(cfg.with_seed(seed)).run()
    return trace, run_all_checks(trace)


def report_doc(trace: Trace, report: CheckReport) -> dict:
    return {
        "scenario": trace.scenario_name,
        "seed": trace.seed,
        "outcome": trace.outcome,
        "trace_hash": trace.trace_hash(),
        "verdicts": [
            {"prop": v.prop, "status": v.status, "detail": v.detail,
             "counterexample": list(v.counterexample)}
            for v in report.verdicts
        ],
        "costs": {
            op_id: {"kind": c.kind, "invoker": c.invoker, "total": c.total,
                    "by_tag": dict(sorted(c.counts.items()))}
            for op_id, c in sorted(report.cost.per_op.items())
        },
        "diagnostics": trace.diagnostics,
    }


def write_artifacts(out_dir: Path, trace: Trace, report: CheckReport) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{trace.scenario_name}-seed{trace.seed}"
    (out_dir / f"{stem}.trace.jsonl").write_text(trace.jsonl())
    (out_dir / f"{stem}.report.json").write_text(
        json.dumps(report_doc(trace, report), indent=2, default=str) + "\n")


def cmd_run(args) -> int:
    cfg = load_with_overrides(args)
    seeds = parse_seeds(args, cfg.seed)
    failures = 0
    for seed in seeds:
        trace, report = run_one(cfg, seed)
        ok = report.ok(cfg.expect_nonterminating)
        failures += 0 if ok else 1
        if args.out:
            write_artifacts(Path(args.out), trace, report)
        status = "ok" if ok else "FAILED"
        print(f"{cfg.name} seed={seed} outcome={trace.outcome} {status}")
        if args.verbose or not ok:
            for line in report.summary_lines():
                print(f"  {line}")
    print(f"{len(seeds) - failures}/{len(seeds)} seeds passed")
    return 0 if failures == 0 else 1


def cmd_sweep(args) -> int:
    cfg = load_with_overrides(args)
    seeds = parse_seeds(args, cfg.seed)
    first_failure = None
    verdict_totals: dict[str, dict[str, int]] = {}
    costs: dict[str, list[int]] = {"READ": [], "WRITE": []}
    for seed in seeds:
        trace, report = run_one(cfg, seed)
        for v in report.verdicts:
            verdict_totals.setdefault(v.prop, {}).setdefault(v.status, 0)
            verdict_totals[v.prop][v.status] += 1
        for cost in report.cost.per_op.values():
            if cost.kind in costs and cost.total:
                costs[cost.kind].append(cost.total)
        if not report.ok(cfg.expect_nonterminating) and first_failure is None:
            first_failure = (seed, trace, report)
    n = cfg.n
    bounds = {"READ": 4 * n, "WRITE": 2 * n * n + 2 * n}
    print(f"sweep {cfg.name}: {len(seeds)} seeds")
    for prop in sorted(verdict_totals):
        line = ", ".join(f"{status}={count}" for status, count
                         in sorted(verdict_totals[prop].items()))
        print(f"  {prop}: {line}")
    for kind, totals in costs.items():
        if not totals:
            continue
        print(f"  {kind} sends/op: min={min(totals)} "
              f"median={int(statistics.median(totals))} max={max(totals)} "
              f"bound={bounds[kind]}")
    doc = {
        "scenario": cfg.name,
        "seeds": [seeds[0], seeds[-1]] if seeds else [],
        "verdicts": verdict_totals,
        "costs": {k: {"min": min(v), "max": max(v),
                      "median": statistics.median(v)}
                  for k, v in costs.items() if v},
    }
    if first_failure is not None:
        seed, trace, report = first_failure
        doc["first_failure"] = report_doc(trace, report)
        print(f"  FIRST FAILURE at seed {seed}; replay with:")
        print(f"    byzreg replay {args.scenario} --seed {seed}")
        if args.out:
            write_artifacts(Path(args.out), trace, report)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{cfg.name}-sweep.json").write_text(
            json.dumps(doc, indent=2, default=str) + "\n")
    return 0 if first_failure is None else 1


def cmd_replay(args) -> int:
    cfg = load_with_overrides(args)
    seed = args.seed if args.seed is not None else cfg.seed
    trace, report = run_one(cfg, seed)
    print(f"{cfg.name} seed={seed} outcome={trace.outcome}")
    print(f"trace_hash={trace.trace_hash()}")
    for line in report.summary_lines():
        print(f"  {line}")
    if args.out:
        write_artifacts(Path(args.out), trace, report)
    return 0 if report.ok(cfg.expect_nonterminating) else 1


def cmd_list(_args) -> int:
    for name in bundled_scenario_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="byzreg",
        description="Byzantine-tolerant register emulation: scenario runner "
                    "and trace checker")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeds=True):
        p.add_argument("scenario", help="scenario file or bundled name")
        if seeds:
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--seeds", help="seed range A:B (B exclusive)")
        p.add_argument("--out", help="directory for traces and reports")
        p.add_argument("--allow-t-violation", action="store_true",
                       help="run even when n <= 3t")
        p.add_argument("--expect-nonterminating", action="store_true",
                       help="a non-quiescent run is not a failure")
        p.add_argument("--mutate", action="append",
                       help="enable a protocol mutation (repeatable)")
        p.add_argument("-v", "--verbose", action="store_true")

    p_run = sub.add_parser("run", help="run a scenario and check every property")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a seed range, aggregate verdicts")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_replay = sub.add_parser("replay", help="re-run one seed, print trace hash")
    common(p_replay)
    p_replay.set_defaults(func=cmd_replay)

    p_list = sub.add_parser("list", help="list bundled scenarios")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

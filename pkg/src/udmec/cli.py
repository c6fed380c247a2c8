"""Command-line entry point: ``udmec {generate,solve,sweep,trace,oracle}``."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import scenario as scenario_io
from .config import ConfigError, load_config_file
from .harness import (
    DEFAULT_SWEEPS, SCENARIO_PROFILES, SWEEP_PARAMS, ExperimentSpec, UsageError,
    convergence_trace, oracle_compare, run_experiment, write_results, write_trace, RunResult,
)
from .solvers import ALGORITHMS, solve
from .sysmodel import evaluate, report_to_csv


def _csv_list(cast):
    def parse(text):
        try:
            return tuple(cast(t) for t in text.split(",") if t.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def build_parser():
    p = argparse.ArgumentParser(prog="udmec", description="Secure cache-assisted MEC offloading experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="TOML file with scenario keys plus [solver] and [experiment] tables")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--profile", choices=tuple(SCENARIO_PROFILES), default="desk")
        return sp

    common(sub.add_parser("generate", help="write a scenario file"))

    sp = common(sub.add_parser("solve", help="solve one scenario with one algorithm"))
    sp.add_argument("--algo", choices=ALGORITHMS, default="fihas")
    sp.add_argument("--scenario", help="scenario JSON written by 'generate' (default: generate from config)")

    sp = common(sub.add_parser("sweep", help="parameter sweep over seeds and algorithms"))
    sp.add_argument("--algo", type=_csv_list(str), help="comma-separated algorithm ids")
    sp.add_argument("--param", choices=SWEEP_PARAMS)
    sp.add_argument("--values", type=_csv_list(float))
    sp.add_argument("--seeds", type=_csv_list(int))
    sp.add_argument("--workers", type=int, default=1)

    sp = common(sub.add_parser("trace", help="FIHAS and IHAS convergence traces"))
    sp.add_argument("--seeds", type=_csv_list(int))

    sp = common(sub.add_parser("oracle", help="tiny-instance comparison against exhaustive search"))
    sp.add_argument("--algo", type=_csv_list(str))
    sp.add_argument("--seeds", type=_csv_list(int))
    return p


def _spec(args, **overrides):
    scen, solver, exp = load_config_file(args.config) if args.config else ({}, {}, {})
    fields = dict(
        scenario=scen, solver=solver, profile=args.profile, out_dir=args.out,
        seeds=tuple(exp.get("seeds", (args.seed,))),
        algorithms=tuple(exp.get("algorithms", ExperimentSpec.algorithms)),
        sweep_param=exp.get("sweep_param"),
        sweep_values=tuple(exp.get("sweep_values", ())),
    )
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentSpec(**fields).validate()


def cmd_generate(args):
    spec = _spec(args)
    sc = scenario_io.generate_scenario(spec.base_scenario().replace(seed=args.seed))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"scenario_{args.seed}.json")
    scenario_io.save(sc, path)
    print(path)


def cmd_solve(args):
    spec = _spec(args)
    if args.scenario:
        sc = scenario_io.load(args.scenario)
    else:
        sc = scenario_io.generate_scenario(spec.base_scenario().replace(seed=args.seed))
    cfg = spec.base_solver()
    sol = solve(sc, args.algo, cfg, seed=args.seed)
    rep = evaluate(sc, sol.assignment, cfg.penalties)
    os.makedirs(args.out, exist_ok=True)
    row = RunResult(
        algo=args.algo, seed=args.seed, sweep_param="", sweep_value=None,
        tec=rep.tec, td=rep.td, tsr=rep.tsr, csr=rep.csr, best_fitness=rep.fitness,
        fitness_at_t1=float(sol.trace[sol.phase_boundary - 1]) if sol.phase_boundary else rep.fitness,
        wall_time=0.0,
    )
    if len(sol.trace):
        row.trace_file = f"trace_{args.algo}_{args.seed}.csv"
        write_trace(os.path.join(args.out, row.trace_file), sol.trace, sol.phase_boundary)
    write_results(os.path.join(args.out, "results.csv"), [row])
    with open(os.path.join(args.out, f"report_{args.algo}_{args.seed}.csv"), "w", newline="") as fh:
        fh.write(report_to_csv(sc, rep, args.algo))
    print(f"{args.algo} seed={args.seed} TEC={rep.tec:.6g} J TD={rep.td:.6g} s TSR={rep.tsr:.3f} CSR={rep.csr:.3f}")


def cmd_sweep(args):
    spec = _spec(args, algorithms=args.algo, seeds=args.seeds, sweep_param=args.param, workers=args.workers)
    if spec.sweep_param and not spec.sweep_values:
        spec = dataclasses.replace(spec, sweep_values=args.values or DEFAULT_SWEEPS[spec.sweep_param])
    elif args.values:
        spec = dataclasses.replace(spec, sweep_values=args.values)
    if spec.sweep_values and not spec.sweep_param:
        raise UsageError("--values needs --param")
    results = run_experiment(spec)
    print(f"{len(results)} rows written to {os.path.join(args.out, 'results.csv')}")


def cmd_trace(args):
    results = convergence_trace(_spec(args, seeds=args.seeds))
    for r in results:
        print(f"{r.algo} seed={r.seed} G(T1)={r.fitness_at_t1:.6g} G(final)={r.best_fitness:.6g}")


def cmd_oracle(args):
    spec = _spec(args, seeds=args.seeds)
    algos = args.algo or ("fihas", "coa", "clca")
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad:
        raise UsageError(f"unknown algorithm(s) {', '.join(bad)}")
    rows = oracle_compare(spec.seeds, algos, solver=spec.base_solver(), scenario_seed=args.seed, out_dir=args.out)
    for r in rows:
        if r.algo != "exhaustive":
            print(f"{r.algo} seed={r.seed} gap={r.gap:.3e}")


COMMANDS = dict(generate=cmd_generate, solve=cmd_solve, sweep=cmd_sweep, trace=cmd_trace, oracle=cmd_oracle)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ConfigError, UsageError, ValueError, OSError, KeyError) as exc:
        print(f"udmec: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

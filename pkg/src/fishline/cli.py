"""Command-line entry point: ``fishline {solve,experiment,generate,decode}``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from .balancing import decode_balancing
from .encoding import multiple_random_keys_decode, random_keys_decode
from .estimators import SimultaneousSolver
from .experiment import (ExperimentRecord, run_experiment, write_report, write_results_csv)
from .instances import generate_mixed_model, random_alb, read_alb, read_spec, write_spec
from .pipeline import ALGORITHMS
from .sequencing import derive_process_times, evaluate_sequence


def _solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("spec", help="mixed-model spec file (see `fishline generate`)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--school-size", type=int, default=30, help="fish or particles per swarm")
    p.add_argument("--archive-n", type=int, default=10, help="balances passed to sequencing")
    p.add_argument("--L", dest="station_length", type=float, default=0.95,
                   help="station length in cycle-time units")
    p.add_argument("--max-workplaces", type=int, default=3)
    p.add_argument("--selection-metric", choices=["completed_work", "cw_wl_ratio"],
                   default="completed_work")


def _solver_params(args) -> dict:
    return dict(max_iter=args.iterations, population=args.school_size,
                archive_n=args.archive_n, station_length=args.station_length,
                selection_metric=args.selection_metric)


def _parse_keys(text):
    return np.array([float(v) for v in text.replace(",", " ").split()])


def cmd_solve(args) -> int:
    spec = read_spec(args.spec)
    instance = spec.to_instance(args.max_workplaces)
    start = time.perf_counter()
    solver = SimultaneousSolver(algorithm=args.algorithm, random_state=args.seed,
                                **_solver_params(args)).fit(instance)
    elapsed = (time.perf_counter() - start) * 1000.0
    sol = solver.solution_
    print(f"instance {spec.name}: {args.algorithm}, seed {args.seed}")
    print(f"workstations {sol.balance.num_workstations}, workplaces {sol.balance.num_workplaces}")
    print(f"completed work {sol.completed_work:.4f} of workload {sol.workload:.4f} "
          f"(ratio {sol.cw_wl_ratio:.4f})")
    print(f"IUC balancing {sol.iuc_balancing}, sequencing {sol.iuc_sequencing}")
    for c in solver.candidates_:
        print(f"  candidate {c.index}: WP {c.num_workplaces}, CW {c.completed_work:.4f}, "
              f"CW/WL {c.cw_wl_ratio:.4f}")
    if args.out:
        record = ExperimentRecord(0, args.algorithm, spec.name, args.seed, sol.completed_work,
                                  sol.workload, sol.balance.num_workplaces, sol.iuc_balancing,
                                  sol.iuc_sequencing, elapsed)
        write_results_csv([record], args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_experiment(args) -> int:
    spec = read_spec(args.spec)
    algorithms = args.algorithm or list(ALGORITHMS)
    report = run_experiment(spec, algorithms, args.repetitions, base_seed=args.seed,
                            group_size=args.group_size, max_workplaces=args.max_workplaces,
                            n_jobs=args.jobs, **_solver_params(args))
    paths = write_report(report, args.out)
    print(f"{len(report.records)} runs, {len(report.failures)} failures")
    if report.stats is None:
        print("statistics omitted: fewer than two full groups per algorithm")
    else:
        for metric in ("CW", "WP", "IUC_bal"):
            ms = report.stats[metric]
            if ms.anova is not None:
                print(f"{metric}: F={ms.anova.f_statistic:.4f} "
                      f"(df {ms.anova.df_between}, {ms.anova.df_within}; "
                      f"critical {ms.f_critical:.4f})")
    for name, path in paths.items():
        print(f"wrote {name}: {path}")
    return 0


def cmd_generate(args) -> int:
    if args.alb:
        base = read_alb(args.alb, cycle_time=args.cycle_time)
    elif args.random_tasks:
        base = random_alb(args.random_tasks, seed=args.seed, cycle_time=args.cycle_time or 1000.0)
    else:
        raise SystemExit("generate needs an .alb file or --random-tasks N")
    spec = generate_mixed_model(base, args.models, args.plan, seed=args.seed, name=args.name)
    write_spec(spec, args.out)
    print(f"wrote {args.out}: {spec.name}, {base.num_tasks} tasks, {spec.num_models} models, "
          f"plan {spec.plan_size}")
    return 0


def cmd_decode(args) -> int:
    spec = read_spec(args.spec)
    instance = spec.to_instance(args.max_workplaces)
    rng = np.random.default_rng(args.seed)
    keys = _parse_keys(args.keys) if args.keys else rng.uniform(-1000, 1000, instance.num_tasks)
    perm = random_keys_decode(keys)
    balance = decode_balancing(perm, instance)
    print("permutation:", " ".join(map(str, perm)))
    for k, (tasks, load, station) in enumerate(zip(balance.workplace_tasks,
                                                   balance.workplace_loads,
                                                   balance.workplace_stations), start=1):
        print(f"  workplace {k} (station {station}): load {load:.4f}, tasks {list(tasks)}")
    print(f"objective {-balance.fitness:.4f}")

    seq_inst = derive_process_times(balance, instance, args.station_length)
    seq_keys = (_parse_keys(args.seq_keys) if args.seq_keys
                else rng.uniform(-1000, 1000, seq_inst.num_jobs))
    sequence = multiple_random_keys_decode(seq_keys, seq_inst.production_levels)
    ev = evaluate_sequence(sequence, seq_inst)
    head = " ".join(map(str, sequence[:40])) + (" ..." if sequence.size > 40 else "")
    print("sequence:", head)
    print(f"completed work {ev.total_completed_work:.4f} of {ev.total_workload:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fishline", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one simultaneous balancing/sequencing run")
    _solver_args(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="fss-sar")
    p.add_argument("--out", help="write the run as a one-row results CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="repeated runs with ANOVA and pooled intervals")
    _solver_args(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, action="append",
                   help="repeat to select several; default all")
    p.add_argument("--repetitions", type=int, default=450)
    p.add_argument("--group-size", type=int, default=15)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", default="results", help="output directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("generate", help="mixed-model spec from a single-model .alb file")
    p.add_argument("alb", nargs="?", help=".alb file; omit with --random-tasks")
    p.add_argument("--random-tasks", type=int, help="synthesize a base instance with N tasks")
    p.add_argument("--cycle-time", type=float)
    p.add_argument("--models", type=int, default=50)
    p.add_argument("--plan", type=int, default=998)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("decode", help="print the balance and sequence decoded from keys")
    p.add_argument("spec")
    p.add_argument("--keys", help="balancing keys, comma or space separated")
    p.add_argument("--seq-keys", help="sequencing keys; random when omitted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--L", dest="station_length", type=float, default=0.95)
    p.add_argument("--max-workplaces", type=int, default=3)
    p.set_defaults(func=cmd_decode)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line frontend.

Sub-commands: generate, gadget, solve, validate, cost, reduce.
Exit codes: 0 success, 1 validation failure, 2 input error, 3 budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .baselines import lazy_greedy, serial_per_message
from .generators import (
    GeneratorSpec,
    generate_gadget_3partition,
    generate_random,
)
from .model import (
    InstanceError,
    ScheduleError,
    load_instance,
    load_schedule,
    validate_schedule,
)
from .oracles import brute_force_worms
from .pipeline import solve_pipeline
from .reduction import reduce_to_outtree

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

BRUTE_BUDGET_MESSAGES = 10

METRICS_HEADER = "instance_hash,algorithm,cost,max_completion,steps,flushes,wall_ms,opt_cost,ratio"


def _parse_law(text):
    parts = text.split(":")
    kind = parts[0]
    if kind == "constant" and len(parts) == 2:
        return ("constant", int(parts[1]))
    if kind == "uniform" and len(parts) == 3:
        return ("uniform", int(parts[1]), int(parts[2]))
    if kind == "zipf" and len(parts) == 2:
        return ("zipf", float(parts[1]))
    if kind == "total" and len(parts) == 2:
        return ("total", int(parts[1]))
    raise InstanceError(
        "bad law %r (use constant:C, uniform:A:B, zipf:S, or total:N)" % text)


def _write(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load_instance_file(path):
    with open(path) as fh:
        return load_instance(fh)


def cmd_generate(args):
    spec = GeneratorSpec(
        seed=args.seed, height=args.height, fanout=args.fanout,
        law=_parse_law(args.law), B=args.B, P=args.P)
    instance = generate_random(spec)
    _write(instance.to_json(), args.out)
    return EXIT_OK


def cmd_gadget(args):
    sizes = [int(x) for x in args.sizes.split(",")]
    gadget = generate_gadget_3partition(sizes, args.K)
    _write(gadget.instance.to_json(), args.out)
    print(json.dumps({"C1": gadget.C1, "C2": gadget.C2, "X": gadget.X,
                      "B": gadget.instance.params.B}), file=sys.stderr)
    return EXIT_OK


def _run_algorithm(instance, name):
    if name == "pipeline":
        return solve_pipeline(instance).schedule, None
    if name == "serial":
        return serial_per_message(instance), None
    if name == "lazy":
        return lazy_greedy(instance), None
    if name == "brute":
        if instance.n_messages > BRUTE_BUDGET_MESSAGES:
            raise _BudgetExceeded(
                "brute force limited to %d messages, instance has %d"
                % (BRUTE_BUDGET_MESSAGES, instance.n_messages))
        cost, schedule = brute_force_worms(instance)
        return schedule, cost
    raise InstanceError("unknown algorithm %r" % name)


class _BudgetExceeded(Exception):
    pass


def cmd_solve(args):
    instance = _load_instance_file(args.instance)
    t0 = time.perf_counter()
    schedule, opt_cost = _run_algorithm(instance, args.algorithm)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    report = validate_schedule(instance, schedule)
    if not report.is_valid:
        print("error: %s produced an invalid schedule: %s"
              % (args.algorithm, report.violations[:3]), file=sys.stderr)
        return EXIT_INVALID
    if args.trace_dir:
        _dump_trace(args.trace_dir, instance, args.algorithm, schedule)
    _write(schedule.to_json(), args.out)
    if args.metrics:
        cost = report.total_cost
        if opt_cost is None and args.algorithm != "brute" \
                and instance.n_messages <= BRUTE_BUDGET_MESSAGES and args.ratio:
            opt_cost, _ = brute_force_worms(instance)
        ratio = "" if opt_cost is None else "%.6f" % (cost / opt_cost)
        row = "%s,%s,%d,%d,%d,%d,%.3f,%s,%s" % (
            instance.content_hash(), args.algorithm, cost,
            max(report.completion_time.values()), len(schedule),
            schedule.n_flushes, wall_ms,
            "" if opt_cost is None else opt_cost, ratio)
        with open(args.metrics, "a") as fh:
            if fh.tell() == 0:
                fh.write(METRICS_HEADER + "\n")
            fh.write(row + "\n")
    return EXIT_OK


def _dump_trace(trace_dir, instance, algorithm, schedule):
    import os
    os.makedirs(trace_dir, exist_ok=True)
    with open(os.path.join(trace_dir, "schedule_%s.json" % algorithm), "w") as fh:
        fh.write(schedule.to_json())
    if algorithm == "pipeline":
        result = solve_pipeline(instance)
        with open(os.path.join(trace_dir, "overfilling.json"), "w") as fh:
            fh.write(result.overfilling.to_json())
        with open(os.path.join(trace_dir, "reduction.json"), "w") as fh:
            fh.write(result.reduction.outtree.to_json())
        with open(os.path.join(trace_dir, "upper_steps.json"), "w") as fh:
            json.dump({str(k): v for k, v in
                       result.conversion.upper_steps.items()}, fh)


def cmd_validate(args):
    instance = _load_instance_file(args.instance)
    with open(args.schedule) as fh:
        schedule = load_schedule(fh)
    report = validate_schedule(instance, schedule)
    print(json.dumps({
        "is_valid": report.is_valid,
        "is_overfilling": report.is_overfilling,
        "total_cost": report.total_cost,
        "violations": [[t, str(loc), reason]
                       for t, loc, reason in report.violations[:20]],
    }, indent=2))
    return EXIT_OK if report.is_valid else EXIT_INVALID


def cmd_cost(args):
    instance = _load_instance_file(args.instance)
    with open(args.schedule) as fh:
        schedule = load_schedule(fh)
    report = validate_schedule(instance, schedule)
    if report.total_cost is None:
        print("error: schedule does not complete all messages", file=sys.stderr)
        return EXIT_INVALID
    print(report.total_cost)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.completions_csv())
    return EXIT_OK


def cmd_reduce(args):
    instance = _load_instance_file(args.instance)
    reduction = reduce_to_outtree(instance, prune=args.prune)
    _write(reduction.outtree.to_json(), args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="flushsched")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="random instance from a seed")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--height", type=int, required=True)
    g.add_argument("--fanout", type=int, required=True)
    g.add_argument("--law", default="constant:1",
                   help="constant:C | uniform:A:B | zipf:S | total:N")
    g.add_argument("--B", type=int, required=True)
    g.add_argument("--P", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    g = sub.add_parser("gadget", help="3-partition hardness instance")
    g.add_argument("--sizes", required=True, help="comma-separated integers")
    g.add_argument("--K", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gadget)

    g = sub.add_parser("solve", help="run a scheduler on an instance")
    g.add_argument("--instance", required=True)
    g.add_argument("--algorithm", default="pipeline",
                   choices=["pipeline", "serial", "lazy", "brute"])
    g.add_argument("--out")
    g.add_argument("--metrics", help="append a metrics CSV row here")
    g.add_argument("--ratio", action="store_true",
                   help="also compute the optimality ratio when in budget")
    g.add_argument("--trace-dir", dest="trace_dir")
    g.set_defaults(func=cmd_solve)

    g = sub.add_parser("validate", help="classify a schedule")
    g.add_argument("--instance", required=True)
    g.add_argument("--schedule", required=True)
    g.set_defaults(func=cmd_validate)

    g = sub.add_parser("cost", help="total completion time of a schedule")
    g.add_argument("--instance", required=True)
    g.add_argument("--schedule", required=True)
    g.add_argument("--report", help="write per-message completion CSV here")
    g.set_defaults(func=cmd_cost)

    g = sub.add_parser("reduce", help="emit the outtree task instance")
    g.add_argument("--instance", required=True)
    g.add_argument("--prune", action="store_true",
                   help="drop weightless copy-task branches")
    g.add_argument("--out")
    g.set_defaults(func=cmd_reduce)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _BudgetExceeded as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_BUDGET
    except (InstanceError, ScheduleError, OSError, json.JSONDecodeError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

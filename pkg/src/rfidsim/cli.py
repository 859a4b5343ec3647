"""Command-line entry point: ``rfidsim`` (or ``python -m rfidsim``).

Exit codes: 0 success, 1 invariant violation, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .baselines import (
    FsaConfig,
    StarvationError,
    run_binary_splitting,
    run_framed_slotted_aloha,
    run_query_tree,
)
from .channel import decode_if_singleton, superpose
from .core import (
    CapacityError,
    DuplicateTagError,
    PopulationSpec,
    TagLengthError,
    TagParseError,
    encode_signal,
    generate_population,
    load_population,
    make_tag_id,
    Population,
    save_population,
)
from .harness import (
    ExperimentSpec,
    UndefinedMetricError,
    export_report,
    report_to_csv,
    report_to_json,
    run_experiment,
    system_efficiency,
)
from .protocol_p import (
    ProtocolAssumptionError,
    TraceStructureError,
    run_protocol_p,
    serialize_trace,
    verify_trace,
)

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (
    OSError,
    ValueError,
    TagParseError,
    TagLengthError,
    DuplicateTagError,
    CapacityError,
    json.JSONDecodeError,
)

FALSE_POSITIVE_IDS = ("011001", "001010", "100100")


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_identify(args) -> int:
    population = load_population(args.population, args.k)
    proto = args.protocol
    if proto == "p":
        result = run_protocol_p(population, not args.no_prefix, keep_trace=bool(args.trace))
        if args.trace:
            with open(args.trace, "w", encoding="utf-8") as fh:
                fh.write(serialize_trace(result.trace))
    elif proto == "qt":
        result = run_query_tree(population)
    elif proto == "fsa":
        cfg = FsaConfig(frame_size=args.frame_size, mode=args.fsa_mode, seed=args.seed,
                        max_cycles=args.max_cycles)
        result = run_framed_slotted_aloha(population, cfg)
    else:
        result = run_binary_splitting(population, args.seed)

    print(f"protocol: {result.protocol}")
    print(f"tags: {len(population)}")
    print(f"queries: {result.query_count}")
    try:
        print(f"efficiency: {system_efficiency(result):.6f}")
    except UndefinedMetricError:
        print("efficiency: undefined")
    print(f"reader_bits: {result.bits.reader_bits}")
    print(f"tag_bits: {result.bits.tag_bits}")
    for tag in result.identified:
        print(tag)
    return EXIT_OK


def cmd_verify(args) -> int:
    population = load_population(args.population, args.k)
    n = len(population)
    result = run_protocol_p(population, prefix_enabled=True, keep_trace=True)
    stats = verify_trace(result.trace, n)
    print(f"tags: {n}")
    print(f"queries: {result.query_count}")
    print(f"nodes: {stats.nodes} leaves: {stats.leaves} internal: {stats.internal} "
          f"queried_left: {stats.queried_left_count} max_depth: {stats.max_depth}")
    problems = []
    if set(result.identified) != population.as_set():
        problems.append("identified set differs from the population")
    if len(set(result.identified)) != len(result.identified):
        problems.append("an ID was identified twice")
    if n and result.query_count != n:
        problems.append(f"{result.query_count} queries for {n} tags")
    for p in problems:
        print(f"FAIL: {p}", file=sys.stderr)
    if problems:
        return EXIT_INVARIANT
    print("OK")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = ExperimentSpec.from_dict(json.load(fh))
    else:
        spec = ExperimentSpec.from_dict({
            "protocols": args.protocols,
            "n": args.n,
            "k": args.k,
            "dist": args.dist,
            "shared_prefix": args.shared_prefix,
            "reps": args.reps,
            "seed": args.seed,
            "prefix": not args.no_prefix,
            "format": args.format,
            "out": args.out,
            "jobs": args.jobs,
            "fsa": {"frame_size": args.frame_size, "mode": args.fsa_mode,
                    "max_cycles": args.max_cycles},
        })
    report = run_experiment(spec)
    if spec.output_path:
        export_report(report, spec.output, spec.output_path)
        print(f"wrote {len(report.rows)} rows to {spec.output_path}", file=sys.stderr)
    else:
        sys.stdout.write(report_to_csv(report) if spec.output == "csv" else report_to_json(report))
    for proto, agg in report.aggregates.items():
        mean = agg["mean_efficiency"]
        mean_s = "undefined" if mean is None else f"{mean:.6f}"
        print(f"{proto}: runs={agg['runs']} errors={agg['errors']} "
              f"mean_efficiency={mean_s}", file=sys.stderr)
    return EXIT_OK


def cmd_demo_false_positive(args) -> int:
    tags = [make_tag_id(s) for s in FALSE_POSITIVE_IDS]
    answer = superpose([encode_signal(t, prefix_enabled=False) for t in tags])
    phantom = decode_if_singleton(answer, prefix_enabled=False)
    print(f"tags: {' '.join(FALSE_POSITIVE_IDS)}")
    print(f"superposed answer (no prefix): {answer.render()}")
    print(f"decoded as a single tag: {phantom}")
    print(f"phantom in population: {phantom in tags}")
    result = run_protocol_p(Population(tuple(tags)), prefix_enabled=True)
    print(f"with prefix: {result.query_count} queries, identified "
          f"{' '.join(str(t) for t in result.identified)}")
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = PopulationSpec(args.n, args.k, args.dist, args.seed, args.shared_prefix)
    save_population(generate_population(spec), args.out)
    return EXIT_OK


def _add_fsa_flags(p):
    p.add_argument("--frame-size", type=int, default=128)
    p.add_argument("--fsa-mode", choices=["fixed", "dynamic"], default="fixed")
    p.add_argument("--max-cycles", type=int, default=10_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfidsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identify", help="identify one population with one protocol")
    p.add_argument("--population", required=True)
    p.add_argument("--protocol", choices=["p", "qt", "fsa", "bs"], default="p")
    p.add_argument("--no-prefix", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace")
    p.add_argument("--k", type=int, help="expected ID length (default: first line's)")
    _add_fsa_flags(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("experiment", help="seeded repeated runs to CSV/JSON")
    p.add_argument("--spec", help="JSON spec file; overrides the other flags")
    p.add_argument("--protocols", default="p")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--k", type=int, default=96)
    p.add_argument("--dist", choices=["uniform", "sequential", "clustered"], default="uniform")
    p.add_argument("--shared-prefix", type=int, default=8)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-prefix", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", type=int, default=1)
    _add_fsa_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="check the tree-shape and query-count invariants")
    p.add_argument("--population", required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-false-positive", help="show the prefix-off phantom ID")
    p.set_defaults(func=cmd_demo_false_positive)

    p = sub.add_parser("generate", help="write a population file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=96)
    p.add_argument("--dist", choices=["uniform", "sequential", "clustered"], default="uniform")
    p.add_argument("--shared-prefix", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProtocolAssumptionError, TraceStructureError, StarvationError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_INVARIANT)
    except INPUT_ERRORS as exc:
        return _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: solve, verify, recognize, generate and bench."""
import argparse
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

from .config import Config
from .core import (
    Instance,
    budget_of_ordering,
    is_valid_ordering,
    parse_instance,
    parse_ordering,
    serialize_instance,
    serialize_ordering,
)
from .exceptions import (
    ClassMismatchError,
    ContractViolation,
    ParseError,
    SizeLimitError,
    WorkBudgetExceeded,
)
from .generators import FAMILIES, GenSpec, generate, instance_from_arcs, parse_arcs
from .recognition import GraphClassReport, classify
from .report import format_report, print_report_debug
from .solvers import Solver

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_CLASS = 3
EXIT_REFUSED = 4

ALGORITHMS = ("auto", "oracle", "exact", "tp", "cobip", "perm", "general", "simple")
BENCH_HEADER = ["instance", "n", "class", "algorithm", "budget", "milliseconds", "states", "status"]
CLASS_FLAGS = ("biclique", "biclique_union", "path_cycle", "forest", "chain", "trivially_perfect", "co_bipartite", "permutation")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e


def load_instance(path: str) -> Instance:
    return parse_instance(_read(path))


def class_name(report: GraphClassReport) -> str:
    """Most specific class flag set on the report, or ``general``."""
    for flag in CLASS_FLAGS:
        if getattr(report, flag):
            return flag
    return "general"


def cmd_solve(args: argparse.Namespace, config: Config) -> int:
    inst = load_instance(args.instance)
    print(f"🚀 Solving {args.instance} ({len(inst)} vertices) with '{args.algorithm}'")
    solver = Solver(config)
    try:
        report = solver.solve(inst, args.algorithm, cross_check=config.debug_report)
    except ClassMismatchError as e:
        print(f"❌ Class mismatch: {e}")
        return EXIT_CLASS
    except (SizeLimitError, WorkBudgetExceeded) as e:
        print(f"⚠️ Solver refused: {e}")
        return EXIT_REFUSED

    print(format_report(report))
    if config.debug_report:
        print_report_debug(report, inst)
    if args.emit_ordering:
        Path(args.emit_ordering).write_text(serialize_ordering(report.witness))
        print(f"📋 Ordering written to {args.emit_ordering}")

    if args.budget is not None:
        if report.budget <= args.budget:
            print(f"✅ Feasible within {args.budget}")
            return EXIT_OK
        print(f"❌ Infeasible within {args.budget}")
        return EXIT_FAILED
    print("✅ Done.")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    inst = load_instance(args.instance)
    ordering = parse_ordering(_read(args.ordering))
    try:
        valid = is_valid_ordering(inst, ordering)
    except ContractViolation as e:
        print(f"❌ Not an ordering of the instance: {e}")
        return EXIT_FAILED
    if not valid:
        print("❌ Ordering breaks a precedence edge")
        return EXIT_FAILED
    budget = budget_of_ordering(inst, ordering)
    print(f"budget: {budget}")
    if args.budget is not None and budget > args.budget:
        print(f"❌ Ordering needs {budget}, above {args.budget}")
        return EXIT_FAILED
    print("✅ Ordering is valid")
    return EXIT_OK


def cmd_recognize(args: argparse.Namespace, config: Config) -> int:
    inst = load_instance(args.instance)
    report = classify(inst, config)
    for line in report.to_lines():
        print(line)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace, config: Config) -> int:
    if args.family == "arcs":
        if not args.arcs:
            print("❌ Family 'arcs' needs --arcs <file>")
            return EXIT_INPUT
        inst = instance_from_arcs(parse_arcs(_read(args.arcs)))
    else:
        spec = GenSpec(args.family, size=args.size, max_weight=args.max_weight, seed=args.seed, p=args.p)
        try:
            inst = generate(spec)
        except ValueError as e:
            print(f"❌ {e}")
            return EXIT_INPUT

    text = serialize_instance(inst)
    if args.output:
        Path(args.output).write_text(text)
        print(f"✅ Wrote {len(inst)} vertices to {args.output}")
    else:
        print(text, end="")
    return EXIT_OK


def _bench_rows(path: Path, algorithms: Sequence[str], config: Config) -> List[List[str]]:
    """One row per algorithm; a file that does not load still gets a row per algorithm."""
    try:
        inst = load_instance(str(path))
        kind = class_name(classify(inst, config))
    except (ParseError, ContractViolation) as e:
        logger.warning("skipping %s: %s", path.name, e)
        return [[path.name, "", "", algorithm, "", "", "", f"error: {type(e).__name__}"] for algorithm in algorithms]

    solver = Solver(config)
    rows = []
    for algorithm in algorithms:
        try:
            report = solver.solve(inst, algorithm)
            cells = [report.budget, f"{report.elapsed * 1000:.3f}", report.states, "ok"]
        except ClassMismatchError:
            cells = ["", "", "", "class-mismatch"]
        except (SizeLimitError, WorkBudgetExceeded) as e:
            cells = ["", "", "", f"refused: {type(e).__name__}"]
        except (ParseError, ContractViolation) as e:
            logger.warning("%s failed on %s: %s", algorithm, path.name, e)
            cells = ["", "", "", f"error: {type(e).__name__}"]
        rows.append([path.name, len(inst), kind, algorithm] + cells)
    return rows


def cmd_bench(args: argparse.Namespace, config: Config) -> int:
    suite = Path(args.suite)
    if not suite.is_dir():
        print(f"❌ Suite directory not found: {suite}")
        return EXIT_INPUT
    files = sorted(suite.glob("*.bgp"))
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        print(f"❌ Unknown algorithm: '{unknown[0]}'. Valid algorithms: {', '.join(ALGORITHMS)}")
        return EXIT_INPUT
    print(f"🚀 Benchmarking {len(files)} instances with {', '.join(algorithms)}")

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(lambda f: _bench_rows(f, algorithms, config), files))
    rows = sorted((row for rows in results for row in rows), key=lambda r: (r[0], r[3]))

    output = Path(args.output)
    fresh = not output.exists() or output.stat().st_size == 0
    with output.open("a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(BENCH_HEADER)
        writer.writerows(rows)
    print(f"✅ Appended {len(rows)} rows to {output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgp", description="Budget problems on bipartite precedence graphs")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log solver decisions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Compute the optimal budget")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p.add_argument("--budget", type=int, help="Decision mode: exit 0 if feasible within K, 1 otherwise")
    p.add_argument("--emit-ordering", metavar="PATH", help="Write the witness ordering here")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", help="Check an ordering against an instance")
    p.add_argument("instance")
    p.add_argument("ordering")
    p.add_argument("--budget", type=int)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("recognize", help="Report graph-class membership")
    p.add_argument("instance")
    p.set_defaults(handler=cmd_recognize)

    p = sub.add_parser("generate", help=f"Generate an instance ({', '.join(FAMILIES)}, arcs)")
    p.add_argument("family")
    p.add_argument("--size", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-weight", type=int, default=1)
    p.add_argument("--p", type=int, default=2, help="Order of the projective plane")
    p.add_argument("--arcs", metavar="PATH", help="Arc diagram file for the 'arcs' family")
    p.add_argument("--output", "-o", metavar="PATH")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("bench", help="Run a suite directory and append CSV rows")
    p.add_argument("suite")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--algorithms", default="auto,exact")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses arguments and runs one command.

    Returns:
        Exit code: 0 ok, 1 infeasible or invalid, 2 input error, 3 class mismatch, 4 solver refused
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = Config.from_env()
    except ValueError as e:
        print(f"❌ Configuration error: {e}")
        return EXIT_INPUT
    logger.debug("running %s with %s", args.command, config)

    try:
        return args.handler(args, config)
    except ParseError as e:
        print(f"❌ Parse error: {e}")
        return EXIT_INPUT
    except ContractViolation as e:
        print(f"❌ Invalid input: {e}")
        return EXIT_INPUT

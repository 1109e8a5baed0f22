"""Command-line entry point.

Exit codes: 0 success, 1 infeasible input or violated check, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from pathlib import Path

from .algorithms import algorithm_a, algorithm_b, algorithm_c, hybrid
from .bounds import (
    ALPHA_LIST,
    ALPHA_LIST_REGULAR,
    BoundProgram,
    analytic_bound,
    bounded_weight_lp,
    two_algo_bound,
)
from .graph import SpanningTree
from .model import (
    InfeasibleInstance,
    InstanceFormatError,
    InstanceKind,
    InvalidParameters,
    augment_parallel_unsafe,
    format_rational,
    format_solution,
    generate_instance,
    parse_rational,
    parse_solution,
    read_instance,
    violated_cut,
    write_instance,
)
from .simplex import Infeasible
from .subroutines import Methods, NotTwoEdgeConnected, TooLarge, TwoEcssMethod, WtapMethod, exact_fgc, export_ilp
from .thresholds import NoBijection, alpha_mst, compute_thresholds, exchange_bijection, verify_alpha_monotone

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text) if "." not in text else Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _float(x) -> str:
    return f"{float(x):.6g}"


def _methods(args) -> Methods:
    return Methods(TwoEcssMethod(args.two_ecss), WtapMethod(args.wtap))


def _solution_ids(instance, twins, ids):
    return sorted({twins.get(i, i) for i in ids})


def cmd_solve(args, out):
    instance = read_instance(args.input)
    aug, twins = augment_parallel_unsafe(instance)
    methods = _methods(args)
    if args.algo == "hybrid":
        report = hybrid(aug, None if args.alpha is None else [args.alpha], methods)
        sol = report.solution
        print(f"# chosen {report.chosen.label}", file=out)
    elif args.algo == "a":
        sol = algorithm_a(aug, methods)
    elif args.algo == "b":
        sol = algorithm_b(aug, 1 if args.alpha is None else args.alpha, methods)
    else:
        sol = algorithm_c(aug, 0 if args.alpha is None else args.alpha, methods)
    ids = _solution_ids(instance, twins, sol.edge_ids)
    print(f"edges {format_solution(ids)}", file=out)
    print(f"weight {format_rational(instance.graph.weight(ids))}", file=out)
    return EXIT_OK


def cmd_exact(args, out):
    instance = read_instance(args.input)
    sol, weight = exact_fgc(instance, budget=args.budget)
    print(format_rational(weight), file=out)
    if args.edges:
        print(f"edges {format_solution(sol.edge_ids)}", file=out)
    return EXIT_OK


def cmd_check(args, out):
    instance = read_instance(args.input)
    ids = parse_solution(Path(args.solution).read_text())
    unknown = [i for i in ids if i not in instance.graph]
    if unknown:
        raise UsageError(f"solution names unknown edges {unknown}")
    bad = violated_cut(instance.graph, ids, instance.k)
    if bad is None:
        print(f"feasible weight {format_rational(instance.graph.weight(ids))}", file=out)
        return EXIT_OK
    print("infeasible", file=out)
    print(bad.describe(instance.graph), file=out)
    return EXIT_INFEASIBLE


def cmd_thresholds(args, out):
    instance = read_instance(args.input)
    ths = compute_thresholds(instance)
    out.write(ths.to_text())
    print("# pruned " + " ".join(format_rational(v) for v in ths.pruned), file=out)
    return EXIT_OK


def cmd_bijection(args, out):
    instance = read_instance(args.input)
    g = instance.graph
    try:
        target = SpanningTree(g, frozenset(int(x) for x in args.target.replace(",", " ").split()))
    except ValueError as exc:
        print(f"target is not a spanning tree: {exc}", file=out)
        return EXIT_INFEASIBLE
    source = alpha_mst(instance, args.alpha)
    try:
        bij = exchange_bijection(source, target)
    except NoBijection as exc:
        print(str(exc), file=out)
        return EXIT_INFEASIBLE
    problems = bij.problems()
    monotone = verify_alpha_monotone(bij, args.alpha)
    for e in sorted(bij.mapping):
        print(f"{e} -> {bij.mapping[e]}", file=out)
    print(f"# valid {'yes' if not problems else 'no'} monotone {'yes' if monotone else 'no'}", file=out)
    return EXIT_OK if not problems else EXIT_INFEASIBLE


def _read_alphas(path: str):
    if path in ("printed", "regular"):
        return ALPHA_LIST if path == "printed" else ALPHA_LIST_REGULAR
    lines = (line.split("#", 1)[0] for line in Path(path).read_text().splitlines())
    try:
        return tuple(_rational(tok) for line in lines for tok in line.replace(",", " ").split())
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_bounds(args, out):
    rows = []
    if args.analytic:
        rows.append(("analytic", args.lam, None, analytic_bound(args.lam)))
    if args.two_algo:
        rows.append(("two-algo", args.lam, args.tau, two_algo_bound(args.lam, args.tau)))
    cert = None
    if args.bounded_lp:
        program = BoundProgram(_read_alphas(args.alphas), args.lam, args.tau)
        cert = bounded_weight_lp(program, exact=args.exact)
        rows.append(("bounded-lp", args.lam, args.tau, cert.value))
    if not rows:
        raise UsageError("choose at least one of --analytic, --two-algo, --bounded-lp")
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["bound", "lambda", "tau", "value"])
        for name, lam, tau, value in rows:
            w.writerow([name, format_rational(lam), "" if tau is None else format_rational(tau), _float(value)])
    else:
        for name, _, _, value in rows:
            print(f"{name} {_float(value)}", file=out)
    if cert is not None and args.certificate:
        Path(args.certificate).write_text(cert.to_text())
    return EXIT_OK


def cmd_generate(args, out):
    instance = generate_instance(args.kind, args.n, args.m, args.weight_bound,
                                 args.safe_fraction, args.seed, args.k)
    if args.output:
        write_instance(instance, args.output)
    else:
        out.write(instance.to_text())
    return EXIT_OK


def cmd_lp_export(args, out):
    export_ilp(read_instance(args.input), args.output)
    return EXIT_OK


REPORT_COLUMNS = ["instance", "opt", "A", "bestB", "bestC", "hybrid", "ratio"]


def cmd_report(args, out):
    files = sorted(Path(args.input).glob("*.fgc"))
    if not files:
        raise UsageError(f"no .fgc files in {args.input}")
    methods = _methods(args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for path in files:
        instance = read_instance(path)
        _, opt = exact_fgc(instance, budget=args.budget)
        aug, _ = augment_parallel_unsafe(instance)
        rep = hybrid(aug, methods=methods)
        ratio = _float(rep.weight / opt) if opt else ""
        w.writerow([path.name, format_rational(opt), format_rational(rep.get("A").weight),
                    format_rational(rep.best("B").weight), format_rational(rep.best("C").weight),
                    format_rational(rep.weight), ratio])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fgc", description="Flexible graph connectivity toolkit")
    sub = p.add_subparsers(dest="verb", required=True)

    def with_methods(sp):
        sp.add_argument("--two-ecss", choices=[m.value for m in TwoEcssMethod], default="arb2x")
        sp.add_argument("--wtap", choices=[m.value for m in WtapMethod], default="pd2x")

    sp = sub.add_parser("solve", help="run an approximation algorithm")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--algo", choices=["a", "b", "c", "hybrid"], default="hybrid")
    sp.add_argument("--alpha", type=_rational)
    with_methods(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("exact", help="optimum by exhaustive search")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--budget", type=int, default=20, help="largest edge count searched")
    sp.add_argument("--edges", action="store_true", help="also print an optimal edge set")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("check", help="feasibility of a solution file")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-s", "--solution", required=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("thresholds", help="edge threshold values")
    sp.add_argument("-i", "--input", required=True)
    sp.set_defaults(func=cmd_thresholds)

    sp = sub.add_parser("bijection", help="exchange bijection from the alpha-MST to a target tree")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--alpha", type=_rational, required=True)
    sp.add_argument("--target", required=True, help="edge ids of the target spanning tree")
    sp.set_defaults(func=cmd_bijection)

    sp = sub.add_parser("bounds", help="evaluate ratio bounds")
    sp.add_argument("--analytic", action="store_true")
    sp.add_argument("--two-algo", action="store_true")
    sp.add_argument("--bounded-lp", action="store_true")
    sp.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(2))
    sp.add_argument("--tau", type=_rational, default=Fraction(3, 2))
    sp.add_argument("--alphas", default="regular",
                    help="file of scaling factors, or 'printed' / 'regular' for the built-in lists")
    sp.add_argument("--exact", action="store_true", help="solve the LP in rational arithmetic")
    sp.add_argument("--certificate", help="write LP variable values here")
    sp.add_argument("--format", choices=["text", "csv"], default="text")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("generate", help="write a random instance")
    sp.add_argument("--kind", choices=[k.value for k in InstanceKind], default="random")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--weight-bound", type=int, default=1)
    sp.add_argument("--safe-fraction", type=_rational, default=Fraction(1, 2))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("lp-export", help="write the cut ILP in LP format")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_lp_export)

    sp = sub.add_parser("report", help="CSV of algorithm weights against the optimum")
    sp.add_argument("-i", "--input", required=True, help="directory of .fgc files")
    sp.add_argument("--budget", type=int, default=20)
    with_methods(sp)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, InstanceFormatError, InvalidParameters, TooLarge, OSError) as exc:
        print(f"fgc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleInstance, Infeasible, NotTwoEdgeConnected) as exc:
        print(f"fgc: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())

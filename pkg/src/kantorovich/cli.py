"""Command-line interface: one subcommand per operation, file in, JSON/CSV out.

Exit codes: 0 success, 2 invalid input, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import io as kio
from .assignment import solve_assignment
from .dbar import dbar_criterion, secondary_entropy_curve
from .errors import InputError, ResourceError
from .krnorm import kr_norm, lipschitz_dual
from .line import k1_line
from .matrixdist import line_triple, run_convergence
from .tower import spread, tower_levels
from .transport import TAU_GAP, solve_kp, solve_mk, verify_optimal

DEFAULT_SEED = 42


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_solve(args):
    cost, mu, nu = kio.load_instance(args.instance)
    sol = solve_mk(cost, mu, nu)
    if args.plan_csv:
        _emit(kio.plan_csv(sol), args.plan_csv)
    if args.format == "csv":
        return kio.plan_csv(sol)
    return kio.dumps(kio.solution_to_dict(sol))


def cmd_kp(args):
    cost, mu, nu = kio.load_instance(args.instance)
    return kio.dumps({"kp": solve_kp(cost, mu, nu, args.p), "p": args.p})


def cmd_line(args):
    return kio.dumps({"k1": k1_line(kio.read_line_csv(args.mu), kio.read_line_csv(args.nu))})


def cmd_krnorm(args):
    m = kio.load_signed(args.measure)
    cost = kio.read_cost(kio._read_json(args.instance), args.instance)
    norm = kr_norm(m, cost)
    dual, witness = lipschitz_dual(m, cost)
    return kio.dumps({"norm": norm, "dual": dual, "witness": witness.values.tolist()})


def cmd_assign(args):
    a = solve_assignment(kio.load_cost_matrix(args.cost))
    return kio.dumps({"value": a.value, "permutation": a.permutation.tolist()})


def cmd_matdist(args):
    triple = line_triple(args.mu, scale=args.scale)
    report = run_convergence(triple, args.map, args.n, args.trials, args.seed)
    if args.format == "csv":
        return report.to_csv()
    return kio.dumps(report.to_dict())


def cmd_dbar(args):
    chain = kio.load_chain(args.chain)
    if args.eps is not None:
        values = secondary_entropy_curve(chain, args.n, args.eps)
        key = "entropy"
    else:
        values = [dbar_criterion(chain, n) for n in args.n]
        key = "dbar"
    if args.format == "json":
        return kio.dumps({"n": args.n, key: values})
    return kio.series_csv(("n", "value"), args.n, values)


def cmd_tower(args):
    tree = kio.load_tree(args.tree)
    spaces = tower_levels(tree, args.levels)
    levels = [s.level for s in spaces]
    values = [spread(s) for s in spaces]
    if args.format == "json":
        return kio.dumps({"level": levels, "value": values})
    return kio.series_csv(("level", "value"), levels, values)


def cmd_verify(args):
    cost, mu, nu = kio.load_instance(args.instance)
    sol = kio.load_solution(args.solution, mu, nu)
    report = verify_optimal(sol, cost, tol=args.tol)
    return kio.dumps({"optimal": report.optimal, "violations": [list(v) for v in report.violations]})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--tol", type=float, default=TAU_GAP, help="certificate tolerance")

    parser = argparse.ArgumentParser(prog="kantorovich", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="exact transport plan, value and potential")
    p.add_argument("--instance", required=True)
    p.add_argument("--plan-csv", help="also write the plan's support as CSV")
    p.set_defaults(func=cmd_solve, default_format="json")

    p = sub.add_parser("kp", parents=[common], help="p-Kantorovich value")
    p.add_argument("--instance", required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_kp, default_format="json")

    p = sub.add_parser("line", parents=[common], help="1D distance from position,weight CSVs")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.set_defaults(func=cmd_line, default_format="json")

    p = sub.add_parser("krnorm", parents=[common], help="KR norm and its Lipschitz dual")
    p.add_argument("--measure", required=True)
    p.add_argument("--instance", required=True, help="JSON holding the metric cost")
    p.set_defaults(func=cmd_krnorm, default_format="json")

    p = sub.add_parser("assign", parents=[common], help="exact assignment of a square cost matrix")
    p.add_argument("--cost", required=True)
    p.set_defaults(func=cmd_assign, default_format="json")

    p = sub.add_parser("matdist", parents=[common], help="Monte Carlo k_n convergence experiment")
    p.add_argument("--mu", default="uniform01", help="uniform01, square, twopoint(p) or point(c)")
    p.add_argument("--map", default="identity", help="target law of the monotone map, or identity")
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--scale", type=float, default=1.0, help="interval length of the triple")
    p.set_defaults(func=cmd_matdist, default_format="json")

    p = sub.add_parser("dbar", parents=[common], help="d-bar curve or secondary entropy of a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated horizons")
    p.add_argument("--eps", type=float, help="report secondary entropy at this eps instead")
    p.set_defaults(func=cmd_dbar, default_format="csv")

    p = sub.add_parser("tower", parents=[common], help="spread statistic along a partition tower")
    p.add_argument("--tree", required=True)
    p.add_argument("--levels", type=int, help="last level to compute (default: all)")
    p.set_defaults(func=cmd_tower, default_format="csv")

    p = sub.add_parser("verify", parents=[common], help="check a solution's optimality certificate")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors exit 2, --help exits 0
        return int(exc.code or 0)
    if args.format is None:
        args.format = args.default_format
    try:
        text = args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

    bestchoice solve --statistic lrmax --n 4 --theta 1/1
    bestchoice wtable --model ewens --n 6
    bestchoice roots --n 11
    bestchoice kappa --model mallows --n 20 --theta 1/4
    bestchoice asympt --model mallows --theta 1.55 --k 1
    bestchoice simulate --model ewens --n 7 --theta 2 --k 3 --trials 100000
    bestchoice check-equivariance --statistic 321 --n 8
    bestchoice verify oracle --n-max 7

Exit status: 0 on success, 2 on usage errors, 1 when a verification fails.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction
from importlib import resources

from . import asymptotics, positional, sampler, tree_solver
from .exactnum import parse_rational
from .permutation import INVERSIONS, LRMAX, STATISTICS, check_prefix_equivariance

SOLVE_BUDGET = 9
ORACLE_BUDGET = 7


class CheckFailed(Exception):
    pass


def _exact_theta(text: str) -> Fraction:
    try:
        theta = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{exc}; exact commands take theta as p/q, e.g. 6/5") from None
    if theta <= 0:
        raise argparse.ArgumentTypeError("theta must be positive")
    return theta


def _real_theta(text: str) -> float:
    try:
        if "/" in text:
            value = float(Fraction(text))
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse theta {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("theta must be positive")
    return value


def _statistic(name: str):
    try:
        return STATISTICS[name.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown statistic {name!r}; choose from {sorted(STATISTICS)}") from None


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _budget(args, limit: int, n: int, parser: argparse.ArgumentParser):
    if n > limit and not args.unsafe_n:
        parser.error(f"--n {n} exceeds the default budget {limit}; pass --unsafe-n to override")


# --- subcommands ---------------------------------------------------------------------------


def cmd_solve(args, out, parser):
    _budget(args, SOLVE_BUDGET, args.n, parser)
    spec = tree_solver.GameSpec(args.n, args.statistic, args.theta)
    result = tree_solver.solve(spec, budget=max(args.n, SOLVE_BUDGET))
    out.write(json.dumps(result.to_json_dict()) + "\n")


def cmd_wtable(args, out, parser):
    model = positional.Model.parse(args.model)
    sizes = [args.n] if args.only else range(1, args.n + 1)
    for n in sizes:
        if args.method == "enumerate":
            table = positional.enumerate_w_table(model, n)
        elif args.method == "closed":
            f = positional.ewens_w_closed if model is positional.Model.EWENS else positional.mallows_w_closed
            table = positional.WTable(model, n, tuple(f(n, k) for k in range(n + 1)))
        else:
            f = positional.ewens_w_recurrence if model is positional.Model.EWENS else positional.mallows_w_recurrence
            table = f(n)
        for row in table.csv_rows():
            out.write(row + "\n")


def cmd_roots(args, out, parser):
    for row in positional.roots_csv_rows(args.n):
        out.write(row + "\n")


def cmd_kappa(args, out, parser):
    if args.model == "ewens":
        profile = positional.ewens_profile(args.n, args.theta)
        kappa_rule = positional.ewens_kappa(args.n, args.theta)
    else:
        profile = positional.mallows_profile(args.n, args.theta)
        kappa_rule = None
    payload = {
        "model": args.model,
        "N": args.n,
        "theta": _frac(args.theta),
        "kappa": profile.kappa,
        "optimal": _frac(profile.optimal),
        "optimal_float": profile.win_float(profile.kappa),
    }
    if kappa_rule is not None:
        payload["kappa_from_roots"] = kappa_rule
    if args.profile:
        payload["win_by_k"] = {str(k): profile.win_float(k) for k in range(args.n)}
    out.write(json.dumps(payload) + "\n")


def cmd_asympt(args, out, parser):
    if args.figure:
        grid = asymptotics.theta_grid(args.theta_min, args.theta_max, args.steps)
        asymptotics.emit_figure_data(args.figure, grid, out, k=args.k or 1)
        return
    if args.global_max:
        theta, k, p = asymptotics.mallows_global_max(args.tol)
        out.write(json.dumps({"theta": theta, "k": k, "probability": p}) + "\n")
        return
    if args.theta is None:
        parser.error("asympt needs --theta, --figure or --global-max")
    t = args.theta
    if args.model == "ewens":
        rep = asymptotics.ewens_limit(t)
        payload = {"model": "ewens", "theta": t, "fraction_rejected": rep.optimal_parameter,
                   "probability": rep.limit_probability}
    elif t < 1:
        rep = asymptotics.mallows_sub_limit(t)
        payload = {"model": "mallows", "theta": t, "j": rep.optimal_parameter, "probability": rep.limit_probability}
    elif t == 1:
        parser.error("theta = 1 is the classical game; use --model ewens")
    elif args.k:
        value, bound = asymptotics.mallows_super_series(t, args.k, args.tol, with_bound=True)
        payload = {"model": "mallows", "theta": t, "k": args.k, "probability": value, "bound": bound}
    else:
        k, value, bound = asymptotics.mallows_super_optimal_k(t, args.tol)
        payload = {"model": "mallows", "theta": t, "k": k, "probability": value, "search_bound": bound,
                   "k0_probability": asymptotics.mallows_super_k0_limit(t)}
    out.write(json.dumps(payload) + "\n")


def cmd_simulate(args, out, parser):
    if args.k is not None:
        strategy = args.k
    else:
        if args.model == "uniform":
            stat, theta = LRMAX, Fraction(1)
        else:
            stat = LRMAX if args.model == "ewens" else INVERSIONS
            theta = Fraction(args.theta).limit_denominator(10**6)
        _budget(args, SOLVE_BUDGET, args.n, parser)
        strategy = tree_solver.solve(tree_solver.GameSpec(args.n, stat, theta), budget=max(args.n, SOLVE_BUDGET)).strike_set
    cfg = sampler.SimConfig(args.model, args.n, args.theta, strategy, args.trials, args.seed, args.workers)
    if args.dump_perms:
        with open(args.dump_perms, "w") as fh:
            res = sampler.run_simulation(cfg, dump=fh)
    else:
        res = sampler.run_simulation(cfg)
    out.write(res.to_json() + "\n")


def cmd_check_equivariance(args, out, parser):
    res = check_prefix_equivariance(args.statistic, args.n)
    if res is True:
        payload = {"statistic": args.statistic.label, "N": args.n, "equivariant": True}
    else:
        payload = {
            "statistic": args.statistic.label,
            "N": args.n,
            "equivariant": False,
            "q": str(res.q),
            "pi": str(res.pi),
            "image": str(res.image),
            "lhs": res.lhs,
            "rhs": res.rhs,
        }
    out.write(json.dumps(payload) + "\n")


# --- verify suites -------------------------------------------------------------------------


def _report(out, name: str, ok: bool, detail: str = "") -> bool:
    out.write(f"{'PASS' if ok else 'FAIL'} {name}{(': ' + detail) if detail else ''}\n")
    return ok


def _verify_oracle(args, out) -> bool:
    ok = True
    for n in range(1, args.n_max + 1):
        for model in positional.Model:
            brute = positional.enumerate_w_table(model, n).entries
            if model is positional.Model.EWENS:
                rec = positional.ewens_w_recurrence(n).entries
                closed = tuple(positional.ewens_w_closed(n, k) for k in range(n + 1))
            else:
                rec = positional.mallows_w_recurrence(n).entries
                closed = tuple(positional.mallows_w_closed(n, k) for k in range(n + 1))
            ok &= _report(out, f"W-table {model.value} N={n}", brute == rec == closed)
    return ok


_THETAS = (Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(6, 5), Fraction(2), Fraction(3))


def _verify_positional(args, out) -> bool:
    ok = True
    for stat in (LRMAX, INVERSIONS):
        for n in range(1, args.n_max + 1):
            for theta in _THETAS:
                rep = tree_solver.verify_positionality(tree_solver.GameSpec(n, stat, theta), budget=args.n_max)
                ok &= _report(out, f"positional {stat.label} N={n} theta={theta}", rep.positional,
                              f"optimum {rep.optimal}")
    return ok


def _verify_symmetry(args, out) -> bool:
    ok = True
    for stat in (LRMAX, INVERSIONS):
        for n in range(1, args.n_max + 1):
            for theta in (Fraction(1, 2), Fraction(2)):
                rep = tree_solver.check_sigma_symmetry(tree_solver.GameSpec(n, stat, theta), budget=args.n_max)
                ok &= _report(out, f"sigma symmetry {stat.label} N={n} theta={theta}", rep.ok,
                              f"{rep.checked} pairs")
    return ok


def _fixture(name: str) -> list[str]:
    text = resources.files("bestchoice.data").joinpath(name).read_text()
    return [line for line in text.splitlines() if line.strip()]


def _verify_figures(args, out) -> bool:
    wanted = _fixture("ewens_w_table.csv")
    got = [row for n in range(1, 7) for row in positional.ewens_w_recurrence(n).csv_rows()]
    ok = _report(out, "Ewens W(N,k) table N<=6", got == wanted)
    wanted = _fixture("critical_roots.csv")
    got = positional.roots_csv_rows(11)
    ok &= _report(out, "critical roots N<=11", got == wanted)
    return ok


_SUITES = {
    "oracle": _verify_oracle,
    "positional": _verify_positional,
    "symmetry": _verify_symmetry,
    "figures": _verify_figures,
}


def cmd_verify(args, out, parser):
    limit = ORACLE_BUDGET
    if args.n_max > limit and not args.unsafe_n:
        parser.error(f"--n-max {args.n_max} exceeds the default budget {limit}; pass --unsafe-n to override")
    if not _SUITES[args.suite](args, out):
        raise CheckFailed(args.suite)


# --- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bestchoice", description="Weighted games of best choice.")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="exact tree solve at rational theta")
    s.add_argument("--statistic", type=_statistic, default=LRMAX)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=_exact_theta, default=Fraction(1))
    s.add_argument("--unsafe-n", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("wtable", help="W(N,k) coefficient rows as CSV")
    s.add_argument("--model", choices=["ewens", "mallows"], default="ewens")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=["recurrence", "closed", "enumerate"], default="recurrence")
    s.add_argument("--only", action="store_true", help="emit only size N, not 1..N")
    s.set_defaults(func=cmd_wtable)

    s = sub.add_parser("roots", help="Ewens critical roots as CSV")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("kappa", help="optimal positional strategy at rational theta")
    s.add_argument("--model", choices=["ewens", "mallows"], default="ewens")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=_exact_theta, required=True)
    s.add_argument("--profile", action="store_true", help="include every k")
    s.set_defaults(func=cmd_kappa)

    s = sub.add_parser("asympt", help="large-N limits and figure data")
    s.add_argument("--model", choices=["ewens", "mallows"], default="mallows")
    s.add_argument("--theta", type=_real_theta)
    s.add_argument("--k", type=int)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--figure", choices=["f4", "m1", "m2"])
    s.add_argument("--theta-min", type=float, default=0.05)
    s.add_argument("--theta-max", type=float, default=0.95)
    s.add_argument("--steps", type=int, default=19)
    s.add_argument("--global-max", action="store_true")
    s.set_defaults(func=cmd_asympt)

    s = sub.add_parser("simulate", help="Monte Carlo win rate")
    s.add_argument("--model", choices=["ewens", "mallows", "uniform"], default="uniform")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=_real_theta, default=1.0)
    s.add_argument("--k", type=int, help="positional strategy; default is the solved optimal strike set")
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump-perms", metavar="FILE")
    s.add_argument("--unsafe-n", action="store_true")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("check-equivariance", help="search for a prefix-equivariance violation")
    s.add_argument("--statistic", type=_statistic, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_check_equivariance)

    s = sub.add_parser("verify", help="run a cross-check suite")
    s.add_argument("suite", choices=sorted(_SUITES))
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--unsafe-n", action="store_true")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    # exact optima at large N are rationals with thousands of digits
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    args = parser.parse_args(argv)
    with contextlib.ExitStack() as stack:
        out = sys.stdout if args.output is None else stack.enter_context(open(args.output, "w"))
        try:
            args.func(args, out, parser)
        except CheckFailed:
            return 1
        except (ValueError, tree_solver.BudgetExceeded) as exc:
            parser.error(str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())

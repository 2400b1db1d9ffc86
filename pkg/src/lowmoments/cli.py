"""Command-line harness: one subcommand per experiment family, CSV out.

Exit codes: 0 success, 2 invalid configuration, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import analytics, chargroup, coefficients, eulerprod, randmult
from .config import SUBCOMMANDS, ConfigError, ExperimentConfig, read_config_file, resolve_x


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


class _Table:
    def __init__(self, header):
        self.buf = io.StringIO()
        self.writer = csv.writer(self.buf, lineterminator="\n")
        self.writer.writerow(header)
        self.rows = 0

    def row(self, *values):
        self.writer.writerow([fmt(v) for v in values])
        self.rows += 1

    def text(self) -> str:
        return self.buf.getvalue()


def _ints(s: str) -> list[int]:
    return [int(v) for v in s.replace(" ", "").split(",") if v]


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.replace(" ", "").split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags take precedence")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--seed", type=int, default=20240101)
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--table-limit", type=int, help="size of the lambda table")

    parser = argparse.ArgumentParser(prog="lowmoments", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    p = sub.add_parser("tau", parents=[common], help="exact tau(n) and lambda(n) table")
    p.add_argument("--limit", type=int, default=100)

    for name, helptext in (("moments", "character-sum moments for one modulus"), ("ladder", "moments along a prime ladder")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--q", type=_ints, default=[])
        p.add_argument("--x", default="sqrt", help="absolute x or a rule: sqrt, q^r, q/d, q-c")
        p.add_argument("--k", type=_floats, default=[0.5, 1.0])
        p.add_argument("--method", choices=("transform", "direct"), default="transform")
        if name == "moments":
            p.add_argument("--sums-out", help="also write t,re,im for the sum vector")

    p = sub.add_parser("random", parents=[common], help="Monte Carlo moments of the random model")
    p.add_argument("--x", type=_ints, default=[100])
    p.add_argument("--k", type=_floats, default=[0.5, 1.0])
    p.add_argument("--trials", type=int, default=10_000)

    p = sub.add_parser("euler-identity", parents=[common], help="random Euler product expectation identities")
    p.add_argument("--kind", choices=("lemma", "second-moment"), default="second-moment")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--P", type=_ints, default=[100, 1000])
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--z", type=float, default=500)
    p.add_argument("--y", type=float, default=10_000)
    for name in ("a", "b", "sigma1", "sigma2", "t1", "t2"):
        p.add_argument(f"--{name}", type=float, default=1.0 if name == "a" else 0.0)

    p = sub.add_parser("euler-grid", parents=[common], help="dump F(1/2 + ij/D) for one phase draw")
    p.add_argument("--P", type=int, default=10_000)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("mertens", parents=[common], help="sum of lambda(p)^2/p and 1/p")
    p.add_argument("--x", type=_ints, default=[10**3, 10**4, 10**5])

    p = sub.add_parser("rankin", parents=[common], help="sum_{n<=x} lambda(n)^2 / x")
    p.add_argument("--x", type=_ints, default=[10**3, 10**4, 10**5])

    p = sub.add_parser("smooth", parents=[common], help="smooth-restricted sums and smooth series")
    p.add_argument("--x", type=_ints, default=[10**4, 10**5])
    p.add_argument("--series-P", type=_ints, default=[100, 1000, 10_000])

    p = sub.add_parser("parseval", parents=[common], help="Parseval check for finite Dirichlet polynomials")
    p.add_argument("--cutoff", type=_ints, default=[1, 2, 20])
    p.add_argument("--sigma", type=float, default=0.5)
    return parser


def _lambda(args, need: int) -> coefficients.LambdaTable:
    N = args.table_limit or (coefficients.EXACT_DEFAULT if need <= coefficients.EXACT_DEFAULT else coefficients.EXACT_CAP)
    if need > N:
        raise ConfigError(f"experiment needs lambda(n) up to {need}, table limit is {N}")
    return coefficients.lambda_table(N)


def to_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command, seed=args.seed, workers=args.workers, table_limit=args.table_limit, out=args.out)
    if args.command in ("moments", "ladder"):
        cfg.q, cfg.x_rule, cfg.ks, cfg.method = args.q, args.x, args.k, args.method
        if args.command == "moments" and len(cfg.q) != 1:
            raise ConfigError("moments takes exactly one --q")
    elif args.command == "random":
        cfg.xs, cfg.ks, cfg.trials = args.x, args.k, args.trials
    elif args.command == "euler-identity":
        cfg.trials = args.trials
    cfg.validate()
    return cfg


# -- subcommands ----------------------------------------------------------------


def cmd_tau(args, cfg):
    if not 1 <= args.limit <= coefficients.EXACT_CAP:
        raise ConfigError(f"--limit must lie in [1, {coefficients.EXACT_CAP}]")
    tau = coefficients.load_or_build_tau(args.limit)
    lam = coefficients.lambda_from_tau(tau)
    return coefficients.csv_text(tau, lam), f"tau: {args.limit} rows, tau(2)={tau[2] if args.limit >= 2 else 'n/a'}"


def _sums(group, x, lam, method):
    if method == "direct":
        return chargroup.brute_char_sums(group, x, lam)
    return chargroup.all_char_sums(group, x, lam)


def cmd_moments(args, cfg):
    q = cfg.q[0]
    x = resolve_x(cfg.x_rule, q)
    lam = _lambda(args, x)
    group = chargroup.build_group(q)
    sums = _sums(group, x, lam, cfg.method)
    table = _Table(["q", "x", "k", "moment", "bound", "ratio"])
    for k in cfg.ks:
        m, b = chargroup.moment(sums, k), chargroup.theorem_bound(x, q, k)
        table.row(q, x, float(k), m, b, m / b)
    if args.sums_out:
        st = _Table(["t", "re", "im"])
        for t, v in enumerate(sums.sums):
            st.row(t, float(v.real), float(v.imag))
        _write(args.sums_out, st.text())
    return table.text(), f"moments: q={q} x={x} method={cfg.method} k={cfg.ks}"


def cmd_ladder(args, cfg):
    xs = {q: resolve_x(cfg.x_rule, q) for q in cfg.q}
    lam = _lambda(args, max(xs.values()))
    table = _Table(["q", "x", "k", "moment", "bound", "ratio", "normalized", "mean_abs_over_sqrt_x"])
    for q in cfg.q:
        x = xs[q]
        sums = _sums(chargroup.build_group(q), x, lam, cfg.method)
        mean_abs = chargroup.moment(sums, 0.5) / math.sqrt(x)
        for k in cfg.ks:
            m, b = chargroup.moment(sums, k), chargroup.theorem_bound(x, q, k)
            table.row(q, x, float(k), m, b, m / b, m / x**k, mean_abs)
    return table.text(), f"ladder: {len(cfg.q)} moduli, x rule {cfg.x_rule}"


def cmd_random(args, cfg):
    lam = _lambda(args, max(cfg.xs))
    table = _Table(["x", "k", "trials", "seed", "value", "std_error"])
    for x in cfg.xs:
        sums = randmult.trial_sums(x, cfg.trials, cfg.seed, lam, cfg.workers)
        for k in cfg.ks:
            est = randmult.MCEstimate.from_samples(np.abs(sums) ** (2 * k), cfg.seed) if k else randmult.MCEstimate(1.0, 0.0, cfg.trials, cfg.seed)
            table.row(x, float(k), cfg.trials, cfg.seed, est.value, est.std_error)
    return table.text(), f"random: x={cfg.xs} trials={cfg.trials} seed={cfg.seed}"


def cmd_euler_identity(args, cfg):
    table = _Table(["P", "k", "estimate", "std_error", "closed_form"])
    if args.kind == "second-moment":
        lam = _lambda(args, max(args.P))
        for P in args.P:
            est, exact = eulerprod.second_moment_identity(P, args.t, cfg.trials, cfg.seed, lam, cfg.workers)
            table.row(P, 1.0, est.value, est.std_error, exact)
    else:
        lam = _lambda(args, int(args.y))
        me = eulerprod.MomentExponents(args.a, args.b, args.sigma1, args.sigma2, args.t1, args.t2)
        try:
            est, closed = eulerprod.mc_expectation_identity(args.z, args.y, me, cfg.trials, cfg.seed, lam, cfg.workers)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        table.row(int(args.y), me.a + me.b, est.value, est.std_error, closed)
    return table.text(), f"euler-identity: kind={args.kind} trials={cfg.trials} seed={cfg.seed}"


def cmd_euler_grid(args, cfg):
    if args.P < 100:
        raise ConfigError("--P must be >= 100")
    lam = _lambda(args, args.P)
    ev = eulerprod.EulerEvaluator.build(args.P, lam, randmult.sample_phases(args.P, cfg.seed, args.trial))
    j, vals = eulerprod.grid_values(ev)
    table = _Table(["P", "j", "re", "im"])
    for jj, v in zip(j.tolist(), vals):
        table.row(args.P, jj, float(v.real), float(v.imag))
    avg = eulerprod.discrete_grid_avg(ev)
    defect = eulerprod.continuity_defect(ev)
    return table.text(), f"euler-grid: P={args.P} grid_avg={avg:.6g} continuity_defect={defect:.6g}"


def cmd_mertens(args, cfg):
    lam = _lambda(args, max(args.x))
    table = _Table(["x", "value", "reference"])
    for x in args.x:
        table.row(x, analytics.mertens_lambda(x, lam), "sum_{p<=x} lambda(p)^2/p ~ loglog x + b2")
    for x in args.x:
        table.row(x, analytics.mertens_classic(x), "sum_{p<=x} 1/p ~ loglog x + b1")
    for x in args.x:
        table.row(x, math.log(math.log(x)), "loglog x")
    return table.text(), f"mertens: x={args.x}"


def cmd_rankin(args, cfg):
    lam = _lambda(args, max(args.x))
    table = _Table(["x", "value", "reference"])
    for x in args.x:
        table.row(x, analytics.rankin_partial(x, lam) / x, "sum_{n<=x} lambda(n)^2 / x ~ L(1; sym^2 f)/zeta(2)")
    return table.text(), f"rankin: x={args.x}"


def cmd_smooth(args, cfg):
    lam = _lambda(args, max(args.x + args.series_P))
    table = _Table(["x", "value", "reference"])
    for x in args.x:
        v = analytics.smooth_restricted_sum(x, lam) * math.log(math.log(x)) / x
        table.row(x, v, "smooth-restricted sum * loglog x / x (bounded)")
    for P in args.series_P:
        table.row(P, analytics.smooth_series(P, lam) / math.log(P), "sum over P-smooth n of lambda(n)^2/n / log P (bounded)")
    return table.text(), f"smooth: x={args.x} P={args.series_P}"


def cmd_parseval(args, cfg):
    if args.sigma <= 0:
        raise ConfigError("--sigma must be positive")
    lam = _lambda(args, max(args.cutoff))
    table = _Table(["cutoff", "sigma", "lhs", "rhs"])
    for c in args.cutoff:
        lhs, rhs = analytics.parseval_check(c, args.sigma, lam)
        table.row(c, args.sigma, lhs, rhs)
    return table.text(), f"parseval: cutoffs={args.cutoff} sigma={args.sigma}"


COMMANDS = {
    "tau": cmd_tau,
    "moments": cmd_moments,
    "ladder": cmd_ladder,
    "random": cmd_random,
    "euler-identity": cmd_euler_identity,
    "euler-grid": cmd_euler_grid,
    "mertens": cmd_mertens,
    "rankin": cmd_rankin,
    "smooth": cmd_smooth,
    "parseval": cmd_parseval,
}


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(text)


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config_file(known.config)
    command = next((a for a in argv if a in SUBCOMMANDS), None)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if command is None:
        return
    target = subparsers.choices[command]
    dests = {a.dest for a in target._actions}
    unknown = sorted(set(values) - dests)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
    target.set_defaults(**values)  # string defaults go through each option's type


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"lowmoments: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    try:
        cfg = to_config(args)
        text, summary = COMMANDS[args.command](args, cfg)
        _write(args.out, text)
    except ConfigError as exc:
        print(f"lowmoments: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and map to exit code 1
        print(f"lowmoments: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(summary, file=sys.stdout if args.out not in (None, "-") else sys.stderr)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

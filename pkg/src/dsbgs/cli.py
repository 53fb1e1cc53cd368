"""Command-line interface: solve, bench, theory, and gen subcommands.

Exit codes: 0 on success, 1 on input errors, 2 when every trial of a
bench or solve run fails to converge.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as mmio
from .bench import (
    ExperimentSpec,
    MethodSpec,
    ProblemSpec,
    run_experiment,
    theory_report_cmd,
)
from .linalg import pinv_solve
from .partition import make_partition
from .probgen import gen_type1, gen_type2
from .solver import LinearSystem, SolverConfig, preset, solve

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NO_CONVERGENCE = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad arguments by default; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_(f"{self.prog}: error: {message}")


class SystemExit_(Exception):
    """Input error carrying a message; mapped to exit code 1 in main()."""


def _add_problem_flags(p: argparse.ArgumentParser):
    src = p.add_argument_group("problem source (choose one)")
    src.add_argument("--type1", nargs=4, metavar=("M", "N", "RANK", "KAPPA"),
                     help="synthetic rank-RANK system with condition number <= KAPPA")
    src.add_argument("--type2", nargs=2, metavar=("M", "N"),
                     help="standard-normal M x N system")
    src.add_argument("--matrix", metavar="PATH", help="Matrix Market coefficient file")
    src.add_argument("--rhs", metavar="PATH",
                     help="Matrix Market m x 1 right-hand side (default: synthesized consistent)")


def _problem_spec(args) -> ProblemSpec:
    chosen = [x for x in (args.type1, args.type2, args.matrix) if x]
    if len(chosen) != 1:
        raise SystemExit_("specify exactly one of --type1, --type2, --matrix")
    if args.type1:
        m, n, r = (int(v) for v in args.type1[:3])
        return ProblemSpec(kind="type1", m=m, n=n, rank=r, kappa=float(args.type1[3]))
    if args.type2:
        return ProblemSpec(kind="type2", m=int(args.type2[0]), n=int(args.type2[1]))
    return ProblemSpec(kind="matrix_market", path=args.matrix, rhs_path=args.rhs or "")


def _realize(spec: ProblemSpec, seed: int) -> LinearSystem:
    if spec.kind == "type1":
        return gen_type1(spec.m, spec.n, spec.rank, spec.kappa, seed).system
    if spec.kind == "type2":
        return gen_type2(spec.m, spec.n, seed).system
    a = mmio.read_matrix_market(spec.path)
    if spec.rhs_path:
        b = mmio.read_matrix_market(spec.rhs_path)
        if b.shape[1] != 1:
            raise SystemExit_(f"RHS file {spec.rhs_path} must be a single column")
        return LinearSystem(a=a, b=b[:, 0])
    x_true = np.random.default_rng(seed).standard_normal(a.shape[1])
    return LinearSystem(a=a, b=a @ x_true)


def _blocks_from_args(args, m: int, n: int) -> tuple[int, int]:
    """Resolve (ell, tau) from --preset or --ell/--tau; tau 'n' and ell 'm' allowed."""
    if args.preset:
        s, t, _ = preset(args.preset, m, n)
        return -(-m // s), -(-n // t)
    ell = m if args.ell in (None, "m") else int(args.ell)
    tau = n if args.tau in (None, "n") else int(args.tau)
    return ell, tau


def _cmd_solve(args) -> int:
    spec = _problem_spec(args)
    system = _realize(spec, args.seed)
    m, n = system.shape
    ell, tau = _blocks_from_args(args, m, n)
    part = make_partition(m, n, ell, tau)
    oracle = pinv_solve(system.a, system.b)
    cfg = SolverConfig(
        alpha=args.alpha,
        seed=args.seed,
        max_iters=args.max_iters,
        stop_rule="error_to_pinv",
        tol=args.tol,
    )
    trace = solve(system, part, cfg, oracle)
    status = "converged" if trace.converged else "did not converge"
    print(
        f"{spec.label()}: {status} after {trace.iterations} iterations "
        f"({trace.wall_time:.4f} s)"
    )
    if args.out:
        mmio.write_history_csv(trace, args.out)
        print(f"history written to {args.out}")
    return EXIT_OK if trace.converged else EXIT_NO_CONVERGENCE


def _parse_method(text: str, n_hint: str = "n") -> MethodSpec:
    """Parse 'label,alpha,ell,tau' or 'alpha,ell,tau' (tau may be 'n')."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 3:
        label = None
        alpha_s, ell_s, tau_s = parts
    elif len(parts) == 4:
        label, alpha_s, ell_s, tau_s = parts
    else:
        raise SystemExit_(f"method {text!r} must be [label,]alpha,ell,tau")
    try:
        alpha = float(alpha_s)
        ell = int(ell_s)
        tau = -1 if tau_s == n_hint else int(tau_s)
    except ValueError:
        raise SystemExit_(f"method {text!r} has non-numeric fields") from None
    if label is None:
        label = f"DSBGS({alpha:g},{ell},{tau_s})"
    return MethodSpec(label=label, alpha=alpha, ell=ell, tau=tau)


def _load_config(path: str) -> dict:
    if path.endswith(".toml"):
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _spec_from_config(cfg: dict) -> ExperimentSpec:
    prob = cfg["problem"]
    problem = ProblemSpec(
        kind=prob["kind"],
        m=int(prob.get("m", 0)),
        n=int(prob.get("n", 0)),
        rank=int(prob.get("rank", 0)),
        kappa=float(prob.get("kappa", 0.0)),
        path=prob.get("path", ""),
        rhs_path=prob.get("rhs_path", ""),
    )
    methods = []
    for meth in cfg["methods"]:
        tau = meth["tau"]
        methods.append(
            MethodSpec(
                label=meth.get("label", f"DSBGS({meth['alpha']:g},{meth['ell']},{tau})"),
                alpha=float(meth["alpha"]),
                ell=int(meth["ell"]),
                tau=-1 if tau == "n" else int(tau),
            )
        )
    return ExperimentSpec(
        problem=problem,
        methods=tuple(methods),
        trials=int(cfg.get("trials", 20)),
        stop_tol=float(cfg.get("tol", 1e-5)),
        max_iters=int(cfg.get("max_iters", 1_000_000)),
        base_seed=int(cfg.get("seed", 0)),
    )


def _cmd_bench(args) -> int:
    if args.config:
        spec = _spec_from_config(_load_config(args.config))
    else:
        problem = _problem_spec(args)
        if not args.method:
            raise SystemExit_("supply at least one --method label,alpha,ell,tau")
        methods = tuple(_parse_method(m) for m in args.method)
        spec = ExperimentSpec(
            problem=problem,
            methods=methods,
            trials=args.trials,
            stop_tol=args.tol,
            max_iters=args.max_iters,
            base_seed=args.seed,
        )
    results = run_experiment(spec, parallel=not args.no_parallel)
    print(f"{'method':<24} {'iter_mean':>12} {'cpu_mean (s)':>14} {'speed-up':>9}")
    for res in results:
        print(
            f"{res.label:<24} {res.iter_mean:>12.2f} {res.cpu_mean:>14.6f} "
            f"{res.speedup_vs_baseline:>9.2f}"
        )
    print("note: CPU means and speed-ups are qualitative (hardware dependent)")
    if args.out:
        mmio.write_results_csv(results, args.out)
        print(f"results written to {args.out}")
    if all(
        all(not rec.converged for rec in res.per_trial) for res in results
    ):
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_theory(args) -> int:
    spec = _problem_spec(args)
    system = _realize(spec, args.seed)
    m, n = system.shape
    ell, tau = _blocks_from_args(args, m, n)
    alpha = args.alpha if args.alpha is not None else 1.0
    theory_report_cmd(system, alpha, ell, tau)
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.type1:
        m, n, r = (int(v) for v in args.type1[:3])
        prob = gen_type1(m, n, r, float(args.type1[3]), args.seed)
    elif args.type2:
        prob = gen_type2(int(args.type2[0]), int(args.type2[1]), args.seed)
    else:
        raise SystemExit_("gen requires --type1 or --type2")
    matrix_path = f"{args.out}.mtx"
    rhs_path = f"{args.out}_rhs.mtx"
    mmio.write_matrix_market(prob.system.a, matrix_path)
    mmio.write_matrix_market(prob.system.b.reshape(-1, 1), rhs_path, fmt="array")
    print(f"{prob.kind} written to {matrix_path} and {rhs_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsbgs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=None, help="step size (default 1.0 clamped)")
    common.add_argument("--ell", default=None, help="row block size (or 'm')")
    common.add_argument("--tau", default=None, help="column block size (or 'n')")
    common.add_argument("--preset", choices=["landweber", "rk", "rgs", "dsgs"],
                        help="classical special case (overrides --ell/--tau)")
    common.add_argument("--tol", type=float, default=1e-5, help="stopping tolerance (default 1e-5)")
    common.add_argument("--max-iters", type=int, default=1_000_000, dest="max_iters")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file path")

    p_solve = sub.add_parser("solve", parents=[common],
                             help="run one method on one problem; emit history CSV")
    _add_problem_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="multi-trial comparison; emit results CSV")
    _add_problem_flags(p_bench)
    p_bench.add_argument("--config", help="TOML or JSON experiment file (overrides flags)")
    p_bench.add_argument("--method", action="append",
                         help="method as [label,]alpha,ell,tau (repeatable; tau may be 'n')")
    p_bench.add_argument("--trials", type=int, default=20)
    p_bench.add_argument("--no-parallel", action="store_true",
                         help="run trials sequentially (required for meaningful CPU means)")
    p_bench.set_defaults(func=_cmd_bench)

    p_theory = sub.add_parser("theory", parents=[common],
                              help="print spectral constants, rates, and step-size intervals")
    _add_problem_flags(p_theory)
    p_theory.set_defaults(func=_cmd_theory)

    p_gen = sub.add_parser("gen", parents=[common],
                           help="write a synthetic problem as Matrix Market + RHS")
    _add_problem_flags(p_gen)
    p_gen.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen" and not args.out:
            raise SystemExit_("gen requires --out PREFIX")
        return args.func(args)
    except SystemExit_ as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

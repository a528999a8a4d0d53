"""``pabcd`` command line: solve, gen, bench and verify."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import bench, verify
from .generator import GeneratorSpec, describe, generate, save_instance
from .sampler import SamplerSpec
from .solvers import SolverParams, solve

log = logging.getLogger("pabcd")


def _default_seed():
    return int(os.environ.get("PABCD_SEED", 0))


def cmd_solve(args):
    entry = {"path": args.instance}
    if args.lam is not None:
        entry["lambda"] = args.lam
    if args.target is not None:
        entry["target"] = args.target
    problem, target = bench.load_problem(entry, seed=args.seed)
    params = SolverParams(
        mode=args.mode, tau=args.threads, delta_dp=args.delta_dp, delta_f=args.delta_f,
        alpha=args.alpha, epsilon=args.epsilon, l_max=args.lmax, f_target=target,
        seed=args.seed,
    )
    rec = solve(problem, params)
    summary = {
        "termination": rec.termination,
        "objective": rec.objective,
        "target": target,
        "total_updates": rec.total_updates,
        "cycles": len(rec.epochs),
        "wall_time": rec.wall_time,
        "final_x_nnz": rec.final_x_nnz,
        "max_drift": rec.max_drift,
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_gen(args):
    spec = GeneratorSpec(args.rows, args.cols, args.nnz_per_col, args.support, args.lam,
                         args.seed, args.support_rule)
    inst = generate(spec)
    mtx, meta = save_instance(inst, args.out)
    print(describe(spec, inst.A, inst.x_star))
    print(f"F* = {inst.F_star:.12g}")
    print(f"wrote {mtx} and {meta}")
    return 0


def cmd_bench(args):
    cfg = bench.load_config(args.config)
    cells = bench.run_benchmark(cfg)
    for c in cells:
        if c.status == "ok":
            print(f"{c.instance:>16} {c.method:>12} {c.tau:>3}T  time={c.mean_time:.4f}s "
                  f"updates={c.mean_updates:.0f} success={c.success_rate:.0%} runs={c.runs}")
        else:
            print(f"{c.instance:>16} {c.method:>12} {c.tau:>3}T  FAILED: {c.error}")
    for row in bench.speedup_table(cells):
        ratios = "  ".join(f"{k}={v:.4f}" for k, v in row.items() if "/" in k)
        print(f"speedup {row['instance']} {row['method']}: {ratios}")
    if cfg.output:
        for path in bench.write_results(cells, cfg.output, cfg.format):
            print(f"wrote {path}")
    return 0


def run_verify(trials, seed=0, out=None):
    """Run the statistical checks; return True when all pass."""
    out = sys.stdout if out is None else out
    checks = []
    spec = SamplerSpec(10, range(4), range(4, 10), 5)
    checks += verify.check_conditional_probability(spec, [1, 2, 4, 6], 4, trials, seed=seed)
    uni = SamplerSpec.uniform(6)
    checks += verify.check_conditional_probability(uni, range(6), 3, trials, seed=seed + 1)

    family = [[1, 4], [2], [2, 5, 6], [1, 3, 7]]
    ext = verify.extend_decomposition(family, [1, 2], [3, 4, 5, 6, 7], 3)
    ok = ext == [[1, 2, 3, 4, 5], [1, 2, 3, 4, 5], [1, 2, 3, 5, 6], [1, 2, 3, 4, 7]]
    checks.append(verify.Check("set extension worked example", 5, len(ext[0]), 0.0, ok))

    inst = generate(GeneratorSpec(15, 10, 3, 3, 1.0, seed=seed))
    p = inst.problem()
    zero = np.flatnonzero(inst.split_star == 0)
    for tau in (2, 4):
        for delta in (1, 10):
            checks += verify.check_expected_descent(p, np.zeros(p.n_vars),
                                                    np.setdiff1d(np.arange(p.n_vars), zero),
                                                    zero, delta, tau, trials, seed=seed)
    for c in checks:
        print(c, file=out)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=out)
    return failed == 0


def cmd_verify(args):
    return 0 if run_verify(args.trials, seed=args.seed) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="pabcd", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("instance", help="libsvm file or generated .mtx instance")
    p.add_argument("--mode", default="parallel-active",
                   choices=["serial", "parallel-active", "parallel-uniform"])
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--delta-dp", type=int, default=10)
    p.add_argument("--delta-f", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--target", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a Lasso instance with known optimum")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--nnz-per-col", type=int, required=True)
    p.add_argument("--support", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--support-rule", choices=["largest", "uniform"], default="largest")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark configuration")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the statistical self-checks")
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

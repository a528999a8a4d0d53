"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from pabcd.generator import GeneratorSpec, generate
from pabcd.identify import candidate_active_set, update_partition
from pabcd.problem import SolverState
from pabcd.sampler import SamplerSpec, conditional_probability_formula
from pabcd.solvers import SolverParams, solve
from pabcd.subproblem import block_direction, full_direction
from pabcd.verify import (
    check_conditional_probability,
    check_expected_descent,
    check_extension,
    extend_decomposition,
)


def report(log, number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    log.append(line)
    print(line)
    assert ok, line


# 1. closed-form direction against a search oracle

def _ternary(g, L, beta, lam, x, upper, tol=1e-9):
    lo = -x
    hi = np.minimum(1e4, upper - x)
    while np.max(hi - lo) > tol:
        a = lo + (hi - lo) / 3
        b = hi - (hi - lo) / 3
        left = (a - b) * (g + lam + 0.5 * beta * L * (a + b)) <= 0
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
    return 0.5 * (lo + hi)


def test_criterion_1_direction_oracle(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    n = 10_000
    g = rng.uniform(-10, 10, n)
    L = rng.uniform(0.01, 10, n)
    beta = rng.uniform(1, 10, n)
    lam = rng.uniform(0, 5, n)
    x = np.where(rng.random(n) < 0.3, 0.0, rng.uniform(0, 5, n))
    upper = np.where(rng.random(n) < 0.25, x + rng.uniform(0, 5, n), np.inf)
    closed = np.array([block_direction(*c) for c in zip(g, L, beta, lam, x, np.zeros(n), upper)])
    oracle = _ternary(g, L, beta, lam, x, upper)
    err = float(np.max(np.abs(closed - oracle)))
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 1, err <= 1e-8 and elapsed < 5,
           f"10^4 cases, max |closed - oracle| = {err:.2e}, {elapsed:.2f}s")


# 2. conditional sampling formula and binomial law, 10^7 multisets

def test_criterion_2_conditional_probability(acceptance_log):
    spec = SamplerSpec(10, range(4), range(4, 10), 5)
    S = [1, 2, 4, 6]
    t0 = time.perf_counter()
    checks = check_conditional_probability(spec, S, 4, 10_000_000, seed=2, n_sigma=4)
    elapsed = time.perf_counter() - t0
    worked = conditional_probability_formula(spec, S, 2, 4, 1)
    tested = [c for c in checks if "skipped" not in c.note]
    worst = max(abs(c.z) for c in tested)
    ok = all(c.passed for c in checks) and elapsed < 60 and worked == pytest.approx(10 / 12)
    report(acceptance_log, 2, ok,
           f"{len(tested)} checks, max |z| = {worst:.2f}, (k=2,i=1) -> {worked:.4f}, {elapsed:.1f}s")


# 3. expected one-step descent bound

def _states(inst, p):
    x0 = np.zeros(p.n_vars)
    mid = solve(p, SolverParams(mode="serial", l_max=p.n_vars, c0=p.n_vars, epsilon=0.0, seed=3)).x
    near = solve(p, SolverParams(mode="serial", f_target=inst.target(1e-4), seed=3)).x
    return {"x=0": x0, "mid-run": mid, "near-optimal": near}


def _partition(p, x, zero_star):
    s = SolverState.initial(p, x)
    I, J = update_partition(candidate_active_set(x, full_direction(p, s), 0.5), p.n_vars)
    if len(I) == 0 or len(J) == 0:
        J = zero_star
        I = np.setdiff1d(np.arange(p.n_vars), J)
    return I, J


def test_criterion_3_expected_descent(acceptance_log):
    inst = generate(GeneratorSpec(15, 10, 3, 3, seed=0))
    p = inst.problem()
    assert p.n_vars == 20
    zero_star = np.flatnonzero(inst.split_star == 0)
    t0 = time.perf_counter()
    cells, failures, worst, degenerate = 0, [], -np.inf, 0
    for name, x in _states(inst, p).items():
        I, J = _partition(p, x, zero_star)
        for tau in (2, 4, 8):
            for delta in (1, 10):
                for c in check_expected_descent(p, x, I, J, delta, tau, 100_000,
                                                seed=cells, n_sigma=3):
                    if c.se > 0:
                        worst = max(worst, c.z)
                    else:
                        degenerate += 1
                    if not c.passed:
                        failures.append(f"{name} {c.name}")
                cells += 1
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 3, not failures and elapsed < 120,
           f"{cells} cells x 10^5 trials, max z = {worst:.2f}, "
           f"{degenerate} zero-variance checks, {elapsed:.1f}s"
           + (f", failed: {failures}" if failures else ""))


# 4. equal-intersection extension

def test_criterion_4_extension(acceptance_log):
    t0 = time.perf_counter()
    worked = extend_decomposition([[1, 4]], [1, 2], [3, 4, 5, 6, 7], 3)
    ok = worked == [[1, 2, 3, 4, 5]] and len(worked[0]) == 5
    rng = np.random.default_rng(4)
    bad = 0
    for _ in range(1000):
        m = int(rng.integers(2, 40))
        omega = int(rng.integers(1, m + 1))
        in_J = rng.random(m) < rng.random()
        I, J = np.flatnonzero(~in_J), np.flatnonzero(in_J)
        family = [rng.choice(m, size=int(rng.integers(0, omega + 1)), replace=False)
                  for _ in range(int(rng.integers(1, 8)))]
        ext = extend_decomposition(family, I, J, omega)
        degree = min(len(I), omega) + min(len(J), omega)
        if not (check_extension(family, ext, I, J, omega) and degree <= 2 * omega
                and extend_decomposition(ext, I, J, omega) == ext):
            bad += 1
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 4, ok and bad == 0 and elapsed < 5,
           f"worked example {worked[0]}, {bad}/1000 random cases invalid, {elapsed:.2f}s")


# 5-8, 10 share the M=500, N=1000 family

E2E = dict(rows=500, cols=1000, nnz_per_col=10, support_size=50, lam=1.0)
SEEDS = range(20)


@pytest.fixture(scope="module")
def e2e_instances():
    return {seed: generate(GeneratorSpec(**E2E, seed=seed)) for seed in SEEDS}


@pytest.fixture(scope="module")
def serial_runs(e2e_instances):
    out = {}
    for seed, inst in e2e_instances.items():
        params = SolverParams(mode="serial_active", f_target=inst.target(), seed=seed)
        out[seed] = solve(inst.problem(), params)
    return out


def test_criterion_5_end_to_end(acceptance_log, e2e_instances, serial_runs):
    t0 = time.perf_counter()
    fails = []
    for seed, inst in e2e_instances.items():
        p = inst.problem()
        runs = {
            "serial": serial_runs[seed],
            "PA4": solve(p, SolverParams(mode="parallel_active", tau=4,
                                         f_target=inst.target(), seed=seed)),
            "UA4": solve(p, SolverParams(mode="parallel_uniform", tau=4,
                                         f_target=inst.target(), seed=seed)),
        }
        for name, rec in runs.items():
            if rec.termination != "target_reached" or rec.objective > inst.target():
                fails.append(f"{name}@{seed}:{rec.termination}")
    elapsed = time.perf_counter() - t0 + sum(r.wall_time for r in serial_runs.values())
    report(acceptance_log, 5, not fails and elapsed < 60,
           f"60 runs, success {60 - len(fails)}/60, {elapsed:.1f}s"
           + (f", failed: {fails}" if fails else ""))


def test_criterion_6_identification(acceptance_log, e2e_instances, serial_runs):
    agree = []
    for seed, inst in e2e_instances.items():
        rec = serial_runs[seed]
        in_J = np.zeros(rec.x.size, dtype=bool)
        in_J[rec.J] = True
        agree.append(np.mean(in_J == (inst.split_star == 0)))
    med = float(np.median(agree))
    report(acceptance_log, 6, med >= 0.95,
           f"median agreement {med:.4f} (min {min(agree):.4f}) over 20 seeds")


def test_criterion_7_degeneracy(acceptance_log, e2e_instances):
    mismatches = []
    for seed in range(5):
        inst = e2e_instances[seed]
        p = inst.problem()
        common = dict(f_target=inst.target(), seed=seed)
        a = solve(p, SolverParams(mode="serial_active", **common), record_blocks=True)
        b = solve(p, SolverParams(mode="parallel_active", tau=1, **common), record_blocks=True)
        same_seq = len(a.blocks) == len(b.blocks) and all(
            np.array_equal(u[0], v[0]) for u, v in zip(a.blocks, b.blocks))
        same_x = a.x.tobytes() == b.x.tobytes()
        same_trace = np.array_equal(a.trace("objective"), b.trace("objective"))
        if not (same_seq and same_x and same_trace):
            mismatches.append(seed)
    report(acceptance_log, 7, not mismatches,
           f"5 seeds, bitwise mismatches: {mismatches or 'none'}")


def test_criterion_8_descent_and_rate(acceptance_log, serial_runs):
    rises = [seed for seed, rec in serial_runs.items()
             if np.any(np.diff(rec.trace("objective")) > 0)]

    inst = generate(GeneratorSpec(2000, 200, 20, 100, lam=1.0, seed=8))
    rank = np.linalg.matrix_rank(inst.A.toarray())
    rec = solve(inst.problem(), SolverParams(mode="serial_active", epsilon=0.0,
                                             f_target=inst.F_star * (1 + 1e-10), seed=8))
    gap = rec.trace("objective") - inst.F_star
    tail = np.arange(len(gap) // 2, len(gap))
    tail = tail[gap[tail] > 0]
    slope = np.polyfit(rec.trace("ell")[tail], np.log(gap[tail]), 1)[0]
    ok = not rises and rank == 200 and slope < 0 and rec.termination == "target_reached"
    report(acceptance_log, 8, ok,
           f"nonincreasing on {20 - len(rises)}/20 traces; 2000x200 rank {rank}, "
           f"{len(gap)} cycles, log-gap slope {slope:.3e} per update")


def test_criterion_9_identification_payoff(acceptance_log):
    pa, ua = [], []
    for seed in SEEDS:
        inst = generate(GeneratorSpec(1000, 2000, 10, 100, lam=1.0, seed=seed))
        p = inst.problem()
        a = solve(p, SolverParams(mode="parallel_active", tau=4, delta_dp=10,
                                  f_target=inst.target(), seed=seed))
        u = solve(p, SolverParams(mode="parallel_uniform", tau=4,
                                  f_target=inst.target(), seed=seed))
        assert a.termination == u.termination == "target_reached"
        pa.append(a.total_updates)
        ua.append(u.total_updates)
    factor = np.median(ua) / np.median(pa)
    report(acceptance_log, 9, np.median(pa) <= np.median(ua),
           f"median updates PA-10 {np.median(pa):.0f} vs uniform {np.median(ua):.0f}, "
           f"factor {factor:.2f} (1.3 aimed, informative)")


def test_criterion_10_parallel_consistency(acceptance_log, e2e_instances):
    worst, fails = 0.0, []
    for tau in (2, 4, 8):
        for seed in range(5):
            inst = e2e_instances[seed]
            p = inst.problem()
            rec = solve(p, SolverParams(mode="parallel_active", tau=tau,
                                        f_target=inst.target(), seed=seed))
            bound = 1e-6 * (1 + np.max(np.abs(p.b)))
            worst = max(worst, rec.max_drift / bound)
            ok = (np.all(rec.x >= 0) and np.all(rec.trace("drift") < bound)
                  and rec.objective <= inst.target())
            if not ok:
                fails.append(f"tau={tau}@{seed}")
    report(acceptance_log, 10, not fails,
           f"15 runs, worst drift / bound = {worst:.2e}" + (f", failed: {fails}" if fails else ""))

"""Benchmark harness: repeated timed runs, speedup ratios and performance profiles."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .generator import GeneratorSpec, generate, load_instance
from .problem import build_lasso, default_lambda
from .solvers import SolverParams, solve
from .sparse import load_libsvm

__all__ = [
    "BenchConfig",
    "Cell",
    "ProfilePoint",
    "load_config",
    "load_problem",
    "estimate_target",
    "run_benchmark",
    "performance_profile",
    "speedup_table",
    "write_results",
]

log = logging.getLogger(__name__)

TARGET_REL = 1e-4


@dataclass
class BenchConfig:
    """What to run.

    ``instances`` entries are dicts with a ``name`` and either ``path`` (a
    libsvm file, or a ``.mtx`` written by the generator) or ``generator``
    (keyword arguments of :class:`GeneratorSpec`). Optional keys: ``lambda``
    and ``target``. ``methods`` entries hold a ``name``, :class:`SolverParams`
    fields, and ``threads`` (a list of worker counts to sweep).
    """

    instances: list
    methods: list
    runs: int = 1
    time_floor: float = 0.0
    output: str | None = None
    format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")


def load_config(path):
    with open(path) as fh:
        raw = json.load(fh)
    out = raw.pop("output", None)
    if isinstance(out, dict):
        raw["output"] = out.get("path")
        raw.setdefault("format", out.get("format", "csv"))
    else:
        raw["output"] = out
    return BenchConfig(**raw)


@dataclass
class Cell:
    instance: str
    method: str
    tau: int
    status: str = "ok"
    runs: int = 0
    mean_time: float = math.nan
    mean_updates: float = math.nan
    success_rate: float = math.nan
    setup_time: float = math.nan
    error: str = ""
    times: list = field(default_factory=list, repr=False)

    def row(self):
        d = asdict(self)
        d.pop("times")
        return d


class ProfilePoint(NamedTuple):
    """One step of a performance profile; ``log2_ratio`` is the plotted abscissa."""

    log2_ratio: float
    fraction_solved: float

    @property
    def ratio(self):
        return 2.0**self.log2_ratio


def estimate_target(problem, rel=TARGET_REL, seed=0, l_max=None):
    """Target from a long uniform run: ``F~*(1 + rel)`` after ``1000 n`` updates."""
    rec = solve(problem, SolverParams(mode="parallel_uniform", tau=1, epsilon=0.0,
                                      l_max=l_max, seed=seed))
    best = float(np.min(rec.trace("objective")))
    return best * (1.0 + rel)


def load_problem(entry, seed=0):
    """Build ``(problem, target)`` from one ``instances`` entry."""
    target = entry.get("target")
    if "generator" in entry:
        inst = generate(GeneratorSpec(**entry["generator"]))
        return inst.problem(), target if target is not None else inst.target(TARGET_REL)
    path = entry["path"]
    if path.endswith(".mtx"):
        inst = load_instance(path)
        p = build_lasso(inst.A, inst.b, entry.get("lambda", inst.spec.lam))
        return p, target if target is not None else inst.target(TARGET_REL)
    A, b = load_libsvm(path)
    lam = entry.get("lambda")
    p = build_lasso(A, b, default_lambda(A, b) if lam is None else lam)
    if target is None:
        target = estimate_target(p, seed=seed)
    return p, target


def _method_variants(methods):
    for m in methods:
        m = dict(m)
        name = m.pop("name", m.get("mode", "method"))
        threads = m.pop("threads", [m.pop("tau", 1)])
        for tau in threads:
            yield name, tau, m


def run_benchmark(cfg):
    """Run every (instance, method, tau) cell and return the list of :class:`Cell`.

    A cell repeats until it has ``cfg.runs`` runs and at least
    ``cfg.time_floor`` seconds of cumulative solve time. Only the solve call is
    timed; loading and setup are reported in ``setup_time``.
    """
    cells = []
    for k, entry in enumerate(cfg.instances):
        name = entry.get("name", entry.get("path", f"instance{k}"))
        t0 = time.perf_counter()
        try:
            problem, target = load_problem(entry, seed=cfg.seed)
        except (OSError, ValueError) as exc:
            log.warning("instance %s failed to load: %s", name, exc)
            for mname, tau, _ in _method_variants(cfg.methods):
                cells.append(Cell(name, mname, tau, status="failed", error=str(exc)))
            continue
        setup = time.perf_counter() - t0

        for mname, tau, fields in _method_variants(cfg.methods):
            cell = Cell(name, mname, tau, setup_time=setup)
            updates, solved = [], 0
            while cell.runs < cfg.runs or sum(cell.times) < cfg.time_floor:
                params = SolverParams(**{**fields, "tau": tau, "f_target": target,
                                         "seed": cfg.seed + cell.runs})
                rec = solve(problem, params)
                cell.times.append(rec.wall_time)
                updates.append(rec.total_updates)
                solved += rec.termination == "target_reached"
                cell.runs += 1
            cell.mean_time = float(np.mean(cell.times))
            cell.mean_updates = float(np.mean(updates))
            cell.success_rate = solved / cell.runs
            log.info("%s %s tau=%d: %.4fs over %d runs, success %.0f%%",
                     name, mname, tau, cell.mean_time, cell.runs, 100 * cell.success_rate)
            cells.append(cell)
    return cells


def performance_profile(times):
    """Per-method step functions of ``log2(time / best time)`` over problems.

    ``times`` is problems x methods; NaN or infinite entries are failures and
    never count as solved. Returns one list of :class:`ProfilePoint` per
    method, one point per distinct finite ratio.
    """
    T = np.asarray(times, dtype=np.float64)
    if T.ndim != 2:
        raise ValueError("times must be a 2-D array")
    T = np.where(np.isfinite(T), T, np.inf)
    best = T.min(axis=1)
    if not np.all(np.isfinite(best)):
        raise ValueError("every problem needs at least one finite time")
    ratios = np.log2(T / best[:, None])
    n_prob = T.shape[0]
    profiles = []
    for col in ratios.T:
        finite = np.sort(col[np.isfinite(col)])
        levels = np.unique(finite)
        counts = np.searchsorted(finite, levels, side="right")
        profiles.append([ProfilePoint(float(r), c / n_prob) for r, c in zip(levels, counts)])
    return profiles


def speedup_table(cells, taus=(2, 4, 8, 16)):
    """Rows of ``mean_time(tau=1) / mean_time(tau=k)`` per (instance, method)."""
    by_key = {}
    for c in cells:
        if c.status == "ok":
            by_key.setdefault((c.instance, c.method), {})[c.tau] = c.mean_time
    rows = []
    for (inst, method), t in by_key.items():
        if 1 not in t:
            log.warning("no 1-thread cell for %s/%s; speedups omitted", inst, method)
            continue
        row = {"instance": inst, "method": method}
        for k in taus:
            if k in t:
                row[f"1T/{k}T"] = t[1] / t[k]
        rows.append(row)
    return rows


def profile_matrix(cells):
    """Problems x methods matrix of mean times (NaN for failed or unsolved cells)."""
    insts = list(dict.fromkeys(c.instance for c in cells))
    methods = list(dict.fromkeys(f"{c.method}@{c.tau}T" for c in cells))
    T = np.full((len(insts), len(methods)), np.nan)
    for c in cells:
        if c.status == "ok" and c.success_rate > 0:
            T[insts.index(c.instance), methods.index(f"{c.method}@{c.tau}T")] = c.mean_time
    return insts, methods, T


def write_results(cells, path, fmt="csv"):
    rows = [c.row() for c in cells]
    speedups = speedup_table(cells)
    insts, methods, T = profile_matrix(cells)
    solvable = np.isfinite(T).any(axis=1)
    profile = {}
    if solvable.any():
        for name, pts in zip(methods, performance_profile(T[solvable])):
            profile[name] = [p._asdict() for p in pts]

    if fmt == "json":
        with open(path, "w") as fh:
            json.dump({"cells": rows, "speedups": speedups, "profile": profile}, fh, indent=2)
        return [path]

    written = [path]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["instance"])
        w.writeheader()
        w.writerows(rows)
    stem = os.path.splitext(path)[0]
    if speedups:
        cols = ["instance", "method"] + sorted(
            {k for r in speedups for k in r} - {"instance", "method"},
            key=lambda s: int(s.split("/")[1][:-1]))
        with open(stem + "_speedup.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            w.writerows(speedups)
        written.append(stem + "_speedup.csv")
    with open(stem + "_profile.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "log2_ratio", "fraction_solved"])
        for name, pts in profile.items():
            for pt in pts:
                w.writerow([name, pt["log2_ratio"], pt["fraction_solved"]])
    written.append(stem + "_profile.csv")
    return written

"""Small benchmark: thread sweep, speedup ratios and a performance profile.

Writes bench_demo.csv (plus _speedup and _profile companions) to the current
directory. Timings on a machine with few cores say little about speedup; the
point is the table shapes.

    python demos/04_benchmark_profile.py
"""

from pabcd.bench import (
    BenchConfig,
    performance_profile,
    profile_matrix,
    run_benchmark,
    speedup_table,
    write_results,
)

instances = [
    {"name": f"gen{k}", "generator": {"rows": 1000, "cols": 2000, "nnz_per_col": 10,
                                      "support_size": 100, "seed": k}}
    for k in range(4)
]
methods = [
    {"name": "PA-10", "mode": "parallel_active", "delta_dp": 10, "threads": [1, 2, 4]},
    {"name": "uniform", "mode": "parallel_uniform", "threads": [1, 2, 4]},
]
cells = run_benchmark(BenchConfig(instances, methods, runs=3))

for c in cells:
    print(f"{c.instance:>5} {c.method:>8} {c.tau}T  {c.mean_time * 1e3:7.2f} ms  "
          f"{c.mean_updates:8.0f} updates  success {c.success_rate:.0%}")

print()
for row in speedup_table(cells):
    print(row)

insts, names, T = profile_matrix(cells)
print("\nperformance profile (log2 ratio, fraction solved):")
for name, pts in zip(names, performance_profile(T)):
    print(f"  {name:>12}: " + "  ".join(f"({p.log2_ratio:.2f}, {p.fraction_solved:.2f})" for p in pts))

print("\nwrote", write_results(cells, "bench_demo.csv"))

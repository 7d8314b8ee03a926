"""
Window shifting against 3-D synthesis
=====================================

Shifting windows only needs one 2-D field; synthesizing the whole space-time
block needs a 3-D transform that grows with the number of frames too.
"""
from travelfield import bench

results = bench.run_bench([32, 64, 128], [8], ("window_shift", "spectral3d"), repeats=3)
for r in results:
    print(f"{r.method:13s} n={r.n:4d}  {r.wall_time_s * 1e3:8.2f} ms  peak {r.peak_bytes / 2 ** 20:6.1f} MiB")
for (m, T), s in bench.fit_slopes(results).items():
    print(f"log-log slope {m}: {s:.2f}")

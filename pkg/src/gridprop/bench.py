"""Runtime benchmark: fast tree propagation vs the brute-force reference.

Produces one record per problem size with the median fast-path time, an
optional single-shot naive time (the quadratic arm quickly becomes the whole
budget), the speedup, and finally the fitted log-log slope of the fast path,
which is the measurable form of the N log N complexity claim.
"""

from __future__ import annotations

import gc
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .global_prop import global_propagate
from .grid_graph import build_planar_graph, minimum_spanning_tree
from .oracle import gp_bruteforce

DEFAULT_SIZES = (4096, 16384, 65536, 262144, 1048576)


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    slope: float = float("nan")

    def jsonl(self) -> str:
        import json

        lines = [json.dumps(row) for row in self.rows]
        lines.append(json.dumps({"slope": self.slope}))
        return "\n".join(lines)


def _grid_shape(n: int) -> tuple[int, int]:
    h = math.isqrt(n)
    while n % h:
        h -= 1
    return h, n // h


def _median(xs) -> float:
    xs = sorted(xs)
    m = len(xs) // 2
    return xs[m] if len(xs) % 2 else 0.5 * (xs[m - 1] + xs[m])


def _time(fn, reps: int) -> list[float]:
    out = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


def run_benchmark(
    sizes=DEFAULT_SIZES,
    warmup: int = 5,
    reps: int = 20,
    naive_max_n: int = 16384,
    naive_reps: int = 1,
    zeta_g: float = 0.07,
    seed: int = 0,
    progress=None,
) -> BenchReport:
    """Time the fast and naive global propagation across problem sizes.

    ``naive_max_n`` caps the sizes at which the quadratic arm runs (0
    disables it entirely); above the cap ``naive_ms``/``speedup`` are null.
    """
    rng = np.random.default_rng(seed)
    report = BenchReport()
    gc_was_enabled = gc.isenabled()
    try:
        for n in sizes:
            h, w = _grid_shape(int(n))
            guide = rng.random((h, w))
            phi = rng.random((1, h, w))
            tree = minimum_spanning_tree(build_planar_graph(guide))

            gc.collect()
            gc.disable()
            _time(lambda: global_propagate(tree, phi, zeta_g), warmup)
            fast = _time(lambda: global_propagate(tree, phi, zeta_g), reps)
            naive_ms = None
            speedup = None
            if naive_max_n and n <= naive_max_n:
                naive = _time(lambda: gp_bruteforce(tree, phi, zeta_g), naive_reps)
                naive_ms = _median(naive) * 1000.0
            if gc_was_enabled:
                gc.enable()

            fast_ms = _median(fast) * 1000.0
            if naive_ms is not None:
                speedup = naive_ms / fast_ms
            row = {
                "n": int(n),
                "fast_ms": fast_ms,
                "naive_ms": naive_ms,
                "speedup": speedup,
                "fast_ms_spread": (max(fast) - min(fast)) * 1000.0,
                "reps": reps,
            }
            report.rows.append(row)
            if progress is not None:
                progress(row)
    finally:
        if gc_was_enabled:
            gc.enable()

    if len(report.rows) >= 2:
        xs = np.log([r["n"] for r in report.rows])
        ys = np.log([r["fast_ms"] for r in report.rows])
        report.slope = float(np.polyfit(xs, ys, 1)[0])
    return report

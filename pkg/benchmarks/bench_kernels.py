#!/usr/bin/env python3
"""Benchmark: compiled Monte-Carlo kernel vs the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--trials-scale 1.0]

Times the three hot loops of the statistical suites on both backends (and
the object-level forest for reference) and prints a speedup table.  Both
backends consume identical random streams, so the work is identical.
"""

import argparse
import time

from forestcolor import _dm_fallback
from forestcolor.dist_maint import dm_update_rooted
from forestcolor.forest import ColoredForest, Palette, Update
from forestcolor.mc import insertion_depth_counts, script_histogram, toggle_run
from forestcolor.rng import Rng, mix_seed

try:
    from forestcolor import _dm_kernel
except ImportError:
    _dm_kernel = None


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return time.perf_counter() - start, out


def bench(scale: float):
    toggles = int(100_000 * scale)
    hist_trials = int(50_000 * scale)
    depth_trials = int(50_000 * scale)
    path3 = [Update.insert(0, 1, 0), Update.insert(1, 2, 1), Update.insert(2, 3, 2)]
    palette = Palette(3, 1)

    cases = [
        (
            f"toggle h=6 x{toggles}",
            lambda be: toggle_run(3, 4, 6, toggles, seed=1, backend=be),
        ),
        (
            f"uniformity path3 x{hist_trials}",
            lambda be: script_histogram(4, palette, path3, hist_trials, 2, backend=be),
        ),
        (
            f"depth-frequencies h=5 x{depth_trials}",
            lambda be: insertion_depth_counts(palette, 5, depth_trials, 3, backend=be),
        ),
    ]

    backends = [("pure-python", _dm_fallback)]
    if _dm_kernel is not None:
        backends.append(("cython", _dm_kernel))

    print(f"{'case':<36} " + " ".join(f"{name:>12}" for name, _ in backends) + f" {'speedup':>8}")
    for label, runner in cases:
        times = []
        results = []
        for _, backend in backends:
            t, out = timed(lambda: runner(backend))
            times.append(t)
            results.append(out)
        if len(results) == 2:
            assert repr(results[0]) == repr(results[1]), "backends disagree"
        speedup = times[0] / times[-1] if len(times) > 1 else 1.0
        print(
            f"{label:<36} "
            + " ".join(f"{t:>11.2f}s" for t in times)
            + f" {speedup:>7.1f}x"
        )

    # object-level reference: the same rooted updates through ColoredForest
    updates = int(20_000 * scale)

    def object_level():
        f = ColoredForest(4, palette)
        rng = Rng(mix_seed(9, 0))
        total = 0
        for i in range(updates):
            for up in path3:
                total += dm_update_rooted(f, up, rng)
            for up in reversed(path3):
                total += dm_update_rooted(f, Update.delete(up.u, up.v), rng)
        return total

    t, _ = timed(object_level)
    print(f"\nobject-level ColoredForest reference: {updates * 6} updates in {t:.2f}s")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials-scale", type=float, default=1.0)
    args = parser.parse_args()
    bench(args.trials_scale)


if __name__ == "__main__":
    main()

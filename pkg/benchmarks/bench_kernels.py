"""Compare the compiled confusion kernel against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--pixels 2000000] [--repeat 5]

Both backends are imported explicitly so one process can time the two
implementations side by side regardless of which one the package picked.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from scenerec import kernels


def make_masks(pixels: int, n_classes: int, seed: int):
    rng = np.random.default_rng(seed)
    gt = rng.integers(0, n_classes, size=pixels, dtype=np.uint8)
    ignore = rng.random(pixels) < 0.02
    gt[ignore] = 255
    pred = rng.integers(0, n_classes, size=pixels, dtype=np.uint8)
    return gt, pred


def bench(fn, gt, pred, n_classes: int, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(gt, pred, n_classes)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pixels", type=int, default=2_000_000)
    parser.add_argument("--classes", type=int, default=21)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    gt, pred = make_masks(args.pixels, args.classes, args.seed)

    runners = [("numpy", kernels.confusion_counts_numpy)]
    try:
        from scenerec import _speedups

        runners.insert(0, ("compiled", _speedups.confusion_counts))
    except ImportError:
        print("compiled extension not available; timing numpy only")

    results = {}
    for name, fn in runners:
        seconds = bench(fn, gt, pred, args.classes, args.repeat)
        results[name] = seconds
        rate = args.pixels / seconds / 1e6
        print(f"{name:>9s}: {seconds * 1e3:8.2f} ms  ({rate:7.1f} Mpix/s)")

    if len(results) == 2:
        outputs = [np.asarray(fn(gt, pred, args.classes)) for _, fn in runners]
        same = np.array_equal(outputs[0], outputs[1])
        print(f"  outputs identical: {same}")
        print(f"  speedup compiled/numpy: {results['numpy'] / results['compiled']:.2f}x")


if __name__ == "__main__":
    main()

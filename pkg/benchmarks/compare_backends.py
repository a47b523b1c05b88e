"""Compare the numba and numpy kernel backends on the two hot paths.

Usage: python benchmarks/compare_backends.py [--size 256] [--repeats 3]

Times the separable filter/decimate kernel and the PSS window scan with
both implementations and checks they agree numerically.  The numba side
includes a warm-up call so JIT compilation is not measured.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wavesal.backends import numpy_impl

try:
    from wavesal.backends import numba_impl
except ImportError:
    numba_impl = None

from wavesal.imagedata import Image
from wavesal.pss import PssConfig, _ring_offsets


def time_best(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_filter(impl, data, taps, repeats):
    impl.filter_down_axis0(data[:8], taps)  # warm-up / JIT
    return time_best(lambda: impl.filter_down_axis0(data, taps), repeats)


def bench_pss(impl, image, config, repeats):
    bin_img = np.minimum((image.data * config.bins).astype(np.int64), config.bins - 1)
    radii = np.arange(config.s_min, config.s_max + 1, dtype=np.int64)
    off_y, off_x, starts = _ring_offsets(config.s_min, config.s_max)
    weights = radii.astype(np.float64) ** 2 / (2.0 * radii - 1.0)
    args = (bin_img, config.bins, radii, off_y, off_x, starts, weights)
    impl.pss_scan(bin_img[:16, :16], config.bins, radii, off_y, off_x, starts, weights)
    result = impl.pss_scan(*args)
    return time_best(lambda: impl.pss_scan(*args), repeats), result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    data = rng.random((args.size, args.size))
    image = Image(data)
    taps = np.asarray(
        [0.4829629131445341, 0.8365163037378079, 0.2241438680420134, -0.1294095225512604]
    )
    config = PssConfig(s_min=3, s_max=12, bins=16)

    impls = [("numpy", numpy_impl)]
    if numba_impl is not None:
        impls.append(("numba", numba_impl))
    else:
        print("numba not importable; benchmarking numpy only")

    print(f"input {args.size}x{args.size}, best of {args.repeats}\n")
    print(f"{'kernel':<24}{'backend':<10}{'seconds':>12}")
    filter_times = {}
    pss_times = {}
    pss_results = {}
    for name, impl in impls:
        filter_times[name] = bench_filter(impl, data, taps, args.repeats)
        print(f"{'filter_down_axis0':<24}{name:<10}{filter_times[name]:>12.5f}")
    for name, impl in impls:
        pss_times[name], pss_results[name] = bench_pss(impl, image, config, args.repeats)
        print(f"{'pss_scan':<24}{name:<10}{pss_times[name]:>12.5f}")

    if len(impls) == 2:
        print(f"\nspeedup (numpy/numba): filter {filter_times['numpy'] / filter_times['numba']:.1f}x, "
              f"pss {pss_times['numpy'] / pss_times['numba']:.1f}x")
        gap_h = np.abs(pss_results["numpy"][0] - pss_results["numba"][0]).max()
        gap_w = np.abs(pss_results["numpy"][1] - pss_results["numba"][1]).max()
        print(f"agreement: max |dH| = {gap_h:.2e}, max |dW| = {gap_w:.2e}")
        assert gap_h < 1e-10 and gap_w < 1e-10, "backends disagree"


if __name__ == "__main__":
    main()

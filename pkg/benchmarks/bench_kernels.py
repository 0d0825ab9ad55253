"""Compare the compiled convolution/ELU kernels against the numpy fallback.

Runs every layer shape of the steering network at the training batch size and
reports per-call times plus a whole-batch forward+backward figure. BLAS is
pinned to one thread while the compiled backend runs, as the training loop does.

    python benchmarks/bench_kernels.py [--batch 64] [--repeats 5]
"""

from __future__ import annotations

import argparse
import importlib
import time
from contextlib import nullcontext

import numpy as np
from threadpoolctl import threadpool_limits

from lanekeep.nn import kernels_numpy
from lanekeep.policy.architecture import CONV_PLAN

FEATURE = (68, 183)


def layer_shapes(batch: int):
    h, w = FEATURE
    shapes = []
    for in_c, out_c, (kh, kw), (sh, sw) in CONV_PLAN:
        shapes.append((batch, in_c, h, w, out_c, kh, kw, sh, sw))
        h = (h - kh) // sh + 1
        w = (w - kw) // sw + 1
    return shapes


def time_call(fn, repeats: int) -> float:
    fn()  # warm up buffers and threads
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_backend(mod, name: str, batch: int, repeats: int):
    rng = np.random.default_rng(0)
    rows = []
    total_fwd = total_bwd = 0.0
    limits = threadpool_limits(limits=1, user_api="blas") if name == "cython" else nullcontext()
    with limits:
        for li, (n, c, h, w, k, kh, kw, sh, sw) in enumerate(layer_shapes(batch)):
            x = rng.standard_normal((n, c, h, w))
            wt = rng.standard_normal((k, c, kh, kw))
            b = rng.standard_normal(k)
            scratch: dict = {}
            y, cols = mod.conv2d_forward_train(x, wt, b, sh, sw, scratch)
            g = np.ascontiguousarray(rng.standard_normal(y.shape))
            t_fwd = time_call(lambda: mod.conv2d_forward_train(x, wt, b, sh, sw, scratch), repeats)
            t_bwd = time_call(
                lambda: mod.conv2d_backward(x, wt, g, sh, sw, cols, scratch, li > 0), repeats
            )
            flops = 2 * n * k * c * kh * kw * y.shape[2] * y.shape[3] * (1 if li == 0 else 3)
            rows.append((f"C{li + 1}", t_fwd, t_bwd, flops / (t_fwd + t_bwd) / 1e9))
            total_fwd += t_fwd
            total_bwd += t_bwd
        x = rng.standard_normal((batch, 24, 32, 90))
        t_elu = time_call(lambda: mod.elu_forward_train(x, None), repeats)
    return rows, total_fwd, total_bwd, t_elu


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = [("numpy", kernels_numpy)]
    try:
        backends.insert(0, ("cython", importlib.import_module("lanekeep.nn._kernels")))
    except ImportError:
        print("compiled extension not available; benchmarking the fallback only")

    results = {}
    for name, mod in backends:
        rows, fwd, bwd, t_elu = bench_backend(mod, name, args.batch, args.repeats)
        results[name] = (fwd, bwd, t_elu)
        print(f"\n{name} backend (batch {args.batch}):")
        print(f"  {'layer':<6} {'fwd ms':>9} {'bwd ms':>9} {'GFLOP/s':>9}")
        for label, t_fwd, t_bwd, gflops in rows:
            print(f"  {label:<6} {t_fwd * 1e3:9.1f} {t_bwd * 1e3:9.1f} {gflops:9.1f}")
        print(f"  conv totals: fwd {fwd * 1e3:.1f} ms, bwd {bwd * 1e3:.1f} ms; "
              f"ELU C1 fused: {t_elu * 1e3:.1f} ms")

    if len(results) == 2:
        c_total = sum(results["cython"][:2])
        n_total = sum(results["numpy"][:2])
        print(f"\nspeedup (conv fwd+bwd, compiled vs numpy): {n_total / c_total:.2f}x")
        print(f"speedup (ELU fused vs numpy):               "
              f"{results['numpy'][2] / results['cython'][2]:.2f}x")


if __name__ == "__main__":
    main()

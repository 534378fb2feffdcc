"""Timing comparison of the compiled kernels against the numpy fallback.

Runs the two hot kernels on realistic workloads and prints per-call times
for each available backend, checking along the way that both produce the
same numbers.

    python3 benchmarks/bench_kernels.py [--q 31] [--reps 20] [--samples 20000]
"""

import argparse
import time

import numpy as np

from cayleylab import groups, walk
from cayleylab._kernels import available_backends, conv_step, sl2_word_entries


def _time(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_conv_step(ctx, reps):
    rng = np.random.default_rng(0)
    a, b = groups.random_pair(ctx, rng)
    gens = [a, groups.inv(a), b, groups.inv(b)]
    perms = np.stack([groups.mul_perm(ctx, groups.inv(g)) for g in gens]).astype(np.intc)
    w = np.full(len(gens), 1.0 / len(gens))
    f = rng.standard_normal(ctx.order)
    results = {}
    for be in available_backends():
        out = conv_step(f, perms, w, backend=be)
        results[be] = (out, _time(lambda: conv_step(f, perms, w, backend=be), reps))
    return results


def bench_word_entries(ctx, samples, length, reps):
    rng = np.random.default_rng(1)
    a, b = groups.random_pair(ctx, rng)
    gens = np.array(
        [a.codes, groups.inv(a).codes, b.codes, groups.inv(b).codes], dtype=np.int64
    )
    letters = rng.integers(0, 4, size=(samples, length), dtype=np.uint8)
    f = ctx.field
    mul_t, add_t = f.table("mul"), f.table("add")
    results = {}
    for be in available_backends():
        out = sl2_word_entries(letters, gens, mul_t, add_t, backend=be)
        results[be] = (
            out,
            _time(lambda: sl2_word_entries(letters, gens, mul_t, add_t, backend=be), reps),
        )
    return results


def _show(name, results, unit_count):
    backends = list(results)
    for be in backends:
        _, dt = results[be]
        print("  %-18s %-3s %9.3f ms   (%.1f ns/elem)" % (
            name, be, dt * 1e3, dt / unit_count * 1e9))
    if len(backends) == 2:
        (o1, t1), (o2, t2) = results[backends[0]], results[backends[1]]
        assert np.allclose(o1, o2) if o1.dtype.kind == "f" else (o1 == o2).all()
        print("  %-18s speedup %s/%s = %.2fx, outputs agree" % (
            "", backends[1], backends[0], t2 / t1))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=31, help="SL2 field size")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--samples", type=int, default=20000, help="word batch size")
    ap.add_argument("--length", type=int, default=24, help="word length")
    args = ap.parse_args()

    ctx = groups.make_sl(2, args.q)
    print("backends available: %s" % ", ".join(available_backends()))
    print("conv_step on SL2(F%d), |G| = %d, 4 generators:" % (args.q, ctx.order))
    _show("conv_step", bench_conv_step(ctx, args.reps), ctx.order * 4)

    print("sl2_word_entries, %d words of length %d over F%d:" % (
        args.samples, args.length, args.q))
    _show("word_entries", bench_word_entries(ctx, args.samples, args.length, args.reps),
          args.samples * args.length)


if __name__ == "__main__":
    main()

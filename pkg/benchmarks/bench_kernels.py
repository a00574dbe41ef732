"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat R]

Each kernel is run on identical inputs with both backends; the table lists
the best wall time of R runs and the speedup.  Results are checked to agree
before timing is reported.
"""
import argparse
import time

import numpy as np

from arithwave import enumerate_frequencies, kernels
from arithwave.chaos import engine_for, sample_batch, sample_draw
from arithwave.correlations import pair_table
from arithwave.field import synthesize


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    f = enumerate_frequencies(194, 3)
    t = pair_table(f)
    pts = np.ascontiguousarray(f.points)
    neg = np.ascontiguousarray(f.neg_index, dtype=np.int64)
    yield "census_scan n=194", lambda m: m.census_scan(pts, neg, t.pi, t.pj, t.bstart, t.bneg, 0)

    f = enumerate_frequencies(1109, 3)
    tab, w = engine_for(f).unordered_pairs
    a = np.ascontiguousarray(sample_batch(f, range(20)))
    yield "pair_gram n=1109 x20", lambda m: m.pair_gram(a, tab.pi, tab.pj, tab.bstart, tab.bneg, w)
    yield "pair_accumulate n=1109 x20", lambda m: m.pair_accumulate(
        a, tab.pi, tab.pj, tab.bucket, w, tab.nbuckets)

    g = synthesize(sample_draw(enumerate_frequencies(74, 3), 0), 72)
    v = np.ascontiguousarray(g.values)
    gn = np.ascontiguousarray(g.gradient_norm())
    yield "tet_surface_area G=72", lambda m: m.tet_surface_area(v)
    yield "tet_band_integral G=72", lambda m: m.tet_band_integral(v, gn, 0.05)

    g = synthesize(sample_draw(enumerate_frequencies(1105, 2), 0), 512)
    v2 = np.ascontiguousarray(g.values)
    gn2 = np.ascontiguousarray(g.gradient_norm())
    yield "tri_contour_length G=512", lambda m: m.tri_contour_length(v2)
    yield "tri_band_integral G=512", lambda m: m.tri_band_integral(v2, gn2, 0.05)


def agree(x, y):
    if isinstance(x, tuple):
        return all(agree(a, b) for a, b in zip(x[:4], y[:4]))
    return np.allclose(x, y, rtol=1e-9, atol=1e-9)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    back = kernels.backends()
    if "cython" not in back:
        print("compiled backend not built; nothing to compare")
        return 1
    print(f"{'kernel':30s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in cases():
        tp, op = best_time(lambda: fn(back["python"]), args.repeat)
        tc, oc = best_time(lambda: fn(back["cython"]), args.repeat)
        if not agree(op, oc):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:30s} {tp:9.4f}s {tc:9.4f}s {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Timing comparison of the compiled kernel backend vs the pure-NumPy one.

Runs each hot kernel on identical inputs through both backends and prints
a table of wall times and speedups.  Usage:

    python benchmarks/bench_kernels.py [--size SMALL|MEDIUM|LARGE]

The two backends are imported directly (not via the selector), so this
script works regardless of LAPLACENET_PURE.
"""

import argparse
import math
import time

import numpy as np

from laplacenet import _kernels_py as pure
from laplacenet.manifolds import FlatTorus2, Sphere2, make_rng

try:
    from laplacenet import _kernels as compiled
except ImportError:
    compiled = None

SIZES = {
    # pool, quadrature, net, smoothing radius
    "SMALL": dict(pool=20_000, quad=30_000, net=300, r=0.3),
    "MEDIUM": dict(pool=100_000, quad=150_000, net=1200, r=0.2),
    "LARGE": dict(pool=300_000, quad=400_000, net=3000, r=0.15),
}


def bench(fn, *args, repeat=3):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(m, size):
    rng = make_rng(99, m.kind)
    pool = m.sample(rng, size["pool"])
    quad = m.sample(rng, size["quad"])
    netp = m.sample(rng, size["net"])
    F = np.column_stack([np.sin(3 * quad[:, 0]), np.cos(2 * quad[:, 1])])
    w = m.volume / len(quad)
    eps = 2.0 * (m.volume / size["net"]) ** (1.0 / m.dim) / 3.0
    rho = 2.5 * eps

    cases = [
        ("thin", lambda k: k.thin(m.kind, m.params, pool, eps)),
        ("fps", lambda k: k.fps(m.kind, m.params, pool, eps, 0)),
        ("nearest_net", lambda k: k.nearest_net(m.kind, m.params, quad, netp)),
        ("edges", lambda k: k.edges(m.kind, m.params, quad[: 4 * size["net"]], rho)),
        ("smooth", lambda k: k.smooth(m.kind, m.params, quad[:20_000], quad, F,
                                      w, size["r"])),
    ]
    print(f"\n== {m} (pool={size['pool']}, quad={size['quad']}) ==")
    print(f"{'kernel':<12} {'pure [s]':>10} {'compiled [s]':>13} {'speedup':>9}")
    for name, call in cases:
        tp, _ = bench(call, pure, repeat=1 if name == "smooth" else 2)
        if compiled is None:
            print(f"{name:<12} {tp:>10.3f} {'n/a':>13} {'n/a':>9}")
            continue
        tc, _ = bench(call, compiled)
        print(f"{name:<12} {tp:>10.3f} {tc:>13.3f} {tp / tc:>8.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", choices=sorted(SIZES), default="MEDIUM")
    args = ap.parse_args()
    if compiled is None:
        print("compiled backend not importable; timing the pure backend only")
    size = SIZES[args.size]
    for m in (Sphere2(1.0), FlatTorus2(2 * math.pi, 2 * math.pi)):
        run(m, size)


if __name__ == "__main__":
    main()

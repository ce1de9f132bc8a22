"""Time the compiled kernels against the numpy fallback on realistic inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import random
import timeit

import numpy as np

from freeboundary import _kernels
from freeboundary.functions import integrate_nu, pullback
from freeboundary.mobius import is_mobius
from freeboundary.sample import build_sample
from freeboundary.verify import random_admissible
from freeboundary.words import FreeGroup


def workloads():
    rng = random.Random(7)
    G = FreeGroup(2)
    F = pullback(G.random_word(8, rng), random_admissible(G, 5, rng))
    g = G.random_word(4, rng)
    pts, space, (m,) = build_sample(G, 60, [g], rng)
    space.exponent_tensor()
    D = space.as_float()
    logd = space.log_dist()
    img = m.img_array()
    dom = m.domain
    Q = np.array([rng.sample(dom, 4) for _ in range(20000)], dtype=np.int64)
    E = space.exponent_tensor()
    return {
        f"integrate_nu ({len(F.cells)} cells)": lambda k: integrate_nu(F, backend=k),
        f"quad_mismatch ({len(Q)} quadruples)": lambda k: k.quad_mismatch(E, img, Q),
        f"quad_log_deviation ({len(Q)} quadruples)": lambda k: k.quad_log_deviation(logd, img, Q),
        f"triangle_candidates ({len(pts)} points)": lambda k: k.triangle_candidates(D, 1e-9),
        "is_mobius (exact, sampled)": lambda k: is_mobius(space, m, 0, samples=20000, backend=k),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = dict(_kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernels not built; timing the fallback only")
    print(f"{'workload':44s} " + " ".join(f"{b:>10s}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for name, fn in workloads().items():
        times = {b: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for b, k in backends.items()}
        row = f"{name:44s} " + " ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"  {times['python'] / times['cython']:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the raw channel kernel and full protocol runs under each available
backend and prints a table with the speedup of each over ``python``.
"""

import argparse
import timeit

import numpy as np

from rfidsim import kernels
from rfidsim.baselines import run_query_tree
from rfidsim.core import PopulationSpec, generate_population
from rfidsim.protocol_p import run_protocol_p


def cases():
    big = generate_population(PopulationSpec(1000, 96, seed=1))
    mid = generate_population(PopulationSpec(100, 96, seed=2))
    sig = np.ascontiguousarray(big.signals(True))
    rng = np.random.default_rng(0)
    masks = []
    for _ in range(200):
        m = np.zeros(97, dtype=np.int8)
        pos = rng.choice(np.arange(1, 97), size=rng.integers(0, 8), replace=False)
        m[pos] = rng.choice([-1, 1], size=pos.size)
        masks.append(m)
    out = np.zeros(97, dtype=np.int64)

    def respond_sweep():
        for m in masks:
            kernels.respond(sig, m, out)

    answers = [np.asarray(rng.integers(-50, 51, size=97), dtype=np.int64) for _ in range(2000)]

    def split_sweep():
        for a in answers:
            kernels.split_scan(a)

    return {
        "respond x200 (N=1000, K=96)": respond_sweep,
        "split_scan x2000 (width 97)": split_sweep,
        "protocol P, N=1000": lambda: run_protocol_p(big, keep_trace=False),
        "protocol P + trace, N=1000": lambda: run_protocol_p(big),
        "query tree, N=100": lambda: run_query_tree(mid),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.available_backends()
    previous = kernels.BACKEND
    timings = {}
    try:
        for name, fn in cases().items():
            for backend in backends:
                kernels.set_backend(backend)
                fn()  # warm-up
                timings[name, backend] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    finally:
        kernels.set_backend(previous)

    header = f"{'case':32s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for name in cases():
        row = f"{name:32s}" + "".join(f"{timings[name, b] * 1e3:10.2f}ms" for b in backends)
        if "cython" in backends:
            row += f"{timings[name, 'python'] / timings[name, 'cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

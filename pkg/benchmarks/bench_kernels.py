"""Compare the compiled and numpy kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--states 1000000] [--dim 64] [--points 201]
"""
import argparse
import timeit

import numpy as np

from evenprec._kernels import available_backends


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--states", type=int, default=1_000_000)
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--points", type=int, default=201)
    args = ap.parse_args()

    gen = np.random.default_rng(0)
    a0 = np.exp(gen.uniform(-3, 4, args.states))
    phi0 = gen.uniform(0, 2 * np.pi, args.states)
    amps = gen.normal(size=args.dim) + 1j * gen.normal(size=args.dim)
    amps /= np.linalg.norm(amps)
    rho = np.outer(amps, amps.conj())
    xs = np.linspace(-6, 6, args.points)

    backends = available_backends()
    cases = {
        f"classical_scores  n={args.states}, K=8": lambda m: m.classical_scores(a0, phi0, 8, 1.0),
        f"wigner_laguerre   dim={args.dim}, {args.points}x{args.points}": lambda m: m.wigner_laguerre(rho, xs, xs),
    }
    print(f"{'kernel':<44}" + "".join(f"{name:>12}" for name in backends) + "     speedup")
    for label, fn in cases.items():
        best = {}
        for name, mod in backends.items():
            fn(mod)  # warm-up
            best[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speed = f"{best['python'] / best['cython']:>10.1f}x" if "cython" in best else "         n/a"
        print(f"{label:<44}" + "".join(f"{best[n] * 1e3:>10.1f}ms" for n in backends) + speed)


if __name__ == "__main__":
    main()

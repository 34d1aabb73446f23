"""Compare the compiled and NumPy sweep kernels.

    python3 benchmarks/bench_kernels.py --size 400 --repeat 5

Each kernel runs on identical inputs in every available backend; outputs
are checked for bitwise equality before timings are reported.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from jlm import _kernels
from jlm.special import ASYMPTOTIC_COEFFS, SHIFT_THRESHOLD


def make_inputs(size: int, seed: int):
    rng = np.random.default_rng(seed)
    K = size
    R = size
    hx = rng.uniform(0.5, 1.5, K - 1)
    hy = rng.uniform(0.5, 1.5, R - 1)
    f1 = rng.uniform(0.5, 1.5, (R - 1, K))
    f2 = rng.uniform(1.0, 2.0, (R, K))
    row = rng.uniform(1.0, 2.0, K)
    gx = rng.normal(size=(R, K))
    gy = rng.normal(size=(R, K))
    lo = np.zeros(R, dtype=np.int64)
    hi = np.full(R, K - 1, dtype=np.int64)
    x = rng.uniform(0.01, 50.0, size * size)
    # short sweeps: longer ones overflow for random coefficients
    depth = min(R, 30)
    return {
        "multiplier_sweep": (row, f1[: depth - 1], f2[:depth], hx, hy[: depth - 1], depth),
        "solution_sweep": (row, f1[: depth - 1], f2[: depth - 1], hx, hy[: depth - 1], depth),
        "path_integrate": (gx, gy, hx, hy, lo, hi, 0.0, False),
        "digamma": (x, ASYMPTOTIC_COEFFS, SHIFT_THRESHOLD),
    }


def same_bits(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.array_equal(a.view(np.uint64), b.view(np.uint64))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    inputs = make_inputs(args.size, args.seed)
    print(f"backends: {', '.join(backends)}  size={args.size}  repeat={args.repeat}")
    print(f"{'kernel':<18}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}  bitwise")
    status = 0
    for name, call_args in inputs.items():
        times, outs = {}, {}
        for bname, mod in backends.items():
            fn = getattr(mod, name)
            outs[bname] = fn(*call_args)
            times[bname] = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
        ref = outs["python"]
        equal = all(same_bits(ref, o) for o in outs.values())
        status |= not equal
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        cols = "".join(f"{times[b] * 1e3:>12.3f}ms" for b in backends)
        print(f"{name:<18}{cols}{speed:>9.1f}x  {'yes' if equal else 'NO'}")
    return status


if __name__ == "__main__":
    raise SystemExit(main())

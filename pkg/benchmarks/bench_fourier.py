"""Time the Fourier transform paths: dense matrix, each FFT backend, numpy.fft.

    python benchmarks/bench_fourier.py [--repeat 5] [--groups Z256 Z16xZ16 ...]

Also times zak_fast against the dense restricted Zak sum for one aligned subgroup.
"""

import argparse
import timeit

import numpy as np

from tfq import fft
from tfq.groups import parse_group, subgroup_from_divisors
from tfq.transforms import Signal, fourier, fourier_fast, restrict_to_t, zak_direct, zak_fast

DEFAULT_GROUPS = ["Z64", "Z256", "Z16xZ16", "Z2xZ2xZ2xZ2xZ2xZ2xZ2xZ2", "Z3xZ81", "Z1024", "Z30xZ30"]


def best(fn, repeat, number):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench_group(spec, repeat):
    group = parse_group(spec)
    rng = np.random.default_rng(0)
    f = Signal(group, rng.normal(size=group.order) + 1j * rng.normal(size=group.order))
    number = max(1, 2000 // group.order)
    row = {"group": spec, "order": group.order}
    row["dense"] = best(lambda: fourier(f), repeat, number) if group.order <= 1024 else float("nan")
    for backend in fft.available_backends():
        row[backend] = best(lambda: fourier_fast(f, backend), repeat, number)
    cube = f.values.reshape(group.moduli)
    row["numpy"] = best(lambda: np.fft.fftn(cube), repeat, number)
    return row


def bench_zak(repeat):
    group = parse_group("Z16xZ16")
    B = subgroup_from_divisors(group, [4, 2])
    f = Signal(group, np.random.default_rng(1).normal(size=group.order) + 0j)
    out = {"dense": best(lambda: restrict_to_t(zak_direct(f, B)), repeat, 3)}
    for backend in fft.available_backends():
        out[backend] = best(lambda: zak_fast(f, B, backend), repeat, 3)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--groups", nargs="*", default=DEFAULT_GROUPS)
    args = parser.parse_args()

    backends = fft.available_backends()
    cols = ["dense"] + backends + ["numpy"]
    print(f"default backend: {fft.BACKEND}")
    print(f"{'group':<26}{'|A|':>6}" + "".join(f"{c:>12}" for c in cols) + f"{'dense/fast':>12}")
    for spec in args.groups:
        row = bench_group(spec, args.repeat)
        times = "".join(f"{row[c] * 1e6:>10.1f}us" for c in cols)
        print(f"{spec:<26}{row['order']:>6}{times}{row['dense'] / row[fft.BACKEND]:>11.1f}x")

    z = bench_zak(args.repeat)
    print("\nzak on Z16xZ16 over div:4,2")
    for name, t in z.items():
        print(f"  {name:<8}{t * 1e6:>10.1f}us")


if __name__ == "__main__":
    main()

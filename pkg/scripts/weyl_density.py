"""Coincidence density of two arithmetic sequences for rational and irrational step ratios."""
import argparse
import math

from nnsym.complexan import arithmetic_points, density_along, density_trend, rational_ratio

RATIOS = {"2": 2.0, "3/2": 1.5, "sqrt2": math.sqrt(2), "golden": (1 + math.sqrt(5)) / 2, "pi": math.pi}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--windows", default="100,1000,10000,100000")
    ap.add_argument("--shrink", type=float, default=0.5, help="eps(N) = N^-shrink")
    args = ap.parse_args()
    windows = [float(w) for w in args.windows.split(",")]
    print("integer lattice on the real axis, eps = 0.1:")
    for N in windows:
        print(f"  N={N:>9.0f}  density={density_along(arithmetic_points(0, 1, N), arithmetic_points(0, 1, N), 0.1, N):.6f}")
    print(f"near-coincidences of Z and 1/2 + rZ, eps = N^-{args.shrink}:")
    for name, r in RATIOS.items():
        tr = density_trend(lambda N: arithmetic_points(0, 1, N), lambda N, r=r: arithmetic_points(0.5, r, N),
                           windows, lambda N: N ** -args.shrink)
        q = rational_ratio(r)
        cells = "  ".join(f"{d:.5f}" for _, _, d in tr)
        print(f"  {name:>7} ({'rational ' + str(q) if q is not None else 'irrational'}): {cells}")


if __name__ == "__main__":
    main()

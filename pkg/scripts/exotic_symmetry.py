"""Build exotic symmetries for given alpha vectors and check them."""
import argparse
import warnings

import numpy as np

from nnsym.symmetry import construct_exotic, residue_of_combination, verify_symmetry


def report(alphas):
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        ex = construct_exotic(alphas)
    chk = verify_symmetry(ex.sigma, ex.symmetry, tol=1e-6)
    pts = [k + 1j * ex.b * (m + 0.5) for k in range(-6, 7) for m in range(-3, 4)]
    res = max(abs(residue_of_combination(ex.sigma, ex.symmetry.terms, p)) for p in pts)
    note = " (unit-circle root)" if w else ""
    print(f"alphas={list(alphas)} g={ex.growth_root:.3f} b={ex.b:.3f} K={ex.K} zeta={ex.zeta:.6g} "
          f"residual={chk.max_residual:.2e} max|residue|={res:.1e}{note}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("alphas", nargs="*", help="comma-separated vectors, e.g. 1,1 2,-3,1")
    ap.add_argument("--random", type=int, default=0, help="also draw this many random vectors")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    vecs = [[float(x) for x in a.split(",")] for a in args.alphas] or [[1, 1], [2, -3, 1], [1, 0.5, 0.25]]
    rng = np.random.default_rng(args.seed)
    for _ in range(args.random):
        n = int(rng.integers(1, 5))
        vecs.append([round(float(x), 4) for x in rng.choice([-1, 1], n + 1) * rng.uniform(0.5, 2, n + 1)])
    for a in vecs:
        report(a)


if __name__ == "__main__":
    main()

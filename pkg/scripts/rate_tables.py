"""Print rate tables for a few measures and compare with the limit constants.

    python scripts/rate_tables.py [--out-dir DIR]

With --out-dir each sweep is also written as CSV.
"""
import argparse
import math
import os

from bestapprox import Beta21, Exponential, StandardNormal, Uniform
from bestapprox.asymptotics import rate_sweep, uniform_rate_limit, zador_limit

SWEEPS = [
    # (label, measure, r, regime, n values, scale exponent for the table)
    ("beta_uniform_r1", Beta21(), 1.0, "uniform", [4, 16, 64, 256, 1024], 1.0),
    ("beta_asym_r2", Beta21(), 2.0, "asym_scheme", [4, 16, 64, 256], 1.0),
    ("exp_uniform_r2", Exponential(), 2.0, "uniform", [8, 32, 128, 512], 0.5),
    ("exp_r1_atoms_r2", Exponential(), 2.0, "weights_scheme", [8, 32, 128, 512], 0.5),
    ("normal_uniform_r2", StandardNormal(), 2.0, "uniform", [8, 32, 128, 512], 0.5),
    ("uniform_r2", Uniform(0, 1), 2.0, "uniform", [1, 4, 16], 1.0),
]


def limits(mu, r):
    out = []
    for name, fn in (("equal-weight limit", uniform_rate_limit), ("free limit", zador_limit)):
        try:
            out.append(f"{name} {fn(mu, r):.6g}")
        except Exception as exc:  # kinds without a density
            out.append(f"{name} n/a ({type(exc).__name__})")
    return ", ".join(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir")
    args = ap.parse_args()
    for label, mu, r, regime, ns, k in SWEEPS:
        s = rate_sweep(mu, r, regime, ns)
        print(f"{label}: fitted exponent {s.fitted_exponent:.4f}; {limits(mu, r)}")
        for n, d in zip(s.n_values, s.d_values):
            print(f"  n={n:5d}  d_r={d:.6e}  n^{k:g} d_r={n**k * d:.6f}")
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            with open(os.path.join(args.out_dir, label + ".csv"), "w", encoding="utf-8") as fh:
                fh.write(s.to_csv())
    print(f"reference: sqrt(1.0803)={math.sqrt(1.0803):.6f}, sqrt(1.1749)={math.sqrt(1.1749):.6f}")


if __name__ == "__main__":
    main()

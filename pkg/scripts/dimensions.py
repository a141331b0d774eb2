"""Quantization dimension estimates for the Cantor-type measures and Beta(2,1).

    python scripts/dimensions.py
"""
import math

from bestapprox import Beta21, Cantor, InverseCantor
from bestapprox.asymptotics import quantization_dimension


def main():
    beta2 = 0.5 + 0.5 * math.log(3) / math.log(2)
    runs = [
        ("beta(2,1), asym scheme, r=2", Beta21(), 2.0, "asym_scheme", [16, 32, 64, 128, 256], 1.0),
        ("cantor, free, r=1", Cantor(), 1.0, "free", [1, 2, 4, 8, 16, 32, 64], math.log(2) / math.log(3)),
        ("cantor, free, r=2", Cantor(), 2.0, "free", [1, 2, 4, 8, 16, 32, 64], math.log(2) / math.log(3)),
        ("inverse cantor, free, r=2", InverseCantor(), 2.0, "free", [1, 2, 4, 8, 16], 1 / beta2),
    ]
    for label, mu, r, regime, ns, expect in runs:
        est = quantization_dimension(mu, r, regime, ns)
        print(f"{label}: {est.dimension:.4f} (expected {expect:.4f}, residual {est.residual:.1e})")


if __name__ == "__main__":
    main()

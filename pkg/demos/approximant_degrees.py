"""How the approximation degree grows with k and the target error.

Run with ``python3 demos/approximant_degrees.py``.
"""

import math

from polyrelease import construct_or_approximant, construct_threshold_approximant, construct_threshold_explicit

print(" k   gamma  OR degree  sqrt(k log 1/gamma)")
for k in (4, 9, 16, 36, 64):
    for gamma in (0.1, 0.01):
        g = construct_or_approximant(k, gamma)
        print(f"{k:3d}  {gamma:5.2f}  {g.degree:9d}  {math.sqrt(k * math.log(1 / gamma)):8.1f}")

print("\nmajority-style thresholds r = k/2:")
for k in (4, 8, 12, 16):
    g = construct_threshold_approximant(k // 2, k, 0.05)
    print(f"  k={k:2d}: degree {g.degree}, error {g.gamma:.4f}")

g = construct_threshold_explicit(1, 8, 0.1)
print(f"\nexplicit construction for r=1, k=8: degree {g.degree}, exact error {g.gamma:.4f}; "
      f"float64 evaluation error {g.info['float64_error']:.2e}")
print("the LP path finds degree", construct_threshold_approximant(1, 8, 0.1).degree, "for the same bands")

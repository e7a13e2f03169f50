"""Bits per element as n grows and tau shrinks.

For a fixed tau the size should grow roughly linearly in n, so bits per
element settles to a constant that tracks lg(1/tau).
"""

import math
from fractions import Fraction

import numpy as np

from majscope import build

rng = np.random.default_rng(3)
taus = [Fraction(1, 2), Fraction(1, 8), Fraction(1, 32)]
print(f"{'n':>7} " + " ".join(f"{'tau=' + str(t):>12}" for t in taus))
for e in (10, 12, 14, 16):
    n = 1 << e
    A = rng.integers(0, 16, n)
    row = []
    for t in taus:
        enc = build(A, t)
        row.append(enc.size_in_bits() / (n * math.log2(1 / t) + n))
    print(f"{n:>7} " + " ".join(f"{r:>12.2f}" for r in row))
print("\n(values are total bits / (n lg(1/tau) + n))")

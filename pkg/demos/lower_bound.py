"""Reading permutations back out of majority counts.

Any structure that reports how often each tau-majority occurs in a range
must retain enough information to rebuild the array it came from, up to
relabelling. This script packs random permutations into an array, builds an
encoding, and recovers every permutation using nothing but count queries.
"""

import math

import numpy as np

from majscope import build
from majscope.lbdemo import (
    BITMAP_TAU,
    QueryLog,
    decode_bitmap,
    decode_perms,
    encode_bitmap,
    encode_perms,
    encoding_counter,
)

rng = np.random.default_rng(7)
for k, m in [(2, 3), (4, 2), (8, 1)]:
    perms = [(rng.permutation(3 * k) + 1).tolist() for _ in range(m)]
    code = encode_perms(perms, k)
    enc = build(code.array, code.tau)
    log = QueryLog()
    got = decode_perms(code, log.wrap(encoding_counter(enc)))
    info = m * math.log2(math.factorial(3 * k))
    print(
        f"k={k} m={m}: n={code.n} tau={code.tau} queries={len(log)} "
        f"recovered={'yes' if got == perms else 'NO'}; "
        f"{info:.0f} bits of content, {enc.size_in_bits()} bits stored"
    )

bits = rng.integers(0, 2, 40).tolist()
enc = build(encode_bitmap(bits), BITMAP_TAU)
log = QueryLog()
back = decode_bitmap(log.wrap(encoding_counter(enc)), len(bits))
print(f"\nbitmap of {len(bits)} bits at tau={BITMAP_TAU}: recovered={'yes' if back == bits else 'NO'} in {len(log)} queries")

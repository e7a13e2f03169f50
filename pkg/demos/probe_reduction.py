"""How much the piece index saves on a multi-scale array.

The array is split into regions whose blocks use fresh alphabets of
different widths, so the coalesced pairs spread over several levels. A plain
query checks every pair; the accelerated one only looks at the pairs listed
for two pieces of the query's own scale.
"""

from fractions import Fraction

import numpy as np

from majscope import build, query_fast


def multiscale_array(n, widths=(64, 256, 1024, 4096), per_block=32, seed=5):
    rng = np.random.default_rng(seed)
    parts, nxt = [], 0
    for w in widths:
        for _ in range(n // len(widths) // w):
            block = np.repeat(np.arange(nxt, nxt + per_block), w // per_block)
            rng.shuffle(block)
            parts.append(block)
            nxt += per_block
    A = np.concatenate(parts)
    return np.concatenate([A, np.arange(nxt, nxt + n - len(A))])


n, tau = 1 << 15, Fraction(1, 64)
A = multiscale_array(n)
enc = build(A, tau, accel=True)
idx = enc.piece_index
print(f"n={n} tau={tau} pairs={len(enc.pairs)}")
print(f"piece levels {idx.levels[0]}..{idx.levels[-1]}, longest list {idx.max_list_size()}")
print(f"index size {idx.size_in_bits()} bits vs encoding {enc.size_in_bits()} bits\n")

rng = np.random.default_rng(1)
print(f"{'length':>8} {'plain':>7} {'fast':>7}")
for length in (8, 64, 512, 4096, 32768):
    plain = fast = 0
    trials = 200
    for _ in range(trials):
        i = int(rng.integers(1, n - length + 2))
        j = i + length - 1
        a, b = enc.query(i, j, tau), query_fast(enc, i, j, tau)
        assert sorted(a.positions()) == sorted(b.positions())
        plain += a.probes
        fast += b.probes
    print(f"{length:>8} {plain / trials:>7.1f} {fast / trials:>7.1f}")

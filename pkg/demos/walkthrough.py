"""A small array, start to finish.

Builds an encoding for a seven-element array at tau = 1/3, throws the array
away, then answers a few range queries from the structure alone and checks
each one against a brute-force count.
"""

from fractions import Fraction

from majscope import build, deserialize, oracle_query, serialize

A = [1, 3, 2, 3, 3, 1, 1]
tau = Fraction(1, 3)

enc = build(A, tau)
print(f"array {A}, tau = {tau}")
print(f"{len(enc.pairs)} coalesced pairs, {enc.size_in_bits()} bits in total")
for lv, row in enc.stats()["levels"].items():
    print(f"  level {lv}: {row['pairs']} pairs, {row['runs']} runs")

# Only the serialized bytes survive from here on.
blob = serialize(enc)
enc = deserialize(blob)
print(f"serialized to {len(blob)} bytes\n")

for i, j, tp in [(1, 7, tau), (2, 5, tau), (2, 5, Fraction(1, 2)), (5, 7, Fraction(1, 2)), (3, 3, tau)]:
    ans = enc.query(i, j, tp)
    got = sorted((ans.report(h, 1), h.count) for h in ans.hits)
    want = sorted((ps[0], len(ps)) for ps in oracle_query(A, i, j, tp).values())
    shown = ", ".join(f"pos {p} x{c} (value {A[p - 1]})" for p, c in got) or "none"
    print(f"[{i}, {j}] tau'={tp}: {shown}   probes={ans.probes}   {'ok' if got == want else 'MISMATCH'}")

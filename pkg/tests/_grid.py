"""Shared instances and comparison helpers for the test suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from majscope.oracle import oracle_batch

RUNNING = [1, 3, 2, 3, 3, 1, 1]

GRID_N = (50, 300, 2000)
GRID_TAU = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 8), Fraction(1, 17))


def grid_alphabets(n: int) -> tuple[int, ...]:
    return (2, 5, 50, n)


def tau_primes(tau: Fraction) -> tuple[Fraction, ...]:
    return (tau, (1 + tau) / 2, Fraction(3, 4))


def grid_array(n: int, sigma: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, sigma, n)


def grid_ranges(n: int, seed: int, sample: int = 10_000, full_up_to: int = 300):
    """Every range when n is small, otherwise a seeded sample."""
    if n <= full_up_to:
        I, J = np.triu_indices(n)
        return I + 1, J + 1
    rng = np.random.default_rng(seed)
    a = rng.integers(1, n + 1, sample)
    b = rng.integers(1, n + 1, sample)
    return np.minimum(a, b), np.maximum(a, b)


def batch_matches_oracle(A, I, J, tau, answer) -> list[str]:
    """Differences between a BatchAnswer and the oracle, as readable strings (empty if equal)."""
    r, p, c = oracle_batch(A, I, J, tau)
    order = np.lexsort((answer.position, answer.range_index))
    got = (answer.range_index[order], answer.position[order], answer.count[order])
    if len(got[0]) == len(r) and all(np.array_equal(x, y) for x, y in zip(got, (r, p, c))):
        return []
    bad = set(r.tolist()) ^ set(got[0].tolist())
    if not bad:
        want = set(zip(r.tolist(), p.tolist(), c.tolist()))
        have = set(zip(*(x.tolist() for x in got)))
        bad = {t[0] for t in want ^ have}
    k = min(bad)
    return [f"range [{I[k]}, {J[k]}] tau'={tau}: oracle {oracle_rows(r, p, c, k)} vs {oracle_rows(*got, k)}"]


def oracle_rows(r, p, c, k):
    sel = r == k
    return list(zip(p[sel].tolist(), c[sel].tolist()))


def answer_as_dict(A, ans) -> dict:
    """{value: sorted positions} from a QueryAnswer, looking values up in A (tests only)."""
    return {A[ans.report(h, 1) - 1]: ans.occurrences(h) for h in ans.hits}

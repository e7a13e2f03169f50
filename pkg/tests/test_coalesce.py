from fractions import Fraction

import numpy as np

from _grid import RUNNING
from majscope.coalesce import (
    assign_levels,
    build_m_content,
    chunk_size,
    cover_bits,
    fill_positions,
    level_min_length,
    level_of,
    pack,
)
from majscope.encoding import build, pair_bound
from majscope.segments import Segment, all_segments, group_occurrences

HALF = Fraction(1, 2)


def test_level_ranges_half():
    # lengths 1..3 on level 0, 4..7 on level 1, 8..15 on level 2
    assert [level_of(L, HALF) for L in range(1, 17)] == [0] * 3 + [1] * 4 + [2] * 8 + [3]
    assert level_of(3, HALF) == 0 and level_of(6, HALF) == 1


def test_levels_partition_lengths():
    for tau in (Fraction(1, 3), Fraction(2, 7), Fraction(1, 17)):
        prev = 0
        for lv in range(0, 8):
            lo = level_min_length(lv, tau)
            hi = level_min_length(lv + 1, tau) - 1
            assert lo == prev + 1
            assert all(level_of(L, tau) == lv for L in (lo, hi))
            prev = hi
        assert chunk_size(3, tau) == level_min_length(3, tau)


def test_pack_examples():
    one = pack({0: [Segment(1, 1, 1), Segment(3, 3, 2), Segment(5, 7, 1)]})
    assert len(one) == 1
    assert cover_bits(one.bitmaps[0], 7).tolist() == [1, 0, 1, 0, 1, 1, 1]
    assert len(pack({1: [Segment(1, 2, "a"), Segment(2, 4, "b")]})) == 2
    assert len(pack({1: [Segment(1, 2, "a"), Segment(4, 5, "b")]})) == 1
    assert len(pack({1: [Segment(1, 2, "a"), Segment(3, 5, "b")]})) == 2  # touching needs a 0 between
    assert len(pack({})) == 0


def test_m_content_examples():
    layout = pack({0: [Segment(1, 1, 1), Segment(3, 3, 2), Segment(5, 7, 1)], 1: [Segment(1, 6, 3)]})
    m = build_m_content(layout, RUNNING)
    assert m[0].tolist() == [1, 1, 0, 1, 1]
    assert m[1].tolist() == [0, 1, 0, 1, 1, 0]
    assert build_m_content(pack({}), RUNNING) == []


def test_layout_invariants_random():
    rng = np.random.default_rng(4)
    for tau in (Fraction(1, 2), Fraction(1, 3), Fraction(1, 8), Fraction(1, 17)):
        for sigma in (2, 5, 50):
            n = 1500
            A = rng.integers(0, sigma, n)
            groups = group_occurrences(A)
            segs = all_segments(groups, tau, n)
            per_level = assign_levels(segs, tau)
            layout = pack(per_level)
            assert sorted(s for b in layout.bitmaps for s in b) == sorted(segs)
            for bitmap, lv in zip(layout.bitmaps, layout.levels):
                for a, b in zip(bitmap, bitmap[1:]):
                    assert b.lo >= a.hi + 2
                for s in bitmap:
                    assert level_of(s.length, tau) == lv
                    if lv >= 1:
                        assert s.length >= chunk_size(lv, tau)
            assert len(layout) <= pair_bound(n, tau)
            for lv in set(layout.levels):
                assert layout.levels.count(lv) <= 8 / tau + 2
            assert layout.levels == sorted(layout.levels)
            host = fill_positions(layout, {g.symbol: g for g in groups}, n)
            assert host.min() >= 0
            m = build_m_content(layout, A)
            assert sum(int(x.sum()) for x in m) == n
            plans = layout.plans(tau, n)
            assert sum(p.bitmap_count for p in plans) == len(layout)


def test_build_is_deterministic():
    A = np.random.default_rng(1).integers(0, 9, 800)
    a = build(A, Fraction(1, 4)).layout.bitmaps
    b = build(A, Fraction(1, 4)).layout.bitmaps
    assert a == b

"""Level partition and greedy packing of segments into coalesced bitmaps."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .segments import Segment, SymbolOccurrences


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def level_min_length(level: int, tau: Fraction) -> int:
    """Shortest segment of a level: ceil(2**level / tau); level 0 starts at 1."""
    if level == 0:
        return 1
    return _ceil_div(tau.denominator << level, tau.numerator)


def chunk_size(level: int, tau: Fraction) -> int:
    """ceil(2**level / tau), the run-length floor the chunked representation relies on."""
    return _ceil_div(tau.denominator << level, tau.numerator)


def level_of(length: int, tau: Fraction) -> int:
    level = 0
    while length >= level_min_length(level + 1, tau):
        level += 1
    return level


@dataclass(frozen=True)
class LevelPlan:
    level: int
    min_len: int
    max_len: int
    bitmap_count: int


@dataclass
class CoalescedLayout:
    """Segments assigned to coalesced bitmaps.

    Bitmap ids are global, numbered level by level in creation order.
    ``seg_of_position[k - 1]`` is the id of the bitmap hosting the segment of
    ``A[k]`` that contains k.
    """

    bitmaps: list[list[Segment]]
    levels: list[int]
    seg_of_position: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self):
        return len(self.bitmaps)

    def plans(self, tau: Fraction, n: int) -> list[LevelPlan]:
        counts: dict[int, int] = {}
        for lv in self.levels:
            counts[lv] = counts.get(lv, 0) + 1
        top = max([level_of(max(n, 1), tau), *counts]) if counts else level_of(max(n, 1), tau)
        return [
            LevelPlan(lv, level_min_length(lv, tau), level_min_length(lv + 1, tau) - 1, counts.get(lv, 0))
            for lv in range(top + 1)
        ]


def assign_levels(segments, tau: Fraction) -> dict[int, list[Segment]]:
    per_level: dict[int, list[Segment]] = {}
    for seg in segments:
        per_level.setdefault(level_of(seg.hi - seg.lo + 1, tau), []).append(seg)
    return per_level


def pack(per_level: dict[int, list[Segment]]) -> CoalescedLayout:
    """First-fit by start position, trying the bitmap whose last run ends earliest.

    A segment joins that bitmap only if at least one 0 separates it from the
    bitmap's last run; otherwise a new bitmap of the same level is opened.
    """
    bitmaps: list[list[Segment]] = []
    levels: list[int] = []
    for level in sorted(per_level):
        segs = sorted(per_level[level], key=lambda s: (s.lo, s.hi))
        base = len(bitmaps)
        heap: list[tuple[int, int]] = []
        for seg in segs:
            if heap and heap[0][0] < seg.lo - 1:
                _, slot = heapq.heappop(heap)
            else:
                slot = len(bitmaps) - base
                bitmaps.append([])
                levels.append(level)
            bitmaps[base + slot].append(seg)
            heapq.heappush(heap, (seg.hi, slot))
    return CoalescedLayout(bitmaps, levels)


def occupied_positions(seg: Segment, occ: SymbolOccurrences) -> np.ndarray:
    """Positions of the segment's symbol inside the segment."""
    P = occ.positions
    return P[np.searchsorted(P, seg.lo, "left") : np.searchsorted(P, seg.hi, "right")]


def fill_positions(layout: CoalescedLayout, occ_by_symbol: dict, n: int) -> np.ndarray:
    host = np.full(n, -1, dtype=np.int64)
    for r, segs in enumerate(layout.bitmaps):
        for seg in segs:
            host[occupied_positions(seg, occ_by_symbol[seg.symbol]) - 1] = r
    layout.seg_of_position = host
    return host


def m_positions(segs: list[Segment], occ_by_symbol: dict) -> tuple[int, np.ndarray]:
    """Universe size and 1-positions of the occurrence bitmap for one coalesced bitmap."""
    offset = 0
    parts = []
    for seg in segs:
        parts.append(occupied_positions(seg, occ_by_symbol[seg.symbol]) - seg.lo + 1 + offset)
        offset += seg.hi - seg.lo + 1
    ones = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return offset, ones.astype(np.int64)


def build_m_content(layout: CoalescedLayout, A, tau=None) -> list[np.ndarray]:
    """Occurrence bits per coalesced bitmap: run by run, 1 where A holds the run's symbol."""
    out = []
    for segs in layout.bitmaps:
        bits = [int(A[p - 1] == seg.symbol) for seg in segs for p in range(seg.lo, seg.hi + 1)]
        out.append(np.asarray(bits, dtype=np.uint8))
    return out


def cover_bits(segs: list[Segment], n: int) -> np.ndarray:
    bits = np.zeros(n, dtype=np.uint8)
    for seg in segs:
        bits[seg.lo - 1 : seg.hi] = 1
    return bits

"""The range tau-majority encoding.

Build once from an array and a threshold tau; afterwards the array is not
needed.  A query for [i, j] and any tau' >= tau probes the coalesced pairs:
a pair can certify a majority only if its cover bitmap is all 1s over
[i, j], and then its occurrence bitmap, restricted to the mapped range,
counts the occurrences of the hosted symbol.  Answers are positions, never
values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from ._bits import Reader, Writer, seal, unseal
from .bitvec import SparseBitvec
from .coalesce import (
    CoalescedLayout,
    assign_levels,
    chunk_size,
    fill_positions,
    m_positions,
    pack,
)
from .errors import FormatError, RangeError, ThresholdTooLow
from .rational import as_threshold, ceil_lg_inverse, exceeds
from .runbv import RunBitvec, SparseRunBitvec, read_cover
from .segments import all_segments, group_occurrences

MAGIC = b"RMAJ"
BUNDLE_MAGIC = b"RMMB"
VERSION = 1

Cover = Union[RunBitvec, SparseRunBitvec]


@dataclass
class CoalescedPair:
    id: int
    level: int
    cover: Cover
    occ: SparseBitvec

    def probe(self, i: int, j: int, tau: Fraction) -> "Hit | None":
        ci = self.cover.rank(i - 1)
        cj = self.cover.rank(j)
        if cj - ci != j - i + 1:
            return None
        base = self.occ.rank(ci)
        count = self.occ.rank(cj) - base
        if not exceeds(count, j - i + 1, tau):
            return None
        return Hit(self.id, ci + 1, cj, count, base)

    def size_in_bits(self) -> int:
        return self.cover.size_in_bits() + self.occ.size_in_bits()


@dataclass(frozen=True)
class Hit:
    """One majority: the pair that certified it and the mapped range [lo, hi] in its occurrence bitmap."""

    pair_id: int
    lo: int
    hi: int
    count: int
    base: int  # occurrence-bitmap rank just before lo


@dataclass
class QueryAnswer:
    i: int
    j: int
    tau: Fraction
    hits: list[Hit]
    probes: int
    encoding: "MajorityEncoding" = field(repr=False, default=None)

    def __len__(self):
        return len(self.hits)

    def report(self, hit: Hit, t: int = 1) -> int:
        """Position of the t-th occurrence, left to right, of the hit's majority in [i, j]."""
        if not 1 <= t <= hit.count:
            raise IndexError(f"occurrence {t} of {hit.count}")
        occ = self.encoding.pairs[hit.pair_id].occ
        return self.i - hit.lo + occ.select(hit.base + t)

    def occurrences(self, hit: Hit) -> list[int]:
        occ = self.encoding.pairs[hit.pair_id].occ
        sel = occ.select_many(np.arange(hit.base + 1, hit.base + hit.count + 1))
        return (self.i - hit.lo + sel).tolist()

    def positions(self) -> list[int]:
        """Leftmost occurrence of every majority, in hit order."""
        return [self.report(h, 1) for h in self.hits]


@dataclass
class BatchAnswer:
    """Hits for many ranges, flattened; rows are sorted by range index then pair id."""

    range_index: np.ndarray
    pair_id: np.ndarray
    position: np.ndarray  # leftmost occurrence
    count: np.ndarray
    probes: np.ndarray  # per range

    def per_range(self, nranges: int) -> list[list[tuple[int, int]]]:
        out: list[list[tuple[int, int]]] = [[] for _ in range(nranges)]
        for r, p, c in zip(self.range_index.tolist(), self.position.tolist(), self.count.tolist()):
            out[r].append((p, c))
        return out


class MajorityEncoding:
    def __init__(self, n: int, tau: Fraction, pairs: list[CoalescedPair]):
        self.n = n
        self.tau = tau
        self.pairs = pairs
        self.layout: CoalescedLayout | None = None  # only after build, never serialized
        self.piece_index = None

    def __repr__(self):
        return f"MajorityEncoding(n={self.n}, tau={self.tau}, pairs={len(self.pairs)})"

    @property
    def levels(self) -> dict[int, list[CoalescedPair]]:
        out: dict[int, list[CoalescedPair]] = {}
        for p in self.pairs:
            out.setdefault(p.level, []).append(p)
        return out

    def _check(self, i: int, j: int, tau_prime) -> Fraction:
        tp = as_threshold(tau_prime)
        if not 1 <= i <= j <= self.n:
            raise RangeError(f"range [{i}, {j}] outside [1, {self.n}]")
        if tp < self.tau:
            raise ThresholdTooLow(f"tau' = {tp} is below the build threshold {self.tau}")
        return tp

    def query(self, i: int, j: int, tau_prime=None) -> QueryAnswer:
        """Every distinct tau'-majority of A[i..j], probing all pairs in id order."""
        tp = self._check(i, j, self.tau if tau_prime is None else tau_prime)
        hits = [h for p in self.pairs if (h := p.probe(i, j, tp)) is not None]
        return QueryAnswer(i, j, tp, hits, len(self.pairs), self)

    def probe_ids(self, ids, i: int, j: int, tp: Fraction) -> QueryAnswer:
        hits = [h for r in ids if (h := self.pairs[r].probe(i, j, tp)) is not None]
        return QueryAnswer(i, j, tp, hits, len(ids), self)

    def report(self, answer: QueryAnswer, hit: Hit, t: int = 1) -> int:
        return answer.report(hit, t)

    def query_many(self, I, J, tau_prime=None, candidates: np.ndarray | None = None) -> BatchAnswer:
        """Vectorised ``query`` over many ranges.

        ``candidates``, a boolean (ranges x pairs) matrix, restricts which
        pairs are probed per range; the accelerator supplies it.
        """
        tp = as_threshold(self.tau if tau_prime is None else tau_prime)
        if tp < self.tau:
            raise ThresholdTooLow(f"tau' = {tp} is below the build threshold {self.tau}")
        I = np.asarray(I, dtype=np.int64)
        J = np.asarray(J, dtype=np.int64)
        if len(I) and (I.min() < 1 or J.max() > self.n or np.any(I > J)):
            raise RangeError("a range lies outside [1, n]")
        L = J - I + 1
        rows, ids, pos, cnt = [], [], [], []
        for p in self.pairs:
            sel = np.arange(len(I)) if candidates is None else np.flatnonzero(candidates[:, p.id])
            if len(sel) == 0:
                continue
            ci = p.cover.rank_many(I[sel] - 1)
            cj = p.cover.rank_many(J[sel])
            ok = cj - ci == L[sel]
            sel, ci, cj = sel[ok], ci[ok], cj[ok]
            if len(sel) == 0:
                continue
            base = p.occ.rank_many(ci)
            c = p.occ.rank_many(cj) - base
            ok = exceeds(c, L[sel], tp)
            sel, ci, base, c = sel[ok], ci[ok], base[ok], c[ok]
            if len(sel) == 0:
                continue
            rows.append(sel)
            ids.append(np.full(len(sel), p.id))
            pos.append(I[sel] - (ci + 1) + p.occ.select_many(base + 1))
            cnt.append(c)
        if candidates is None:
            probes = np.full(len(I), len(self.pairs), dtype=np.int64)
        else:
            probes = candidates.sum(axis=1).astype(np.int64)
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return BatchAnswer(empty, empty, empty, empty, probes)
        r, d, q, c = (np.concatenate(x) for x in (rows, ids, pos, cnt))
        order = np.lexsort((d, r))
        return BatchAnswer(r[order], d[order], q[order], c[order], probes)

    def size_in_bits(self) -> int:
        """Serialized size of the core encoding (no accelerator), in bits."""
        return 8 * len(serialize(self, include_index=False))

    def stats(self) -> dict:
        per_level = {}
        for lv, pairs in sorted(self.levels.items()):
            runs = sum(
                p.cover.starts.n if isinstance(p.cover, SparseRunBitvec) else _run_count(p.cover)
                for p in pairs
            )
            per_level[lv] = {
                "pairs": len(pairs),
                "runs": runs,
                "cover_bits": sum(p.cover.size_in_bits() for p in pairs),
                "occ_bits": sum(p.occ.size_in_bits() for p in pairs),
            }
        cover = sum(v["cover_bits"] for v in per_level.values())
        occ = sum(v["occ_bits"] for v in per_level.values())
        total = self.size_in_bits()
        return {
            "n": self.n,
            "tau": f"{self.tau.numerator}/{self.tau.denominator}",
            "pairs": len(self.pairs),
            "pair_bound": pair_bound(self.n, self.tau),
            "cover_ones": sum(p.cover.ones for p in self.pairs),
            "occ_ones": sum(p.occ.n for p in self.pairs),
            "levels": per_level,
            "cover_bits": cover,
            "occ_bits": occ,
            "total_bits": total,
            "bits_per_element": total / self.n if self.n else 0.0,
        }


def _run_count(cover: RunBitvec) -> int:
    bits = cover.bits()
    return int(np.count_nonzero(np.diff(np.concatenate([[0], bits])) == 1))


def pair_bound(n: int, tau: Fraction) -> float:
    """2 log_{1+tau} n + 1, the ceiling on the number of coalesced pairs."""
    return 2 * np.log(max(n, 1)) / np.log1p(float(tau)) + 1


def build(A, tau, accel: bool = False) -> MajorityEncoding:
    """Group, segment, level, pack, then encode every coalesced bitmap."""
    tau = as_threshold(tau)
    n = len(A)
    groups = group_occurrences(A)
    occ_by_symbol = {g.symbol: g for g in groups}
    layout = pack(assign_levels(all_segments(groups, tau, n), tau))
    fill_positions(layout, occ_by_symbol, n)
    pairs = []
    for r, (segs, level) in enumerate(zip(layout.bitmaps, layout.levels)):
        runs = [(s.lo, s.hi) for s in segs]
        if level == 0:
            cover: Cover = SparseRunBitvec(runs, n)
        else:
            cover = RunBitvec(runs, n, chunk_size(level, tau))
        universe, ones = m_positions(segs, occ_by_symbol)
        pairs.append(CoalescedPair(r, level, cover, SparseBitvec(universe, ones)))
    enc = MajorityEncoding(n, tau, pairs)
    enc.layout = layout
    if accel:
        from .accel import accel_build

        enc.piece_index = accel_build(enc, layout)
    return enc


# -- serialization -----------------------------------------------------------


def serialize(enc: MajorityEncoding, include_index: bool = True) -> bytes:
    """RMAJ stream: header, pair table, pair sections, optional sections, CRC32."""
    sections = []
    for p in enc.pairs:
        w = Writer()
        w.magic(b"PAIR")
        w.u32(p.id)
        w.u16(p.level)
        p.cover.write(w)
        p.occ.write(w)
        sections.append(w.getvalue())
    out = Writer()
    out.magic(MAGIC)
    out.u16(VERSION)
    out.u64(enc.tau.numerator)
    out.u64(enc.tau.denominator)
    out.u64(enc.n)
    out.u32(len(sections))
    offset = 0
    for s in sections:
        out.u64(offset)
        out.u64(len(s))
        offset += len(s)
    for s in sections:
        out.buf += s
    extras = []
    if include_index and enc.piece_index is not None:
        w = Writer()
        enc.piece_index.write(w)
        extras.append((b"PIDX", w.getvalue()))
    out.u8(len(extras))
    for tag, payload in extras:
        out.magic(tag)
        out.blob(payload)
    return seal(out.getvalue())


def deserialize(data: bytes) -> MajorityEncoding:
    inp = Reader(unseal(bytes(data)))
    enc = _read_encoding(inp)
    if not inp.at_end():
        raise FormatError("trailing bytes after encoding")
    return enc


def _read_encoding(inp: Reader) -> MajorityEncoding:
    inp.expect(MAGIC)
    version = inp.u16()
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    num, den = inp.u64(), inp.u64()
    if not 0 < num < den:
        raise FormatError("stored threshold outside (0, 1)")
    tau = Fraction(num, den)
    n = inp.u64()
    count = inp.u32()
    if count * 16 > inp.end - inp.pos:
        raise FormatError("pair table exceeds stream")
    table = [(inp.u64(), inp.u64()) for _ in range(count)]
    start = inp.pos
    pairs = []
    for k, (off, length) in enumerate(table):
        if start + off + length > inp.end:
            raise FormatError("pair section exceeds stream")
        sub = Reader(inp.data, start + off, start + off + length)
        sub.expect(b"PAIR")
        pid, level = sub.u32(), sub.u16()
        if pid != k:
            raise FormatError("pair ids out of order")
        cover = read_cover(sub)
        occ = SparseBitvec.read(sub)
        if cover.n != n or occ.m != cover.ones:
            raise FormatError("pair section inconsistent with header")
        if not sub.at_end():
            raise FormatError("trailing bytes in pair section")
        pairs.append(CoalescedPair(pid, level, cover, occ))
    inp.pos = start + sum(length for _, length in table)
    enc = MajorityEncoding(n, tau, pairs)
    for _ in range(inp.u8()):
        tag = bytes(inp._take(4))
        payload = inp.blob()
        if tag == b"PIDX":
            from .accel import PieceIndex

            enc.piece_index = PieceIndex.read(Reader(payload), enc)
    return enc


# -- multiple thresholds -----------------------------------------------------


class MultiEncoding:
    """Encodings for tau'' = 1/2, 1/4, ... down to 1/2**ceil(lg 1/tau).

    A tau'-query is served by the encoding whose tau'' is the largest power
    of 1/2 not above tau', so its cost tracks 1/tau' rather than 1/tau.
    """

    def __init__(self, tau: Fraction, encodings: dict[Fraction, MajorityEncoding]):
        self.tau = tau
        self.encodings = encodings

    @property
    def n(self) -> int:
        return next(iter(self.encodings.values())).n

    def route(self, tau_prime) -> Fraction:
        tp = as_threshold(tau_prime)
        if tp < self.tau:
            raise ThresholdTooLow(f"tau' = {tp} is below the build threshold {self.tau}")
        return Fraction(1, 2 ** ceil_lg_inverse(tp))

    def query(self, i: int, j: int, tau_prime) -> QueryAnswer:
        return self.encodings[self.route(tau_prime)].query(i, j, tau_prime)


def multi_build(A, tau) -> MultiEncoding:
    tau = as_threshold(tau)
    levels = max(1, ceil_lg_inverse(tau))
    encs = {Fraction(1, 2**t): build(A, Fraction(1, 2**t)) for t in range(1, levels + 1)}
    return MultiEncoding(tau, encs)


def multi_query(me: MultiEncoding, i: int, j: int, tau_prime) -> QueryAnswer:
    return me.query(i, j, tau_prime)


def serialize_multi(me: MultiEncoding) -> bytes:
    out = Writer()
    out.magic(BUNDLE_MAGIC)
    out.u16(VERSION)
    out.u64(me.tau.numerator)
    out.u64(me.tau.denominator)
    out.u32(len(me.encodings))
    for t in sorted(me.encodings, reverse=True):
        out.blob(serialize(me.encodings[t]))
    return seal(out.getvalue())


def deserialize_multi(data: bytes) -> MultiEncoding:
    inp = Reader(unseal(bytes(data)))
    inp.expect(BUNDLE_MAGIC)
    if inp.u16() != VERSION:
        raise FormatError("unsupported bundle version")
    num, den = inp.u64(), inp.u64()
    if not 0 < num < den:
        raise FormatError("stored threshold outside (0, 1)")
    encs = {}
    for _ in range(inp.u32()):
        e = deserialize(inp.blob())
        encs[e.tau] = e
    if not inp.at_end():
        raise FormatError("trailing bytes after bundle")
    return MultiEncoding(Fraction(num, den), encs)


def load(data: bytes):
    """Deserialize either a single encoding or a multi-threshold bundle."""
    payload = bytes(data)
    if payload[:4] == BUNDLE_MAGIC:
        return deserialize_multi(payload)
    return deserialize(payload)

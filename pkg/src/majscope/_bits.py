"""Word-level bit helpers and the little-endian section reader/writer."""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import FormatError

_POP8 = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)

# _SEL8[byte, r] = bit offset of the (r+1)-th set bit of `byte`, 8 if absent.
_SEL8 = np.full((256, 8), 8, dtype=np.int64)
for _b in range(256):
    _r = 0
    for _bit in range(8):
        if _b >> _bit & 1:
            _SEL8[_b, _r] = _bit
            _r += 1


def popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).astype(np.int64)


def select_in_words(words: np.ndarray, r: np.ndarray) -> np.ndarray:
    """0-based offset of the r-th (1-based) set bit inside each uint64 word."""
    words = np.ascontiguousarray(words, dtype="<u8")
    r = np.asarray(r, dtype=np.int64)
    if words.size == 0:
        return np.zeros(0, dtype=np.int64)
    by = words.view(np.uint8).reshape(-1, 8)
    cum = np.cumsum(_POP8[by], axis=1)
    byte_idx = (cum < r[:, None]).sum(axis=1)
    rows = np.arange(len(words))
    before = np.where(byte_idx > 0, cum[rows, np.maximum(byte_idx - 1, 0)], 0)
    byte_idx = np.minimum(byte_idx, 7)
    return byte_idx * 8 + _SEL8[by[rows, byte_idx], r - before - 1]


_POP8_L = _POP8.tolist()
_SEL8_L = _SEL8.tolist()


def select_in_word(word: int, r: int) -> int:
    """0-based offset of the r-th set bit of a Python int word."""
    off = 0
    while True:
        byte = word & 0xFF
        c = _POP8_L[byte]
        if r <= c:
            return off + _SEL8_L[byte][r - 1]
        r -= c
        word >>= 8
        off += 8


def bits_to_words(bits) -> tuple[np.ndarray, int]:
    """Pack a 0/1 sequence into little-endian uint64 words; returns (words, length)."""
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    m = len(arr)
    if np.any(arr > 1):
        raise ValueError("bit sequence must contain only 0 and 1")
    nwords = (m + 63) // 64
    buf = np.zeros(nwords * 8, dtype=np.uint8)
    packed = np.packbits(arr, bitorder="little")
    buf[: len(packed)] = packed
    return buf.view("<u8").astype(np.uint64), m


def positions_to_words(positions: np.ndarray, m: int) -> np.ndarray:
    """Words with bits set at the given 0-based positions."""
    nwords = (m + 63) // 64
    words = np.zeros(nwords, dtype=np.uint64)
    positions = np.asarray(positions, dtype=np.int64)
    if len(positions):
        np.bitwise_or.at(
            words, positions >> 6, np.left_shift(np.uint64(1), (positions & 63).astype(np.uint64))
        )
    return words


def words_to_bits(words: np.ndarray, m: int) -> np.ndarray:
    by = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(by, bitorder="little")[:m]


def pack_ints(values: np.ndarray, width: int) -> bytes:
    """Bit-exact packing of unsigned ints, LSB first, `width` bits each."""
    values = np.asarray(values, dtype=np.uint64)
    if width == 0 or len(values) == 0:
        return b""
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_ints(buf: bytes, count: int, width: int) -> np.ndarray:
    if width == 0 or count == 0:
        return np.zeros(count, dtype=np.uint64)
    need = (count * width + 7) // 8
    if len(buf) < need:
        raise FormatError("packed integer payload truncated")
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8, count=need), bitorder="little")
    bits = bits[: count * width].reshape(count, width).astype(np.uint64)
    return bits @ (np.uint64(1) << np.arange(width, dtype=np.uint64))


def smallest_uint(max_value: int) -> np.dtype:
    for dt in (np.uint8, np.uint16, np.uint32):
        if max_value <= np.iinfo(dt).max:
            return np.dtype(dt)
    return np.dtype(np.uint64)


class Writer:
    """Append-only little-endian byte sink."""

    def __init__(self):
        self.buf = bytearray()

    def magic(self, tag: bytes):
        assert len(tag) == 4
        self.buf += tag

    def u8(self, v: int):
        self.buf += struct.pack("<B", v)

    def u16(self, v: int):
        self.buf += struct.pack("<H", v)

    def u32(self, v: int):
        self.buf += struct.pack("<I", v)

    def u64(self, v: int):
        self.buf += struct.pack("<Q", v)

    def blob(self, data: bytes):
        """Length-prefixed (u64) byte block."""
        self.u64(len(data))
        self.buf += data

    def varint(self, v: int):
        while True:
            byte = v & 0x7F
            v >>= 7
            if v:
                self.buf.append(byte | 0x80)
            else:
                self.buf.append(byte)
                return

    def getvalue(self) -> bytes:
        return bytes(self.buf)


class Reader:
    def __init__(self, data: bytes, pos: int = 0, end: int | None = None):
        self.data = memoryview(data)
        self.pos = pos
        self.end = len(data) if end is None else end

    def _take(self, k: int) -> memoryview:
        if k < 0 or self.pos + k > self.end:
            raise FormatError(f"truncated stream: need {k} bytes at offset {self.pos}")
        out = self.data[self.pos : self.pos + k]
        self.pos += k
        return out

    def expect(self, tag: bytes):
        got = bytes(self._take(4))
        if got != tag:
            raise FormatError(f"bad magic {got!r}, expected {tag!r}")

    def peek(self, k: int) -> bytes:
        return bytes(self.data[self.pos : min(self.pos + k, self.end)])

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self._take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def blob(self) -> bytes:
        return bytes(self._take(self.u64()))

    def varint(self) -> int:
        shift = value = 0
        while True:
            byte = self.u8()
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7
            if shift > 63:
                raise FormatError("varint too long")

    def at_end(self) -> bool:
        return self.pos >= self.end


def seal(payload: bytes) -> bytes:
    """Append a CRC32 trailer."""
    return payload + struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)


def unseal(data: bytes) -> bytes:
    if len(data) < 4:
        raise FormatError("stream too short for checksum")
    payload, crc = data[:-4], struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(payload) & 0xFFFFFFFF != crc:
        raise FormatError("checksum mismatch")
    return payload

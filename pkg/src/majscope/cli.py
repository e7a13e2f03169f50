"""Command-line front end.

    majscope build  --input FILE --tau 1/8 --out FILE [--accel] [--multi]
    majscope query  --index FILE --range 5:7 [--tau-prime 1/2] [--all-positions]
    majscope bench  --input FILE --tau 1/8 --queries 1000 [--accel] [--seed 0] [--timing]
    majscope stats  --index FILE
    majscope lbdemo --perm "1 5 3 9 2 4 6 8 7" | --k 3 --m 2 --seed 0

Exit codes: 2 bad arguments or input syntax, 3 invalid threshold, 4 I/O or
corrupt index, 5 range out of bounds, 6 query threshold below the build one.
"""

from __future__ import annotations

import argparse
import struct
import sys
import time

import numpy as np

from . import accel
from .encoding import MultiEncoding, build, load, multi_build, serialize, serialize_multi
from .errors import FormatError, InvalidThreshold, RangeError, ThresholdTooLow
from .lbdemo import (
    BITMAP_TAU,
    DecodeError,
    QueryLog,
    decode_bitmap,
    decode_perms,
    encode_bitmap,
    encode_perms,
    encoding_counter,
    oracle_counter,
)
from .rational import as_threshold

EXIT_PARSE, EXIT_TAU, EXIT_IO, EXIT_RANGE, EXIT_TAU_LOW = 2, 3, 4, 5, 6
ARRAY_MAGIC = b"RARR"


class UsageError(ValueError):
    pass


# -- array files ---------------------------------------------------------------


def read_array(path: str, tokens: str = "int"):
    """Binary files start with RARR and a u32 count of u32 values; anything else is text, one token per line."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == ARRAY_MAGIC:
        if len(data) < 8:
            raise UsageError("array header truncated")
        (count,) = struct.unpack_from("<I", data, 4)
        if len(data) - 8 != 4 * count:
            raise UsageError(f"array header declares {count} values, payload holds {(len(data) - 8) / 4:g}")
        return np.frombuffer(data, dtype="<u4", offset=8).astype(np.int64)
    lines = [ln.strip() for ln in data.splitlines()]
    lines = [ln for ln in lines if ln]
    if tokens == "bytes":
        return lines
    try:
        return np.asarray([int(ln) for ln in lines], dtype=np.int64)
    except ValueError as exc:
        raise UsageError(f"non-integer token in {path}: {exc}") from None


def write_array(path: str, values, binary: bool = False):
    values = np.asarray(values, dtype=np.int64)
    with open(path, "wb") as fh:
        if binary:
            fh.write(ARRAY_MAGIC + struct.pack("<I", len(values)))
            fh.write(values.astype("<u4").tobytes())
        else:
            fh.write("".join(f"{v}\n" for v in values.tolist()).encode())


def parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"range must look like I:J, got {text!r}") from None


# -- commands ------------------------------------------------------------------


def _space_report(enc, out):
    st = enc.stats()
    out.write(f"n={st['n']} tau={st['tau']} pairs={st['pairs']} pair_bound={st['pair_bound']:.1f}\n")
    out.write(f"total_bits={st['total_bits']} bits_per_element={st['bits_per_element']:.3f}\n")
    out.write(f"cover_bits={st['cover_bits']} occ_bits={st['occ_bits']}")
    if enc.piece_index is not None:
        out.write(f" index_bits={enc.piece_index.size_in_bits()}")
    out.write("\n")
    out.write(f"cover_ones={st['cover_ones']} occ_ones={st['occ_ones']}\n")
    for lv, row in st["levels"].items():
        out.write(
            f"level {lv}: pairs={row['pairs']} runs={row['runs']} "
            f"cover_bits={row['cover_bits']} occ_bits={row['occ_bits']}\n"
        )


def cmd_build(args, out):
    tau = as_threshold(args.tau)
    A = read_array(args.input, args.tokens)
    if args.multi:
        me = multi_build(A, tau)
        data = serialize_multi(me)
        out.write(f"bundle tau={tau.numerator}/{tau.denominator} structures={len(me.encodings)}\n")
        for t in sorted(me.encodings, reverse=True):
            e = me.encodings[t]
            out.write(f"structure tau={t.numerator}/{t.denominator} pairs={len(e.pairs)} bits={e.size_in_bits()}\n")
    else:
        enc = build(A, tau, accel=args.accel)
        data = serialize(enc)
        _space_report(enc, out)
    with open(args.out, "wb") as fh:
        fh.write(data)
    out.write(f"wrote {len(data)} bytes to {args.out}\n")


def _load_index(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    return load(data)


def cmd_query(args, out):
    obj = _load_index(args.index)
    i, j = parse_range(args.range)
    if isinstance(obj, MultiEncoding):
        tp = as_threshold(args.tau_prime) if args.tau_prime else obj.tau
        enc = obj.encodings[obj.route(tp)]
    else:
        enc = obj
        tp = as_threshold(args.tau_prime) if args.tau_prime else enc.tau
    if enc.piece_index is not None:
        ans = accel.query_fast(enc, i, j, tp)
    else:
        ans = enc.query(i, j, tp)
    for hit in ans.hits:
        line = f"pos={ans.report(hit, 1)} count={hit.count}"
        if args.all_positions:
            line += " positions=" + ",".join(str(p) for p in ans.occurrences(hit))
        out.write(line + "\n")


def cmd_bench(args, out):
    tau = as_threshold(args.tau)
    A = read_array(args.input, args.tokens)
    enc = build(A, tau, accel=args.accel)
    n = enc.n
    if n == 0:
        raise RangeError("cannot benchmark an empty array")
    rng = np.random.default_rng(args.seed)
    I = rng.integers(1, n + 1, args.queries)
    J = rng.integers(1, n + 1, args.queries)
    I, J = np.minimum(I, J), np.maximum(I, J)
    out.write("query_len,probes,hits,ns_per_query\n")
    for i, j in zip(I.tolist(), J.tolist()):
        t0 = time.perf_counter_ns()
        ans = accel.query_fast(enc, i, j, tau) if args.accel else enc.query(i, j, tau)
        ns = time.perf_counter_ns() - t0 if args.timing else 0
        out.write(f"{j - i + 1},{ans.probes},{len(ans.hits)},{ns}\n")


def cmd_stats(args, out):
    obj = _load_index(args.index)
    encs = obj.encodings.values() if isinstance(obj, MultiEncoding) else [obj]
    for enc in encs:
        _space_report(enc, out)
        st = enc.stats()
        ok = st["pairs"] <= st["pair_bound"]
        out.write(f"pair_count_within_bound={'yes' if ok else 'no'}\n")


def cmd_lbdemo(args, out):
    if args.bitmap is not None:
        bits = [int(c) for c in args.bitmap if c in "01"]
        A = encode_bitmap(bits)
        enc = build(A, BITMAP_TAU)
        log = QueryLog()
        got = decode_bitmap(log.wrap(encoding_counter(enc)), len(bits))
        out.write("bitmap " + "".join(map(str, got)) + "\n")
        out.write(f"queries {len(log)}\n")
        return
    if args.perm:
        perms = [[int(t) for t in args.perm.replace(",", " ").split()]]
        if len(perms[0]) % 3:
            raise UsageError("permutation length must be a multiple of 3")
        k = len(perms[0]) // 3
    else:
        if args.k is None:
            raise UsageError("give --perm, --bitmap or --k")
        k = args.k
        rng = np.random.default_rng(args.seed)
        perms = [(rng.permutation(3 * k) + 1).tolist() for _ in range(args.m)]
    try:
        code = encode_perms(perms, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.via == "oracle":
        counter = oracle_counter(code.array, code.tau)
    else:
        counter = encoding_counter(build(code.array, code.tau))
    log = QueryLog()
    got = decode_perms((code.k, code.m), counter, log)
    out.write(f"k={code.k} m={code.m} n={code.n} tau={code.tau.numerator}/{code.tau.denominator}\n")
    for p in got:
        out.write("perm " + " ".join(map(str, p)) + "\n")
    out.write(f"queries {len(log)}\n")
    if got != [list(map(int, p)) for p in perms]:
        raise DecodeError("recovered permutations differ from the encoded ones")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="majscope", description="Range tau-majority encodings.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build and serialize an encoding")
    b.add_argument("--input", required=True)
    b.add_argument("--tau", required=True, help="NUM/DEN")
    b.add_argument("--out", required=True)
    b.add_argument("--accel", action="store_true", help="append the piece index")
    b.add_argument("--multi", action="store_true", help="bundle encodings for tau = 1/2, 1/4, ...")
    b.add_argument("--tokens", choices=("int", "bytes"), default="int")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer one range query")
    q.add_argument("--index", required=True)
    q.add_argument("--range", required=True, help="I:J, 1-based inclusive")
    q.add_argument("--tau-prime", default=None, help="NUM/DEN, defaults to the build threshold")
    q.add_argument("--all-positions", action="store_true")
    q.set_defaults(func=cmd_query)

    be = sub.add_parser("bench", help="CSV of per-query probes and hits")
    be.add_argument("--input", required=True)
    be.add_argument("--tau", required=True)
    be.add_argument("--queries", type=int, default=1000)
    be.add_argument("--accel", action="store_true")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--timing", action="store_true", help="fill ns_per_query (output is then not reproducible)")
    be.add_argument("--tokens", choices=("int", "bytes"), default="int")
    be.set_defaults(func=cmd_bench)

    s = sub.add_parser("stats", help="per-level structure statistics")
    s.add_argument("--index", required=True)
    s.set_defaults(func=cmd_stats)

    lb = sub.add_parser("lbdemo", help="recover permutations or a bitmap from majority counts")
    lb.add_argument("--perm", default=None, help='e.g. "1 5 3 9 2 4 6 8 7"')
    lb.add_argument("--k", type=int, default=None)
    lb.add_argument("--m", type=int, default=1)
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--bitmap", default=None, help="string of 0/1")
    lb.add_argument("--via", choices=("encoding", "oracle"), default="encoding")
    lb.set_defaults(func=cmd_lbdemo)
    return ap


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = make_parser().parse_args(argv)
    try:
        args.func(args, out)
    except InvalidThreshold as exc:
        return _fail(EXIT_TAU, exc)
    except ThresholdTooLow as exc:
        return _fail(EXIT_TAU_LOW, exc)
    except RangeError as exc:
        return _fail(EXIT_RANGE, exc)
    except (UsageError, DecodeError) as exc:
        return _fail(EXIT_PARSE, exc)
    except (OSError, FormatError) as exc:
        return _fail(EXIT_IO, exc)
    return 0


def _fail(code: int, exc: Exception) -> int:
    print(f"majscope: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

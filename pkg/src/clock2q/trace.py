"""Block-trace parsing, emission, derivation, and synthesis.

Two on-disk formats are supported:

* CSV: UTF-8 lines ``time_sec,lbn,op,size_bytes`` with op ``r`` or
  ``w`` and no header by default.
* BIN: the 8-byte magic ``MCTRACE1`` followed by little-endian 24-byte
  records: u64 time_sec, u64 lbn, u32 size_bytes, u8 op (0 read,
  1 write), 3 zero pad bytes.

Timestamps must be non-decreasing within a trace; loaders reject
violations. A trace whose timestamps are all zero is treated as
untimestamped, which disables time-based dirty flushing downstream.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence

import numpy as np

READ = 0
WRITE = 1

BIN_MAGIC = b"MCTRACE1"
_RECORD = struct.Struct("<QQIB3x")
RECORD_SIZE = _RECORD.size  # 24 bytes


class TraceFormatError(ValueError):
    """Malformed trace input; carries a line or byte offset."""


@dataclass(slots=True)
class TraceRequest:
    time_sec: int
    lbn: int
    op: int
    size_bytes: int = 4096

    @property
    def is_write(self) -> bool:
        return self.op == WRITE


@dataclass(frozen=True)
class TraceMeta:
    request_count: int
    footprint: int
    write_fraction: float
    has_timestamps: bool


def compute_meta(requests: Sequence[TraceRequest]) -> TraceMeta:
    distinct: set[int] = set()
    writes = 0
    timed = False
    for r in requests:
        distinct.add(r.lbn)
        if r.op == WRITE:
            writes += 1
        if r.time_sec:
            timed = True
    n = len(requests)
    return TraceMeta(n, len(distinct), writes / n if n else 0.0, timed)


# ----------------------------------------------------------------------
# load / store

def _parse_csv(stream, skip_header: bool):
    requests: list[TraceRequest] = []
    last_time = 0
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if skip_header and lineno == 1:
            continue
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise TraceFormatError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        try:
            t = int(parts[0])
            lbn = int(parts[1])
            size = int(parts[3])
        except ValueError as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from None
        ops = parts[2].strip().lower()
        if ops == "r":
            op = READ
        elif ops == "w":
            op = WRITE
        else:
            raise TraceFormatError(f"line {lineno}: op must be 'r' or 'w', got {parts[2]!r}")
        if t < 0 or lbn < 0 or size < 0:
            raise TraceFormatError(f"line {lineno}: negative field")
        if t < last_time:
            raise TraceFormatError(
                f"line {lineno}: time {t} decreases from {last_time}")
        last_time = t
        requests.append(TraceRequest(t, lbn, op, size))
    return requests


def _parse_bin(stream: BinaryIO):
    header = stream.read(len(BIN_MAGIC))
    if header != BIN_MAGIC:
        raise TraceFormatError(f"byte 0: bad magic {header!r}, expected {BIN_MAGIC!r}")
    payload = stream.read()
    if len(payload) % RECORD_SIZE:
        raise TraceFormatError(
            f"byte {len(BIN_MAGIC) + len(payload)}: trailing "
            f"{len(payload) % RECORD_SIZE} bytes do not form a record")
    requests: list[TraceRequest] = []
    last_time = 0
    for i, (t, lbn, size, op) in enumerate(_RECORD.iter_unpack(payload)):
        offset = len(BIN_MAGIC) + i * RECORD_SIZE
        if op not in (READ, WRITE):
            raise TraceFormatError(f"byte {offset}: op byte must be 0 or 1, got {op}")
        if t < last_time:
            raise TraceFormatError(f"byte {offset}: time {t} decreases from {last_time}")
        last_time = t
        requests.append(TraceRequest(t, lbn, op, size))
    return requests


def load_trace(source, format: str = "csv", skip_header: bool = False):
    """Decode a trace and its metadata from a path or binary stream.

    Returns ``(requests, meta)``. ``format`` is ``"csv"`` or ``"bin"``.
    """
    fmt = format.lower()
    if fmt not in ("csv", "bin"):
        raise TraceFormatError(f"unknown format {format!r}")
    if isinstance(source, (str, bytes)) and not hasattr(source, "read"):
        mode = "rb"
        with open(source, mode) as fh:
            return load_trace(fh, fmt, skip_header)
    if fmt == "csv":
        requests = _parse_csv(source, skip_header)
    else:
        requests = _parse_bin(source)
    return requests, compute_meta(requests)


def write_trace(requests: Iterable[TraceRequest], sink, format: str = "csv") -> None:
    """Encode requests to a path or binary stream; inverse of load_trace."""
    fmt = format.lower()
    if fmt not in ("csv", "bin"):
        raise TraceFormatError(f"unknown format {format!r}")
    if isinstance(sink, (str, bytes)) and not hasattr(sink, "write"):
        with open(sink, "wb") as fh:
            write_trace(requests, fh, fmt)
            return
    if fmt == "csv":
        for r in requests:
            op = "w" if r.op == WRITE else "r"
            sink.write(f"{r.time_sec},{r.lbn},{op},{r.size_bytes}\n".encode("utf-8"))
    else:
        sink.write(BIN_MAGIC)
        pack = _RECORD.pack
        for r in requests:
            sink.write(pack(r.time_sec, r.lbn, r.size_bytes, r.op))


# ----------------------------------------------------------------------
# derivation

def derive_metadata(requests: Sequence[TraceRequest], fanout: int,
                    op_mode: str = "preserve") -> list[TraceRequest]:
    """Map a data trace onto its metadata blocks: lbn -> lbn // fanout.

    Consecutive duplicates are kept; repeated hits on the same metadata
    block are the correlated references downstream policies must see.
    ``op_mode`` is ``"preserve"`` or ``"all_read"``.
    """
    if fanout < 1:
        raise ValueError(f"fanout must be >= 1, got {fanout}")
    mode = op_mode.lower()
    if mode not in ("preserve", "all_read"):
        raise ValueError(f"op_mode must be 'preserve' or 'all_read', got {op_mode!r}")
    force_read = mode == "all_read"
    return [
        TraceRequest(r.time_sec, r.lbn // fanout,
                     READ if force_read else r.op, r.size_bytes)
        for r in requests
    ]


def expand_multiblock(requests: Sequence[TraceRequest], block_size: int) -> list[TraceRequest]:
    """Expand extents spanning several blocks into per-block requests."""
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    out: list[TraceRequest] = []
    for r in requests:
        nblocks = max(1, -(-r.size_bytes // block_size))
        for i in range(nblocks):
            out.append(TraceRequest(r.time_sec, r.lbn + i, r.op, block_size))
    return out


# ----------------------------------------------------------------------
# synthesis

def generate_zipf(n: int, alpha: float, universe: int, seed: int,
                  write_frac: float = 0.0, req_per_sec: int = 0) -> list[TraceRequest]:
    """Draw ``n`` block requests from a Zipf(alpha) popularity law over
    ``universe`` blocks (alpha 0 is uniform). Block id equals popularity
    rank minus one. ``req_per_sec`` > 0 synthesizes timestamps;
    otherwise the trace is untimestamped.
    """
    if universe < 1:
        raise ValueError(f"universe must be >= 1, got {universe}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    rng = np.random.default_rng(seed)
    if alpha == 0.0 or universe == 1:
        ids = rng.integers(0, universe, size=n)
    else:
        weights = 1.0 / np.arange(1, universe + 1, dtype=np.float64) ** alpha
        ids = rng.choice(universe, size=n, p=weights / weights.sum())
    writes = rng.random(n) < write_frac if write_frac > 0 else np.zeros(n, dtype=bool)
    out: list[TraceRequest] = []
    for i in range(n):
        t = i // req_per_sec if req_per_sec else 0
        out.append(TraceRequest(t, int(ids[i]), WRITE if writes[i] else READ))
    return out


def generate_correlated(base: Sequence[TraceRequest], burst_k: int, burst_span: int,
                        fraction: float, seed: int) -> list[TraceRequest]:
    """Inject short re-reference bursts into a base trace.

    For a seeded ``fraction`` of blocks, ``burst_k - 1`` extra read
    accesses are spliced in at distinct offsets within ``burst_span``
    base positions after the block's first occurrence. Injected requests
    borrow the timestamp of the preceding base request, so timestamps
    stay non-decreasing.
    """
    if burst_k < 2:
        raise ValueError(f"burst_k must be >= 2, got {burst_k}")
    if burst_span < burst_k:
        raise ValueError(f"burst_span must be >= burst_k, got {burst_span}")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    rng = np.random.default_rng(seed)
    seen: set[int] = set()
    pending: dict[int, list[TraceRequest]] = {}
    out: list[TraceRequest] = []
    prev_time = 0
    for i, req in enumerate(base):
        for inj in pending.pop(i, ()):
            inj.time_sec = prev_time
            out.append(inj)
        out.append(req)
        prev_time = req.time_sec
        if req.lbn in seen:
            continue
        seen.add(req.lbn)
        if rng.random() >= fraction:
            continue
        offsets = rng.choice(np.arange(1, burst_span + 1), size=burst_k - 1, replace=False)
        for off in sorted(int(o) for o in offsets):
            # emitted just before base position i + off
            pending.setdefault(i + off, []).append(
                TraceRequest(0, req.lbn, READ, req.size_bytes))
    for target in sorted(pending):
        for inj in pending[target]:
            inj.time_sec = prev_time
            out.append(inj)
    return out

"""Trace-driven cache simulation with a dirty-block model.

A simulation replays requests in order against one policy state
machine. Writes mark blocks dirty. Before each request a flush pass
runs: a proportion pass (above the high watermark, clean oldest-first
until at or below the low watermark) and an age pass (clean everything
dirty for longer than the flush age; needs trace timestamps). Flushing
is free; counts are reported so cost can be analyzed externally.

Cache size resolves either to an absolute block count or to a fraction
of the trace footprint (half-up rounding). No warmup requests are
discarded, so miss ratios are reproducible bit for bit.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Sequence

from .policy import (
    ConfigError,
    Destination,
    EvictionImpossible,
    OutcomeKind,
    PolicyConfig,
    PolicyKind,
    PolicyState,
    Region,
)
from .trace import WRITE, TraceRequest, compute_meta, expand_multiblock

DEFAULT_SIZE_FRACS = (0.005, 0.01, 0.05, 0.1)


@dataclass(frozen=True)
class DirtyModel:
    """Dirty-block handling knobs for a simulation run."""

    enabled: bool = True
    flush_age_sec: int | None = 30
    low_watermark: float = 0.10
    high_watermark: float = 0.20

    def validate(self) -> None:
        if not 0.0 <= self.low_watermark <= self.high_watermark <= 1.0:
            raise ConfigError(
                "low_watermark",
                f"need 0 <= low <= high <= 1, got {self.low_watermark}, {self.high_watermark}")
        if self.flush_age_sec is not None and self.flush_age_sec < 0:
            raise ConfigError("flush_age_sec", "must be >= 0 or None")


_RESULT_FIELDS = (
    "requests", "hits", "misses", "miss_ratio", "ghost_hits",
    "flow_small_to_main", "flow_small_to_ghost", "flow_ghost_to_main",
    "giveups", "flushes_time", "flushes_watermark",
    "skipped_ref_histogram", "skipped_dirty_total",
)


@dataclass
class SimResult:
    """Counters from one simulation run."""

    policy: str
    total_blocks: int
    requests: int = 0
    hits: int = 0
    misses: int = 0
    miss_ratio: float = 0.0
    ghost_hits: int = 0
    flow_small_to_main: int = 0
    flow_small_to_ghost: int = 0
    flow_ghost_to_main: int = 0
    giveups: int = 0
    flushes_time: int = 0
    flushes_watermark: int = 0
    skipped_ref_histogram: dict[int, int] = field(default_factory=dict)
    skipped_dirty_total: int = 0
    flow_small_discard: int = 0
    small_dirty_recirculations: int = 0
    main_evictions: int = 0
    time_flush_disabled: bool = False

    @property
    def small_evictions_attempted(self) -> int:
        return (self.flow_small_to_main + self.flow_small_to_ghost
                + self.flow_small_discard + self.giveups
                + self.small_dirty_recirculations)

    @property
    def mean_skipped_ref(self) -> float:
        total = sum(k * v for k, v in self.skipped_ref_histogram.items())
        count = sum(self.skipped_ref_histogram.values())
        return total / count if count else 0.0

    @property
    def max_skipped_ref(self) -> int:
        return max(self.skipped_ref_histogram, default=0)

    def to_dict(self) -> dict:
        out = {"policy": self.policy, "total_blocks": self.total_blocks}
        for name in _RESULT_FIELDS:
            value = getattr(self, name)
            if name == "skipped_ref_histogram":
                value = {str(k): v for k, v in sorted(value.items())}
            out[name] = value
        out["time_flush_disabled"] = self.time_flush_disabled
        return out

    def to_kv_row(self) -> str:
        """Flat key=value CSV row with stable field names."""
        parts = [f"policy={self.policy}", f"total_blocks={self.total_blocks}"]
        for name in _RESULT_FIELDS:
            value = getattr(self, name)
            if name == "skipped_ref_histogram":
                value = ";".join(f"{k}:{v}" for k, v in sorted(value.items()))
            parts.append(f"{name}={value}")
        parts.append(f"time_flush_disabled={self.time_flush_disabled}")
        return ",".join(parts)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def resolve_total_blocks(size_frac: float | None, size_blocks: int | None,
                         footprint: int) -> int:
    if (size_frac is None) == (size_blocks is None):
        raise ConfigError("size_frac", "give exactly one of size_frac or size_blocks")
    if size_blocks is not None:
        total = size_blocks
    else:
        total = int(size_frac * footprint + 0.5)
    if total < 2:
        raise ConfigError("size_frac", f"cache of {total} blocks is below the 2-block minimum")
    return total


def _policy_kind(kind) -> PolicyKind:
    return kind if isinstance(kind, PolicyKind) else PolicyKind.from_name(str(kind))


def simulate(trace: Sequence[TraceRequest], kind, *, size_frac: float | None = None,
             size_blocks: int | None = None, dirty: DirtyModel | None = None,
             config_overrides: dict | None = None,
             expand_block_size: int | None = None) -> SimResult:
    """Replay a trace against one policy and collect counters."""
    kind = _policy_kind(kind)
    if expand_block_size is not None:
        trace = expand_multiblock(trace, expand_block_size)
    meta = compute_meta(trace)
    total = resolve_total_blocks(size_frac, size_blocks, meta.footprint)
    config = PolicyConfig.for_kind(kind, total, **(config_overrides or {}))
    state = PolicyState(kind, config)

    dirty = dirty or DirtyModel(enabled=False)
    dirty.validate()
    dirty_on = dirty.enabled
    age_on = dirty_on and dirty.flush_age_sec is not None and meta.has_timestamps
    res = SimResult(policy=kind.value, total_blocks=total)
    res.time_flush_disabled = (dirty_on and dirty.flush_age_sec is not None
                               and not meta.has_timestamps)

    low_blocks = dirty.low_watermark * total
    high_blocks = dirty.high_watermark * total
    dirty_since: dict[int, tuple[int, int]] = {}
    dirty_heap: list[tuple[int, int, int]] = []

    hist = res.skipped_ref_histogram

    def flush_oldest() -> None:
        while dirty_heap:
            t, idx, key = heapq.heappop(dirty_heap)
            if dirty_since.get(key) != (t, idx):
                continue
            cleaned = state.flush_block(key)
            assert cleaned, f"dirty registry out of sync for block {key}"
            del dirty_since[key]
            return
        raise AssertionError("dirty registry empty during flush")

    def absorb(events) -> None:
        for ev in events:
            res.skipped_dirty_total += ev.skipped_dirty
            if ev.source is Region.MAIN:
                res.main_evictions += 1
                hist[ev.skipped_ref] = hist.get(ev.skipped_ref, 0) + 1
            else:
                res.small_dirty_recirculations += ev.skipped_dirty
                if ev.destination is Destination.MAIN:
                    res.flow_small_to_main += 1
                elif ev.destination is Destination.GHOST:
                    res.flow_small_to_ghost += 1
                elif ev.destination is Destination.DISCARD:
                    res.flow_small_discard += 1
                else:
                    res.giveups += 1

    for i, req in enumerate(trace):
        now = req.time_sec
        if dirty_on and dirty_since:
            if len(dirty_since) > high_blocks:
                while len(dirty_since) > low_blocks:
                    flush_oldest()
                    res.flushes_watermark += 1
            if age_on:
                cutoff = now - dirty.flush_age_sec
                while dirty_heap:
                    t, idx, key = dirty_heap[0]
                    if dirty_since.get(key) != (t, idx):
                        heapq.heappop(dirty_heap)
                        continue
                    if t >= cutoff:
                        break
                    flush_oldest()
                    res.flushes_time += 1

        is_write = dirty_on and req.op == WRITE
        try:
            outcome = state.access(req.lbn, is_write)
        except EvictionImpossible:
            # every candidate is dirty: clean everything, then retry
            while dirty_since:
                flush_oldest()
                res.flushes_watermark += 1
            outcome = state.access(req.lbn, is_write)

        res.requests += 1
        if outcome.kind.is_hit:
            res.hits += 1
        else:
            res.misses += 1
            if outcome.kind is OutcomeKind.MISS_GHOST_HIT:
                res.ghost_hits += 1
                res.flow_ghost_to_main += 1
        if outcome.evictions:
            absorb(outcome.evictions)
        if is_write and req.lbn not in dirty_since:
            stamp = (now, i)
            dirty_since[req.lbn] = stamp
            heapq.heappush(dirty_heap, (now, i, req.lbn))

    res.miss_ratio = res.misses / res.requests if res.requests else 0.0
    return res


def sweep_sizes(trace: Sequence[TraceRequest], kind, fracs: Sequence[float] = DEFAULT_SIZE_FRACS,
                dirty: DirtyModel | None = None, **kwargs) -> list[tuple[float, SimResult]]:
    """One simulation per footprint fraction (defaults to the standard four)."""
    if not fracs:
        raise ConfigError("fracs", "must be non-empty")
    return [(f, simulate(trace, kind, size_frac=f, dirty=dirty, **kwargs)) for f in fracs]


def dirty_mode_delta(trace: Sequence[TraceRequest], *, size_frac: float | None = None,
                     size_blocks: int | None = None, dirty: DirtyModel | None = None,
                     config_overrides: dict | None = None):
    """Compare the two dirty-handling variants of the windowed policy.

    skip-in-place leaves a dirty ref-set small entry where it is;
    move-to-main promotes it. Returns ``(skip_result, move_result,
    delta)`` where delta is the relative miss-ratio improvement of skip
    over move (positive means skip is better).
    """
    dirty = dirty or DirtyModel(enabled=True)
    base = dict(config_overrides or {})
    base["dirty_promote"] = False
    skip = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_frac=size_frac,
                    size_blocks=size_blocks, dirty=dirty, config_overrides=base)
    base["dirty_promote"] = True
    move = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_frac=size_frac,
                    size_blocks=size_blocks, dirty=dirty, config_overrides=base)
    if move.miss_ratio > 0:
        delta = (move.miss_ratio - skip.miss_ratio) / move.miss_ratio
    else:
        delta = 0.0
    return skip, move, delta

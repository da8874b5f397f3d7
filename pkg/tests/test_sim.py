import json
import random

import pytest

from clock2q.policy import ConfigError, Destination, PolicyKind, PolicyState, Region
from clock2q.sim import DEFAULT_SIZE_FRACS, DirtyModel, SimResult, dirty_mode_delta, simulate, sweep_sizes
from clock2q.trace import READ, WRITE, TraceRequest, generate_zipf


def reads(lbns, times=None):
    return [TraceRequest(0 if times is None else times[i], lbn, READ)
            for i, lbn in enumerate(lbns)]


def test_single_block_repeated():
    trace = reads([7] * 100)
    for kind in PolicyKind:
        r = simulate(trace, kind, size_blocks=10)
        assert (r.misses, r.miss_ratio) == (1, 0.01), kind


def test_cyclic_scan_thrashes_clock():
    trace = reads(list(range(50)) * 10)
    r = simulate(trace, PolicyKind.CLOCK, size_blocks=20)
    assert r.miss_ratio == 1.0


def test_size_resolution_from_footprint():
    trace = reads(list(range(1000)))
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_frac=0.05)
    assert r.total_blocks == 50
    with pytest.raises(ConfigError):
        simulate(trace, PolicyKind.CLOCK, size_frac=0.001)   # resolves below 2
    with pytest.raises(ConfigError):
        simulate(trace, PolicyKind.CLOCK)                    # no size at all
    with pytest.raises(ConfigError):
        simulate(trace, PolicyKind.CLOCK, size_frac=0.1, size_blocks=10)


def test_accounting_identity_and_flow_conservation():
    trace = generate_zipf(30_000, 1.0, 3000, seed=4, write_frac=0.3)
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_frac=0.03,
                 dirty=DirtyModel(enabled=True))
    assert r.hits + r.misses == r.requests == 30_000
    assert r.miss_ratio == pytest.approx(r.misses / r.requests)
    assert r.ghost_hits <= r.misses
    assert r.ghost_hits == r.flow_ghost_to_main
    assert r.small_evictions_attempted == (
        r.flow_small_to_main + r.flow_small_to_ghost + r.flow_small_discard
        + r.giveups + r.small_dirty_recirculations)


def test_flow_counters_match_event_stream():
    trace = generate_zipf(20_000, 0.9, 2000, seed=11, write_frac=0.2)
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=60,
                 dirty=DirtyModel(enabled=True))
    # independent recount through the policy machine with the same flush
    # schedule is impractical; instead recount via a second simulate call
    # (determinism) and via raw policy replay without the dirty model
    r2 = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=60,
                  dirty=DirtyModel(enabled=True))
    assert r.to_dict() == r2.to_dict()

    clean = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=60)
    st = PolicyState.new(PolicyKind.CLOCK2Q_PLUS, 60)
    s2m = s2g = g2m = 0
    for req in trace:
        out = st.access(req.lbn)
        if out.kind.value == "miss_ghost_hit":
            g2m += 1
        for ev in out.evictions:
            if ev.source is Region.SMALL and ev.destination is Destination.MAIN:
                s2m += 1
            elif ev.source is Region.SMALL and ev.destination is Destination.GHOST:
                s2g += 1
    assert (clean.flow_small_to_main, clean.flow_small_to_ghost, clean.flow_ghost_to_main) \
        == (s2m, s2g, g2m)


def test_dirty_disabled_write_equals_read():
    rng = random.Random(3)
    lbns = [rng.randrange(500) for _ in range(20_000)]
    mixed = [TraceRequest(0, lbn, WRITE if rng.random() < 0.4 else READ) for lbn in lbns]
    pure = reads(lbns)
    a = simulate(mixed, PolicyKind.CLOCK2Q_PLUS, size_blocks=40)
    b = simulate(pure, PolicyKind.CLOCK2Q_PLUS, size_blocks=40)
    assert a.miss_ratio == b.miss_ratio and a.misses == b.misses


def test_watermark_flushing_enforces_low_mark():
    # every request writes a fresh block; watermarks keep dirty bounded
    n = 400
    trace = [TraceRequest(0, i, WRITE) for i in range(n)]
    dirty = DirtyModel(enabled=True, flush_age_sec=None,
                       low_watermark=0.10, high_watermark=0.20)
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=100, dirty=dirty)
    assert r.flushes_watermark > 0
    assert r.flushes_time == 0


def test_time_flushing_with_timestamps():
    # one write at t=0, reads until t=40: the 30 s age flush must fire
    trace = [TraceRequest(0, 1, WRITE)] + [TraceRequest(t, 2 + t, READ)
                                           for t in range(1, 41)]
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=100,
                 dirty=DirtyModel(enabled=True))
    assert r.flushes_time == 1
    assert r.time_flush_disabled is False


def test_time_flushing_disabled_without_timestamps():
    trace = [TraceRequest(0, i, WRITE) for i in range(50)]
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=200,
                 dirty=DirtyModel(enabled=True))
    assert r.time_flush_disabled is True
    assert r.flushes_time == 0


def test_sweep_defaults_and_lru_stack_property():
    trace = generate_zipf(40_000, 0.8, 4000, seed=6)
    results = sweep_sizes(trace, PolicyKind.LRU)
    assert [f for f, _ in results] == list(DEFAULT_SIZE_FRACS)
    ratios = [r.miss_ratio for _, r in results]
    assert ratios == sorted(ratios, reverse=True)   # non-increasing in size


def test_sweep_single_frac_equals_simulate():
    trace = generate_zipf(5000, 1.0, 500, seed=2)
    [(frac, swept)] = sweep_sizes(trace, PolicyKind.CLOCK, fracs=[0.05])
    direct = simulate(trace, PolicyKind.CLOCK, size_frac=0.05)
    assert swept.to_dict() == direct.to_dict()
    with pytest.raises(ConfigError):
        sweep_sizes(trace, PolicyKind.CLOCK, fracs=[])


def test_dirty_mode_delta_read_only_is_zero():
    trace = generate_zipf(10_000, 1.0, 1000, seed=8)
    skip, move, delta = dirty_mode_delta(trace, size_frac=0.05)
    assert delta == 0.0
    assert skip.miss_ratio == move.miss_ratio


def test_dirty_mode_delta_deterministic_with_writes():
    trace = generate_zipf(20_000, 1.0, 2000, seed=9, write_frac=0.3)
    a = dirty_mode_delta(trace, size_frac=0.05)
    b = dirty_mode_delta(trace, size_frac=0.05)
    assert a[2] == b[2]
    assert a[0].to_dict() == b[0].to_dict()


def test_eviction_impossible_triggers_flush_and_retry():
    # cache of 2, both blocks written: the third insert cannot evict until
    # the simulator flushes
    trace = [TraceRequest(0, 1, WRITE), TraceRequest(0, 2, WRITE),
             TraceRequest(0, 3, WRITE)]
    dirty = DirtyModel(enabled=True, flush_age_sec=None,
                       low_watermark=1.0, high_watermark=1.0)
    r = simulate(trace, PolicyKind.CLOCK, size_blocks=2, dirty=dirty)
    assert r.requests == 3 and r.misses == 3
    assert r.flushes_watermark >= 1


def test_result_serialization():
    trace = reads([1, 2, 1, 3])
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=4)
    row = r.to_kv_row()
    assert row.startswith("policy=clock2q+,")
    for name in ("requests=4", "miss_ratio=", "skipped_ref_histogram=",
                 "flow_small_to_main="):
        assert name in row
    doc = json.loads(r.to_json())
    assert doc["requests"] == 4 and doc["policy"] == "clock2q+"
    assert isinstance(doc["skipped_ref_histogram"], dict)


def test_mean_skipped_ref_stays_small_on_zipf():
    # measured 3.0-3.9 across seeds 10-12 at fracs 0.01-0.1; bound at 5
    trace = generate_zipf(40_000, 1.0, 4000, seed=10)
    r = simulate(trace, PolicyKind.CLOCK2Q_PLUS, size_frac=0.05)
    assert r.main_evictions > 0
    assert r.mean_skipped_ref < 5.0
    # the windowed policy keeps more hot blocks in main, so its hand
    # skips more ref-set entries than plain ref-bit admission does
    s3 = simulate(trace, PolicyKind.S3FIFO_1BIT, size_frac=0.05)
    assert r.mean_skipped_ref > s3.mean_skipped_ref


def test_expand_block_size_flag():
    trace = [TraceRequest(0, 0, READ, 4096 * 4)]
    r = simulate(trace, PolicyKind.CLOCK, size_blocks=8, expand_block_size=4096)
    assert r.requests == 4

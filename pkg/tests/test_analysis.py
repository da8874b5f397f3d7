import math
import random

import pytest

from clock2q.analysis import (
    COMPARE_HEADER,
    NEVER,
    NrdHistogram,
    UndefinedBaseline,
    compare_report,
    improvement,
    miss_ratio_curve,
    next_access_index,
    nrd_report,
    rows_to_csv,
)
from clock2q.policy import PolicyKind
from clock2q.sim import simulate
from clock2q.trace import READ, TraceRequest, generate_correlated, generate_zipf


def reads(lbns):
    return [TraceRequest(0, lbn, READ) for lbn in lbns]


# ----------------------------------------------------------------------
# improvement metric

def test_improvement_arithmetic():
    assert improvement(0.4, 0.3).value == pytest.approx(0.25)
    assert improvement(0.37, 0.37).value == 0.0
    assert improvement(0.2, 0.25).value == pytest.approx(-0.25)
    assert improvement(0.5, 0.0).value == 1.0


def test_improvement_sign_tracks_difference():
    rng = random.Random(0)
    for _ in range(200):
        a = rng.uniform(0.01, 1.0)
        b = rng.uniform(0.0, 1.0)
        v = improvement(a, b).value
        assert v <= 1.0
        assert math.copysign(1, v) == math.copysign(1, a - b) or v == 0


def test_improvement_zero_baseline_rejected():
    with pytest.raises(UndefinedBaseline):
        improvement(0.0, 0.1)
    with pytest.raises(ValueError):
        improvement(0.4, 1.5)


# ----------------------------------------------------------------------
# next access oracle

def brute_force_next_access(lbns):
    out = []
    for i, lbn in enumerate(lbns):
        nxt = NEVER
        for j in range(i + 1, len(lbns)):
            if lbns[j] == lbn:
                nxt = j
                break
        out.append(nxt)
    return out


@pytest.mark.parametrize("seed", range(4))
def test_reverse_scan_matches_quadratic_search(seed):
    rng = random.Random(seed)
    lbns = [rng.randrange(40) for _ in range(800)]
    assert next_access_index(lbns) == brute_force_next_access(lbns)


def test_nrd_histogram_binning():
    h = NrdHistogram()
    for d in (1, 2, 3, 4, 1024, NEVER):
        h.add(d)
    assert h.bins == {0: 1, 1: 2, 2: 1, 10: 1}
    assert h.never == 1 and h.total == 6
    with pytest.raises(ValueError):
        h.add(0)


def test_nrd_no_repeats_all_never():
    trace = reads(list(range(300)))
    report = nrd_report(trace, PolicyKind.CLOCK2Q_PLUS, size_blocks=20)
    assert report.to_main.total == 0
    assert report.to_ghost.never == report.to_ghost.total > 0
    assert report.to_ghost.bins == {}


def test_nrd_mass_matches_flow_counters():
    trace = generate_zipf(20_000, 1.0, 2000, seed=3)
    for kind in (PolicyKind.CLOCK2Q_PLUS, PolicyKind.S3FIFO_1BIT):
        report = nrd_report(trace, kind, size_frac=0.05)
        result = simulate(trace, kind, size_frac=0.05)
        assert report.to_main.total == result.flow_small_to_main
        assert report.to_ghost.total == result.flow_small_to_ghost


def test_nrd_window_routes_never_reused_blocks_to_ghost():
    base = generate_zipf(30_000, 1.0, 3000, seed=5)
    trace = generate_correlated(base, burst_k=3, burst_span=5, fraction=0.5, seed=6)
    windowed = nrd_report(trace, PolicyKind.CLOCK2Q_PLUS, size_frac=0.01)
    plain = nrd_report(trace, PolicyKind.S3FIFO_1BIT, size_frac=0.01)

    def ghost_share_of_never(report):
        never_total = report.to_main.never + report.to_ghost.never
        return report.to_ghost.never / never_total

    assert ghost_share_of_never(windowed) > ghost_share_of_never(plain)


# ----------------------------------------------------------------------
# tables

def test_curve_single_cell_reduces_to_simulate():
    trace = generate_zipf(5000, 1.0, 500, seed=1)
    rows = miss_ratio_curve(trace, [PolicyKind.CLOCK], [0.05])
    direct = simulate(trace, PolicyKind.CLOCK, size_frac=0.05)
    assert rows == [("clock", 0.05, direct.miss_ratio)]


def test_curve_row_count_and_lru_monotonicity():
    trace = generate_zipf(20_000, 0.8, 2000, seed=2)
    sizes = [0.01, 0.05, 0.1]
    rows = miss_ratio_curve(trace, [PolicyKind.LRU, PolicyKind.CLOCK], sizes)
    assert len(rows) == 6
    lru = [r[2] for r in rows if r[0] == "lru"]
    assert lru == sorted(lru, reverse=True)
    with pytest.raises(ValueError):
        miss_ratio_curve(trace, [PolicyKind.LRU], [0.1, 0.01])


def test_compare_report_clock_row_zero_and_determinism():
    trace = generate_zipf(10_000, 1.0, 1000, seed=7)
    rows = compare_report(trace, sizes=[0.05])
    assert len(rows) == len(PolicyKind)
    clock_row = next(r for r in rows if r[0] == "clock")
    assert clock_row[3] == 0.0
    assert rows == compare_report(trace, sizes=[0.05])


def test_compare_csv_header():
    trace = generate_zipf(2000, 1.0, 300, seed=8)
    rows = compare_report(trace, sizes=[0.05], kinds=[PolicyKind.CLOCK])
    csv = rows_to_csv(COMPARE_HEADER, rows)
    assert csv.splitlines()[0] == "policy,size_frac,miss_ratio,improvement,s2m,s2g,g2m"
    assert len(csv.splitlines()) == 2

"""Evaluation analyses over simulator outputs.

Provides the miss-ratio improvement metric against the clock baseline,
miss-ratio curves across cache sizes, policy comparison tables, and
next-reuse-distance (NRD) histograms of blocks departing the small
FIFO. All tables are plain rows with stable CSV headers; plotting is
out of scope (an optional script emitter is provided for convenience).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .policy import Destination, PolicyConfig, PolicyKind, PolicyState, Region
from .sim import DEFAULT_SIZE_FRACS, DirtyModel, SimResult, resolve_total_blocks, simulate
from .trace import TraceRequest, compute_meta

COMPARE_HEADER = ("policy", "size_frac", "miss_ratio", "improvement", "s2m", "s2g", "g2m")
CURVE_HEADER = ("policy", "size_frac", "miss_ratio")


class UndefinedBaseline(ValueError):
    """The clock baseline miss ratio is zero; improvement is undefined."""


@dataclass(frozen=True)
class Improvement:
    mr_clock: float
    mr_algo: float
    value: float


def improvement(mr_clock: float, mr_algo: float) -> Improvement:
    """Relative miss-ratio improvement over the clock baseline:
    (mr_clock - mr_algo) / mr_clock. Negative when the algorithm is
    worse than the baseline."""
    if not 0.0 <= mr_algo <= 1.0:
        raise ValueError(f"mr_algo must be in [0, 1], got {mr_algo}")
    if not 0.0 < mr_clock <= 1.0:
        if mr_clock == 0.0:
            raise UndefinedBaseline("baseline miss ratio is 0")
        raise ValueError(f"mr_clock must be in (0, 1], got {mr_clock}")
    return Improvement(mr_clock, mr_algo, (mr_clock - mr_algo) / mr_clock)


# ----------------------------------------------------------------------
# next reuse distance

NEVER = -1


@dataclass
class NrdHistogram:
    """Log2-binned histogram of next-reuse distances plus a NEVER bucket.

    ``bins[k]`` counts distances in [2**k, 2**(k+1)).
    """

    bins: dict[int, int] = field(default_factory=dict)
    never: int = 0

    @property
    def total(self) -> int:
        return self.never + sum(self.bins.values())

    def add(self, distance: int) -> None:
        if distance == NEVER:
            self.never += 1
            return
        if distance < 1:
            raise ValueError(f"distance must be >= 1 or NEVER, got {distance}")
        k = distance.bit_length() - 1
        self.bins[k] = self.bins.get(k, 0) + 1

    def never_fraction(self) -> float:
        return self.never / self.total if self.total else 0.0


@dataclass
class NrdReport:
    policy: str
    total_blocks: int
    to_main: NrdHistogram = field(default_factory=NrdHistogram)
    to_ghost: NrdHistogram = field(default_factory=NrdHistogram)


def next_access_index(lbns: Sequence[int]) -> list[int]:
    """For each position, the index of the next access to the same
    block, or NEVER. Single reverse scan."""
    nxt = [NEVER] * len(lbns)
    last_seen: dict[int, int] = {}
    for i in range(len(lbns) - 1, -1, -1):
        lbn = lbns[i]
        nxt[i] = last_seen.get(lbn, NEVER)
        last_seen[lbn] = i
    return nxt


def nrd_report(trace: Sequence[TraceRequest], kind, *, size_frac: float | None = None,
               size_blocks: int | None = None,
               config_overrides: dict | None = None) -> NrdReport:
    """Histogram the next-reuse distance of every block leaving the
    small FIFO, split by destination (main queue or ghost FIFO).

    Distance is counted in requests from the departure to the departed
    block's next access. Runs with the dirty model off, so departures
    go only to the main queue or the ghost FIFO.
    """
    kind = kind if isinstance(kind, PolicyKind) else PolicyKind.from_name(str(kind))
    meta = compute_meta(trace)
    total = resolve_total_blocks(size_frac, size_blocks, meta.footprint)
    state = PolicyState(kind, PolicyConfig.for_kind(kind, total, **(config_overrides or {})))

    lbns = [r.lbn for r in trace]
    nxt = next_access_index(lbns)
    last_access: dict[int, int] = {}
    report = NrdReport(policy=kind.value, total_blocks=total)

    for i, lbn in enumerate(lbns):
        outcome = state.access(lbn)
        for ev in outcome.evictions:
            if ev.source is not Region.SMALL:
                continue
            if ev.destination is Destination.MAIN:
                hist = report.to_main
            elif ev.destination is Destination.GHOST:
                hist = report.to_ghost
            else:
                continue
            q = nxt[last_access[ev.key]]
            hist.add(q - i if q != NEVER else NEVER)
        last_access[lbn] = i
    return report


# ----------------------------------------------------------------------
# tables

def miss_ratio_curve(trace: Sequence[TraceRequest], kinds: Sequence, sizes: Sequence[float],
                     dirty: DirtyModel | None = None,
                     **kwargs) -> list[tuple[str, float, float]]:
    """(policy, size_frac, miss_ratio) rows for every kind at every size."""
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be sorted ascending")
    rows = []
    for kind in kinds:
        for frac in sizes:
            result = simulate(trace, kind, size_frac=frac, dirty=dirty, **kwargs)
            rows.append((result.policy, frac, result.miss_ratio))
    return rows


def compare_report(trace: Sequence[TraceRequest], sizes: Sequence[float] = DEFAULT_SIZE_FRACS,
                   kinds: Sequence | None = None, dirty: DirtyModel | None = None,
                   **kwargs) -> list[tuple]:
    """Improvement over the clock baseline for every policy at every
    size, with small-FIFO flow counts. Row layout matches
    ``COMPARE_HEADER``."""
    kinds = list(kinds) if kinds is not None else list(PolicyKind)
    rows = []
    for frac in sizes:
        baseline = simulate(trace, PolicyKind.CLOCK, size_frac=frac, dirty=dirty, **kwargs)
        results: list[SimResult] = []
        for kind in kinds:
            if (kind if isinstance(kind, PolicyKind) else PolicyKind.from_name(str(kind))) is PolicyKind.CLOCK:
                results.append(baseline)
            else:
                results.append(simulate(trace, kind, size_frac=frac, dirty=dirty, **kwargs))
        for result in results:
            if baseline.miss_ratio > 0:
                imp = improvement(baseline.miss_ratio, result.miss_ratio).value
            else:
                imp = float("nan")
            rows.append((result.policy, frac, result.miss_ratio, imp,
                         result.flow_small_to_main, result.flow_small_to_ghost,
                         result.flow_ghost_to_main))
    return rows


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(format(cell, ".6g"))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


_PLOT_TEMPLATE = '''"""Plot {what} from {csv_path} (auto-generated helper)."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(list)
with open({csv_path!r}) as fh:
    for row in csv.DictReader(fh):
        series[row["policy"]].append((float(row["size_frac"]), float(row["{ycol}"])))

for policy, points in series.items():
    points.sort()
    plt.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=policy)
plt.xscale("log")
plt.xlabel("cache size (fraction of footprint)")
plt.ylabel("{ycol}")
plt.legend()
plt.tight_layout()
plt.savefig({png_path!r}, dpi=150)
print("wrote", {png_path!r})
'''


def plot_script(csv_path: str, ycol: str = "miss_ratio") -> str:
    """Emit a matplotlib script for a curve or comparison CSV."""
    png_path = csv_path.rsplit(".", 1)[0] + ".png"
    return _PLOT_TEMPLATE.format(what=ycol, csv_path=csv_path, ycol=ycol, png_path=png_path)

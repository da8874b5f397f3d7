"""Replacement-policy state machines for block caches.

This module implements a family of related eviction algorithms as
deterministic single-threaded state machines:

* plain LRU, FIFO, and Clock over a single main queue,
* 2Q: a small probationary FIFO in front of a main LRU, plus a ghost
  FIFO that remembers recently evicted block numbers,
* Clock2Q: 2Q with the main LRU replaced by a clock,
* S3-FIFO: the Clock2Q layout with a ref bit (or 2-bit frequency
  counter) in the small FIFO that promotes re-referenced blocks
  directly into the main clock,
* Clock2Q+: S3-FIFO plus a correlation window covering the most recent
  insertions into the small FIFO; re-references inside the window do
  not set the ref bit, so short bursts of accesses to the same block
  are not mistaken for hotness.

Queues are modeled the way a production array implementation works.
The small FIFO and the ghost FIFO are rotating arrays addressed by a
single index that serves as both head and tail once the queue is full;
the main clock is an array walked by a hand. Eviction and insertion
are paired, so a full queue stays full.

Blocks are unit-size and identified by an integer block number.
Writes mark entries dirty. Dirty entries are never evicted: eviction
scans skip them (equivalent to reinserting them at the head) until a
caller cleans them with ``flush_block``. A small-FIFO scan that runs
into too many consecutive dirty entries gives up and routes the new
block directly into the main queue.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum

BlockId = int


class PolicyKind(Enum):
    LRU = "lru"
    FIFO = "fifo"
    CLOCK = "clock"
    TWO_Q = "2q"
    CLOCK2Q = "clock2q"
    S3FIFO_1BIT = "s3fifo1"
    S3FIFO_2BIT = "s3fifo2"
    CLOCK2Q_PLUS = "clock2q+"

    @classmethod
    def from_name(cls, name: str) -> "PolicyKind":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ConfigError("policy", f"unknown policy {name!r} (one of: {valid})") from None


class MainDiscipline(Enum):
    CLOCK = "clock"
    LRU = "lru"
    FIFO = "fifo"


# kind -> (small_frac, ghost_frac, window_frac, freq_bits, main discipline)
_KIND_DEFAULTS = {
    PolicyKind.LRU: (0.0, 0.0, 0.0, 1, MainDiscipline.LRU),
    PolicyKind.FIFO: (0.0, 0.0, 0.0, 1, MainDiscipline.FIFO),
    PolicyKind.CLOCK: (0.0, 0.0, 0.0, 1, MainDiscipline.CLOCK),
    PolicyKind.TWO_Q: (0.25, 0.50, 1.0, 1, MainDiscipline.LRU),
    PolicyKind.CLOCK2Q: (0.25, 0.50, 1.0, 1, MainDiscipline.CLOCK),
    PolicyKind.S3FIFO_1BIT: (0.10, 1.00, 0.0, 1, MainDiscipline.CLOCK),
    PolicyKind.S3FIFO_2BIT: (0.10, 1.00, 0.0, 2, MainDiscipline.CLOCK),
    PolicyKind.CLOCK2Q_PLUS: (0.10, 0.50, 0.5, 1, MainDiscipline.CLOCK),
}

_SINGLE_QUEUE = (PolicyKind.LRU, PolicyKind.FIFO, PolicyKind.CLOCK)
# 2Q and Clock2Q never set ref bits in the small FIFO and never promote
# small evictees into the main queue.
_NO_PROMOTE = (PolicyKind.TWO_Q, PolicyKind.CLOCK2Q)


class ConfigError(ValueError):
    """A configuration field is out of range. ``field`` names it."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class EvictionImpossible(RuntimeError):
    """Every eviction candidate in the main queue is dirty.

    The caller must clean some blocks (see ``flush_block``) and retry.
    """


class StateError(RuntimeError):
    """An operation was called outside its contract (internal misuse)."""


def round_half_up(x: float) -> int:
    return int(x + 0.5)


@dataclass(frozen=True)
class PolicyConfig:
    """Sizing knobs for one policy instance.

    ``small_frac``, ``ghost_frac`` and ``window_frac`` are fractions of
    the total block count (window_frac is a fraction of the small FIFO).
    ``reinsertion_limit`` bounds how many ref-set entries one main-clock
    eviction may skip; None means unbounded. ``dirty_scan_cap`` bounds
    how many dirty entries a small-FIFO eviction scan may skip before it
    gives up; None picks min(small_size, 20). ``dirty_promote`` allows a
    dirty ref-set small entry to move to the main queue instead of
    staying in place.
    """

    total_blocks: int
    small_frac: float
    ghost_frac: float
    window_frac: float
    freq_bits: int = 1
    reinsertion_limit: int | None = None
    dirty_scan_cap: int | None = None
    dirty_promote: bool = False

    @classmethod
    def for_kind(cls, kind: PolicyKind, total_blocks: int, **overrides) -> "PolicyConfig":
        small_frac, ghost_frac, window_frac, freq_bits, _ = _KIND_DEFAULTS[kind]
        values = dict(
            total_blocks=total_blocks,
            small_frac=small_frac,
            ghost_frac=ghost_frac,
            window_frac=window_frac,
            freq_bits=freq_bits,
        )
        values.update(overrides)
        return cls(**values)

    def validate(self, kind: PolicyKind | None = None) -> None:
        if self.total_blocks < 2:
            raise ConfigError("total_blocks", f"must be >= 2, got {self.total_blocks}")
        if not 0.0 <= self.small_frac <= 1.0:
            raise ConfigError("small_frac", f"must be in [0, 1], got {self.small_frac}")
        if not 0.0 <= self.ghost_frac <= 2.0:
            raise ConfigError("ghost_frac", f"must be in [0, 2], got {self.ghost_frac}")
        if not 0.0 <= self.window_frac <= 1.0:
            raise ConfigError("window_frac", f"must be in [0, 1], got {self.window_frac}")
        if self.freq_bits not in (1, 2):
            raise ConfigError("freq_bits", f"must be 1 or 2, got {self.freq_bits}")
        if self.reinsertion_limit is not None and self.reinsertion_limit < 1:
            raise ConfigError("reinsertion_limit", "must be a positive count or None")
        if self.dirty_scan_cap is not None and self.dirty_scan_cap < 1:
            raise ConfigError("dirty_scan_cap", "must be a positive count or None")
        if kind in _SINGLE_QUEUE and self.small_frac != 0.0:
            raise ConfigError("small_frac", f"must be 0 for {kind.value}")
        if kind in _SINGLE_QUEUE and self.ghost_frac != 0.0:
            raise ConfigError("ghost_frac", f"must be 0 for {kind.value}")

    def sizes(self) -> tuple[int, int, int, int]:
        """Resolve (small, main, ghost, window) sizes in blocks.

        Half-up rounding; the main queue is clamped to at least one
        block, and a nonzero small_frac yields at least one small slot.
        """
        total = self.total_blocks
        small = round_half_up(self.small_frac * total)
        if self.small_frac > 0.0:
            small = max(1, small)
        main = total - small
        if main < 1:
            main = 1
            small = total - 1
        ghost = round_half_up(self.ghost_frac * total)
        window = round_half_up(self.window_frac * small)
        return small, main, ghost, window


class OutcomeKind(Enum):
    HIT_MAIN = "hit_main"
    HIT_SMALL_IN_WINDOW = "hit_small_in_window"
    HIT_SMALL_OUT_WINDOW = "hit_small_out_window"
    MISS_GHOST_HIT = "miss_ghost_hit"
    MISS_COLD = "miss_cold"

    @property
    def is_hit(self) -> bool:
        return self in (
            OutcomeKind.HIT_MAIN,
            OutcomeKind.HIT_SMALL_IN_WINDOW,
            OutcomeKind.HIT_SMALL_OUT_WINDOW,
        )


class Region(Enum):
    SMALL = "small"
    MAIN = "main"


class Destination(Enum):
    MAIN = "main"
    GHOST = "ghost"
    DISCARD = "discard"
    GIVE_UP = "give_up"


@dataclass(slots=True)
class EvictionEvent:
    """One departure decision. ``key`` is None for a give-up event."""

    key: BlockId | None
    source: Region
    destination: Destination
    skipped_ref: int = 0
    skipped_dirty: int = 0

    def as_tuple(self):
        return (self.key, self.source.value, self.destination.value,
                self.skipped_ref, self.skipped_dirty)


@dataclass(slots=True)
class AccessOutcome:
    kind: OutcomeKind
    evictions: list[EvictionEvent]


@dataclass
class QueueSnapshot:
    """Read-only view of queue contents, oldest first."""

    small_keys: list[BlockId]
    small_in_window: list[bool]
    small_ref: list[int]
    small_dirty: list[bool]
    main_keys: list[BlockId]
    main_ref: list[int]
    main_dirty: list[bool]
    ghost_keys: list[BlockId]
    hand: int | None
    window_size: int


class _Slot:
    __slots__ = ("key", "freq", "dirty", "seq")

    def __init__(self, key: int, freq: int, dirty: bool, seq: int):
        self.key = key
        self.freq = freq
        self.dirty = dirty
        self.seq = seq


_LRU_LOC = 1 << 62  # index marker for residents of an LRU main queue


class PolicyState:
    """Single-threaded policy state machine over flat arrays.

    Callers must externally serialize access. Construct through
    ``new_policy`` (or ``PolicyState.new``) so the configuration is
    validated and sized.
    """

    def __init__(self, kind: PolicyKind, config: PolicyConfig):
        config.validate(kind)
        self.kind = kind
        self.config = config
        small, main, ghost, window = config.sizes()
        self.small_size = small
        self.main_size = main
        self.ghost_size = ghost
        # 2Q and Clock2Q take no action on a small-FIFO hit; modeled as
        # a window covering the whole small FIFO.
        self.window_size = small if kind in _NO_PROMOTE else window

        _, _, _, _, disc = _KIND_DEFAULTS[kind]
        self._disc = disc
        self._freq_max = 3 if config.freq_bits == 2 else 1
        if kind in _NO_PROMOTE or kind in _SINGLE_QUEUE:
            self._promote_min: int | None = None
        else:
            self._promote_min = 2 if config.freq_bits == 2 else 1
        self._reinsert_limit = config.reinsertion_limit
        if config.dirty_scan_cap is not None:
            self._scan_cap = config.dirty_scan_cap
        else:
            self._scan_cap = max(1, min(small, 20)) if small else 1
        self._dirty_promote = config.dirty_promote

        self._index: dict[int, int] = {}
        self._small: list[_Slot | None] = [None] * small
        self._small_next = 0
        self._small_occ = 0
        self._small_hole: int | None = None
        self._win_counter = 0

        if disc is MainDiscipline.LRU:
            self._lru: OrderedDict[int, _Slot] = OrderedDict()
            self._main: list[_Slot | None] = []
        else:
            self._lru = OrderedDict()
            self._main = [None] * main
        self._hand = 0
        self._main_occ = 0
        self._main_hole: int | None = None

        self._ghost: list[int | None] = [None] * ghost
        self._ghost_next = 0
        self._ghost_map: dict[int, int] = {}

    @classmethod
    def new(cls, kind: PolicyKind, total_blocks: int, **overrides) -> "PolicyState":
        return cls(kind, PolicyConfig.for_kind(kind, total_blocks, **overrides))

    # ------------------------------------------------------------------
    # access

    def access(self, key: BlockId, is_write: bool = False) -> AccessOutcome:
        """Apply one request and return its outcome plus any departures."""
        loc = self._index.get(key)
        if loc is not None:
            if loc >= 0:
                if loc == _LRU_LOC:
                    slot = self._lru[key]
                    self._lru.move_to_end(key)
                else:
                    slot = self._main[loc]
                    if self._disc is MainDiscipline.CLOCK:
                        slot.freq = 1
                if is_write:
                    slot.dirty = True
                return AccessOutcome(OutcomeKind.HIT_MAIN, [])
            slot = self._small[-loc - 1]
            if is_write:
                slot.dirty = True
            if self._win_counter - slot.seq <= self.window_size:
                return AccessOutcome(OutcomeKind.HIT_SMALL_IN_WINDOW, [])
            f = slot.freq + 1
            slot.freq = f if f <= self._freq_max else self._freq_max
            return AccessOutcome(OutcomeKind.HIT_SMALL_OUT_WINDOW, [])

        events: list[EvictionEvent] = []
        gpos = self._ghost_map.pop(key, None)
        if gpos is not None:
            self._ghost[gpos] = None
            self._insert_main(key, is_write, events)
            return AccessOutcome(OutcomeKind.MISS_GHOST_HIT, events)

        if self.small_size == 0:
            self._insert_main(key, is_write, events)
            return AccessOutcome(OutcomeKind.MISS_COLD, events)

        self._insert_small(key, is_write, events)
        return AccessOutcome(OutcomeKind.MISS_COLD, events)

    # ------------------------------------------------------------------
    # small FIFO

    def _insert_small(self, key: int, dirty: bool, events: list[EvictionEvent]) -> None:
        if self._small_hole is not None:
            pos = self._small_hole
            self._small_hole = None
        elif self._small_occ < self.small_size:
            pos = self._small_next
        else:
            pos = self._evict_small_scan(events)
            if pos is None:
                # give-up: the new block goes straight into the main queue
                self._insert_main(key, dirty, events)
                return
        self._small[pos] = _Slot(key, 0, dirty, self._win_counter)
        self._win_counter += 1
        self._index[key] = -pos - 1
        self._small_occ += 1
        self._small_next = (pos + 1) % self.small_size

    def _evict_small_scan(self, events: list[EvictionEvent]) -> int | None:
        """Free one small slot, walking from the FIFO tail.

        Returns the freed position, or None after a give-up. Skipped
        dirty entries are logically reinserted at the head: the index
        rotates past them and their window sequence is refreshed.
        """
        small = self._small
        n = self.small_size
        cap = self._scan_cap
        pmin = self._promote_min
        skips = 0
        pos = self._small_next
        while True:
            slot = small[pos]
            if slot.dirty:
                if self._dirty_promote and pmin is not None and slot.freq >= pmin:
                    if self._promote_to_main(slot, skips, events):
                        small[pos] = None
                        self._small_occ -= 1
                        return pos
                    # main queue is all dirty: fall through to a skip
                slot.seq = self._win_counter
                self._win_counter += 1
                pos = (pos + 1) % n
                self._small_next = pos
                skips += 1
                if skips >= cap:
                    events.append(EvictionEvent(None, Region.SMALL, Destination.GIVE_UP, 0, skips))
                    return None
                continue
            key = slot.key
            if pmin is not None and slot.freq >= pmin:
                if not self._promote_to_main(slot, skips, events):
                    # main queue all dirty: the clean promotee is dropped
                    del self._index[key]
                    events.append(EvictionEvent(key, Region.SMALL, Destination.DISCARD, 0, skips))
            else:
                del self._index[key]
                if self.ghost_size > 0:
                    self._ghost_insert(key)
                    events.append(EvictionEvent(key, Region.SMALL, Destination.GHOST, 0, skips))
                else:
                    events.append(EvictionEvent(key, Region.SMALL, Destination.DISCARD, 0, skips))
            small[pos] = None
            self._small_occ -= 1
            return pos

    def _promote_to_main(self, slot: _Slot, skips: int, events: list[EvictionEvent]) -> bool:
        """Move a small-FIFO slot into the main queue; False if no room."""
        key = slot.key
        if self._disc is MainDiscipline.LRU:
            if len(self._lru) >= self.main_size:
                if not self._evict_lru(events, raise_on_stuck=False):
                    return False
            self._lru[key] = _Slot(key, 0, slot.dirty, 0)
            self._index[key] = _LRU_LOC
        else:
            pos = self._claim_main_slot(events, raise_on_stuck=False)
            if pos is None:
                return False
            self._main[pos] = _Slot(key, 0, slot.dirty, 0)
            self._index[key] = pos
            self._main_occ += 1
            self._hand = (pos + 1) % self.main_size
        events.append(EvictionEvent(key, Region.SMALL, Destination.MAIN, 0, skips))
        return True

    # ------------------------------------------------------------------
    # main queue

    def _insert_main(self, key: int, dirty: bool, events: list[EvictionEvent]) -> None:
        if self._disc is MainDiscipline.LRU:
            if len(self._lru) >= self.main_size:
                self._evict_lru(events, raise_on_stuck=True)
            self._lru[key] = _Slot(key, 0, dirty, 0)
            self._index[key] = _LRU_LOC
            return
        pos = self._claim_main_slot(events, raise_on_stuck=True)
        self._main[pos] = _Slot(key, 0, dirty, 0)
        self._index[key] = pos
        self._main_occ += 1
        self._hand = (pos + 1) % self.main_size

    def _claim_main_slot(self, events: list[EvictionEvent], raise_on_stuck: bool) -> int | None:
        if self._main_hole is not None:
            pos = self._main_hole
            self._main_hole = None
            return pos
        if self._main_occ < self.main_size:
            return self._hand
        return self._evict_main_scan(events, raise_on_stuck)

    def _evict_main_scan(self, events: list[EvictionEvent], raise_on_stuck: bool) -> int | None:
        """Clock walk: clear-and-skip ref bits, skip dirty, evict first
        eligible entry. After ``reinsertion_limit`` ref skips the next
        clean entry is force-evicted regardless of its ref bit.
        """
        main = self._main
        n = self.main_size
        limit = self._reinsert_limit
        ref_skips = 0
        dirty_skips = 0
        blocked = 0
        pos = self._hand
        while True:
            if blocked >= n:
                if raise_on_stuck:
                    raise EvictionImpossible(
                        f"all {n} main-queue entries are dirty; flush and retry")
                return None
            slot = main[pos]
            if slot.dirty:
                blocked += 1
                dirty_skips += 1
                pos = (pos + 1) % n
                self._hand = pos
                continue
            if slot.freq > 0 and (limit is None or ref_skips < limit):
                slot.freq = 0
                ref_skips += 1
                blocked = 0
                pos = (pos + 1) % n
                self._hand = pos
                continue
            del self._index[slot.key]
            events.append(EvictionEvent(slot.key, Region.MAIN, Destination.DISCARD,
                                        ref_skips, dirty_skips))
            main[pos] = None
            self._main_occ -= 1
            return pos

    def _evict_lru(self, events: list[EvictionEvent], raise_on_stuck: bool) -> bool:
        dirty_skips = 0
        victim = None
        for k, slot in self._lru.items():
            if slot.dirty:
                dirty_skips += 1
                continue
            victim = k
            break
        if victim is None:
            if raise_on_stuck:
                raise EvictionImpossible(
                    "all main-LRU entries are dirty; flush and retry")
            return False
        del self._lru[victim]
        del self._index[victim]
        events.append(EvictionEvent(victim, Region.MAIN, Destination.DISCARD, 0, dirty_skips))
        return True

    # ------------------------------------------------------------------
    # ghost FIFO

    def _ghost_insert(self, key: int) -> None:
        pos = self._ghost_next
        old = self._ghost[pos]
        if old is not None:
            del self._ghost_map[old]
        self._ghost[pos] = key
        self._ghost_map[key] = pos
        self._ghost_next = (pos + 1) % self.ghost_size

    # ------------------------------------------------------------------
    # standalone eviction operations

    def evict_small(self) -> EvictionEvent:
        """Evict one block from a full small FIFO.

        Normally paired with an insertion inside ``access``; exposed for
        inspection and tests. The freed slot is remembered and reused by
        the next insertion.
        """
        if self.small_size == 0 or self._small_occ < self.small_size or self._small_hole is not None:
            raise StateError("evict_small requires a full small FIFO")
        events: list[EvictionEvent] = []
        pos = self._evict_small_scan(events)
        if pos is not None:
            self._small_hole = pos
        for ev in events:
            if ev.source is Region.SMALL:
                return ev
        raise AssertionError("small eviction produced no small-source event")

    def evict_main(self) -> EvictionEvent:
        """Evict one block from a full main queue (clock or LRU walk)."""
        if self._disc is MainDiscipline.LRU:
            if len(self._lru) < self.main_size:
                raise StateError("evict_main requires a full main queue")
            events: list[EvictionEvent] = []
            self._evict_lru(events, raise_on_stuck=True)
            return events[0]
        if self._main_occ < self.main_size or self._main_hole is not None:
            raise StateError("evict_main requires a full main queue")
        events = []
        pos = self._evict_main_scan(events, raise_on_stuck=True)
        self._main_hole = pos
        return events[0]

    # ------------------------------------------------------------------
    # maintenance and inspection

    def flush_block(self, key: BlockId) -> bool:
        """Clear the dirty flag of a resident block. Position and ref
        bits are unchanged. Returns False for clean or absent keys."""
        loc = self._index.get(key)
        if loc is None:
            return False
        if loc == _LRU_LOC:
            slot = self._lru[key]
        elif loc >= 0:
            slot = self._main[loc]
        else:
            slot = self._small[-loc - 1]
        if slot.dirty:
            slot.dirty = False
            return True
        return False

    def is_dirty(self, key: BlockId) -> bool:
        loc = self._index.get(key)
        if loc is None:
            return False
        if loc == _LRU_LOC:
            return self._lru[key].dirty
        if loc >= 0:
            return self._main[loc].dirty
        return self._small[-loc - 1].dirty

    def __contains__(self, key: BlockId) -> bool:
        return key in self._index

    @property
    def resident_count(self) -> int:
        return len(self._index)

    def snapshot(self) -> QueueSnapshot:
        small_keys: list[int] = []
        small_win: list[bool] = []
        small_ref: list[int] = []
        small_dirty: list[bool] = []
        n = self.small_size
        for i in range(n):
            slot = self._small[(self._small_next + i) % n]
            if slot is None:
                continue
            small_keys.append(slot.key)
            small_win.append(self._win_counter - slot.seq <= self.window_size)
            small_ref.append(slot.freq)
            small_dirty.append(slot.dirty)

        main_keys: list[int] = []
        main_ref: list[int] = []
        main_dirty: list[bool] = []
        if self._disc is MainDiscipline.LRU:
            hand = None
            for k, slot in self._lru.items():
                main_keys.append(k)
                main_ref.append(slot.freq)
                main_dirty.append(slot.dirty)
        else:
            hand = self._hand
            m = self.main_size
            for i in range(m):
                slot = self._main[(self._hand + i) % m]
                if slot is None:
                    continue
                main_keys.append(slot.key)
                main_ref.append(slot.freq)
                main_dirty.append(slot.dirty)

        ghost_keys: list[int] = []
        g = self.ghost_size
        for i in range(g):
            k = self._ghost[(self._ghost_next + i) % g]
            if k is not None:
                ghost_keys.append(k)

        return QueueSnapshot(small_keys, small_win, small_ref, small_dirty,
                             main_keys, main_ref, main_dirty, ghost_keys,
                             hand, self.window_size)

    def audit(self) -> None:
        """Verify structural invariants; raises AssertionError on damage."""
        seen: set[int] = set()
        for key, loc in self._index.items():
            assert key not in seen, f"duplicate index entry for {key}"
            seen.add(key)
            if loc == _LRU_LOC:
                assert self._lru[key].key == key
            elif loc >= 0:
                slot = self._main[loc]
                assert slot is not None and slot.key == key, f"stale main index for {key}"
            else:
                slot = self._small[-loc - 1]
                assert slot is not None and slot.key == key, f"stale small index for {key}"
            assert key not in self._ghost_map, f"{key} resident and ghosted"

        small_count = sum(1 for s in self._small if s is not None)
        assert small_count == self._small_occ <= self.small_size
        if self._disc is not MainDiscipline.LRU:
            main_count = sum(1 for s in self._main if s is not None)
            assert main_count == self._main_occ <= self.main_size
            total = small_count + main_count
        else:
            assert len(self._lru) <= self.main_size
            total = small_count + len(self._lru)
        assert total == len(self._index) <= self.config.total_blocks

        for key, pos in self._ghost_map.items():
            assert self._ghost[pos] == key
        ghost_count = sum(1 for k in self._ghost if k is not None)
        assert ghost_count == len(self._ghost_map) <= self.ghost_size

        # window sequences are strictly increasing in FIFO order and end
        # just below the insertion counter
        if self._small_hole is None and self.small_size:
            seqs = []
            for i in range(self.small_size):
                slot = self._small[(self._small_next + i) % self.small_size]
                if slot is not None:
                    seqs.append(slot.seq)
                    assert 0 <= slot.freq <= self._freq_max
            assert seqs == sorted(seqs)
            if self._small_occ == self.small_size and seqs:
                assert seqs == list(range(self._win_counter - len(seqs), self._win_counter))


def new_policy(kind: PolicyKind, config: PolicyConfig) -> PolicyState:
    """Build an empty, validated policy state machine."""
    return PolicyState(kind, config)

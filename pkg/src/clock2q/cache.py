"""Thread-safe fixed-capacity block cache with live resizing.

The cache embodies the windowed small-FIFO / main-clock / ghost-FIFO
replacement scheme from ``policy`` in a concurrent form. All storage
is allocated once at construction, sized for ``reserve_max_blocks``,
so steady-state operations never allocate: entries live in flat arrays
for the main clock and the small FIFO, the ghost FIFO is an array of
keys, and the hash index is a bucket array chaining entries through
integer links.

Locking protocol
----------------
Each hash bucket and each cache entry has its own mutex. Lookup locks
the bucket, finds the entry index, releases the bucket, then locks the
entry and verifies the key; a mismatch means the entry was recycled in
between and the lookup retries from the top (the "entry lock first"
order). Insertion and eviction lock the entry first and only then the
affected bucket(s), so no thread ever holds a bucket lock while
acquiring an entry lock. The one place two entry locks are held at
once is small-to-main promotion, always in that order. Chain links are
mutated only under the owning bucket locks, and an entry's key changes
only while the entry is unlinked, which keeps chain walks stable.

A missed block is inserted in the Doing-I/O state and published in the
index before its payload is loaded; the entry lock is dropped for the
whole load and readers of the same key wait on the entry (FIFO wakeup
via the entry condition). Dirty entries are never evicted; small-FIFO
scans give up after a bounded number of dirty skips and fall through
to the main clock.

Resizing is live: new sizes are published first, lookups consult only
the new hash location, and a batched rehash pass migrates entries from
their old bucket. A lookup that misses an entry still sitting in its
old bucket is healed at insertion time, which checks both locations,
moves strays, and lets the caller's retry succeed. Shrinking drains
the array tails, flushing dirty tail blocks through the caller's sink.
"""

from __future__ import annotations

import threading
import time
from dataclasses import replace

from .policy import ConfigError, EvictionImpossible, PolicyConfig, PolicyKind

EMPTY = 0
DOING_IO = 1
RESIDENT = 2

_MIX = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class ContentionError(RuntimeError):
    """Retry budget exhausted; the caller should back off."""


class ResizeBusy(RuntimeError):
    """A resize is already in progress."""


class LoadFailed(RuntimeError):
    """Another thread's loader failed while this thread waited."""


class FlushError(RuntimeError):
    """The flush sink failed; ``flushed`` counts completed writebacks."""

    def __init__(self, message: str, flushed: int):
        super().__init__(message)
        self.flushed = flushed


class RotatingIndex:
    """Monotonic counter with atomic fetch-and-increment; consumers take
    the value modulo the live array length."""

    __slots__ = ("_value", "_lock")

    def __init__(self) -> None:
        self._value = 0
        self._lock = threading.Lock()

    def next(self) -> int:
        with self._lock:
            v = self._value
            self._value = v + 1
            return v

    def peek(self) -> int:
        with self._lock:
            return self._value


class _Entry:
    __slots__ = ("lock", "cond", "key", "state", "ref", "dirty", "seq",
                 "pin_count", "next_link", "payload", "load_error", "gen")

    def __init__(self, block_size: int):
        self.lock = threading.Lock()
        self.cond = threading.Condition(self.lock)
        self.key: int | None = None
        self.state = EMPTY
        self.ref = 0
        self.dirty = False
        self.seq = 0
        self.pin_count = 0
        self.next_link = -1
        self.payload = bytearray(block_size)
        self.load_error: BaseException | None = None
        self.gen = 0


class SyncPointController:
    """Pauses one thread at a named point in the cache's hot paths.

    ``pause`` arms the point for exactly one arrival: the first thread
    to reach it blocks until ``resume`` while every other thread passes
    through undisturbed.
    """

    def __init__(self, name: str, on_detach):
        self.name = name
        self._on_detach = on_detach
        self._armed = False
        self._arm_lock = threading.Lock()
        self._arrived = threading.Event()
        self._release = threading.Event()

    def pause(self) -> None:
        with self._arm_lock:
            self._arrived.clear()
            self._release.clear()
            self._armed = True

    def wait_arrival(self, timeout: float | None = None) -> bool:
        return self._arrived.wait(timeout)

    def resume(self) -> None:
        with self._arm_lock:
            self._armed = False
        self._release.set()

    def detach(self) -> None:
        self.resume()
        self._on_detach(self.name)

    def _hit(self) -> None:
        with self._arm_lock:
            if not self._armed:
                return
            self._armed = False
        self._arrived.set()
        self._release.wait(timeout=60.0)


class _SyncPoints:
    """Named pause locations; zero-cost unless a controller is attached."""

    NAMES = ("post-bucket-unlock", "pre-publish", "pre-load", "resize-batch")

    def __init__(self) -> None:
        self.enabled = False
        self._controllers: dict[str, SyncPointController | None] = {n: None for n in self.NAMES}

    def attach(self, name: str) -> SyncPointController:
        if name not in self._controllers:
            raise KeyError(f"unknown sync point {name!r} (known: {', '.join(self.NAMES)})")
        ctl = SyncPointController(name, self._detach)
        self._controllers[name] = ctl
        self.enabled = True
        return ctl

    def _detach(self, name: str) -> None:
        self._controllers[name] = None
        self.enabled = any(c is not None for c in self._controllers.values())

    def hit(self, name: str) -> None:
        ctl = self._controllers.get(name)
        if ctl is not None:
            ctl._hit()


class CacheHandle:
    """Pins one resident entry against eviction until released."""

    __slots__ = ("_cache", "_eid", "key", "hit", "loaded", "_released")

    def __init__(self, cache: "ConcurrentCache", eid: int, key: int, hit: bool, loaded: bool):
        self._cache = cache
        self._eid = eid
        self.key = key
        self.hit = hit
        self.loaded = loaded
        self._released = False

    def read(self) -> bytes:
        if self._released:
            raise RuntimeError("handle already released")
        e = self._cache._entries[self._eid]
        with e.lock:
            return bytes(e.payload)

    @property
    def payload(self) -> bytes:
        return self.read()

    def release(self) -> None:
        if self._released:
            return
        self._released = True
        e = self._cache._entries[self._eid]
        with e.lock:
            e.pin_count -= 1

    def __enter__(self) -> "CacheHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.release()


def _next_pow2(n: int) -> int:
    return 1 << max(1, (n - 1).bit_length())


class ConcurrentCache:
    """Fixed-capacity concurrent block cache.

    ``loader`` callbacks passed to ``get``/``write`` must produce exactly
    ``block_size`` bytes and must not reenter the cache for the same key.
    ``clock`` is injectable for age-based flush tests.
    """

    def __init__(self, total_blocks: int, config: PolicyConfig | None = None,
                 reserve_max_blocks: int | None = None, *, block_size: int = 64,
                 clock=time.monotonic, retry_cap: int = 64, rehash_batch: int = 1024,
                 check_lock_order: bool = False):
        if config is None:
            config = PolicyConfig.for_kind(PolicyKind.CLOCK2Q_PLUS, total_blocks)
        if config.total_blocks != total_blocks:
            config = replace(config, total_blocks=total_blocks)
        config.validate(PolicyKind.CLOCK2Q_PLUS)
        reserve = total_blocks if reserve_max_blocks is None else reserve_max_blocks
        if reserve < total_blocks:
            raise ConfigError("reserve_max_blocks",
                              f"{reserve} is below total_blocks {total_blocks}")
        self.config = config
        self.block_size = block_size
        self.reserve_max_blocks = reserve
        self._clock = clock
        self._retry_cap = retry_cap
        self._rehash_batch = rehash_batch
        self._check_lock_order = check_lock_order
        self._tl = threading.local()

        rsmall, rmain, rghost, _ = replace(config, total_blocks=reserve).sizes()
        small, main, ghost, window = config.sizes()
        self.capacity = total_blocks
        self.small_size = small
        self.main_size = main
        self.ghost_size = ghost
        self.window_size = window

        self._small_base = rmain
        self._entries = [_Entry(block_size) for _ in range(rmain + rsmall)]
        self._small_ctr = RotatingIndex()
        self._main_ctr = RotatingIndex()

        self._max_nbuckets = _next_pow2(2 * reserve)
        self.nbuckets = _next_pow2(2 * total_blocks)
        self._old_nbuckets = self.nbuckets
        self._buckets = [-1] * self._max_nbuckets
        self._bucket_locks = [threading.Lock() for _ in range(self._max_nbuckets)]

        self._reserve_ghost = rghost
        self._ghost_slots: list[int | None] = [None] * rghost
        self._ghost_map: dict[int, int] = {}
        self._ghost_ctr = RotatingIndex()
        self._ghost_lock = threading.Lock()

        self._registry: dict[int, tuple[float, int]] = {}
        self._registry_lock = threading.Lock()
        self._registry_seq = 0

        self._stats = {
            "hits": 0, "misses": 0, "ghost_hits": 0, "loads": 0,
            "load_failures": 0, "lost_races": 0, "lost_inserts": 0,
            "giveups": 0, "small_to_main": 0, "small_to_ghost": 0,
            "small_discards": 0, "main_evictions": 0, "flushes": 0,
        }
        self._stats_lock = threading.Lock()

        fmax = 3 if config.freq_bits == 2 else 1
        self._fmax = fmax
        self._pmin = 2 if config.freq_bits == 2 else 1
        if config.dirty_scan_cap is not None:
            self._scan_cap = config.dirty_scan_cap
        else:
            self._scan_cap = max(1, min(small, 20)) if small else 1

        self._phase = "stable"
        self._resize_lock = threading.Lock()
        self.syncpoints = _SyncPoints()

    # ------------------------------------------------------------------
    # small helpers

    def _inc(self, name: str, by: int = 1) -> None:
        with self._stats_lock:
            self._stats[name] += by

    def stats(self) -> dict:
        with self._stats_lock:
            return dict(self._stats)

    def _bucket_of(self, key: int, nbuckets: int) -> int:
        return ((key * _MIX) & _MASK64) % nbuckets

    def _lock_bucket(self, b: int) -> None:
        self._bucket_locks[b].acquire()
        if self._check_lock_order:
            self._tl.buckets = getattr(self._tl, "buckets", 0) + 1

    def _unlock_bucket(self, b: int) -> None:
        if self._check_lock_order:
            self._tl.buckets = getattr(self._tl, "buckets", 0) - 1
        self._bucket_locks[b].release()

    def _lock_entry(self, e: _Entry) -> None:
        if self._check_lock_order and getattr(self._tl, "buckets", 0):
            raise AssertionError("entry lock acquired while holding a bucket lock")
        e.lock.acquire()

    def _hash_pair(self, key: int) -> list[int]:
        nb = self._bucket_of(key, self.nbuckets)
        if self._phase == "stable":
            return [nb]
        ob = self._bucket_of(key, self._old_nbuckets)
        if ob == nb:
            return [nb]
        return sorted((nb, ob))

    def _chain_find(self, bucket: int, key: int) -> int:
        eid = self._buckets[bucket]
        entries = self._entries
        while eid >= 0:
            if entries[eid].key == key:
                return eid
            eid = entries[eid].next_link
        return -1

    def _chain_remove(self, bucket: int, eid: int) -> bool:
        cur = self._buckets[bucket]
        if cur == eid:
            self._buckets[bucket] = self._entries[eid].next_link
            self._entries[eid].next_link = -1
            return True
        entries = self._entries
        while cur >= 0:
            nxt = entries[cur].next_link
            if nxt == eid:
                entries[cur].next_link = entries[eid].next_link
                entries[eid].next_link = -1
                return True
            cur = nxt
        return False

    def _unlink(self, eid: int, key: int) -> None:
        """Remove eid from the index; caller holds the entry lock."""
        pair = self._hash_pair(key)
        for b in pair:
            self._lock_bucket(b)
        try:
            for b in pair:
                if self._chain_remove(b, eid):
                    return
            raise AssertionError(f"entry {eid} (key {key}) missing from index")
        finally:
            for b in reversed(pair):
                self._unlock_bucket(b)

    def _publish(self, eid: int, key: int) -> bool:
        """Insert eid into the index unless the key already exists.

        During a resize a key found at its old hash location is moved to
        the new one; the caller's retried lookup then succeeds.
        """
        nb = self._bucket_of(key, self.nbuckets)
        pair = self._hash_pair(key)
        for b in pair:
            self._lock_bucket(b)
        try:
            found = -1
            found_in = -1
            for b in pair:
                found = self._chain_find(b, key)
                if found >= 0:
                    found_in = b
                    break
            if found >= 0:
                if found_in != nb:
                    self._chain_remove(found_in, found)
                    self._entries[found].next_link = self._buckets[nb]
                    self._buckets[nb] = found
                return False
            if self.ghost_size > 0:
                # the key was ghosted between our ghost check and now;
                # refuse so the retried miss takes the ghost-hit path
                with self._ghost_lock:
                    if key in self._ghost_map:
                        return False
            self._entries[eid].next_link = self._buckets[nb]
            self._buckets[nb] = eid
            return True
        finally:
            for b in reversed(pair):
                self._unlock_bucket(b)

    def _swap_link(self, old_eid: int, new_eid: int, key: int) -> None:
        """Atomically replace old_eid with new_eid in the index."""
        nb = self._bucket_of(key, self.nbuckets)
        pair = self._hash_pair(key)
        for b in pair:
            self._lock_bucket(b)
        try:
            for b in pair:
                if self._chain_remove(b, old_eid):
                    break
            else:
                raise AssertionError(f"entry {old_eid} (key {key}) missing from index")
            self._entries[new_eid].next_link = self._buckets[nb]
            self._buckets[nb] = new_eid
        finally:
            for b in reversed(pair):
                self._unlock_bucket(b)

    # ------------------------------------------------------------------
    # ghost FIFO

    def _ghost_take(self, key: int) -> bool:
        if self.ghost_size == 0:
            return False
        with self._ghost_lock:
            pos = self._ghost_map.pop(key, None)
            if pos is None:
                return False
            self._ghost_slots[pos] = None
            return True

    def _ghost_add(self, key: int) -> None:
        if self.ghost_size == 0:
            return
        with self._ghost_lock:
            pos = self._ghost_ctr.next() % self.ghost_size
            old = self._ghost_slots[pos]
            if old is not None:
                del self._ghost_map[old]
            self._ghost_slots[pos] = key
            self._ghost_map[key] = pos

    # ------------------------------------------------------------------
    # claiming

    def _claim_small(self) -> int | None:
        """Claim a small-FIFO slot, evicting per policy. Returns the
        locked entry id, or None after a dirty give-up (caller inserts
        into the main clock instead)."""
        entries = self._entries
        base = self._small_base
        dirty_skips = 0
        blocked = 0
        while True:
            n = self.small_size
            if blocked >= 2 * n + 8:
                self._inc("giveups")
                return None
            c = self._small_ctr.next()
            eid = base + c % n
            e = entries[eid]
            self._lock_entry(e)
            if e.state == EMPTY:
                e.seq = c
                return eid
            if e.state == DOING_IO or e.pin_count > 0:
                e.lock.release()
                blocked += 1
                continue
            blocked = 0
            if e.dirty:
                if self.config.dirty_promote and e.ref >= self._pmin and self._promote(eid):
                    e.seq = c
                    return eid
                e.seq = c
                e.lock.release()
                dirty_skips += 1
                if dirty_skips >= self._scan_cap:
                    self._inc("giveups")
                    return None
                continue
            if e.ref >= self._pmin:
                if self._promote(eid):
                    e.seq = c
                    return eid
                # main clock is all dirty: drop the clean promotee
                self._unlink(eid, e.key)
                self._inc("small_discards")
            else:
                # ghost-add before unlink: once a miss can see the key
                # gone from the index, the ghost entry already exists
                self._ghost_add(e.key)
                self._unlink(eid, e.key)
                self._inc("small_to_ghost")
            e.state = EMPTY
            e.key = None
            e.seq = c
            return eid

    def _claim_main(self, raise_on_stuck: bool = True) -> int | None:
        """Claim a main-clock slot with second-chance eviction."""
        entries = self._entries
        limit = self.config.reinsertion_limit
        ref_skips = 0
        blocked = 0
        while True:
            n = self.main_size
            if blocked >= 2 * n + 8:
                if raise_on_stuck:
                    raise EvictionImpossible(
                        "no evictable main-clock entry (all dirty, pinned, or loading)")
                return None
            c = self._main_ctr.next()
            eid = c % n
            e = entries[eid]
            self._lock_entry(e)
            if e.state == EMPTY:
                return eid
            if e.state == DOING_IO or e.pin_count > 0 or e.dirty:
                e.lock.release()
                blocked += 1
                continue
            if e.ref > 0 and (limit is None or ref_skips < limit):
                e.ref = 0
                e.lock.release()
                ref_skips += 1
                blocked = 0
                continue
            self._unlink(eid, e.key)
            self._inc("main_evictions")
            e.state = EMPTY
            e.key = None
            return eid

    def _promote(self, small_eid: int) -> bool:
        """Move a small entry into the main clock. Caller holds the small
        entry lock; this is the only path holding two entry locks, always
        small before main."""
        se = self._entries[small_eid]
        meid = self._claim_main(raise_on_stuck=False)
        if meid is None:
            return False
        m = self._entries[meid]
        m.key = se.key
        m.payload[:] = se.payload
        m.ref = 0
        m.dirty = se.dirty
        m.state = RESIDENT
        m.gen += 1
        self._swap_link(small_eid, meid, m.key)
        m.lock.release()
        self._inc("small_to_main")
        se.state = EMPTY
        se.key = None
        se.dirty = False
        return True

    # ------------------------------------------------------------------
    # public operations

    def get(self, key: int, loader) -> CacheHandle:
        """Fetch a block, loading it on a miss. Returns a pinned handle."""
        return self._access(key, loader, None)

    def write(self, key: int, payload: bytes, loader=None) -> CacheHandle:
        """Overwrite a block's payload and mark it dirty. On a miss the
        loader (when given) fills the block first; otherwise the payload
        is installed directly."""
        if len(payload) != self.block_size:
            raise ValueError(f"payload must be {self.block_size} bytes, got {len(payload)}")
        return self._access(key, loader, bytes(payload))

    def _access(self, key: int, loader, write_payload: bytes | None) -> CacheHandle:
        entries = self._entries
        base = self._small_base
        for _ in range(self._retry_cap):
            bucket = self._bucket_of(key, self.nbuckets)
            self._lock_bucket(bucket)
            eid = self._chain_find(bucket, key)
            self._unlock_bucket(bucket)
            if self.syncpoints.enabled:
                self.syncpoints.hit("post-bucket-unlock")
            if eid >= 0:
                e = entries[eid]
                self._lock_entry(e)
                if e.key != key:
                    e.lock.release()
                    self._inc("lost_races")
                    continue
                if e.state == DOING_IO:
                    gen = e.gen
                    ok = True
                    while e.state == DOING_IO and e.gen == gen:
                        ok = e.cond.wait(timeout=60.0)
                        if not ok:
                            break
                    if not ok:
                        e.lock.release()
                        raise ContentionError(f"timed out waiting for load of block {key}")
                    if e.gen == gen and e.load_error is not None:
                        err = e.load_error
                        e.lock.release()
                        raise LoadFailed(f"load of block {key} failed in another thread") from err
                    if e.gen != gen or e.state != RESIDENT or e.key != key:
                        e.lock.release()
                        continue
                # resident hit
                if eid >= base:
                    if self._small_ctr.peek() - e.seq > self.window_size:
                        f = e.ref + 1
                        e.ref = f if f <= self._fmax else self._fmax
                else:
                    e.ref = 1
                if write_payload is not None:
                    e.payload[:] = write_payload
                    self._mark_dirty(key, e)
                e.pin_count += 1
                e.lock.release()
                self._inc("hits")
                return CacheHandle(self, eid, key, hit=True, loaded=False)

            handle = self._miss(key, loader, write_payload)
            if handle is not None:
                return handle
            self._inc("lost_inserts")
        raise ContentionError(f"retry budget exhausted for block {key}")

    def _mark_dirty(self, key: int, e: _Entry) -> None:
        e.dirty = True
        with self._registry_lock:
            if key not in self._registry:
                self._registry_seq += 1
                self._registry[key] = (self._clock(), self._registry_seq)

    def _miss(self, key: int, loader, write_payload: bytes | None) -> CacheHandle | None:
        ghost_hit = self._ghost_take(key)
        eid = None
        if not ghost_hit and self.small_size > 0:
            eid = self._claim_small()
        if eid is None:
            eid = self._claim_main()
        e = self._entries[eid]
        e.key = key
        e.state = DOING_IO
        e.gen += 1
        e.load_error = None
        e.ref = 0
        e.dirty = False
        e.pin_count = 1
        if self.syncpoints.enabled:
            self.syncpoints.hit("pre-publish")
        if not self._publish(eid, key):
            e.pin_count = 0
            e.state = EMPTY
            e.key = None
            e.lock.release()
            return None
        if ghost_hit:
            self._inc("ghost_hits")
        self._inc("misses")

        if loader is None:
            filled = write_payload if write_payload is not None else bytes(self.block_size)
            e.payload[:] = filled
            e.state = RESIDENT
            if write_payload is not None:
                self._mark_dirty(key, e)
            e.cond.notify_all()
            e.lock.release()
            return CacheHandle(self, eid, key, hit=False, loaded=False)

        e.lock.release()
        if self.syncpoints.enabled:
            self.syncpoints.hit("pre-load")
        self._inc("loads")
        try:
            data = loader(key)
            if len(data) != self.block_size:
                raise ValueError(
                    f"loader returned {len(data)} bytes, expected {self.block_size}")
        except BaseException as exc:
            self._inc("load_failures")
            with e.lock:
                e.load_error = exc
                e.state = EMPTY
                self._unlink(eid, key)
                e.key = None
                e.pin_count = 0
                e.cond.notify_all()
            raise
        with e.lock:
            e.payload[:] = data
            if write_payload is not None:
                e.payload[:] = write_payload
                self._mark_dirty(key, e)
            e.state = RESIDENT
            e.cond.notify_all()
        return CacheHandle(self, eid, key, hit=False, loaded=True)

    # ------------------------------------------------------------------
    # flushing

    def flush(self, sink, policy="all") -> int:
        """Write dirty blocks back through ``sink(key, payload)``,
        oldest first, and mark them clean in place.

        ``policy`` is ``"all"``, ``("age", seconds)``, or
        ``("watermark", low, high)``. The watermark form only acts when
        the dirty fraction exceeds the high mark and stops at the low
        mark. A sink exception aborts the pass with ``FlushError``.
        """
        mode = policy if isinstance(policy, str) else policy[0]
        with self._registry_lock:
            ordered = sorted(self._registry.items(), key=lambda kv: kv[1])
        flushed = 0
        if mode == "all":
            targets = [k for k, _ in ordered]
        elif mode == "age":
            _, seconds = policy
            now = self._clock()
            targets = [k for k, (t, _) in ordered if now - t > seconds]
        elif mode == "watermark":
            _, low, high = policy
            if not 0.0 <= low <= high <= 1.0:
                raise ConfigError("watermark", f"need 0 <= low <= high <= 1, got {low}, {high}")
            total = len(ordered)
            if total <= high * self.capacity:
                return 0
            n_flush = 0
            while total - n_flush > low * self.capacity and n_flush < total:
                n_flush += 1
            targets = [k for k, _ in ordered[:n_flush]]
        else:
            raise ValueError(f"unknown flush policy {policy!r}")
        for key in targets:
            try:
                flushed += self._flush_key(key, sink)
            except Exception as exc:
                raise FlushError(f"sink failed on block {key}: {exc}", flushed) from exc
        self._inc("flushes", flushed)
        return flushed

    def _flush_key(self, key: int, sink) -> int:
        for _ in range(self._retry_cap):
            bucket = self._bucket_of(key, self.nbuckets)
            self._lock_bucket(bucket)
            eid = self._chain_find(bucket, key)
            self._unlock_bucket(bucket)
            if eid < 0:
                with self._registry_lock:
                    self._registry.pop(key, None)
                return 0
            e = self._entries[eid]
            self._lock_entry(e)
            if e.key != key:
                e.lock.release()
                continue
            if e.state != RESIDENT or not e.dirty:
                e.lock.release()
                with self._registry_lock:
                    self._registry.pop(key, None)
                return 0
            try:
                sink(key, bytes(e.payload))
            except Exception:
                e.lock.release()
                raise
            e.dirty = False
            e.lock.release()
            with self._registry_lock:
                self._registry.pop(key, None)
            return 1
        raise ContentionError(f"could not pin block {key} for flushing")

    def dirty_count(self) -> int:
        with self._registry_lock:
            return len(self._registry)

    # ------------------------------------------------------------------
    # resizing

    def resize(self, new_total_blocks: int, flush_sink=None, max_wait: float = 60.0) -> dict:
        """Grow or shrink the cache in place while it stays live.

        Runs the batched rehash (and, for shrinks, the tail drain) in
        the calling thread, yielding between batches. One resize at a
        time; concurrent resizes get ``ResizeBusy``.
        """
        if not self._resize_lock.acquire(blocking=False):
            raise ResizeBusy("a resize is already in progress")
        try:
            return self._resize(new_total_blocks, flush_sink, max_wait)
        finally:
            self._phase = "stable"
            self._resize_lock.release()

    def _resize(self, new_total: int, flush_sink, max_wait: float) -> dict:
        if new_total == self.capacity:
            return {"phase": "noop", "capacity": self.capacity, "moved": 0}
        if new_total < 2:
            raise ConfigError("new_total_blocks", f"must be >= 2, got {new_total}")
        if new_total > self.reserve_max_blocks:
            raise ConfigError(
                "new_total_blocks",
                f"{new_total} exceeds reserved headroom {self.reserve_max_blocks}")
        old_small, old_main, old_ghost = self.small_size, self.main_size, self.ghost_size
        new_cfg = replace(self.config, total_blocks=new_total)
        nsmall, nmain, nghost, nwindow = new_cfg.sizes()
        growing = new_total > self.capacity
        old_nb = self.nbuckets
        new_nb = _next_pow2(2 * new_total)

        self._old_nbuckets = old_nb
        self._phase = "growing" if growing else "shrinking"
        # publish new region sizes: rotating claims honor them at once
        self.small_size = nsmall
        self.main_size = nmain
        self.window_size = nwindow
        self.config = new_cfg
        self.nbuckets = new_nb
        if growing:
            self.capacity = new_total
            self.ghost_size = nghost

        moved = self._rehash_all(old_nb, new_nb)

        drained = 0
        if not growing:
            with self._ghost_lock:
                for pos in range(nghost, old_ghost):
                    k = self._ghost_slots[pos]
                    if k is not None:
                        del self._ghost_map[k]
                        self._ghost_slots[pos] = None
                self.ghost_size = nghost
            drained = self._drain_tail(old_small, old_main, nsmall, nmain,
                                       flush_sink, max_wait)
            self.capacity = new_total
        return {"phase": "grow" if growing else "shrink", "capacity": new_total,
                "moved": moved, "drained": drained}

    def _rehash_all(self, old_nb: int, new_nb: int) -> int:
        if old_nb == new_nb:
            return 0
        moved = 0
        batch = 0
        for eid in range(len(self._entries)):
            e = self._entries[eid]
            self._lock_entry(e)
            if e.state != EMPTY:
                key = e.key
                ob = self._bucket_of(key, old_nb)
                nb = self._bucket_of(key, new_nb)
                if ob != nb:
                    pair = sorted((ob, nb))
                    for b in pair:
                        self._lock_bucket(b)
                    if self._chain_remove(ob, eid):
                        e.next_link = self._buckets[nb]
                        self._buckets[nb] = eid
                        moved += 1
                    for b in reversed(pair):
                        self._unlock_bucket(b)
            e.lock.release()
            batch += 1
            if batch >= self._rehash_batch:
                batch = 0
                if self.syncpoints.enabled:
                    self.syncpoints.hit("resize-batch")
                time.sleep(0)
        return moved

    def _drain_tail(self, old_small: int, old_main: int, nsmall: int, nmain: int,
                    flush_sink, max_wait: float) -> int:
        tail_ids = list(range(nmain, old_main))
        tail_ids += [self._small_base + i for i in range(nsmall, old_small)]
        drained = 0
        deadline = time.monotonic() + max_wait
        pending = set(tail_ids)
        while pending:
            stuck = set()
            for eid in sorted(pending):
                e = self._entries[eid]
                self._lock_entry(e)
                if e.state == EMPTY:
                    e.lock.release()
                    continue
                if e.state == DOING_IO or e.pin_count > 0:
                    e.lock.release()
                    stuck.add(eid)
                    continue
                if e.dirty:
                    if flush_sink is None:
                        e.lock.release()
                        stuck.add(eid)
                        continue
                    flush_sink(e.key, bytes(e.payload))
                    e.dirty = False
                    with self._registry_lock:
                        self._registry.pop(e.key, None)
                self._unlink(eid, e.key)
                e.state = EMPTY
                e.key = None
                e.lock.release()
                drained += 1
            pending = stuck
            if pending:
                if time.monotonic() > deadline:
                    raise ContentionError(
                        f"shrink blocked on {len(pending)} pinned or unflushable tail entries")
                time.sleep(0.001)
        return drained

    # ------------------------------------------------------------------
    # introspection

    def resident_count(self) -> int:
        return sum(1 for e in self._entries if e.state == RESIDENT)

    def contains(self, key: int) -> bool:
        bucket = self._bucket_of(key, self.nbuckets)
        self._lock_bucket(bucket)
        eid = self._chain_find(bucket, key)
        self._unlock_bucket(bucket)
        return eid >= 0

    def dump(self) -> str:
        """Human-readable diagnostics; values are racy snapshots."""
        small_res = sum(1 for i in range(self.small_size)
                        if self._entries[self._small_base + i].state == RESIDENT)
        main_res = sum(1 for i in range(self.main_size)
                       if self._entries[i].state == RESIDENT)
        stats = self.stats()
        lines = [
            f"capacity={self.capacity} (reserve {self.reserve_max_blocks}) phase={self._phase}",
            f"main={main_res}/{self.main_size} small={small_res}/{self.small_size} "
            f"ghost={len(self._ghost_map)}/{self.ghost_size} window={self.window_size}",
            f"dirty={self.dirty_count()} dirty_frac={self.dirty_count() / max(1, self.capacity):.3f}",
            f"buckets={self.nbuckets} block_size={self.block_size}",
            "counters: " + " ".join(f"{k}={v}" for k, v in sorted(stats.items())),
        ]
        return "\n".join(lines)

    def check_invariants(self) -> list[str]:
        """Quiescent structural audit; returns human-readable violations.

        Only meaningful when no other thread is mutating the cache.
        """
        problems: list[str] = []
        seen: dict[int, int] = {}
        for b in range(self.nbuckets):
            eid = self._buckets[b]
            hops = 0
            while eid >= 0:
                e = self._entries[eid]
                if e.key is None or e.state == EMPTY:
                    problems.append(f"bucket {b}: chained entry {eid} is empty")
                    break
                if e.key in seen:
                    problems.append(f"duplicate key {e.key} (entries {seen[e.key]} and {eid})")
                else:
                    seen[e.key] = eid
                if self._bucket_of(e.key, self.nbuckets) != b and self._phase == "stable":
                    problems.append(f"key {e.key} chained in wrong bucket {b}")
                eid = e.next_link
                hops += 1
                if hops > len(self._entries):
                    problems.append(f"bucket {b}: chain cycle")
                    break
        occupied = 0
        for eid, e in enumerate(self._entries):
            if e.state == EMPTY:
                continue
            occupied += 1
            if e.key not in seen or seen[e.key] != eid:
                problems.append(f"entry {eid} (key {e.key}, state {e.state}) not indexed")
            if e.dirty and e.state != RESIDENT:
                problems.append(f"entry {eid} dirty in state {e.state}")
        if occupied > self.capacity:
            problems.append(f"occupancy {occupied} exceeds capacity {self.capacity}")
        with self._registry_lock:
            for key in self._registry:
                eid = seen.get(key)
                if eid is None or not self._entries[eid].dirty:
                    problems.append(f"dirty registry entry {key} not dirty-resident")
        with self._ghost_lock:
            for key, pos in self._ghost_map.items():
                if self._ghost_slots[pos] != key:
                    problems.append(f"ghost map desync for key {key}")
                if key in seen:
                    problems.append(f"key {key} resident and ghosted")
        return problems

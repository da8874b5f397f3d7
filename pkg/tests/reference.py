"""Naive reference models for every replacement policy.

Deliberately unoptimized and written against the policy rules from
scratch: plain Python lists, linear membership scans, rotation by
pop/append. Shares no code with the package under test. Used by the
unit and acceptance suites as an independent oracle.

``NaiveCache.access`` returns ``(outcome, events)`` where outcome is
one of the strings below and events is a tuple of
``(key, source, destination, skipped_ref, skipped_dirty)`` tuples.
"""

# kind -> (small_frac, ghost_frac, window_frac, freq_bits, discipline)
DEFAULTS = {
    "lru": (0.0, 0.0, 0.0, 1, "lru"),
    "fifo": (0.0, 0.0, 0.0, 1, "fifo"),
    "clock": (0.0, 0.0, 0.0, 1, "clock"),
    "2q": (0.25, 0.50, 1.0, 1, "lru"),
    "clock2q": (0.25, 0.50, 1.0, 1, "clock"),
    "s3fifo1": (0.10, 1.00, 0.0, 1, "clock"),
    "s3fifo2": (0.10, 1.00, 0.0, 2, "clock"),
    "clock2q+": (0.10, 0.50, 0.5, 1, "clock"),
}

ALL_KINDS = list(DEFAULTS)


class NaiveEvictionImpossible(Exception):
    pass


def _rhu(x):
    return int(x + 0.5)


class NaiveCache:
    def __init__(self, kind, total_blocks, small_frac=None, ghost_frac=None,
                 window_frac=None, freq_bits=None, reinsertion_limit=None,
                 dirty_scan_cap=None, dirty_promote=False):
        d_small, d_ghost, d_window, d_bits, disc = DEFAULTS[kind]
        small_frac = d_small if small_frac is None else small_frac
        ghost_frac = d_ghost if ghost_frac is None else ghost_frac
        window_frac = d_window if window_frac is None else window_frac
        freq_bits = d_bits if freq_bits is None else freq_bits

        self.kind = kind
        self.disc = disc
        small = _rhu(small_frac * total_blocks)
        if small_frac > 0:
            small = max(1, small)
        main = total_blocks - small
        if main < 1:
            main = 1
            small = total_blocks - 1
        self.small_cap = small
        self.main_cap = main
        self.ghost_cap = _rhu(ghost_frac * total_blocks)
        if kind in ("2q", "clock2q"):
            self.window = small
            self.pmin = None
        elif kind in ("lru", "fifo", "clock"):
            self.window = 0
            self.pmin = None
        else:
            self.window = _rhu(window_frac * small)
            self.pmin = 2 if freq_bits == 2 else 1
        self.fmax = 3 if freq_bits == 2 else 1
        self.limit = reinsertion_limit
        if dirty_scan_cap is None:
            dirty_scan_cap = max(1, min(small, 20)) if small else 1
        self.cap = dirty_scan_cap
        self.dirty_promote = dirty_promote

        # small FIFO, oldest at index 0, rotated by pop/append
        self.sk, self.sf, self.sd, self.ss = [], [], [], []
        self.counter = 0
        # clock / fifo main, oldest-to-visit at index 0
        self.mk, self.mf, self.md = [], [], []
        # lru main, most recently used at the end
        self.lk, self.ld = [], []
        # ghost: fixed slot array with a rotating pointer
        self.gslots = [None] * self.ghost_cap
        self.gnext = 0

    # -- helpers -------------------------------------------------------

    def _ghost_add(self, key):
        old = self.gslots[self.gnext]
        self.gslots[self.gnext] = key
        self.gnext = (self.gnext + 1) % self.ghost_cap
        return old

    def _clock_evict(self, evs, must):
        ref_skips = 0
        dirty_skips = 0
        blocked = 0
        while True:
            if blocked >= len(self.mk):
                if must:
                    raise NaiveEvictionImpossible()
                return False
            if self.md[0]:
                self.mk.append(self.mk.pop(0))
                self.mf.append(self.mf.pop(0))
                self.md.append(self.md.pop(0))
                blocked += 1
                dirty_skips += 1
                continue
            if self.mf[0] > 0 and (self.limit is None or ref_skips < self.limit):
                self.mk.append(self.mk.pop(0))
                self.mf.append(0)
                self.mf.pop(0)
                self.md.append(self.md.pop(0))
                ref_skips += 1
                blocked = 0
                continue
            k = self.mk.pop(0)
            self.mf.pop(0)
            self.md.pop(0)
            evs.append((k, "main", "discard", ref_skips, dirty_skips))
            return True

    def _lru_evict(self, evs, must):
        dirty_skips = 0
        for i in range(len(self.lk)):
            if self.ld[i]:
                dirty_skips += 1
                continue
            k = self.lk.pop(i)
            self.ld.pop(i)
            evs.append((k, "main", "discard", 0, dirty_skips))
            return True
        if must:
            raise NaiveEvictionImpossible()
        return False

    def _main_insert(self, key, dirty, evs):
        if self.disc == "lru":
            if len(self.lk) >= self.main_cap:
                self._lru_evict(evs, must=True)
            self.lk.append(key)
            self.ld.append(dirty)
        else:
            if len(self.mk) >= self.main_cap:
                self._clock_evict(evs, must=True)
            self.mk.append(key)
            self.mf.append(0)
            self.md.append(dirty)

    def _main_has_room(self, evs):
        if self.disc == "lru":
            if len(self.lk) < self.main_cap:
                return True
            return self._lru_evict(evs, must=False)
        if len(self.mk) < self.main_cap:
            return True
        return self._clock_evict(evs, must=False)

    def _small_evict(self, evs):
        """Free a small slot; False means the scan gave up."""
        skips = 0
        while True:
            dirty = self.sd[0]
            freq = self.sf[0]
            key = self.sk[0]
            wants_promote = self.pmin is not None and freq >= self.pmin
            if dirty and wants_promote and self.dirty_promote and self._main_has_room(evs):
                self.sk.pop(0)
                self.sf.pop(0)
                self.sd.pop(0)
                self.ss.pop(0)
                if self.disc == "lru":
                    self.lk.append(key)
                    self.ld.append(True)
                else:
                    self.mk.append(key)
                    self.mf.append(0)
                    self.md.append(True)
                evs.append((key, "small", "main", 0, skips))
                return True
            if dirty:
                # rotate to the head with a fresh window sequence
                self.sk.append(self.sk.pop(0))
                self.sf.append(self.sf.pop(0))
                self.sd.append(self.sd.pop(0))
                self.ss.pop(0)
                self.ss.append(self.counter)
                self.counter += 1
                skips += 1
                if skips >= self.cap:
                    evs.append((None, "small", "give_up", 0, skips))
                    return False
                continue
            self.sk.pop(0)
            self.sf.pop(0)
            self.sd.pop(0)
            self.ss.pop(0)
            if wants_promote:
                if self._main_has_room(evs):
                    if self.disc == "lru":
                        self.lk.append(key)
                        self.ld.append(False)
                    else:
                        self.mk.append(key)
                        self.mf.append(0)
                        self.md.append(False)
                    evs.append((key, "small", "main", 0, skips))
                else:
                    evs.append((key, "small", "discard", 0, skips))
            elif self.ghost_cap > 0:
                self._ghost_add(key)
                evs.append((key, "small", "ghost", 0, skips))
            else:
                evs.append((key, "small", "discard", 0, skips))
            return True

    # -- public --------------------------------------------------------

    def access(self, key, is_write=False):
        if key in self.sk:
            i = self.sk.index(key)
            if is_write:
                self.sd[i] = True
            if self.counter - self.ss[i] <= self.window:
                return "hit_small_in_window", ()
            self.sf[i] = min(self.sf[i] + 1, self.fmax)
            return "hit_small_out_window", ()
        if key in self.mk:
            i = self.mk.index(key)
            if self.disc == "clock":
                self.mf[i] = 1
            if is_write:
                self.md[i] = True
            return "hit_main", ()
        if key in self.lk:
            i = self.lk.index(key)
            self.lk.append(self.lk.pop(i))
            self.ld.append(self.ld.pop(i))
            if is_write:
                self.ld[-1] = True
            return "hit_main", ()

        evs = []
        if key in self.gslots:
            self.gslots[self.gslots.index(key)] = None
            self._main_insert(key, is_write, evs)
            return "miss_ghost_hit", tuple(evs)

        if self.small_cap == 0:
            self._main_insert(key, is_write, evs)
            return "miss_cold", tuple(evs)

        if len(self.sk) >= self.small_cap:
            if not self._small_evict(evs):
                self._main_insert(key, is_write, evs)
                return "miss_cold", tuple(evs)
        self.sk.append(key)
        self.sf.append(0)
        self.sd.append(is_write)
        self.ss.append(self.counter)
        self.counter += 1
        return "miss_cold", tuple(evs)

    def flush(self, key):
        if key in self.sk:
            i = self.sk.index(key)
            if self.sd[i]:
                self.sd[i] = False
                return True
            return False
        if key in self.mk:
            i = self.mk.index(key)
            if self.md[i]:
                self.md[i] = False
                return True
            return False
        if key in self.lk:
            i = self.lk.index(key)
            if self.ld[i]:
                self.ld[i] = False
                return True
            return False
        return False

    def resident_keys(self):
        return set(self.sk) | set(self.mk) | set(self.lk)

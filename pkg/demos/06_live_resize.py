"""Grow and shrink the cache while readers keep hitting it.

Growth extends the preallocated arrays and rehashes in the background;
lookups consult only the new hash position and insertion heals strays.
Shrinking drains the array tails, pushing dirty tail blocks through the
flush sink so nothing is lost.
"""

import threading
import time

from clock2q import ConcurrentCache

BLOCK = 64


def slow_tier(key: int) -> bytes:
    return (key.to_bytes(8, "little") * 8)[:BLOCK]


cache = ConcurrentCache(512, reserve_max_blocks=4096, block_size=BLOCK)
keys = list(range(400))
for k in keys:
    if k % 4 == 0:
        cache.write(k, slow_tier(k)).release()
    else:
        cache.get(k, slow_tier).release()
print("filled:", cache.dump().splitlines()[1])

stop = threading.Event()
reads = {"n": 0}


def reader():
    import random

    rng = random.Random(1)
    while not stop.is_set():
        k = rng.choice(keys)
        with cache.get(k, slow_tier) as h:
            assert h.read() == slow_tier(k)
        reads["n"] += 1


threads = [threading.Thread(target=reader) for _ in range(4)]
for t in threads:
    t.start()

flushed = []
for new_size in (1024, 2048, 256):
    info = cache.resize(new_size, flush_sink=lambda k, p: flushed.append(k))
    print(f"resize -> {new_size}: {info}")

stop.set()
for t in threads:
    t.join()

print(f"readers completed {reads['n']} gets during live resizing")
print(f"dirty tail blocks written back during the shrink: {len(flushed)}")
print("structural audit:", "clean" if not cache.check_invariants() else "BROKEN")
print(cache.dump())

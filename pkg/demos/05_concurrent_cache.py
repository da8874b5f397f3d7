"""Drive the thread-safe block cache: loads, writes, flushing, races.

Eight threads hammer a shared cache with a skewed key distribution and
30% writes while a background thread enforces the dirty watermarks.
The loader is the (simulated) slow tier; the single-loader guarantee
means a popular cold block is fetched once no matter how many threads
want it.
"""

import threading
import time

from clock2q import ConcurrentCache
from clock2q.policy import EvictionImpossible

BLOCK = 64


def slow_tier(key: int) -> bytes:
    return (key.to_bytes(8, "little") * 8)[:BLOCK]


cache = ConcurrentCache(4096, reserve_max_blocks=8192, block_size=BLOCK)
stop = threading.Event()


def flusher():
    while not stop.is_set():
        cache.flush(lambda k, p: None, ("watermark", 0.10, 0.20))
        time.sleep(0.001)


def worker(tid: int):
    import random

    rng = random.Random(tid)
    for _ in range(50_000):
        key = int(rng.random() ** 2 * 16384)
        try:
            if rng.random() < 0.3:
                cache.write(key, slow_tier(key)).release()
            else:
                with cache.get(key, slow_tier) as handle:
                    assert handle.read() == slow_tier(key)
        except EvictionImpossible:
            cache.flush(lambda k, p: None, "all")


flush_thread = threading.Thread(target=flusher)
flush_thread.start()
workers = [threading.Thread(target=worker, args=(t,)) for t in range(8)]
start = time.monotonic()
for t in workers:
    t.start()
for t in workers:
    t.join()
stop.set()
flush_thread.join()
elapsed = time.monotonic() - start

print(f"400k mixed operations across 8 threads in {elapsed:.1f}s")
print(cache.dump())
problems = cache.check_invariants()
print("structural audit:", "clean" if not problems else problems)

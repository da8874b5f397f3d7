"""Command-line front end for reproducible cache experiments.

Subcommands: derive, simulate, compare, curve, nrd, generate, stress.
Machine-readable CSV goes to stdout (or --out); --pretty renders an
aligned table instead. Given identical inputs, flags, and seeds every
subcommand produces byte-identical output.
"""

from __future__ import annotations

import argparse
import random
import sys
import threading

from . import analysis, sim, trace as trace_mod
from .cache import ConcurrentCache
from .policy import ConfigError, PolicyKind
from .sim import DEFAULT_SIZE_FRACS, DirtyModel
from .trace import BIN_MAGIC, TraceRequest

SIM_HEADER = (
    "policy", "size_frac", "total_blocks", "requests", "hits", "misses",
    "miss_ratio", "ghost_hits", "flow_small_to_main", "flow_small_to_ghost",
    "flow_ghost_to_main", "giveups", "flushes_time", "flushes_watermark",
    "skipped_dirty_total", "max_skipped_ref", "mean_skipped_ref",
)
NRD_HEADER = ("policy", "destination", "bin_exponent", "count")


def _detect_format(path: str) -> str:
    with open(path, "rb") as fh:
        return "bin" if fh.read(len(BIN_MAGIC)) == BIN_MAGIC else "csv"


def _load(args) -> list[TraceRequest]:
    fmt = getattr(args, "format", None) or _detect_format(args.trace)
    requests, _ = trace_mod.load_trace(args.trace, fmt, skip_header=getattr(args, "header", False))
    return requests


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(header, rows, pretty: bool) -> str:
    if not pretty:
        return analysis.rows_to_csv(header, rows)
    cells = [[str(h) for h in header]]
    for row in rows:
        cells.append([format(c, ".6g") if isinstance(c, float) else str(c) for c in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _dirty_model(args) -> DirtyModel | None:
    if not getattr(args, "dirty", False):
        return None
    low, high = 0.10, 0.20
    if args.watermarks:
        try:
            low, high = (float(x) for x in args.watermarks.split(","))
        except ValueError:
            raise ConfigError("watermarks", f"expected LO,HI, got {args.watermarks!r}") from None
    return DirtyModel(enabled=True, flush_age_sec=args.flush_age_sec,
                      low_watermark=low, high_watermark=high)


def _config_overrides(args) -> dict:
    over: dict = {}
    if getattr(args, "window_frac", None) is not None:
        over["window_frac"] = args.window_frac
    if getattr(args, "ghost_frac", None) is not None:
        over["ghost_frac"] = args.ghost_frac
    limit = getattr(args, "reinsertion_limit", None)
    if limit is not None:
        over["reinsertion_limit"] = None if limit == "inf" else int(limit)
    if getattr(args, "dirty_mode", None) == "move":
        over["dirty_promote"] = True
    return over


def _policies(args) -> list[PolicyKind]:
    if args.policy == "all":
        return list(PolicyKind)
    return [PolicyKind.from_name(args.policy)]


def _sizes(args) -> list[float]:
    return list(args.size_frac) if args.size_frac else list(DEFAULT_SIZE_FRACS)


def _maybe_plot_script(args, ycol: str) -> None:
    if getattr(args, "plot_script", False) and args.out:
        path = args.out.rsplit(".", 1)[0] + "_plot.py"
        with open(path, "w") as fh:
            fh.write(analysis.plot_script(args.out, ycol))


# ----------------------------------------------------------------------
# subcommands

def cmd_derive(args) -> int:
    requests = _load(args)
    derived = trace_mod.derive_metadata(requests, args.fanout, args.op_mode)
    out_fmt = args.format or "bin"
    if args.out:
        trace_mod.write_trace(derived, args.out, out_fmt)
    else:
        import io

        buf = io.BytesIO()
        trace_mod.write_trace(derived, buf, out_fmt)
        sys.stdout.buffer.write(buf.getvalue())
    return 0


def cmd_simulate(args) -> int:
    requests = _load(args)
    dirty = _dirty_model(args)
    over = _config_overrides(args)
    if args.size_blocks is not None:
        cells = [(None, args.size_blocks)]
    else:
        cells = [(f, None) for f in _sizes(args)]
    rows = []
    for kind in _policies(args):
        kind_over = over if kind not in (PolicyKind.LRU, PolicyKind.FIFO, PolicyKind.CLOCK) \
            else {k: v for k, v in over.items() if k in ("reinsertion_limit", "dirty_promote")}
        for frac, blocks in cells:
            r = sim.simulate(requests, kind, size_frac=frac, size_blocks=blocks,
                             dirty=dirty, config_overrides=kind_over)
            rows.append((r.policy, frac if frac is not None else "-",
                         r.total_blocks, r.requests, r.hits, r.misses,
                         r.miss_ratio, r.ghost_hits, r.flow_small_to_main,
                         r.flow_small_to_ghost, r.flow_ghost_to_main, r.giveups,
                         r.flushes_time, r.flushes_watermark, r.skipped_dirty_total,
                         r.max_skipped_ref, r.mean_skipped_ref))
    _emit(_table(SIM_HEADER, rows, args.pretty), args)
    return 0


def cmd_compare(args) -> int:
    requests = _load(args)
    rows = analysis.compare_report(requests, sizes=_sizes(args), dirty=_dirty_model(args))
    _emit(_table(analysis.COMPARE_HEADER, rows, args.pretty), args)
    _maybe_plot_script(args, "improvement")
    return 0


def cmd_curve(args) -> int:
    requests = _load(args)
    sizes = sorted(_sizes(args))
    rows = analysis.miss_ratio_curve(requests, _policies(args), sizes, dirty=_dirty_model(args))
    rows.sort(key=lambda r: (r[1], r[0]))
    _emit(_table(analysis.CURVE_HEADER, rows, args.pretty), args)
    _maybe_plot_script(args, "miss_ratio")
    return 0


def cmd_nrd(args) -> int:
    requests = _load(args)
    kind = PolicyKind.from_name(args.policy if args.policy != "all" else "clock2q+")
    frac = args.size_frac[0] if args.size_frac else 0.01
    report = analysis.nrd_report(requests, kind, size_frac=frac,
                                 config_overrides=_config_overrides(args))
    rows = []
    for dest, hist in (("main", report.to_main), ("ghost", report.to_ghost)):
        for k in sorted(hist.bins):
            rows.append((report.policy, dest, k, hist.bins[k]))
        rows.append((report.policy, dest, "never", hist.never))
    _emit(_table(NRD_HEADER, rows, args.pretty), args)
    return 0


def cmd_generate(args) -> int:
    if args.kind == "zipf":
        requests = trace_mod.generate_zipf(args.n, args.alpha, args.universe, args.seed,
                                           write_frac=args.write_frac,
                                           req_per_sec=args.req_per_sec)
    else:
        base, _ = trace_mod.load_trace(args.base, _detect_format(args.base))
        requests = trace_mod.generate_correlated(base, args.burst_k, args.burst_span,
                                                 args.fraction, args.seed)
    out_fmt = args.format or "bin"
    if not args.out:
        print("generate requires --out", file=sys.stderr)
        return 2
    trace_mod.write_trace(requests, args.out, out_fmt)
    return 0


def cmd_stress(args) -> int:
    rng = random.Random(args.seed)
    block = args.block_size

    def payload_for(key: int) -> bytes:
        raw = key.to_bytes(8, "little") * ((block + 7) // 8)
        return raw[:block]

    cache = ConcurrentCache(args.capacity, reserve_max_blocks=args.reserve,
                            block_size=block, check_lock_order=args.check_lock_order)
    plan = []
    if args.resize_plan:
        for part in args.resize_plan.split(","):
            at, factor = part.split(":")
            plan.append((float(at), float(factor)))
        plan.sort()

    per_thread = args.ops // args.threads
    errors: list[str] = []
    flush_sink = lambda key, payload: None  # noqa: E731
    counters = [dict(ops=0, hits=0, misses=0) for _ in range(args.threads)]
    seeds = [rng.getrandbits(64) for _ in range(args.threads)]
    stop = threading.Event()

    def flusher() -> None:
        from time import sleep
        while not stop.is_set():
            try:
                cache.flush(flush_sink, ("watermark", 0.10, 0.20))
            except Exception as exc:
                errors.append(f"flusher: {type(exc).__name__}: {exc}")
                return
            sleep(0.001)

    def worker(tid: int) -> None:
        from clock2q.policy import EvictionImpossible
        wrng = random.Random(seeds[tid])
        me = counters[tid]
        try:
            for _ in range(per_thread):
                key = int(wrng.random() ** 2 * args.universe)
                write = wrng.random() < args.write_frac
                for _attempt in range(8):
                    try:
                        if write:
                            h = cache.write(key, payload_for(key))
                        else:
                            h = cache.get(key, payload_for)
                            if h.read() != payload_for(key):
                                errors.append(f"thread {tid}: torn payload for {key}")
                        break
                    except EvictionImpossible:
                        # everything evictable is dirty: write back and retry
                        cache.flush(flush_sink, "all")
                else:
                    errors.append(f"thread {tid}: block {key} never became insertable")
                    return
                me["ops"] += 1
                me["hits" if h.hit else "misses"] += 1
                h.release()
        except Exception as exc:  # pragma: no cover - surfaced in summary
            errors.append(f"thread {tid}: {type(exc).__name__}: {exc}")

    threads = [threading.Thread(target=worker, args=(t,)) for t in range(args.threads)]
    flush_thread = threading.Thread(target=flusher)
    flush_thread.start()
    for t in threads:
        t.start()
    from time import sleep
    for at, factor in plan:
        target_ops = at * args.ops
        while sum(c["ops"] for c in counters) < target_ops and any(t.is_alive() for t in threads):
            sleep(0.001)
        try:
            cache.resize(max(2, int(args.capacity * factor)), flush_sink=flush_sink)
        except Exception as exc:
            errors.append(f"resize: {type(exc).__name__}: {exc}")
    for t in threads:
        t.join()
    stop.set()
    flush_thread.join()

    cache.flush(flush_sink, "all")
    problems = cache.check_invariants()
    total_ops = sum(c["ops"] for c in counters)
    total_hits = sum(c["hits"] for c in counters)
    total_misses = sum(c["misses"] for c in counters)
    if total_hits + total_misses != total_ops:
        problems.append("accounting identity violated")
    if cache.resident_count() > cache.capacity:
        problems.append("occupancy bound violated")
    print(f"ops={total_ops} hits={total_hits} misses={total_misses} "
          f"residents={cache.resident_count()}/{cache.capacity}")
    print(cache.dump())
    for e in errors:
        print("ERROR:", e)
    for p in problems:
        print("INVARIANT:", p)
    print("invariant check:", "PASS" if not (problems or errors) else "FAIL")
    return 1 if (problems or errors) else 0


# ----------------------------------------------------------------------
# parser

def _add_trace_flags(p, required=True):
    p.add_argument("--trace", required=required, help="input trace path")
    p.add_argument("--format", choices=("csv", "bin"), default=None,
                   help="trace format (default: autodetect input, bin output)")
    p.add_argument("--header", action="store_true", help="skip one CSV header line")


def _add_policy_flags(p):
    p.add_argument("--policy", default="clock2q+",
                   choices=[k.value for k in PolicyKind] + ["all"])
    p.add_argument("--size-frac", type=float, action="append", default=None,
                   help="cache size as a fraction of the trace footprint (repeatable)")
    p.add_argument("--size-blocks", type=int, default=None)
    p.add_argument("--window-frac", type=float, default=None)
    p.add_argument("--ghost-frac", type=float, default=None)
    p.add_argument("--reinsertion-limit", default=None, metavar="N|inf")
    p.add_argument("--dirty", action="store_true", help="enable the dirty-block model")
    p.add_argument("--flush-age-sec", type=int, default=30)
    p.add_argument("--watermarks", default=None, metavar="LO,HI")
    p.add_argument("--dirty-mode", choices=("skip", "move"), default="skip")
    p.add_argument("--seed", type=int, default=0)


def _add_output_flags(p):
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--pretty", action="store_true", help="aligned table instead of CSV")
    p.add_argument("--plot-script", action="store_true",
                   help="also emit a matplotlib script next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clock2q",
        description="Cache replacement experiments: trace derivation, simulation, "
                    "analysis, and concurrent-cache stress testing.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("derive", help="derive a metadata trace by dividing block numbers by the fan-out")
    _add_trace_flags(p)
    p.add_argument("--fanout", type=int, default=200)
    p.add_argument("--op-mode", choices=("preserve", "all_read"), default="preserve")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_derive)

    p = subs.add_parser("simulate", help="replay a trace against one or all policies")
    _add_trace_flags(p)
    _add_policy_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("compare", help="improvement over the clock baseline for every policy")
    _add_trace_flags(p)
    _add_policy_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_compare)

    p = subs.add_parser("curve", help="miss-ratio curve across cache sizes")
    _add_trace_flags(p)
    _add_policy_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_curve)

    p = subs.add_parser("nrd", help="next-reuse-distance histogram of small-FIFO departures")
    _add_trace_flags(p)
    _add_policy_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_nrd)

    p = subs.add_parser("generate", help="synthesize a trace")
    p.add_argument("kind", choices=("zipf", "correlated"))
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--universe", type=int, default=10_000)
    p.add_argument("--write-frac", type=float, default=0.0)
    p.add_argument("--req-per-sec", type=int, default=0)
    p.add_argument("--base", default=None, help="base trace for correlated injection")
    p.add_argument("--burst-k", type=int, default=3)
    p.add_argument("--burst-span", type=int, default=5)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "bin"), default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = subs.add_parser("stress", help="concurrent cache stress run with invariant checks")
    p.add_argument("--threads", type=int, default=8)
    p.add_argument("--ops", type=int, default=100_000)
    p.add_argument("--capacity", type=int, default=2048)
    p.add_argument("--reserve", type=int, default=8192)
    p.add_argument("--universe", type=int, default=8192)
    p.add_argument("--block-size", type=int, default=64)
    p.add_argument("--write-frac", type=float, default=0.3)
    p.add_argument("--resize-plan", default=None, metavar="AT:FACTOR[,AT:FACTOR...]",
                   help="resize to FACTOR x capacity once AT fraction of ops completed")
    p.add_argument("--check-lock-order", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stress)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kind", None) == "correlated" and not args.base:
        parser.error("generate correlated requires --base")
    try:
        return args.func(args)
    except (ConfigError, trace_mod.TraceFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

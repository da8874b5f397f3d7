"""Clock2Q+ cache replacement toolkit.

Policy state machines (``policy``), block-trace parsing, derivation and
synthesis (``trace``), a trace-driven simulator with a dirty-block model
(``sim``), evaluation analyses (``analysis``), and a thread-safe
fixed-capacity block cache with live resizing (``cache``).
"""

from .policy import (
    AccessOutcome,
    BlockId,
    ConfigError,
    Destination,
    EvictionEvent,
    EvictionImpossible,
    OutcomeKind,
    PolicyConfig,
    PolicyKind,
    PolicyState,
    QueueSnapshot,
    Region,
    new_policy,
)
from .trace import (
    READ,
    WRITE,
    TraceFormatError,
    TraceMeta,
    TraceRequest,
    compute_meta,
    derive_metadata,
    expand_multiblock,
    generate_correlated,
    generate_zipf,
    load_trace,
    write_trace,
)
from .sim import (
    DEFAULT_SIZE_FRACS,
    DirtyModel,
    SimResult,
    dirty_mode_delta,
    simulate,
    sweep_sizes,
)
from .analysis import (
    Improvement,
    NrdHistogram,
    NrdReport,
    compare_report,
    improvement,
    miss_ratio_curve,
    nrd_report,
)
from .cache import (
    CacheHandle,
    ConcurrentCache,
    ContentionError,
    LoadFailed,
    ResizeBusy,
)

__all__ = [
    "AccessOutcome",
    "BlockId",
    "CacheHandle",
    "ConcurrentCache",
    "ConfigError",
    "ContentionError",
    "DEFAULT_SIZE_FRACS",
    "Destination",
    "DirtyModel",
    "EvictionEvent",
    "EvictionImpossible",
    "Improvement",
    "LoadFailed",
    "NrdHistogram",
    "NrdReport",
    "OutcomeKind",
    "PolicyConfig",
    "PolicyKind",
    "PolicyState",
    "QueueSnapshot",
    "READ",
    "Region",
    "ResizeBusy",
    "SimResult",
    "TraceFormatError",
    "TraceMeta",
    "TraceRequest",
    "WRITE",
    "compare_report",
    "compute_meta",
    "derive_metadata",
    "dirty_mode_delta",
    "expand_multiblock",
    "generate_correlated",
    "generate_zipf",
    "improvement",
    "load_trace",
    "miss_ratio_curve",
    "new_policy",
    "nrd_report",
    "simulate",
    "sweep_sizes",
    "write_trace",
]

__version__ = "0.1.0"

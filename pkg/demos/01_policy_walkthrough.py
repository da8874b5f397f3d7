"""Walk the windowed policy through a tiny correlated workload.

Shows how the correlation window keeps a burst of re-references from
setting the ref bit, and how the ref bit set after the window expires
sends the block to the main clock instead of the ghost.
"""

from clock2q import PolicyKind, PolicyState


def show(state, label):
    snap = state.snapshot()
    window = ["*" if w else " " for w in snap.small_in_window]
    print(f"{label:28s} small={list(zip(snap.small_keys, window, snap.small_ref))} "
          f"main={snap.main_keys} ghost={snap.ghost_keys}")


state = PolicyState.new(PolicyKind.CLOCK2Q_PLUS, 20)   # small 2, window 1
print(f"cache of 20 blocks: small={state.small_size} window={state.window_size} "
      f"main={state.main_size} ghost={state.ghost_size}\n")

print(state.access(1).kind.value, "<- block 1 enters the small FIFO")
show(state, "after first touch of 1")

print(state.access(1).kind.value, "<- burst re-reference, still in the window")
show(state, "ref bit NOT set")

state.access(2)
print(state.access(1).kind.value, "<- block 2 pushed 1 out of the window")
show(state, "now the ref bit IS set")

out = state.access(3)
ev = out.evictions[0]
print(f"\nblock 3 arrives; small FIFO is full -> {ev.key} departs to {ev.destination.value}")
show(state, "block 1 promoted to main")

print("\nNow the same burst pattern, but the block is never touched again:")
state2 = PolicyState.new(PolicyKind.CLOCK2Q_PLUS, 20)
state2.access(7)
state2.access(7)          # burst inside the window: no ref bit
state2.access(8)
out = state2.access(9)
ev = out.evictions[0]
print(f"block {ev.key} departs to the {ev.destination.value} "
      f"(a one-burst wonder never pollutes the main clock)")

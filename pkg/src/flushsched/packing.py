"""Packed nodes, packed sets (schedule-driven and oblivious), starting times.

A node is *packed* when at least B/6 messages target its subtree and are not
already claimed by a deeper packed node; the root is packed unconditionally
and claims every leftover message.  Each packed node's contents are further
split into *packed sets* of size between B/6 and B/2 (a lone undersized root
set is allowed).  For the schedule-driven variant the split follows flush
order in a given schedule; the oblivious variant uses tree order only.

All B/6, B/12, B/2 comparisons are exact integer comparisons (count*6 >= B
and friends); nothing here uses floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import Schedule, ScheduleError, WormsInstance


@dataclass(frozen=True)
class PackedNode:
    node: int
    contents: tuple  # message ids, deterministic order


@dataclass(frozen=True)
class PackedSet:
    id: int
    parent_node: int
    members: tuple
    index_in_parent: int
    starting_time: int | None = None


@dataclass(frozen=True)
class PackingResult:
    packed_nodes: tuple
    sets: tuple
    set_of_message: dict  # message id -> set id
    kind: str             # "schedule" | "oblivious"

    def sets_of_node(self, v):
        return [s for s in self.sets if s.parent_node == v]

    def node_of_message(self, m):
        return self.sets[self.set_of_message[m]].parent_node

    def debug_dump(self):
        lines = []
        for pn in self.packed_nodes:
            lines.append("packed node %d: %d messages" % (pn.node, len(pn.contents)))
            for s in self.sets:
                if s.parent_node == pn.node:
                    tau = "-" if s.starting_time is None else s.starting_time
                    lines.append("  set %d (#%d, tau=%s): %s" % (s.id, s.index_in_parent, tau, list(s.members)))
        return "\n".join(lines) + "\n"


class FlushTimes:
    """Per-message arrival and flush-out steps recorded by replaying a schedule.

    A message flushed across (v, v') at step t is "flushed out of v at t" and
    "arrives at v' at t".  Only applied (valid) flushes are replayed.

    With `nodes` given, arrival/out_time are recorded at those nodes only
    (position replay and the overfilling verdict are unaffected).
    """

    def __init__(self, instance: WormsInstance, schedule: Schedule,
                 nodes: set | None = None):
        tree = instance.tree
        n = instance.n_messages
        P, B = instance.params.P, instance.params.B
        pos = [tree.root] * n
        out_time = [dict() for _ in range(n)]  # m -> {node: step}
        arrival = [dict() for _ in range(n)]   # m -> {node: step}
        self.out_time, self.arrival = out_time, arrival
        rejected = False
        root = tree.root
        parent = tree.parent
        n_nodes = len(tree)
        if nodes is None or root in nodes:
            for m in range(n):
                arrival[m][root] = 0
        for t, step in enumerate(schedule.steps, start=1):
            if len(step) > P:
                rejected = True
            seen = set()
            for f in step:
                src, dst, msgs = f.src, f.dst, f.messages
                k = len(msgs)
                if not (0 <= dst < n_nodes) or parent[dst] != src \
                        or k > B or (k and (min(msgs) < 0 or max(msgs) >= n)):
                    rejected = True
                    continue
                before = len(seen)
                seen.update(msgs)
                if len(seen) - before != k \
                        or any(pos[m] != src for m in msgs):
                    # overlapping or misplaced messages; verdict is already
                    # settled, so the polluted seen set is harmless
                    rejected = True
                    continue
                rec_src = nodes is None or src in nodes
                rec_dst = nodes is None or dst in nodes
                if rec_src or rec_dst:
                    for m in msgs:
                        if rec_src:
                            out_time[m][src] = t
                        if rec_dst:
                            arrival[m][dst] = t
                        pos[m] = dst
                else:
                    for m in msgs:
                        pos[m] = dst
        self.final_pos = pos
        # same classification as the full validator's "overfilling" verdict:
        # every flush applied and every message delivered
        self.is_overfilling = not rejected and all(
            pos[m] == instance.targets[m] for m in range(n))

    def completion(self, instance, m):
        return self.arrival[m].get(instance.targets[m])


def _ceil_div(a, b):
    return -(-a // b)


def compute_packed_nodes(instance: WormsInstance):
    """Bottom-up claiming pass.  Returns PackedNodes in descending height
    order (root last); contents are disjoint and cover all messages."""
    cached = getattr(instance, "_packed_nodes", None)
    if cached is not None:
        return cached
    tree = instance.tree
    B = instance.params.B
    unclaimed = {}
    for m, t in enumerate(instance.targets):
        unclaimed.setdefault(t, []).append(m)
    # only nodes on a target-to-root path can ever hold messages; visit them
    # children before parents
    active = set()
    for t in set(instance.targets):
        v = t
        while v is not None and v not in active:
            active.add(v)
            v = tree.parent[v]
    packed = []
    for v in sorted(active, key=lambda v: (-tree.height_of[v], v)):
        if v == tree.root:
            continue
        p = tree.parent[v]
        mine = unclaimed.pop(v, [])
        if len(mine) * 6 >= B:
            packed.append(PackedNode(v, tuple(sorted(mine))))
        else:
            unclaimed.setdefault(p, []).extend(mine)
    root_contents = unclaimed.pop(tree.root, [])
    packed.append(PackedNode(tree.root, tuple(sorted(root_contents))))
    instance._packed_nodes = packed
    return packed


def _child_towards(tree, v, target):
    """The child of v on the path from v down to `target`, memoized on the
    tree (many messages share a target)."""
    cache = getattr(tree, "_child_towards_cache", None)
    if cache is None:
        cache = tree._child_towards_cache = {}
    key = (v, target)
    hit = cache.get(key)
    if hit is None:
        u = target
        while tree.parent[u] != v:
            u = tree.parent[u]
        hit = cache[key] = u
    return hit


def _partition_close_at_min(items, B):
    """Greedy runs that close as soon as a run reaches B/6 messages; a
    trailing short run is folded into the last one (size stays <= B/2)."""
    sets, cur = [], []
    for it in items:
        cur.append(it)
        if len(cur) * 6 >= B:
            sets.append(cur)
            cur = []
    if cur:
        if sets:
            sets[-1].extend(cur)
        else:
            sets.append(cur)
    return sets


def _partition_fill_to_max(items, B):
    """Greedy runs filled up to B/2, keeping every run at least B/6 by
    shrinking the second-to-last take when the remainder would be short."""
    mn = _ceil_div(B, 6)
    mx = B // 2
    sets = []
    i, n = 0, len(items)
    while i < n:
        rest = n - i
        if rest <= mx:
            take = rest
        elif rest - mx >= mn:
            take = mx
        else:
            take = rest - mn
        sets.append(list(items[i:i + take]))
        i += take
    return sets


def _partition_groups(groups, B):
    """Accumulate whole child-groups until a run reaches B/6; trailing short
    remainder folds into the final run."""
    sets, cur = [], []
    for g in groups:
        cur.extend(g)
        if len(cur) * 6 >= B:
            sets.append(cur)
            cur = []
    if cur:
        if sets:
            sets[-1].extend(cur)
        else:
            sets.append(cur)
    return sets


def _build_sets(instance, packed_nodes, member_lists_fn):
    sets = []
    set_of_message = {}
    for pn in packed_nodes:
        for idx, members in enumerate(member_lists_fn(pn), start=1):
            s = PackedSet(len(sets), pn.node, tuple(members), idx)
            sets.append(s)
            for m in members:
                set_of_message[m] = s.id
    return sets, set_of_message


def compute_packed_sets(instance: WormsInstance, schedule: Schedule,
                        times: FlushTimes | None = None) -> PackingResult:
    """Schedule-driven packed sets.

    Leaf packed nodes are split in completion order, closing each run at
    B/6.  Internal packed nodes group contents by child, order groups by the
    last time any group member is flushed out of the node, and accumulate
    whole groups (so messages flushed together to a child stay together).
    """
    times = times if times is not None else FlushTimes(instance, schedule)
    if not times.is_overfilling:
        raise ScheduleError("packed sets require an overfilling schedule")
    tree = instance.tree
    B = instance.params.B
    packed_nodes = compute_packed_nodes(instance)

    def member_lists(pn):
        v = pn.node
        if not pn.contents:
            return []
        if tree.is_leaf(v):
            ordered = sorted(pn.contents, key=lambda m: (times.arrival[m][v], m))
            return _partition_close_at_min(ordered, B)
        groups = {}
        for m in pn.contents:
            groups.setdefault(_child_towards(tree, v, instance.targets[m]), []).append(m)
        keyed = []
        for c, ms in groups.items():
            ms.sort(key=lambda m: (times.out_time[m][v], m))
            keyed.append((max(times.out_time[m][v] for m in ms), c, ms))
        keyed.sort(key=lambda kc: (kc[0], kc[1]))
        return _partition_groups([ms for _, _, ms in keyed], B)

    sets, som = _build_sets(instance, packed_nodes, member_lists)
    return PackingResult(tuple(packed_nodes), tuple(sets), som, "schedule")


def compute_oblivious_packed_sets(instance: WormsInstance) -> PackingResult:
    """Schedule-independent packed sets: child groups in ascending child id,
    leaf contents in ascending message id filled up to B/2."""
    tree = instance.tree
    B = instance.params.B
    packed_nodes = compute_packed_nodes(instance)

    def member_lists(pn):
        v = pn.node
        if not pn.contents:
            return []
        if tree.is_leaf(v):
            return _partition_fill_to_max(sorted(pn.contents), B)
        groups = {}
        for m in pn.contents:
            groups.setdefault(_child_towards(tree, v, instance.targets[m]), []).append(m)
        ordered = [sorted(groups[c]) for c in sorted(groups)]
        return _partition_groups(ordered, B)

    sets, som = _build_sets(instance, packed_nodes, member_lists)
    return PackingResult(tuple(packed_nodes), tuple(sets), som, "oblivious")


def compute_starting_times(instance: WormsInstance, schedule: Schedule,
                           packing: PackingResult,
                           times: FlushTimes | None = None) -> PackingResult:
    """Assign each packed set its starting time relative to `schedule`.

    Sets of a node are ordered by the last step any member leaves the node
    (for a leaf node: arrives at it).  The first set of an internal node
    starts when its ceil(B/12)-th message has been flushed out; later sets
    start when the previous set's last message leaves.  A leaf node's sets
    start when their ceil(B/12)-th message arrives.
    """
    times = times if times is not None else FlushTimes(instance, schedule)
    tree = instance.tree
    B = instance.params.B
    k12 = _ceil_div(B, 12)

    by_node = {}
    for s in packing.sets:
        by_node.setdefault(s.parent_node, []).append(s)

    new_sets = {}
    for v, sets in by_node.items():
        leaf = tree.is_leaf(v)

        def last_time(s):
            if leaf:
                return max(times.arrival[m][v] for m in s.members)
            return max(times.out_time[m][v] for m in s.members)

        ordered = sorted(sets, key=lambda s: (last_time(s), s.index_in_parent))
        for i, s in enumerate(ordered, start=1):
            if leaf:
                arr = sorted(times.arrival[m][v] for m in s.members)
                tau = arr[min(k12, len(arr)) - 1]
            elif i == 1:
                outs = sorted(times.out_time[m][v] for m in s.members)
                tau = outs[min(k12, len(outs)) - 1]
            else:
                tau = last_time(ordered[i - 2])
            new_sets[s.id] = replace(s, index_in_parent=i, starting_time=tau)

    sets = tuple(new_sets[s.id] for s in packing.sets)
    return PackingResult(packing.packed_nodes, sets, dict(packing.set_of_message), packing.kind)

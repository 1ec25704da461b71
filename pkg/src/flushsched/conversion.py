"""Conversion of an overfilling flush schedule S into a valid schedule.

The conversion builds two partial schedules and interleaves them:

  * U sends each packed set from the root to its packed node as a chain of
    back-to-back flushes, greedily over P lanes, in order of set starting
    times.  Chains never cross an epoch boundary (h steps per epoch) so that
    a set's messages occupy intermediate nodes for at most one epoch.
  * L replays the flushes of S at or below each message's packed node:
    flushes out of the packed node wait until well past the set's starting
    time (and past its arrival in the upper schedule); flushes further down
    wait for their messages.
  * U_r is U with extra flushes spliced in: before a set arrives at an
    internal packed node, any still-pending L flushes out of that node are
    performed early, so the node is empty for the newcomers.

Since L's thresholds depend on arrival times in U_r, and U_r's insertions
depend on L, the two are recomputed alternately until the arrival times stop
moving; they are monotone so this settles quickly.

Each epoch i of U_r lands in steps 3hi+h+1 .. 3hi+2h of the combined
schedule and epoch i of L in steps 3hi+2h+1 .. 3hi+3h, so upper flushes of
an epoch finish before lower flushes of the same epoch begin.  A message is
moved across each edge at most once; later duplicate flushes of the same
message on the same edge are dropped.

The combined schedule is valid and costs at most 169x the cost of S.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .model import Flush, Schedule, ScheduleError, WormsInstance
from .packing import (
    FlushTimes,
    PackingResult,
    compute_packed_nodes,
    compute_packed_sets,
    compute_starting_times,
)

CONVERSION_FACTOR = 169


@dataclass
class _SetChain:
    set_id: int
    node: int          # packed node
    path: list         # nodes root .. packed node
    members: tuple
    tau: int           # starting time
    start: int = 0     # first flush step in U / U_r
    arrival: int = 0   # step the members reach the packed node


@dataclass
class _LowerFlush:
    src: int
    dst: int
    messages: tuple
    set_id: int
    from_parent: bool  # src is the messages' packed node
    step: int = 0      # assigned step in L
    preds: tuple = ()  # lower flushes that deliver these messages to src


@dataclass
class ConversionResult:
    schedule: Schedule
    packing: PackingResult
    upper_steps: dict = field(default_factory=dict)  # set id -> (start, arrival)
    tau: dict = field(default_factory=dict)          # set id -> starting time
    u_arrivals: dict = field(default_factory=dict)   # set id -> arrival, before insertions
    ur_arrivals: dict = field(default_factory=dict)  # set id -> arrival, final
    l_completion: dict = field(default_factory=dict)  # message -> leaf arrival step in L


class _Occupancy:
    """Tracks per-step flush counts with capacity P; finds free slots with a
    path-compressed skip pointer."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.count = {}
        self.skip = {}

    def _next(self, t):
        seen = []
        while self.count.get(t, 0) >= self.capacity:
            seen.append(t)
            t = self.skip.get(t, t + 1)
        for s in seen:
            self.skip[s] = t
        return t

    def place(self, lo):
        t = self._next(max(1, lo))
        self.count[t] = self.count.get(t, 0) + 1
        return t


def _epoch_fit(start, length, h):
    """Smallest step >= start from which a length-run stays in one epoch."""
    if length <= 1:
        return start
    if (start - 1) // h != (start + length - 2) // h:
        return ((start - 1) // h + 1) * h + 1
    return start


def _build_chains(instance, packing):
    tree = instance.tree
    chains = []
    for pset in packing.sets:
        path = tree.path_from_root(pset.parent_node)
        chains.append(_SetChain(
            set_id=pset.id,
            node=pset.parent_node,
            path=path,
            members=tuple(sorted(pset.members)),
            tau=pset.starting_time,
        ))
    chains.sort(key=lambda c: (c.tau, c.set_id))
    return chains


def _lane_greedy(instance, chains, insertions=None):
    """Schedule every chain over P lanes in order of starting time.

    insertions maps set id -> list of _LowerFlush to perform (as single-step
    flushes) before that set's chain arrives.  Returns {set id: list of
    (step, Flush)} including inserted copies keyed by the set whose arrival
    triggered them, and fills in chain.start / chain.arrival.
    """
    P = instance.params.P
    h = instance.tree.h
    lanes = [(1, i) for i in range(P)]
    heapq.heapify(lanes)
    flushes = {c.set_id: [] for c in chains}
    copies = []

    def place_run(desired, length):
        free, lane = heapq.heappop(lanes)
        start = _epoch_fit(max(desired, free, 1), length, h)
        heapq.heappush(lanes, (start + length, lane))
        return start

    for chain in chains:
        length = len(chain.path) - 1
        if length == 0:
            chain.start = 0
            chain.arrival = 0
            continue
        desired = chain.tau - length + 1
        if insertions:
            for lf in insertions.get(chain.set_id, ()):
                step = place_run(lf.arrival_floor, 1)
                copies.append((chain.set_id, step, lf))
        chain.start = place_run(desired, length)
        chain.arrival = chain.start + length - 1
        for k in range(length):
            f = Flush(chain.path[k], chain.path[k + 1], list(chain.members))
            flushes[chain.set_id].append((chain.start + k, f))
    for sid, step, lf in copies:
        flushes[sid].append((step, Flush(lf.src, lf.dst, list(lf.messages))))
    return flushes


def _lower_flushes_of(instance, schedule, packing):
    """Extract the at-or-below-packed-node part of every flush of S, in S
    order, grouped so each lower flush has a single packed set."""
    tree = instance.tree
    depth = tree.height_of
    # packed parent (and its depth) per message, indexed by message id
    n = instance.n_messages
    pnode_of = [0] * n
    pdepth_of = [0] * n
    sid_of = [0] * n
    for pset in packing.sets:
        pn, pd, sid = pset.parent_node, depth[pset.parent_node], pset.id
        for m in pset.members:
            pnode_of[m] = pn
            pdepth_of[m] = pd
            sid_of[m] = sid
    lower = []
    for step in schedule.steps:
        for f in step:
            by_set = {}
            d_src = depth[f.src]
            for m in f.messages:
                # f.src and the packed node both sit on the root-to-target
                # path of m, so subtree membership is a depth comparison
                if d_src >= pdepth_of[m]:
                    by_set.setdefault(sid_of[m], []).append(m)
            if not by_set:
                continue
            items = by_set.items() if len(by_set) == 1 \
                else sorted(by_set.items())
            for sid, msgs in items:
                lower.append(_LowerFlush(
                    src=f.src, dst=f.dst, messages=tuple(msgs), set_id=sid,
                    from_parent=(f.src == pnode_of[msgs[0]]),
                ))
    return lower


def _schedule_lower(instance, lower, tau_of, tau_hat):
    """Assign a step in L to every lower flush.

    Flushes out of the packed node go strictly after max(27 tau, arrival in
    the upper schedule); other flushes go strictly after their messages have
    reached the source node."""
    occ = _Occupancy(instance.params.P)
    for lf in lower:
        if lf.from_parent:
            lo = max(27 * tau_of[lf.set_id], tau_hat.get(lf.set_id, 0)) + 1
        else:
            lo = max(p.step for p in lf.preds) + 1
        lf.step = occ.place(lo)


def _link_preds(lower):
    """Each non-from_parent lower flush depends on the earlier lower flushes
    that delivered its messages to its source; a message visits each node
    once, so the delivering flush is unique.  The links survive rescheduling
    rounds since only steps change."""
    delivered = {}  # message << 24 | node -> delivering flush
    for lf in lower:
        if not lf.from_parent:
            src = lf.src
            lf.preds = tuple({id(p): p for p in
                              (delivered[(m << 24) | src]
                               for m in lf.messages)}.values())
        dst = lf.dst
        for m in lf.messages:
            delivered[(m << 24) | dst] = lf


def _pending_insertions(instance, chains, lower):
    """For each internal, non-root packed node: when set C_i arrives, copy
    into U_r the L flushes out of that node, of earlier sets, still pending
    near the arrival (step > arrival - h).  Each flush is copied once."""
    tree = instance.tree
    h = tree.h
    by_node = {}
    index_of = {}
    for chain in chains:
        by_node.setdefault(chain.node, []).append(chain)
        index_of[chain.set_id] = len(by_node[chain.node]) - 1
    out_of_node = {}
    for lf in lower:
        if lf.from_parent:
            out_of_node.setdefault(lf.src, []).append(lf)
    insertions = {}
    for node, node_chains in by_node.items():
        if node == tree.root or node in tree.leaves:
            continue
        pending = out_of_node.get(node, [])
        used = set()
        for chain in node_chains:
            picks = []
            for lf in pending:
                if id(lf) in used:
                    continue
                if index_of[lf.set_id] >= index_of[chain.set_id]:
                    continue
                if lf.step > chain.arrival - h:
                    arr = next(c.arrival for c in node_chains
                               if c.set_id == lf.set_id)
                    lf.arrival_floor = arr + 1
                    picks.append(lf)
                    used.add(id(lf))
            if picks:
                insertions[chain.set_id] = picks
    return insertions


def convert_to_valid(instance: WormsInstance, schedule: Schedule,
                     *, max_rounds: int = 12) -> ConversionResult:
    """Turn an overfilling schedule into a valid one (cost <= 169x)."""
    packed_nodes = compute_packed_nodes(instance)
    times = FlushTimes(instance, schedule,
                       nodes={pn.node for pn in packed_nodes})
    packing = compute_packed_sets(instance, schedule, times)
    packing = compute_starting_times(instance, schedule, packing, times)
    chains = _build_chains(instance, packing)
    tau_of = {c.set_id: c.tau for c in chains}

    lower = _lower_flushes_of(instance, schedule, packing)
    _link_preds(lower)
    insertions = {}

    upper = _lane_greedy(instance, chains)
    u_arrivals = {c.set_id: c.arrival for c in chains}
    tau_hat = dict(u_arrivals)
    _schedule_lower(instance, lower, tau_of, tau_hat)

    for _ in range(max_rounds):
        insertions = _pending_insertions(instance, chains, lower)
        upper = _lane_greedy(instance, chains, insertions)
        new_hat = {c.set_id: c.arrival for c in chains}
        _schedule_lower(instance, lower, tau_of, new_hat)
        if new_hat == tau_hat:
            break
        tau_hat = new_hat

    l_completion = {}
    for lf in lower:
        for m in lf.messages:
            if lf.dst == instance.targets[m]:
                l_completion[m] = lf.step

    risky = {m for picks in insertions.values()
             for lf in picks for m in lf.messages}
    combined = _interleave(instance, upper, lower, risky)
    return ConversionResult(
        schedule=combined,
        packing=packing,
        upper_steps={c.set_id: (c.start, c.arrival) for c in chains},
        tau=tau_of,
        u_arrivals=u_arrivals,
        ur_arrivals={c.set_id: c.arrival for c in chains},
        l_completion=l_completion,
    )


def _interleave(instance, upper, lower, risky=frozenset()):
    h = instance.tree.h
    timed = []  # (combined step, order tag, src, dst, messages)
    for flist in upper.values():
        for step, f in flist:
            i, t = (step - 1) // h, (step - 1) % h + 1
            timed.append((3 * h * i + h + t, f.src, f.dst, f.messages))
    for lf in lower:
        i, t = (lf.step - 1) // h, (lf.step - 1) % h + 1
        timed.append((3 * h * i + 2 * h + t, lf.src, lf.dst, list(lf.messages)))
    # plain tuple sort: combined steps of the upper and lower phases live in
    # disjoint epoch thirds, and within a phase equal steps are broken by
    # (src, dst), so the order stays deterministic
    timed.sort()
    # only messages of U_r-inserted copies can appear twice; everything else
    # skips the dedup bookkeeping
    crossed = set()  # message << 24 | dst pairs already flushed
    steps = {}
    for when, src, dst, msgs in timed:
        if risky and not risky.isdisjoint(msgs):
            keep = [m for m in msgs if (m << 24) | dst not in crossed]
            if not keep:
                continue
            crossed.update((m << 24) | dst for m in keep)
        else:
            keep = msgs
        steps.setdefault(when, []).append(Flush(src, dst, keep))
    if not steps:
        return Schedule([])
    horizon = max(steps)
    empty = ()
    out = [empty] * horizon
    for t, fl in steps.items():
        out[t - 1] = fl
    return Schedule(out, copy=False)

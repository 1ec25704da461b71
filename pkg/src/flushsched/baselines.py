"""Simple flush schedulers used for comparison.

Both are deterministic.  serial_per_message is always valid; lazy_greedy is
the obvious batching heuristic and is validated by callers like any other
schedule.
"""

from __future__ import annotations

import heapq

from .model import Flush, Schedule, WormsInstance


def serial_per_message(instance: WormsInstance) -> Schedule:
    """Send each message root-to-leaf on its own, as a back-to-back chain of
    single-message flushes, greedily over P lanes in message id order.

    A message in transit moves every step, so no internal node ever holds a
    message across two steps: the result is always valid.
    """
    tree = instance.tree
    P = instance.params.P
    lanes = [(1, i) for i in range(P)]
    heapq.heapify(lanes)
    steps = {}
    for m in range(instance.n_messages):
        path = tree.path_from_root(instance.targets[m])
        free, lane = heapq.heappop(lanes)
        for k in range(len(path) - 1):
            steps.setdefault(free + k, []).append(Flush(path[k], path[k + 1], [m]))
        heapq.heappush(lanes, (free + len(path) - 1, lane))
    horizon = max(steps, default=0)
    return Schedule([steps.get(t, []) for t in range(1, horizon + 1)])


def lazy_greedy(instance: WormsInstance) -> Schedule:
    """Each step, let the <= P fullest nodes each flush their largest
    child-batch (up to B messages).  Ties break by node id, then child id;
    batches take messages in id order."""
    tree = instance.tree
    P, B = instance.params.P, instance.params.B
    paths = {m: tree.path_from_root(instance.targets[m])
             for m in range(instance.n_messages)}
    pos_idx = {m: 0 for m in range(instance.n_messages)}
    pending = {m for m in range(instance.n_messages)
               if len(paths[m]) > 1 and pos_idx[m] < len(paths[m]) - 1}
    steps = []
    while pending:
        load = {}
        for m in pending:
            v = paths[m][pos_idx[m]]
            load.setdefault(v, []).append(m)
        nodes = sorted(load, key=lambda v: (-len(load[v]), v))[:P]
        flushes = []
        for v in nodes:
            by_child = {}
            for m in load[v]:
                by_child.setdefault(paths[m][pos_idx[m] + 1], []).append(m)
            child = min(by_child, key=lambda c: (-len(by_child[c]), c))
            batch = sorted(by_child[child])[:B]
            flushes.append(Flush(v, child, batch))
            for m in batch:
                pos_idx[m] += 1
                if pos_idx[m] == len(paths[m]) - 1:
                    pending.discard(m)
        steps.append(flushes)
    return Schedule(steps)

"""Exact exponential-time solvers used as ground truth in tests.

Only run these on tiny inputs; both are memoized searches over subset or
position states.
"""

from __future__ import annotations

from functools import lru_cache

from .model import Flush, Schedule, WormsInstance
from .outtree import OuttreeInstance, TaskSchedule


def brute_force_outtree(instance: OuttreeInstance):
    """Optimal weighted completion cost for unit tasks with outtree
    precedence on P machines, plus one optimal schedule.

    State: frozenset of finished tasks.  Per step we add the remaining
    weight once (every unfinished task's completion is at least one step
    away), then try all maximal ready subsets of size <= P.  Restricting to
    maximal steps is safe: leaving a machine idle while a task is ready
    never helps when tasks are unit length.
    """
    n = len(instance)
    weight = instance.weight
    parent = instance.parent
    total_weight = sum(weight)
    all_tasks = frozenset(range(n))

    from itertools import combinations

    @lru_cache(maxsize=None)
    def best(done):
        if len(done) == n:
            return 0, ()
        ready = [j for j in range(n)
                 if j not in done and (parent[j] is None or parent[j] in done)]
        pending_weight = total_weight - sum(weight[j] for j in done)
        k = min(instance.machines, len(ready))
        best_cost = None
        best_steps = None
        for step in combinations(ready, k):
            cost, rest = best(done | frozenset(step))
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_steps = (step,) + rest
        return pending_weight + best_cost, best_steps

    cost, steps = best(frozenset())
    best.cache_clear()
    return cost, TaskSchedule([list(s) for s in steps])


def enumerate_outtree_schedules(instance: OuttreeInstance):
    """Yield every feasible schedule whose steps are maximal (each step runs
    min(P, #ready) tasks).  For unit tasks this loses no optima of any
    monotone objective: moving a ready task earlier into an idle slot never
    raises any task's completion time."""
    from itertools import combinations

    n = len(instance)
    parent = instance.parent

    def rec(done, steps):
        if len(done) == n:
            yield TaskSchedule([list(s) for s in steps])
            return
        ready = [j for j in range(n)
                 if j not in done and (parent[j] is None or parent[j] in done)]
        k = min(instance.machines, len(ready))
        for step in combinations(ready, k):
            steps.append(step)
            yield from rec(done | frozenset(step), steps)
            steps.pop()

    yield from rec(frozenset(), [])


def brute_force_worms(instance: WormsInstance, *, overfilling: bool = False):
    """Optimal flush-schedule cost by exhaustive search, plus a schedule.

    State: per-message position index along its root-to-leaf path, plus the
    previous positions (for the two-step space census when overfilling is
    False).  Per step, each active edge gets a batch of its pending
    messages, split into flushes of B.  Within an (edge, target leaf) class
    messages are interchangeable, so batches take id-ordered prefixes per
    class.
    """
    tree = instance.tree
    B = instance.params.B
    P = instance.params.P
    n = instance.n_messages
    paths = [tree.path_from_root(instance.targets[m]) for m in range(n)]
    plen = [len(p) for p in paths]

    def space_ok(prev_pos, pos, moved):
        # mirror of validate_schedule: messages sitting at the same internal
        # non-root node over two consecutive snapshots, minus those flushed
        # out in the following step, must fit in B
        census = {}
        for m in range(n):
            if prev_pos[m] == pos[m] and not moved[m]:
                v = paths[m][pos[m]]
                if v != tree.root and not tree.is_leaf(v):
                    census[v] = census.get(v, 0) + 1
        return all(c <= B for c in census.values())

    seen = {}
    best = [None, None]

    def rec(pos, prev_pos, cost_so_far, steps):
        unfinished = [m for m in range(n) if pos[m] < plen[m] - 1]
        if not unfinished:
            if best[0] is None or cost_so_far < best[0]:
                best[0] = cost_so_far
                best[1] = list(steps)
            return
        # every unfinished message is pending for at least its remaining
        # path length worth of steps
        bound = cost_so_far + sum(plen[m] - 1 - pos[m] for m in unfinished)
        if best[0] is not None and bound >= best[0]:
            return
        key = (pos, prev_pos)
        prior = seen.get(key)
        if prior is not None and prior <= cost_so_far:
            return
        seen[key] = cost_so_far

        step_cost = len(unfinished)  # each pays one step of waiting
        by_edge = {}
        for m in unfinished:
            e = (paths[m][pos[m]], paths[m][pos[m] + 1])
            by_edge.setdefault(e, {}).setdefault(instance.targets[m], []).append(m)
        edges = sorted(by_edge)
        for classes in by_edge.values():
            for msgs in classes.values():
                msgs.sort()

        def edge_batches(e, cap):
            # all batches for edge e of size <= cap: an id-ordered prefix
            # from each target class
            class_lists = sorted(by_edge[e].values())

            def pick(i, acc):
                if i == len(class_lists):
                    if acc:
                        yield tuple(acc)
                    return
                msgs = class_lists[i]
                for take in range(0, min(len(msgs), cap - len(acc)) + 1):
                    yield from pick(i + 1, acc + msgs[:take])

            yield from pick(0, [])

        # one batch per active edge; a batch of x messages uses ceil(x / B)
        # of the P flush slots (several flushes may share an edge per step)
        def combos(i, slots_left, chosen):
            if i == len(edges) or slots_left == 0:
                if chosen:
                    yield tuple(chosen)
                return
            yield from combos(i + 1, slots_left, chosen)
            e = edges[i]
            for batch in edge_batches(e, slots_left * B):
                used = -(-len(batch) // B)
                chosen.append((e, batch))
                yield from combos(i + 1, slots_left - used, chosen)
                chosen.pop()

        for combo in combos(0, P, []):
            new_pos = list(pos)
            moved = [False] * n
            for _, batch in combo:
                for m in batch:
                    new_pos[m] += 1
                    moved[m] = True
            new_pos = tuple(new_pos)
            if not overfilling and not space_ok(prev_pos, pos, moved):
                continue
            rec(new_pos, pos, cost_so_far + step_cost, steps + [combo])

    start = tuple([0] * n)
    rec(start, start, 0, [])

    cost = best[0]
    flush_steps = []
    for combo in best[1]:
        step = []
        for e, batch in combo:
            for k in range(0, len(batch), B):
                step.append(Flush(e[0], e[1], list(batch[k:k + B])))
        flush_steps.append(step)
    return cost, Schedule(flush_steps)

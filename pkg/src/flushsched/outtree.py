"""Unit-time task scheduling with out-forest precedence and weighted
completion time on P identical machines.

Priorities everywhere are *task densities*: for a task j, the best
weight-per-task ratio over contiguous subtrees rooted at j.  Densities are
kept as exact integer pairs (weight, size) and compared by cross
multiplication; ties break by ascending task id.

Schedulers:
  * horn_schedule  -- single machine greedy by density (optimal for P=1)
  * phtf_schedule  -- the same greedy with P slots per step
  * mphtf_schedule -- dilates each PHTF step into two steps and works through
    each touched density tree twice as fast; a constant-factor approximation
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class OuttreeError(ValueError):
    pass


@dataclass(frozen=True)
class Task:
    id: int
    weight: int
    parent: int | None = None


class OuttreeInstance:
    def __init__(self, tasks, machines):
        if machines < 1:
            raise OuttreeError("machines must be >= 1")
        self.tasks = list(tasks)
        self.machines = machines
        n = len(self.tasks)
        self.weight = [0] * n
        self.parent = [None] * n
        self.children = [[] for _ in range(n)]
        for i, t in enumerate(self.tasks):
            if t.id != i:
                raise OuttreeError("task ids must be dense 0..n-1")
            if t.weight < 0:
                raise OuttreeError("task %d: negative weight" % i)
            self.weight[i] = t.weight
            self.parent[i] = t.parent
        for i, p in enumerate(self.parent):
            if p is None:
                continue
            if not (0 <= p < n) or p == i:
                raise OuttreeError("task %d: bad parent %r" % (i, p))
            self.children[p].append(i)
        # cycle check via root-reachability
        self.roots = [i for i in range(n) if self.parent[i] is None]
        seen = 0
        stack = list(self.roots)
        order = []
        while stack:
            v = stack.pop()
            order.append(v)
            seen += 1
            stack.extend(self.children[v])
        if seen != n:
            raise OuttreeError("precedence constraints contain a cycle")
        self.topo_order = order

    def __len__(self):
        return len(self.tasks)

    def to_document(self):
        return {
            "P": self.machines,
            "tasks": [
                {"id": t.id, "weight": t.weight, "parent": t.parent} for t in self.tasks
            ],
        }

    def to_json(self):
        return json.dumps(self.to_document())


def load_outtree(source) -> OuttreeInstance:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (str, bytes)):
        doc = json.loads(source)
    else:
        doc = source
    tasks = [Task(t["id"], t["weight"], t.get("parent")) for t in doc["tasks"]]
    return OuttreeInstance(tasks, doc["P"])


class TaskSchedule:
    def __init__(self, steps):
        self.steps = [tuple(s) for s in steps]
        self.completion = {}
        for t, step in enumerate(self.steps, start=1):
            for j in step:
                self.completion[j] = t

    def __len__(self):
        return len(self.steps)

    def makespan(self):
        return max(self.completion.values(), default=0)

    def to_document(self):
        return {"steps": [list(s) for s in self.steps]}


def check_feasible(instance: OuttreeInstance, schedule: TaskSchedule):
    """Raise OuttreeError unless every task runs exactly once, at most P per
    step, strictly after its parent."""
    seen = {}
    for t, step in enumerate(schedule.steps, start=1):
        if len(step) > instance.machines:
            raise OuttreeError("step %d schedules %d > P tasks" % (t, len(step)))
        for j in step:
            if j in seen:
                raise OuttreeError("task %d scheduled twice" % j)
            seen[j] = t
    if len(seen) != len(instance):
        raise OuttreeError("only %d of %d tasks scheduled" % (len(seen), len(instance)))
    for j, t in seen.items():
        p = instance.parent[j]
        if p is not None and seen[p] >= t:
            raise OuttreeError("task %d runs at %d, not after its parent" % (j, t))


def weighted_completion_cost(instance: OuttreeInstance, schedule: TaskSchedule) -> int:
    check_feasible(instance, schedule)
    return sum(instance.weight[j] * schedule.completion[j] for j in range(len(instance)))


# --- task densities (max weight-per-task subtree rooted at each task) ------

def _denser(w1, s1, w2, s2):
    """density w1/s1 > w2/s2, exactly."""
    return w1 * s2 > w2 * s1


def _compute_density_forest(instance: OuttreeInstance):
    """Bottom-up density computation.

    For each task j, F_j grows from {j} by repeatedly absorbing the densest
    candidate subtree hanging off it while that candidate is strictly denser.
    Returns (dens_w, dens_s, merged) where merged[j] lists the roots of the
    subtrees absorbed into F_j; the member set of F_j is {j} plus, closed
    recursively, all absorbed subtrees.
    """
    cached = getattr(instance, "_density_forest", None)
    if cached is not None:
        return cached
    n = len(instance)
    dens_w = list(instance.weight)
    dens_s = [1] * n
    merged = [[] for _ in range(n)]
    # cand[j]: heap of (priority, root) of candidate subtrees not absorbed,
    # melded into the parent afterwards.  The priority -((w << 64) // s)
    # orders densities w/s exactly with a single int compare: two distinct
    # densities differ by at least 1/(s1*s2) > 2**-64 for any instance with
    # fewer than 2**32 tasks, so the scaled floors never collide.
    cand = [[] for _ in range(n)]
    for j in reversed(instance.topo_order):
        heap = cand[j]
        for c in instance.children[j]:
            entry = (-((dens_w[c] << 64) // dens_s[c]), c)
            if len(cand[c]) > len(heap):
                heap, cand[c] = cand[c], heap
            heapq.heappush(heap, entry)
            for e in cand[c]:
                heapq.heappush(heap, e)
            cand[c] = []
        while heap and _denser(dens_w[heap[0][1]], dens_s[heap[0][1]], dens_w[j], dens_s[j]):
            c = heapq.heappop(heap)[1]
            dens_w[j] += dens_w[c]
            dens_s[j] += dens_s[c]
            merged[j].append(c)
        cand[j] = heap
    result = (dens_w, dens_s, merged)
    instance._density_forest = result
    return result


def _density_ranks(instance: OuttreeInstance):
    """Integer rank per task: 0 for the highest density, ties share a rank.
    Lets the schedulers compare priorities with plain ints instead of
    rationals."""
    cached = getattr(instance, "_density_ranks", None)
    if cached is not None:
        return cached
    dens_w, dens_s, _ = _compute_density_forest(instance)
    n = len(instance)
    reduced = [None] * n
    for j in range(n):
        g = gcd(dens_w[j], dens_s[j])
        reduced[j] = (dens_w[j] // g, dens_s[j] // g) if g else (0, 1)
    distinct = sorted(set(reduced), key=lambda ws: Fraction(ws[0], ws[1]),
                      reverse=True)
    rank_of = {ws: r for r, ws in enumerate(distinct)}
    ranks = [rank_of[reduced[j]] for j in range(n)]
    instance._density_ranks = ranks
    return ranks


def _members_of(merged, root):
    out = []
    stack = [root]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(merged[v])
    return out


def task_densities(instance: OuttreeInstance):
    """Map task -> (density as Fraction, members of its densest subtree)."""
    dens_w, dens_s, merged = _compute_density_forest(instance)
    return {
        j: (Fraction(dens_w[j], dens_s[j]), frozenset(_members_of(merged, j)))
        for j in range(len(instance))
    }


@dataclass(frozen=True)
class HornTree:
    root: int
    members: frozenset
    weight: int
    size: int

    @property
    def density(self):
        return Fraction(self.weight, self.size)


class HornForest:
    def __init__(self, trees):
        self.trees = list(trees)
        self.tree_of = {}
        for i, t in enumerate(self.trees):
            for j in t.members:
                self.tree_of[j] = i


def horns_trees(instance: OuttreeInstance) -> HornForest:
    """Recursive peeling: take the smallest-id parentless task, cut off its
    densest subtree, repeat on the remainder."""
    dens_w, dens_s, merged = _compute_density_forest(instance)
    removed = [False] * len(instance)
    trees = []
    heap = list(instance.roots)
    heapq.heapify(heap)
    while heap:
        r = heapq.heappop(heap)
        if removed[r]:
            continue
        members = _members_of(merged, r)
        tree_members = []
        stack = [r]
        while stack:
            v = stack.pop()
            tree_members.append(v)
            removed[v] = True
            stack.extend(merged[v])
        for v in tree_members:
            for c in instance.children[v]:
                if not removed[c]:
                    heapq.heappush(heap, c)
        trees.append(HornTree(r, frozenset(tree_members), dens_w[r], dens_s[r]))
    return HornForest(trees)


# --- schedulers ------------------------------------------------------------

def _greedy_schedule(instance: OuttreeInstance, slots: int) -> TaskSchedule:
    ranks = _density_ranks(instance)
    prio = [(ranks[j], j) for j in range(len(instance))]
    heap = [prio[j] for j in instance.roots]
    heapq.heapify(heap)
    steps = []
    remaining = len(instance)
    while remaining:
        step = []
        for _ in range(min(slots, len(heap))):
            step.append(heapq.heappop(heap)[1])
        for j in step:
            for c in instance.children[j]:
                heapq.heappush(heap, prio[c])
        steps.append(step)
        remaining -= len(step)
    return TaskSchedule(steps)


def horn_schedule(instance: OuttreeInstance) -> TaskSchedule:
    """Single-machine density greedy; optimal for P = 1."""
    if instance.machines != 1:
        raise OuttreeError("horn_schedule requires P = 1")
    return _greedy_schedule(instance, 1)


def phtf_schedule(instance: OuttreeInstance) -> TaskSchedule:
    """Density greedy with P slots per step."""
    return _greedy_schedule(instance, instance.machines)


def fractional_cost(instance: OuttreeInstance, schedule: TaskSchedule,
                    forest: HornForest) -> Fraction:
    """Credit each density tree for the fraction of it already finished: the
    cost sums, per step and tree, (#unfinished in tree / tree size) * tree
    weight.  Equals sum over trees of density * (sum of member completions).
    """
    check_feasible(instance, schedule)
    total = Fraction(0)
    for tree in forest.trees:
        if tree.weight == 0:
            continue
        csum = sum(schedule.completion[j] for j in tree.members)
        total += Fraction(tree.weight, tree.size) * csum
    return total


def mphtf_schedule(instance: OuttreeInstance) -> TaskSchedule:
    """Run PHTF, then dilate: PHTF step t becomes steps 2t-1 and 2t, and for
    each task PHTF ran at t, its density tree advances by one ready task at
    each of the two steps (skipping once the tree is exhausted).  Any tasks a
    tree could not start in time (a cross-tree parent still pending) are
    finished in cleanup steps at the end.
    """
    phtf = phtf_schedule(instance)
    forest = horns_trees(instance)
    order = _within_tree_orders(instance, forest)
    ptr = [0] * len(forest.trees)
    done = [False] * len(instance)
    steps = []

    def advance(ti, step, in_step):
        seq = order[ti]
        i = ptr[ti]
        if i >= len(seq):
            return
        j = seq[i]
        p = instance.parent[j]
        if p is not None and not done[p]:
            return
        if j in in_step:
            return
        ptr[ti] = i + 1
        step.append(j)
        in_step.add(j)

    for phtf_step in phtf.steps:
        trees_touched = [forest.tree_of[j] for j in phtf_step]
        for _ in range(2):
            step = []
            in_step = set()
            for ti in trees_touched:
                advance(ti, step, in_step)
            for j in step:
                done[j] = True
            steps.append(step)

    # cleanup: schedule anything a dilated slot had to skip
    remaining = [j for j in range(len(instance)) if not done[j]]
    while remaining:
        step = []
        for j in list(remaining):
            if len(step) >= instance.machines:
                break
            p = instance.parent[j]
            if p is None or done[p]:
                step.append(j)
        if not step:
            raise OuttreeError("internal error: no ready task during cleanup")
        for j in step:
            done[j] = True
            remaining.remove(j)
        steps.append(step)

    while steps and not steps[-1]:
        steps.pop()
    return TaskSchedule(steps)


def _within_tree_orders(instance, forest):
    """For each density tree, the single-machine density-greedy order of its
    members (restricted to the tree; same priorities as the global greedy)."""
    ranks = _density_ranks(instance)

    orders = []
    for tree in forest.trees:
        members = tree.members
        heap = [(ranks[tree.root], tree.root)]
        seq = []
        while heap:
            j = heapq.heappop(heap)[1]
            seq.append(j)
            for c in instance.children[j]:
                if c in members:
                    heapq.heappush(heap, (ranks[c], c))
        orders.append(seq)
    return orders

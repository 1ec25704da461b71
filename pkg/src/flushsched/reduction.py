"""Reduction from flush scheduling on trees to unit-time outtree scheduling
with weighted completion time, and the reverse lift from a task schedule back
to a flush schedule.

The reduction works on the oblivious packed sets of an instance.  Each packed
set contributes a gadget:

  * every set gets a weight-0 chain of h(v) tasks (v the set's parent node),
    one per edge on the root-to-v path; sets at the root get no chain since
    their chain would be parentless anyway;
  * a set at an internal node v whose members target leaves below v gets, per
    member child-subtree edge, a copy task; copy tasks mirror the subtree
    shape under v, hang off the last chain task, and a task for the edge into
    leaf l carries weight = number of the set's messages targeting l;
  * a set at a packed leaf carries all its weight |members| on the last chain
    task (the batched flush into the leaf delivers everything at once).

A task schedule for the reduced instance lifts to a flush schedule step by
step: a chain task for edge (u -> w) becomes the flush of the whole set's
message batch across that edge; a copy task for edge (u -> w) flushes the
set's messages destined below w.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Flush, Schedule, WormsInstance
from .outtree import OuttreeInstance, Task, TaskSchedule
from .packing import PackedSet, PackingResult, compute_oblivious_packed_sets


@dataclass
class TaskMeta:
    """What flush a task stands for: move `messages` across src -> dst."""
    set_id: int
    src: int
    dst: int
    messages: tuple


@dataclass
class ReductionResult:
    outtree: OuttreeInstance
    packing: PackingResult
    meta: dict = field(default_factory=dict)  # task id -> TaskMeta


def _set_messages_below(instance: WormsInstance, pset: PackedSet, node: int):
    """Members of pset whose target lies in the subtree rooted at node."""
    tree = instance.tree
    out = []
    for m in pset.members:
        t = instance.targets[m]
        v = t
        while v is not None:
            if v == node:
                out.append(m)
                break
            v = tree.parent[v]
    return out


def reduce_to_outtree(instance: WormsInstance, *, prune: bool = False) -> ReductionResult:
    """Build the outtree scheduling instance for the oblivious packed sets.

    With prune=True, copy-task subtrees that carry no weight anywhere below
    are dropped (they never affect the optimum; keeping them is the literal
    construction).
    """
    packing = compute_oblivious_packed_sets(instance)
    tree = instance.tree
    tasks = []
    meta = {}

    def add_task(weight, parent, m):
        tid = len(tasks)
        tasks.append(Task(tid, weight, parent))
        meta[tid] = m
        return tid

    for pset in packing.sets:
        v = pset.parent_node
        path = tree.path_from_root(v)  # root .. v
        edges = list(zip(path[:-1], path[1:]))
        members = tuple(sorted(pset.members))
        last = None
        depth = len(edges)
        if v in tree.leaves:
            # packed leaf: the chain ends on the edge into v, so delivery and
            # completion coincide with the last task
            for k, (a, b) in enumerate(edges):
                w = len(members) if k == depth - 1 else 0
                last = add_task(w, last, TaskMeta(pset.id, a, b, members))
        else:
            # internal node: weight-0 chain, then copy tasks for the subtree
            for a, b in edges:
                last = add_task(0, last, TaskMeta(pset.id, a, b, members))
            # one upward walk per member gives every node -> members-below map
            below = {}
            for m in pset.members:
                u = instance.targets[m]
                while u != v:
                    below.setdefault(u, []).append(m)
                    u = tree.parent[u]
            stack = [(v, last)]
            while stack:
                u, ptask = stack.pop()
                for c in tree.children[u]:
                    lst = below.get(c)
                    if lst is None:
                        if prune:
                            continue
                        msgs = ()
                    else:
                        lst.sort()
                        msgs = tuple(lst)
                    weight = len(msgs) if c in tree.leaves else 0
                    tid = add_task(weight, ptask, TaskMeta(pset.id, u, c, msgs))
                    if c not in tree.leaves:
                        stack.append((c, tid))

    outtree = OuttreeInstance(tasks, instance.params.P)
    return ReductionResult(outtree, packing, meta)


def lift_schedule(reduction: ReductionResult, task_schedule: TaskSchedule) -> Schedule:
    """Turn a task schedule into the corresponding (overfilling) flush
    schedule: each task becomes the flush recorded in its metadata; tasks
    with no messages to move become no-ops and are dropped."""
    steps = []
    for step in task_schedule.steps:
        flushes = []
        for j in step:
            m = reduction.meta[j]
            if m.messages:
                flushes.append(Flush(m.src, m.dst, list(m.messages)))
        steps.append(flushes)
    while steps and not steps[-1]:
        steps.pop()
    return Schedule(steps)

"""Core model: static tree instances, flush schedules, validation, and cost.

A problem instance is a static tree whose leaves all sit at the same depth,
a set of messages (each with a target leaf), and two capacity parameters:
P, the number of flushes that may run in parallel per time step, and B, the
number of messages a single flush (and, steadily, an internal node) may hold.

Messages start at the root at step 1.  A flush moves up to B messages across
one parent->child edge.  A schedule is *overfilling* if every flush only
moves messages that are actually present and disjoint from concurrent
flushes, and every message eventually reaches its target leaf.  It is
*valid* if additionally no internal non-root node retains more than B
messages across two consecutive steps (the root and the leaves are
unbounded).  Cost is the sum over messages of the step at which each reaches
its target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class InstanceError(ValueError):
    """Raised when an instance document or construction is malformed."""


class ScheduleError(ValueError):
    """Raised when a schedule document or construction is malformed."""


@dataclass(frozen=True)
class DamParams:
    P: int
    B: int

    def __post_init__(self):
        if self.P < 1:
            raise InstanceError("P must be >= 1, got %r" % (self.P,))
        if self.B < 12:
            raise InstanceError("B must be >= 12, got %r" % (self.B,))


class TreeTopology:
    """Rooted tree over dense node ids 0..n-1 with all leaves at equal depth.

    `parent[v]` is None exactly for the root.  Heights count edges from the
    root, so the root has height 0 and every leaf has height h >= 1.
    """

    def __init__(self, parent):
        self.parent = list(parent)
        n = len(self.parent)
        if n == 0:
            raise InstanceError("empty tree")
        roots = [v for v in range(n) if self.parent[v] is None]
        if len(roots) != 1:
            raise InstanceError("tree must have exactly one root, found %d" % len(roots))
        self.root = roots[0]
        self.children = [[] for _ in range(n)]
        for v in range(n):
            p = self.parent[v]
            if p is None:
                continue
            if not (0 <= p < n):
                raise InstanceError("node %d: parent %r out of range" % (v, p))
            self.children[p].append(v)
        # heights via BFS; detects disconnected/cyclic parent maps
        self.height_of = [-1] * n
        self.height_of[self.root] = 0
        order = [self.root]
        for v in order:
            for c in self.children[v]:
                self.height_of[c] = self.height_of[v] + 1
                order.append(c)
        if len(order) != n:
            raise InstanceError("parent links are cyclic or disconnected")
        self.topo_order = order  # root first, children after parents
        self.leaves = frozenset(v for v in range(n) if not self.children[v])
        depths = {self.height_of[v] for v in self.leaves}
        if len(depths) != 1:
            raise InstanceError("non-uniform leaf height: found depths %s" % sorted(depths))
        self.h = depths.pop()
        if self.h < 1:
            raise InstanceError("tree height must be >= 1 (root may not be a leaf)")

    def __len__(self):
        return len(self.parent)

    def is_leaf(self, v):
        return v in self.leaves

    def path_from_root(self, v):
        """Nodes on the root->v path, root first, v last."""
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path


@dataclass(frozen=True)
class Message:
    id: int
    target: int


class WormsInstance:
    """A static tree plus messages plus DAM parameters."""

    def __init__(self, tree: TreeTopology, targets, params: DamParams):
        self.tree = tree
        self.targets = list(targets)
        self.params = params
        for m, t in enumerate(self.targets):
            if not (0 <= t < len(tree)) or not tree.is_leaf(t):
                raise InstanceError("message %d: target %r is not a leaf" % (m, t))

    @property
    def n_messages(self):
        return len(self.targets)

    @property
    def messages(self):
        return [Message(m, t) for m, t in enumerate(self.targets)]

    def to_document(self):
        return {
            "B": self.params.B,
            "P": self.params.P,
            "parents": list(self.tree.parent),
            "message_targets": list(self.targets),
        }

    def to_json(self):
        return json.dumps(self.to_document())

    def content_hash(self):
        import hashlib

        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Flush:
    src: int
    dst: int
    messages: tuple

    def __post_init__(self):
        if len(self.messages) < 1:
            raise ScheduleError("flush (%d,%d) carries no messages" % (self.src, self.dst))


class Schedule:
    """Per-time-step lists of flushes; steps are numbered from 1."""

    def __init__(self, steps, copy=True):
        # copy=False adopts the step sequences as-is (internal fast path for
        # very long schedules)
        self.steps = [list(s) for s in steps] if copy else list(steps)

    def __len__(self):
        return len(self.steps)

    @property
    def n_flushes(self):
        return sum(len(s) for s in self.steps)

    def to_document(self):
        return {
            "steps": [
                [{"from": f.src, "to": f.dst, "messages": list(f.messages)} for f in step]
                for step in self.steps
            ]
        }

    def to_json(self):
        return json.dumps(self.to_document())


@dataclass
class ValidationReport:
    is_overfilling: bool
    is_valid: bool
    completion_time: dict            # message id -> step, or None if never
    total_cost: int | None           # None when some message never completes
    violations: list = field(default_factory=list)  # (step, subject, reason)

    def completions_csv(self):
        lines = ["message_id,completion_time"]
        for m in sorted(self.completion_time):
            c = self.completion_time[m]
            lines.append("%d,%s" % (m, "never" if c is None else c))
        return "\n".join(lines) + "\n"


def load_instance(source) -> WormsInstance:
    """Parse an instance document (JSON text, dict, or file-like)."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as e:
            raise InstanceError("parse failure: %s" % e) from None
    else:
        doc = source
    for key in ("B", "P", "parents", "message_targets"):
        if key not in doc:
            raise InstanceError("missing field %r" % key)
    params = DamParams(P=doc["P"], B=doc["B"])
    tree = TreeTopology(doc["parents"])
    return WormsInstance(tree, doc["message_targets"], params)


def load_schedule(source) -> Schedule:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as e:
            raise ScheduleError("parse failure: %s" % e) from None
    else:
        doc = source
    if "steps" not in doc:
        raise ScheduleError("missing field 'steps'")
    steps = []
    for step in doc["steps"]:
        steps.append([Flush(f["from"], f["to"], tuple(f["messages"])) for f in step])
    return Schedule(steps)


def validate_schedule(instance: WormsInstance, schedule: Schedule) -> ValidationReport:
    """Simulate a schedule step by step and classify it.

    A flush at step t is applied only if all its messages are at its source
    node at t and it is disjoint from the other flushes of the step; invalid
    flushes are recorded and skipped.  The space check counts, for each
    internal non-root node v and step t, the messages present at v at both t
    and t+1, excluding those flushed out of v during step t+1 (a message
    leaves at the step boundary, which is what permits cascades).
    """
    tree = instance.tree
    P, B = instance.params.P, instance.params.B
    n_msgs = instance.n_messages
    root = tree.root
    violations = []
    completion = {m: None for m in range(n_msgs)}
    all_flushes_ok = True

    pos = [root] * n_msgs
    # incremental space bookkeeping: resident count per node, last arrival
    # step per message, and which nodes saw traffic in recent steps (only
    # those can change their census between consecutive step pairs)
    count_at = {}
    arrival_step = [0] * n_msgs
    arrived_last = {}      # node -> #messages that arrived in step t-1
    touched = [set(), set(), set()]  # nodes touched at steps t-2, t-1, t
    hot = set()            # nodes whose last census exceeded B

    def internal(v):
        return v != root and not tree.is_leaf(v)

    for t, step in enumerate(schedule.steps, start=1):
        if len(step) > P:
            violations.append((t, "step", "more than P=%d flushes" % P))
            all_flushes_ok = False
        seen = set()
        outflow = {}  # node -> list of messages flushed out this step
        moved = []
        touched_now = set()
        for f in step:
            reason = None
            if not (0 <= f.src < len(tree)) or not (0 <= f.dst < len(tree)):
                reason = "unknown node"
            elif tree.parent[f.dst] != f.src:
                reason = "edge (%d,%d) is not a parent->child edge" % (f.src, f.dst)
            elif len(f.messages) > B:
                reason = "flush carries %d > B messages" % len(f.messages)
            elif any(not (0 <= m < n_msgs) for m in f.messages):
                reason = "unknown message id"
            elif any(pos[m] != f.src for m in f.messages):
                reason = "message not at source node"
            elif any(m in seen for m in f.messages):
                reason = "message in two flushes at the same step"
            if reason is not None:
                violations.append((t, (f.src, f.dst), reason))
                all_flushes_ok = False
                continue
            seen.update(f.messages)
            outflow.setdefault(f.src, []).extend(f.messages)
            touched_now.add(f.src)
            touched_now.add(f.dst)
            moved.append(f)

        # space requirement for the pair (t-1, t), now that step-t outflows
        # are known: messages at v at the end of both t-2 and t-1 and not
        # leaving at t must fit in B.  Only nodes with traffic at t-2, t-1,
        # or t can differ from the previous pair; hot nodes stay violated.
        if t >= 2:
            check = set()
            for s in touched:
                check.update(s)
            check.update(touched_now)
            check.update(hot)
            for v in check:
                if not internal(v):
                    continue
                out_stay = sum(1 for m in outflow.get(v, ())
                               if arrival_step[m] < t - 1)
                c = count_at.get(v, 0) - arrived_last.get(v, 0) - out_stay
                if c > B:
                    violations.append((t - 1, v, "space: %d > B messages held across steps %d,%d" % (c, t - 1, t)))
                    hot.add(v)
                else:
                    hot.discard(v)

        arrived_last = {}
        for f in moved:
            count_at[f.src] = count_at.get(f.src, 0) - len(f.messages)
            count_at[f.dst] = count_at.get(f.dst, 0) + len(f.messages)
            arrived_last[f.dst] = arrived_last.get(f.dst, 0) + len(f.messages)
            for m in f.messages:
                pos[m] = f.dst
                arrival_step[m] = t
                if f.dst == instance.targets[m] and completion[m] is None:
                    completion[m] = t
        touched = [touched[1], touched[2], touched_now]

    # trailing pair: positions no longer change, so any internal pile-up of
    # more than B messages violates the space requirement forever after
    if schedule.steps:
        counts = {}
        for m in range(n_msgs):
            v = pos[m]
            if internal(v):
                counts[v] = counts.get(v, 0) + 1
        T = len(schedule.steps)
        for v, c in counts.items():
            if c > B:
                violations.append((T, v, "space: %d > B messages parked at end of schedule" % c))

    all_complete = all(c is not None for c in completion.values())
    is_overfilling = all_flushes_ok and all_complete
    space_ok = not any("space:" in reason for (_, _, reason) in violations)
    is_valid = is_overfilling and space_ok
    total = sum(completion.values()) if all_complete else None
    return ValidationReport(
        is_overfilling=is_overfilling,
        is_valid=is_valid,
        completion_time=completion,
        total_cost=total,
        violations=violations,
    )


def schedule_cost(instance: WormsInstance, schedule: Schedule) -> int:
    """Total completion time; raises if some message never reaches its leaf."""
    report = validate_schedule(instance, schedule)
    if report.total_cost is None:
        missing = [m for m, c in report.completion_time.items() if c is None]
        raise ScheduleError("incomplete schedule: messages %s never complete" % missing[:10])
    return report.total_cost

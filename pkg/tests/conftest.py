"""Shared builders for the test suite."""

import random

import pytest

from flushsched import (
    DamParams,
    OuttreeInstance,
    Task,
    TreeTopology,
    WormsInstance,
)


def complete_tree(height, fanout):
    """Parent array of a complete tree; returns (parents, leaves)."""
    parent = [None]
    level = [0]
    for _ in range(height):
        nxt = []
        for v in level:
            for _ in range(fanout):
                parent.append(v)
                nxt.append(len(parent) - 1)
        level = nxt
    return parent, level


def make_worms(parent, leaf_counts, B=12, P=1):
    """Instance from a parent array and a {leaf: message count} map."""
    tree = TreeTopology(parent)
    targets = []
    for leaf in sorted(leaf_counts):
        targets.extend([leaf] * leaf_counts[leaf])
    return WormsInstance(tree, targets, DamParams(P=P, B=B))


def random_worms(rng: random.Random, max_height=3, max_fanout=3,
                 max_messages=30, B=12, P=None):
    height = rng.randint(1, max_height)
    fanout = rng.randint(2, max_fanout)
    parent, leaves = complete_tree(height, fanout)
    n = rng.randint(1, max_messages)
    targets = [rng.choice(leaves) for _ in range(n)]
    params = DamParams(P=P if P is not None else rng.choice([1, 2]), B=B)
    return WormsInstance(TreeTopology(parent), targets, params)


def random_outtree(rng: random.Random, max_tasks=7, machines=1, max_weight=9):
    n = rng.randint(1, max_tasks)
    tasks = []
    for i in range(n):
        parent = rng.randrange(i) if i and rng.random() < 0.6 else None
        tasks.append(Task(i, rng.randint(0, max_weight), parent))
    return OuttreeInstance(tasks, machines)


# A 17-leaf instance with B=60 whose packed structure is known by hand.
# Tree (all leaves at depth 4); per-leaf message counts in brackets:
#
#   0 -- 1 -- 3 -- 7 -- 17[40] 18[3]
#              \-- 8 -- 19[5]  20[6]
#        \-- 4 -- 9 -- 21[6]  22[3]
#              |- 10 -- 23[9]
#              |- 11 -- 24[9]
#              \- 12 -- 25[4]  26[5]
#   \--- 2 -- 5 -- 13 -- 27[5] 28[3]
#              \-- 14 -- 29[1]
#        \-- 6 -- 15 -- 30[6]  31[8]
#              \-- 16 -- 32[3] 33[3]
#
# Packed nodes (B/6 = 10): leaf 17 (40), node 8 (11), node 4 (36),
# node 15 (14), node 2 (15), root (the 3 messages for leaf 18).
HAND_PARENTS = [None, 0, 0,
               1, 1, 2, 2,
               3, 3, 4, 4, 4, 4, 5, 5, 6, 6,
               7, 7, 8, 8, 9, 9, 10, 11, 12, 12, 13, 13, 14, 15, 15, 16, 16]
HAND_COUNTS = {17: 40, 18: 3, 19: 5, 20: 6, 21: 6, 22: 3, 23: 9, 24: 9,
              25: 4, 26: 5, 27: 5, 28: 3, 29: 1, 30: 6, 31: 8, 32: 3, 33: 3}
HAND_PACKED = {17: 40, 8: 11, 4: 36, 15: 14, 2: 15, 0: 3}


@pytest.fixture
def hand_instance():
    return make_worms(HAND_PARENTS, HAND_COUNTS, B=60, P=4)

import random

from flushsched import (
    compute_oblivious_packed_sets,
    compute_packed_nodes,
    compute_packed_sets,
    compute_starting_times,
    lazy_greedy,
    schedule_cost,
    serial_per_message,
    validate_schedule,
)

from conftest import HAND_PACKED, complete_tree, make_worms, random_worms


def test_packed_nodes_known_instance(hand_instance):
    nodes = compute_packed_nodes(hand_instance)
    got = {pn.node: len(pn.contents) for pn in nodes}
    assert got == HAND_PACKED
    # contents partition the messages
    all_msgs = [m for pn in nodes for m in pn.contents]
    assert sorted(all_msgs) == list(range(hand_instance.n_messages))


def test_packed_nodes_thresholds():
    # all messages on one leaf, count >= B/6: that leaf is packed
    parent, leaves = complete_tree(2, 2)
    inst = make_worms(parent, {leaves[0]: 5}, B=12)
    got = {pn.node: len(pn.contents) for pn in compute_packed_nodes(inst)}
    assert got == {leaves[0]: 5, inst.tree.root: 0}
    # star with k < B/6 messages: only the root is packed
    inst2 = make_worms([None, 0, 0, 0], {1: 1, 2: 0, 3: 0}, B=12)
    got2 = {pn.node: len(pn.contents) for pn in compute_packed_nodes(inst2)}
    assert got2 == {0: 1}


def test_oblivious_leaf_split(hand_instance):
    packing = compute_oblivious_packed_sets(hand_instance)
    assert packing.kind == "oblivious"
    # the 40-message leaf splits into 30 + 10 (fill to B/2, but never leave
    # a remainder below B/6)
    sizes = sorted(len(s.members) for s in packing.sets_of_node(17))
    assert sizes == [10, 30]
    # the 36-message internal node groups whole child subtrees: (9,9),(9,9)
    sizes4 = sorted(len(s.members) for s in packing.sets_of_node(4))
    assert sizes4 == [18, 18]
    for s in packing.sets:
        # indices are 1-based within each packed node
        assert 1 <= s.index_in_parent <= len(packing.sets_of_node(s.parent_node))


def test_set_size_bounds():
    rng = random.Random(11)
    for _ in range(30):
        inst = random_worms(rng, max_messages=40, B=12)
        packing = compute_oblivious_packed_sets(inst)
        assert sorted(packing.set_of_message) == list(range(inst.n_messages))
        root_sets = packing.sets_of_node(inst.tree.root)
        for s in packing.sets:
            size = len(s.members)
            assert size * 2 <= inst.params.B
            if s.parent_node != inst.tree.root or s != root_sets[-1]:
                assert size * 6 >= inst.params.B


def test_schedule_sets_group_shared_flushes():
    rng = random.Random(13)
    for _ in range(20):
        inst = random_worms(rng, max_messages=25, B=12)
        sched = lazy_greedy(inst)
        assert validate_schedule(inst, sched).is_overfilling
        packing = compute_packed_sets(inst, sched)
        assert packing.kind == "schedule"
        for s in packing.sets:
            size = len(s.members)
            assert size * 2 <= inst.params.B


def test_oblivious_deterministic(hand_instance):
    a = compute_oblivious_packed_sets(hand_instance)
    b = compute_oblivious_packed_sets(hand_instance)
    assert [s.members for s in a.sets] == [s.members for s in b.sets]


def test_starting_time_leaf_parent():
    # packed leaf, B=12: each set closes at B/6 = 2 members, and tau is the
    # step when its ceil(B/12) = 1st member arrives at the leaf's parent
    parent, leaves = complete_tree(2, 2)
    inst = make_worms(parent, {leaves[0]: 4}, B=12, P=1)
    sched = serial_per_message(inst)          # msg k moves at steps 2k+1, 2k+2
    packing = compute_packed_sets(inst, sched)
    packing = compute_starting_times(inst, sched, packing)
    s1, s2 = packing.sets_of_node(leaves[0])
    assert len(s1.members) == 2 and len(s2.members) == 2
    assert s1.starting_time == 2
    assert s2.starting_time == 6


def test_starting_time_internal_successor():
    # 6 subtrees with one message each: nothing below the root reaches B/6,
    # so the root packs all 6 messages into sets of 2 whole child-groups.
    # For set i > 1, tau = last flush-out (from the root) of set i-1.
    parent = [None]
    counts = {}
    for _ in range(6):
        parent.append(0)
        mid = len(parent) - 1
        parent.extend([mid, mid])
        counts[len(parent) - 2] = 1
        counts[len(parent) - 1] = 0
    inst = make_worms(parent, counts, B=12, P=2)
    sched = lazy_greedy(inst)
    packing = compute_starting_times(
        inst, sched, compute_packed_sets(inst, sched))
    from flushsched.packing import FlushTimes
    times = FlushTimes(inst, sched)
    root_sets = packing.sets_of_node(inst.tree.root)
    assert [len(s.members) for s in root_sets] == [2, 2, 2]
    found = 0
    for s in root_sets:
        if s.index_in_parent == 1:
            continue
        prev = next(p for p in root_sets
                    if p.index_in_parent == s.index_in_parent - 1)
        last_out = max(times.out_time[m][s.parent_node] for m in prev.members)
        assert s.starting_time == last_out
        found += 1
    assert found == 2


def test_sum_tau_at_most_twice_cost():
    rng = random.Random(19)
    checked = 0
    for _ in range(40):
        inst = random_worms(rng, max_messages=30, B=12)
        for sched in (lazy_greedy(inst), serial_per_message(inst)):
            packing = compute_starting_times(
                inst, sched, compute_packed_sets(inst, sched))
            tau_sum = sum(s.starting_time * len(s.members)
                          for s in packing.sets)
            assert tau_sum <= 2 * schedule_cost(inst, sched)
            checked += 1
    assert checked == 80

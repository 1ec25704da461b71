import random
from fractions import Fraction

import pytest

from flushsched import (
    OuttreeError,
    OuttreeInstance,
    Task,
    TaskSchedule,
    check_feasible,
    fractional_cost,
    horn_schedule,
    horns_trees,
    load_outtree,
    mphtf_schedule,
    phtf_schedule,
    task_densities,
    weighted_completion_cost,
)

from conftest import random_outtree


def test_instance_validation():
    with pytest.raises(OuttreeError):
        OuttreeInstance([Task(0, 1, 0)], 1)       # self-parent
    with pytest.raises(OuttreeError):
        OuttreeInstance([Task(1, 1, None)], 1)    # non-dense ids
    with pytest.raises(OuttreeError):
        OuttreeInstance([Task(0, -1, None)], 1)   # negative weight
    with pytest.raises(OuttreeError):
        OuttreeInstance([Task(0, 1, None)], 0)    # no machines
    inst = OuttreeInstance([Task(0, 1, None), Task(1, 2, 0)], 2)
    assert load_outtree(inst.to_json()).to_json() == inst.to_json()


def test_task_densities():
    single = OuttreeInstance([Task(0, 7, None)], 1)
    dens, members = task_densities(single)[0]
    assert dens == 7 and members == frozenset({0})
    # chain a(0) -> b(9): best subtree at a is {a,b}, density 9/2
    chain = OuttreeInstance([Task(0, 0, None), Task(1, 9, 0)], 1)
    dens, members = task_densities(chain)[0]
    assert dens == Fraction(9, 2) and members == frozenset({0, 1})
    # a(1) with children b(9), c(0): {a,b} at density 5 beats {a,b,c} = 10/3
    fork = OuttreeInstance(
        [Task(0, 1, None), Task(1, 9, 0), Task(2, 0, 0)], 1)
    dens, members = task_densities(fork)[0]
    assert dens == 5 and members == frozenset({0, 1})


def test_horns_trees_peeling():
    # chain a(0) -> b(9) -> c(1): first tree {a,b} (4.5 > 10/3), then {c}
    inst = OuttreeInstance(
        [Task(0, 0, None), Task(1, 9, 0), Task(2, 1, 1)], 1)
    forest = horns_trees(inst)
    assert [t.members for t in forest.trees] == [frozenset({0, 1}),
                                                 frozenset({2})]
    assert forest.trees[0].density == Fraction(9, 2)
    assert forest.tree_of == {0: 0, 1: 0, 2: 1}


def test_horns_trees_singletons():
    inst = OuttreeInstance([Task(i, i, None) for i in range(5)], 1)
    forest = horns_trees(inst)
    assert sorted(t.members for t in forest.trees) == [
        frozenset({i}) for i in range(5)]


def _all_subtrees(inst, root):
    """All connected subtrees of the precedence tree containing root."""
    out = []
    def grow(current, frontier):
        out.append(frozenset(current))
        for i, v in enumerate(frontier):
            grow(current | {v}, frontier[i + 1:] + tuple(inst.children[v]))
    grow(frozenset({root}), tuple(inst.children[root]))
    return out


def test_horn_tree_maximality():
    # no Horn's tree admits a strictly denser subtree at the same root
    rng = random.Random(23)
    for _ in range(40):
        inst = random_outtree(rng, max_tasks=6)
        forest = horns_trees(inst)
        first = forest.trees[0]
        best = max(
            Fraction(sum(inst.weight[v] for v in sub), len(sub))
            for sub in _all_subtrees(inst, first.root))
        assert first.density == best


def test_horn_schedule_example():
    # chain a(1) -> b(9) plus independent c(4): order a, b, c, cost 31
    inst = OuttreeInstance(
        [Task(0, 1, None), Task(1, 9, 0), Task(2, 4, None)], 1)
    sched = horn_schedule(inst)
    assert list(sched.steps) == [(0,), (1,), (2,)]
    assert weighted_completion_cost(inst, sched) == 31
    with pytest.raises(OuttreeError):
        horn_schedule(OuttreeInstance([Task(0, 1, None)], 2))


def test_phtf_example():
    # P=2, chain a1(0) -> a2(8) and singleton b1(3): densities 4 vs 3
    inst = OuttreeInstance(
        [Task(0, 0, None), Task(1, 8, 0), Task(2, 3, None)], 2)
    sched = phtf_schedule(inst)
    assert list(sched.steps) == [(0, 2), (1,)]
    wide = OuttreeInstance([Task(i, 1, None) for i in range(4)], 4)
    assert phtf_schedule(wide).makespan() == 1


def test_weighted_completion_cost():
    inst = OuttreeInstance(
        [Task(0, 1, None), Task(1, 9, 0), Task(2, 4, None)], 1)
    assert weighted_completion_cost(
        inst, TaskSchedule([(0,), (1,), (2,)])) == 31
    zero = OuttreeInstance([Task(0, 0, None), Task(1, 0, 0)], 1)
    assert weighted_completion_cost(zero, TaskSchedule([(0,), (1,)])) == 0
    with pytest.raises(OuttreeError):
        check_feasible(inst, TaskSchedule([(1,), (0,), (2,)]))
    with pytest.raises(OuttreeError):
        check_feasible(inst, TaskSchedule([(0,), (1,)]))       # c missing
    with pytest.raises(OuttreeError):
        check_feasible(inst, TaskSchedule([(0, 2), (1,)]))     # P=1 exceeded


def test_fractional_cost_example():
    # trees {a,b} (w 10, s 2) and {c} (w 4): schedule a,b,c
    inst = OuttreeInstance(
        [Task(0, 1, None), Task(1, 9, 0), Task(2, 4, None)], 1)
    forest = horns_trees(inst)
    sched = TaskSchedule([(0,), (1,), (2,)])
    assert fractional_cost(inst, sched, forest) == 27
    assert weighted_completion_cost(inst, sched) == 31
    single = OuttreeInstance([Task(0, 6, None)], 1)
    assert fractional_cost(
        single, TaskSchedule([(0,)]), horns_trees(single)) == 6


def test_fractional_degenerates_with_singleton_trees():
    # independent tasks: every Horn's tree is a singleton, so the fractional
    # cost equals the weighted completion cost exactly
    rng = random.Random(29)
    for _ in range(20):
        n = rng.randint(1, 6)
        inst = OuttreeInstance(
            [Task(i, rng.randint(0, 9), None) for i in range(n)], 1)
        order = list(range(n))
        rng.shuffle(order)
        sched = TaskSchedule([(j,) for j in order])
        forest = horns_trees(inst)
        assert fractional_cost(inst, sched, forest) == \
            weighted_completion_cost(inst, sched)


def test_mphtf_single_chain():
    # a chain whose weight sits at the end is a single Horn's tree: it is
    # processed twice per doubled step, so it finishes in chain-length steps
    inst = OuttreeInstance(
        [Task(i, 1 if i == 4 else 0, i - 1 if i else None) for i in range(5)], 1)
    forest = horns_trees(inst)
    assert len(forest.trees) == 1
    sched = mphtf_schedule(inst)
    assert list(sched.steps) == [(0,), (1,), (2,), (3,), (4,)]


def test_mphtf_example():
    # P=2: PHTF step 1 = {a1, b1}; MPHTF step 1 {a1, b1}, step 2 {a2}
    inst = OuttreeInstance(
        [Task(0, 0, None), Task(1, 8, 0), Task(2, 3, None)], 2)
    sched = mphtf_schedule(inst)
    assert list(sched.steps) == [(0, 2), (1,)]
    assert weighted_completion_cost(inst, sched) == 19


def test_mphtf_feasible_and_bounded():
    rng = random.Random(37)
    for _ in range(60):
        inst = random_outtree(rng, max_tasks=8, machines=rng.randint(1, 3))
        m = mphtf_schedule(inst)
        check_feasible(inst, m)
        assert m.makespan() <= 2 * phtf_schedule(inst).makespan()

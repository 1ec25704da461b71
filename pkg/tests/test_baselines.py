import random

from flushsched import lazy_greedy, serial_per_message, validate_schedule

from conftest import make_worms, random_worms


def test_serial_always_valid():
    rng = random.Random(79)
    for _ in range(30):
        inst = random_worms(rng, max_messages=25)
        report = validate_schedule(inst, serial_per_message(inst))
        assert report.is_valid
        assert report.total_cost >= inst.tree.h * inst.n_messages


def test_serial_uses_lanes():
    # P=2: two messages move in parallel, cost 4 instead of 6
    inst = make_worms([None, 0, 1, 1], {2: 1, 3: 1}, B=12, P=2)
    report = validate_schedule(inst, serial_per_message(inst))
    assert report.is_valid and report.total_cost == 4


def test_lazy_greedy_batches():
    # everything to one leaf moves as one batch per edge
    inst = make_worms([None, 0, 1, 1], {2: 5, 3: 0}, B=12, P=1)
    sched = lazy_greedy(inst)
    report = validate_schedule(inst, sched)
    assert report.is_overfilling
    assert report.total_cost == 10
    assert sched.n_flushes == 2


def test_lazy_greedy_overfilling_on_random():
    rng = random.Random(83)
    for _ in range(30):
        inst = random_worms(rng, max_messages=30)
        report = validate_schedule(inst, lazy_greedy(inst))
        assert report.is_overfilling


def test_baselines_deterministic():
    rng = random.Random(89)
    inst = random_worms(rng, max_messages=20)
    assert lazy_greedy(inst).to_json() == lazy_greedy(inst).to_json()
    assert serial_per_message(inst).to_json() == serial_per_message(inst).to_json()

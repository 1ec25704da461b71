"""The three task schedulers on one small instance: Horn's single-machine
density greedy, its parallel variant PHTF, and the dilated MPHTF.

Run with: python3 demos/outtree_schedulers.py
"""

from flushsched import (
    OuttreeInstance,
    Task,
    fractional_cost,
    horn_schedule,
    horns_trees,
    mphtf_schedule,
    phtf_schedule,
    task_densities,
    weighted_completion_cost,
)
from flushsched.oracles import brute_force_outtree

# A forest of two trees:
#   0(w1) -> 1(w7)          5(w2) -> 6(w0) -> 7(w9)
#         -> 2(w0) -> 3(w8)
#         -> 4(w1)
tasks = [
    Task(0, 1, None), Task(1, 7, 0), Task(2, 0, 0), Task(3, 8, 2),
    Task(4, 1, 0), Task(5, 2, None), Task(6, 0, 5), Task(7, 9, 6),
]


def show(name, inst, sched):
    print("%-6s steps %-38s cost %d" % (
        name, [list(s) for s in sched.steps],
        weighted_completion_cost(inst, sched)))


inst1 = OuttreeInstance(tasks, machines=1)
print("densities (weight per task of the best subtree at each task):")
print("  ", {j: str(d) for j, (d, _) in task_densities(inst1).items()})
forest = horns_trees(inst1)
print("density trees:", [sorted(t.members) for t in forest.trees])

print("\nP = 1: Horn is exactly optimal")
sched = horn_schedule(inst1)
show("horn", inst1, sched)
print("brute  optimum %d" % brute_force_outtree(inst1)[0])

print("\nP = 2: PHTF packs the two densest available tasks per step")
inst2 = OuttreeInstance(tasks, machines=2)
p = phtf_schedule(inst2)
show("phtf", inst2, p)
print("fractional cost (credits trees for partial progress): %s"
      % fractional_cost(inst2, p, horns_trees(inst2)))

# MPHTF stretches every PHTF step across two steps: the first finishes whole
# density trees, the second advances the rest one task.  That costs at most
# a factor 2 in makespan and keeps the total cost within 4x of optimal.
m = mphtf_schedule(inst2)
show("mphtf", inst2, m)
opt = brute_force_outtree(inst2)[0]
print("brute  optimum %d; mphtf/optimum = %.2f (guarantee: <= 4)"
      % (opt, weighted_completion_cost(inst2, m) / opt))
print("makespans: phtf %d, mphtf %d (guarantee: <= 2x phtf)"
      % (p.makespan(), m.makespan()))

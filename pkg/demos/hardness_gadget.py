"""Why exact flush scheduling is hard: a 3-partition gadget.

Given 3n' integers that should split into n' triples each summing to K, the
generator builds an instance whose optimal cost lands at or below a threshold
C2 exactly when such a split exists.  This demo builds the one-triple
yes-instance {4,4,4} with K=12 and replays the schedule a correct partition
induces.

Run with: python3 demos/hardness_gadget.py
"""

from collections import Counter

from flushsched import (
    canonical_gadget_schedule,
    generate_gadget_3partition,
    validate_schedule,
)

gadget = generate_gadget_3partition([4, 4, 4], K=12)
inst = gadget.instance
print("sizes {4,4,4}, K=12  ->  X=%d, B=%d, %d messages"
      % (gadget.X, inst.params.B, inst.n_messages))
print("thresholds: C1=%d (partition messages), C2=%d (total)"
      % (gadget.C1, gadget.C2))

# The first B messages encode the integers; the rest are filler whose only
# job is to make any schedule that misses the partition structure pay more
# than C2.
n_partition = inst.params.B
print("%d partition messages + %d filler messages"
      % (n_partition, len(gadget.padding_paths)))

# A yes-certificate (here the only possible triple) turns into a schedule
# that drains one triple's worth of messages per 4-step block.
sched = canonical_gadget_schedule(gadget, [(0, 1, 2)])
report = validate_schedule(inst, sched)
print("\ncanonical schedule: valid=%s, %d steps" % (report.is_valid, len(sched)))

partition_completions = [report.completion_time[m] for m in range(n_partition)]
print("partition messages finish by step %d; completion histogram %s"
      % (max(partition_completions),
         dict(sorted(Counter(partition_completions).items()))))
print("their cost %d <= C1=%d; total cost %d <= C2=%d"
      % (sum(partition_completions), gadget.C1,
         report.total_cost, gadget.C2))
assert sum(partition_completions) <= gadget.C1
assert report.total_cost <= gadget.C2
print("\na no-instance admits no schedule meeting C2, so deciding the "
      "threshold decides 3-partition")

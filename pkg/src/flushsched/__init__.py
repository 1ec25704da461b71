"""Flush scheduling for write-optimized trees: modeling, packing, reduction
to unit-task outtree scheduling, approximation algorithms, and conversion of
overfilling schedules into valid ones."""

from .baselines import lazy_greedy, serial_per_message
from .conversion import CONVERSION_FACTOR, convert_to_valid
from .generators import (
    GeneratorSpec,
    Xoshiro256StarStar,
    canonical_gadget_schedule,
    generate_gadget_3partition,
    generate_random,
)
from .model import (
    DamParams,
    Flush,
    InstanceError,
    Schedule,
    ScheduleError,
    TreeTopology,
    WormsInstance,
    load_instance,
    load_schedule,
    schedule_cost,
    validate_schedule,
)
from .oracles import brute_force_outtree, brute_force_worms, enumerate_outtree_schedules
from .outtree import (
    HornForest,
    HornTree,
    OuttreeError,
    OuttreeInstance,
    check_feasible,
    Task,
    TaskSchedule,
    fractional_cost,
    horn_schedule,
    horns_trees,
    load_outtree,
    mphtf_schedule,
    phtf_schedule,
    task_densities,
    weighted_completion_cost,
)
from .packing import (
    compute_oblivious_packed_sets,
    compute_packed_nodes,
    compute_packed_sets,
    compute_starting_times,
)
from .pipeline import PipelineResult, solve_pipeline
from .reduction import lift_schedule, reduce_to_outtree

__all__ = [name for name in dir() if not name.startswith("_")]

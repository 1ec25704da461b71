"""End-to-end solver: reduce to outtree tasks, schedule with MPHTF, lift the
task schedule to an overfilling flush schedule, convert to a valid one."""

from __future__ import annotations

import gc
from dataclasses import dataclass

from .conversion import ConversionResult, convert_to_valid
from .model import Schedule, WormsInstance
from .outtree import TaskSchedule, mphtf_schedule
from .reduction import ReductionResult, lift_schedule, reduce_to_outtree


@dataclass
class PipelineResult:
    schedule: Schedule            # final, valid
    overfilling: Schedule         # lifted MPHTF output
    reduction: ReductionResult
    task_schedule: TaskSchedule
    conversion: ConversionResult


def solve_pipeline(instance: WormsInstance) -> PipelineResult:
    # the pipeline allocates millions of short-lived containers and frees
    # them in bulk; cyclic GC only adds pauses here
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        reduction = reduce_to_outtree(instance, prune=True)
        tasks = mphtf_schedule(reduction.outtree)
        lifted = lift_schedule(reduction, tasks)
        conv = convert_to_valid(instance, lifted)
    finally:
        if gc_was_on:
            gc.enable()
    return PipelineResult(
        schedule=conv.schedule,
        overfilling=lifted,
        reduction=reduction,
        task_schedule=tasks,
        conversion=conv,
    )

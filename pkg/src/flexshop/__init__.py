"""Scheduling for flexible job shops with machine calendars, sequence-dependent
setups, operation overlap, release times, and pinned operations.

The pieces: :mod:`flexshop.model` holds the data types and instance
validation, :mod:`flexshop.timing` the placement arithmetic, decoding, and
the schedule checker, :mod:`flexshop.generator` seeded random instances,
:mod:`flexshop.milp` the exact mixed-integer model and LP export,
:mod:`flexshop.solvers` branch and bound, brute force, and a greedy
heuristic, :mod:`flexshop.gantt` SVG rendering, and :mod:`flexshop.cli` the
command-line front end.
"""

from .generator import GenParams, JobDag, gen_job_dag, generate, params_for_class, with_full_overlap
from .jsonio import (FormatError, dumps_instance, dumps_report, dumps_schedule,
                     instance_from_dict, instance_to_dict, loads_instance,
                     loads_schedule, schedule_from_dict, schedule_to_dict)
from .milp import MilpModel, Row, RowViolation, Var, build_model, emit_lp, evaluate_schedule
from .model import (BigM, CycleError, Instance, Machine, Operation, Schedule,
                    ScheduledOp, SetupRule, Violation, big_m_constants,
                    topological_order, validate_instance)
from .rng import Rng
from .solvers import SolveResult, brute_force, solve_exact, solve_greedy
from .timing import (DecodeInfeasible, PlacementQuery, PlacementResult,
                     check_schedule, completion_time, decode, earliest_start, makespan)
from .gantt import render_svg

__version__ = "0.1.0"

__all__ = [
    "BigM", "CycleError", "DecodeInfeasible", "FormatError", "GenParams",
    "Instance", "JobDag", "Machine", "MilpModel", "Operation", "PlacementQuery",
    "PlacementResult", "Rng", "Row", "RowViolation", "Schedule", "ScheduledOp",
    "SetupRule", "SolveResult", "Var", "Violation", "big_m_constants",
    "brute_force", "build_model", "check_schedule", "completion_time", "decode",
    "dumps_instance", "dumps_report", "dumps_schedule", "earliest_start",
    "emit_lp", "evaluate_schedule", "gen_job_dag", "generate",
    "instance_from_dict", "instance_to_dict", "loads_instance", "loads_schedule",
    "makespan", "params_for_class", "render_svg", "schedule_from_dict",
    "schedule_to_dict", "solve_exact", "solve_greedy", "topological_order",
    "validate_instance", "with_full_overlap", "__version__",
]

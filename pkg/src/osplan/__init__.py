"""Oversubscription planning: task model, selective action split, unit-effect
compilation, branch-and-bound search and a brute-force oracle."""

from .bench import BenchConfig, BenchResult, BenchTask, run_benchmark
from .bfbb import SearchStats, Solution, bfbb_solve, heuristic_max_fact
from .errors import (
    BudgetExceeded,
    CapExceeded,
    IncompletePrecondition,
    InstanceExplosion,
    MalformedPlan,
    NotApplicable,
    NotApplicableAtStep,
    NotClassical,
    OspError,
    OspSyntaxError,
    SemanticError,
)
from .generate import GenParams, generate_task
from .model import (
    Action,
    OspTask,
    PlanReport,
    Variable,
    applicable,
    apply,
    net_utility_in_state,
    net_utility_interval,
    net_utility_static,
    state_utility,
    validate_plan,
)
from .oracle import Caps, EquivalenceReport, brute_force_optimal, check_equivalence, estimate_cstar
from .pipeline import compile_task
from .selective import SplitReport, Verdict, classify_action, complete_preconditions, refined_domain, selective_split
from .taskio import BudgetSpec, assign_ipc_values, parse_task, read_task, serialize_task, write_task
from .unit_effect import (
    CompiledTask,
    Strategy,
    StrategyFilter,
    choose_strategy,
    expand_state,
    restore_plan,
    unit_effect_compile,
)

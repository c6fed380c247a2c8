"""Cache-assisted ultra-dense MEC simulator and metaheuristic solvers."""

from .config import ConfigError, ScenarioConfig, SlopeParams, TaskRanges
from .scenario import Scenario, generate_scenario
from .sysmodel import Assignment, EvalReport, PenaltyConfig, evaluate

__all__ = [
    "Assignment",
    "ConfigError",
    "EvalReport",
    "PenaltyConfig",
    "Scenario",
    "ScenarioConfig",
    "SlopeParams",
    "TaskRanges",
    "evaluate",
    "generate_scenario",
]

__version__ = "0.1.0"

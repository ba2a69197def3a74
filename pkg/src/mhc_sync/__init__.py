"""Routing of mobile health clinics resupplied en route by a single truck."""

from .alns import AlnsConfig, AlnsResult, run, solve
from .construction import initial_solution
from .instance import GeneratorConfig, Instance, Node, build_matrices, generate_instance, parse_solomon
from .multitrip import GapReport, solve_multitrip
from .oracle import exact_solve
from .scheduler import schedule
from .solution import Schedule, Solution, objective, validate_solution

__all__ = [
    "AlnsConfig",
    "AlnsResult",
    "GapReport",
    "GeneratorConfig",
    "Instance",
    "Node",
    "Schedule",
    "Solution",
    "build_matrices",
    "exact_solve",
    "generate_instance",
    "initial_solution",
    "objective",
    "parse_solomon",
    "run",
    "schedule",
    "solve",
    "solve_multitrip",
    "validate_solution",
]

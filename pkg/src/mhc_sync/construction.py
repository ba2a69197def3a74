"""Greedy initial solution: cheapest insertion into empty depot-to-depot routes."""

from __future__ import annotations

from .insertion import SyncModel, insert_nodes
from .instance import Instance
from .scheduler import schedule
from .solution import Schedule, Solution


def insertion_cost(partial: Solution, node: int, route_index: int, position: int, inst: Instance) -> float:
    """Synchronization-free objective of ``partial`` after inserting ``node``.

    That is the longest route duration, counting the refill time at every refill
    the route forces but no waiting for the truck and no truck travel.
    """
    route = partial.routes[route_index]
    if not 0 <= position <= len(route):
        raise IndexError(f"position {position} outside route of length {len(route)}")
    model = SyncModel(inst)
    trial = list(route)
    trial.insert(position, node)
    return max(
        model.duration(trial) if r == route_index else model.duration(rt)
        for r, rt in enumerate(partial.routes)
    )


def build_routes(inst: Instance, model=None) -> list[list[int]]:
    model = model or SyncModel(inst)
    routes: list[list[int]] = [[] for _ in range(inst.num_mhc)]
    return insert_nodes(routes, list(inst.customers), model, "greedy", truck_aware=False)


def initial_solution(inst: Instance, seed: int | None = None) -> tuple[Solution, Schedule]:
    # Deterministic; ``seed`` is accepted for interface symmetry with the search.
    return schedule(build_routes(inst), inst)

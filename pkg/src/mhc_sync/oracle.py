"""Exhaustive solver for desk-scale instances, used as ground truth in tests.

Route sets and the truck's visiting order are enumerated; the load policy of
:func:`plan_loads` is kept fixed, so "optimal" means optimal given that policy.
"""

from __future__ import annotations

from itertools import permutations, product
from typing import Iterator

from .instance import Instance
from .scheduler import LoadPlan, PrecedenceError, plan_loads, settle
from .solution import Schedule, Solution, objective


class OracleSizeError(ValueError):
    pass


def set_partitions(items, k) -> Iterator[list[list[int]]]:
    """Partitions of ``items`` into exactly ``k`` nonempty blocks, blocks ordered by first element."""
    items = list(items)
    n = len(items)
    if k < 1 or k > n:
        return

    def rec(idx, blocks):
        if idx == n:
            if len(blocks) == k:
                yield [list(b) for b in blocks]
            return
        remaining = n - idx
        if len(blocks) + remaining < k:
            return
        x = items[idx]
        for b in blocks:
            b.append(x)
            yield from rec(idx + 1, blocks)
            b.pop()
        if len(blocks) < k:
            blocks.append([x])
            yield from rec(idx + 1, blocks)
            blocks.pop()

    yield from rec(0, [])


def enumerate_routings(inst: Instance, limit: int = 8, max_mhc: int = 3) -> Iterator[list[list[int]]]:
    """Every assignment of customers to ``num_mhc`` nonempty ordered routes, up to MHC relabeling."""
    if inst.n > limit:
        raise OracleSizeError(f"{inst.n} customers exceeds enumeration bound {limit}")
    if inst.num_mhc > max_mhc:
        raise OracleSizeError(f"{inst.num_mhc} MHCs exceeds enumeration bound {max_mhc}")
    for blocks in set_partitions(list(inst.customers), inst.num_mhc):
        for combo in product(*(permutations(b) for b in blocks)):
            yield [list(rt) for rt in combo]


def interleavings(seqs) -> Iterator[list[int]]:
    """All merges of ``seqs`` that keep each sequence's internal order."""
    seqs = [list(s) for s in seqs if s]
    total = sum(len(s) for s in seqs)
    pos = [0] * len(seqs)
    out: list[int] = []

    def rec():
        if len(out) == total:
            yield list(out)
            return
        for j, s in enumerate(seqs):
            if pos[j] < len(s):
                out.append(s[pos[j]])
                pos[j] += 1
                yield from rec()
                pos[j] -= 1
                out.pop()

    yield from rec()


def _plans(routes, inst):
    return [plan_loads(rt, inst) if rt else LoadPlan([0] * inst.num_products) for rt in routes]


def best_truck_order(routes, inst: Instance, max_points: int = 8) -> tuple[Solution, Schedule]:
    """Settle ``routes`` under every feasible truck order and keep the cheapest."""
    plans = _plans(routes, inst)
    n_points = sum(len(p.resupply_points) for p in plans)
    if n_points > max_points:
        raise OracleSizeError(f"{n_points} resupply points exceeds bound {max_points}")
    best = None
    for order in interleavings([p.nodes for p in plans]):
        try:
            sched = settle(routes, order, plans, inst)
        except PrecedenceError:
            continue
        f = objective(sched)
        if best is None or f < best[0]:
            best = (f, order, sched)
    _, order, sched = best
    return Solution([list(rt) for rt in routes], set(order), list(order)), sched


def exact_solve(inst: Instance, limit: int = 8, max_points: int = 8) -> tuple[Solution, Schedule, float]:
    """Minimum objective over all routings and truck orders; first minimum in enumeration order."""
    best = None
    for routes in enumerate_routings(inst, limit):
        sol, sched = best_truck_order(routes, inst, max_points)
        f = objective(sched)
        if best is None or f < best[2]:
            best = (sol, sched, f)
    return best

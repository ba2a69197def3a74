"""Resupply planning and truck synchronization for fixed MHC routes.

The pipeline is: per-route load plans (where the MHC runs short and must be
refilled), a truck visiting order by ascending provisional completion time, and a
forward simulation that settles both vehicles' waits. The order is re-derived from
the settled times and the simulation repeated until the order is stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .instance import Instance, InstanceError
from .solution import Schedule, Solution


class PrecedenceError(ValueError):
    """Truck order visits a route's resupply points out of route order."""


@dataclass
class LoadPlan:
    initial_load: list[int]
    resupply_points: list[tuple[int, list[int]]] = field(default_factory=list)

    @property
    def nodes(self) -> list[int]:
        return [i for i, _ in self.resupply_points]


def _prefix_fill(route, start, stock, inst):
    """Refill amounts covering the longest run route[start:] that fits on board with ``stock``."""
    d = inst.demand
    K = inst.num_products
    cum = [0] * K
    for j in range(start, len(route)):
        trial = [cum[k] + d[route[j]][k] for k in range(K)]
        if sum(max(stock[k], trial[k]) for k in range(K)) > inst.capacity:
            break
        cum = trial
    return [max(0, cum[k] - stock[k]) for k in range(K)]


def plan_loads(route, inst: Instance) -> LoadPlan:
    """Initial load and refill points for one route under the greedy prefix-fill policy.

    Inventory is tracked after each node; a node becomes a refill point when the
    stock of some product would not cover the next node's demand.
    """
    d = inst.demand
    K = inst.num_products
    for i in route:
        if inst.total_demand[i] > inst.capacity:
            raise InstanceError(f"node {i} demand exceeds MHC capacity")
    zero = [0] * K
    initial = _prefix_fill(route, 0, zero, inst)
    plan = LoadPlan(initial)
    stock = list(initial)
    for n, i in enumerate(route[:-1]):
        stock = [stock[k] - d[i][k] for k in range(K)]
        nxt = route[n + 1]
        if any(stock[k] < d[nxt][k] for k in range(K)):
            refill = _prefix_fill(route, n + 1, stock, inst)
            plan.resupply_points.append((i, refill))
            stock = [stock[k] + refill[k] for k in range(K)]
    return plan


def resupply_count(totals, capacity) -> int:
    """Number of refills the prefix-fill policy needs for a sequence of per-node total demands."""
    fill = 0
    count = 0
    for dv in totals:
        if fill + dv > capacity:
            count += 1
            fill = dv
        else:
            fill += dv
    return count


def provisional_times(route, refill_nodes, inst: Instance) -> list[float]:
    """Service completion times along ``route`` assuming the truck is never late."""
    t, s, xi = inst.mhc_travel, inst.service_time, inst.resupply_time
    out = []
    prev, clock = 0, 0.0
    for i in route:
        clock += t[prev][i] + s[i]
        out.append(clock)
        if i in refill_nodes:
            clock += xi
        prev = i
    return out


def order_truck(plans, completion) -> list[int]:
    """Resupply nodes of all routes in ascending completion time.

    ``completion`` maps node id to its (provisional or settled) completion time.
    Ties go to the lower route index, then the earlier refill on that route.
    """
    keyed = []
    for m, plan in enumerate(plans):
        for p, i in enumerate(plan.nodes):
            keyed.append((completion[i], m, p, i))
    keyed.sort()
    return [i for *_, i in keyed]


def settle(routes, truck_order, plans, inst: Instance) -> Schedule:
    """Simulate the truck along ``truck_order`` and propagate waits down each route."""
    t, r, s, xi = inst.mhc_travel, inst.truck_travel, inst.service_time, inst.resupply_time
    d, K = inst.demand, inst.num_products
    n = len(inst.nodes)
    c = [0.0] * n
    a = [0.0] * n
    w = [0.0] * n
    u = [0.0] * n
    g = [[0] * K for _ in range(n)]
    q = [[0] * K for _ in range(n)]

    where = {}
    refill_of = {}
    for m, (route, plan) in enumerate(zip(routes, plans)):
        for p, i in enumerate(route):
            where[i] = (m, p)
        for i, amount in plan.resupply_points:
            refill_of[i] = amount

    # per-route cursor: next unsettled position and the departure time from the previous node
    cursor = [0] * len(routes)
    depart = [0.0] * len(routes)
    prev_node = [0] * len(routes)

    def advance(m, upto):
        route = routes[m]
        clock, prev = depart[m], prev_node[m]
        for p in range(cursor[m], upto + 1):
            i = route[p]
            if prev in refill_of and p > cursor[m]:
                raise PrecedenceError(f"refill at node {prev} not yet served by the truck")
            clock += t[prev][i] + s[i]
            c[i] = clock
            prev = i
        cursor[m], depart[m], prev_node[m] = upto + 1, clock, prev

    truck_clock = 0.0
    truck_prev = 0
    truck_len = 0.0
    for i in truck_order:
        m, p = where[i]
        if cursor[m] > p:
            raise PrecedenceError(f"node {i} visited by the truck after its route moved on")
        advance(m, p)
        leg = r[truck_prev][i]
        truck_len += leg
        a[i] = truck_clock + leg
        start = max(a[i], c[i])
        u[i] = max(0.0, c[i] - a[i])
        w[i] = max(0.0, a[i] - c[i])
        truck_clock = start + xi
        truck_prev = i
        depart[m] = truck_clock
    if truck_order:
        truck_len += r[truck_prev][0]

    returns = []
    for m, route in enumerate(routes):
        if not route:
            returns.append(0.0)
            continue
        advance(m, len(route) - 1)
        returns.append(depart[m] + t[route[-1]][0])

    for route, plan in zip(routes, plans):
        stock = list(plan.initial_load)
        for i in route:
            g[i] = list(stock)
            stock = [stock[k] - d[i][k] for k in range(K)]
            if i in refill_of:
                q[i] = list(refill_of[i])
                stock = [stock[k] + q[i][k] for k in range(K)]

    return Schedule(
        completion=c,
        truck_arrival=a,
        mhc_wait=w,
        truck_wait=u,
        inventory=g,
        resupplied=q,
        latest_arrival=max(returns, default=0.0),
        truck_total_time=truck_len,
        route_returns=returns,
    )


def schedule(routes, inst: Instance, max_reorders: int | None = None) -> tuple[Solution, Schedule]:
    """Full synchronization heuristic for a set of MHC routes.

    Reorders the truck by settled completion times until the order no longer changes.
    After ``len(P) + 2`` reorderings the last schedule is returned with
    ``stabilized=False``; it is still internally consistent for its own order.
    """
    routes = [list(rt) for rt in routes]
    plans = [plan_loads(rt, inst) if rt else LoadPlan([0] * inst.num_products) for rt in routes]
    prov = {}
    for rt, plan in zip(routes, plans):
        refill = set(plan.nodes)
        for i, ci in zip(rt, provisional_times(rt, refill, inst)):
            prov[i] = ci
    order = order_truck(plans, prov)
    cap = len(order) + 2 if max_reorders is None else max_reorders
    sched = settle(routes, order, plans, inst)
    passes, reorders = 1, 0
    stable = True
    while order:
        new_order = order_truck(plans, sched.completion)
        if new_order == order:
            break
        if reorders >= cap:
            stable = False
            break
        order = new_order
        reorders += 1
        sched = settle(routes, order, plans, inst)
        passes += 1
    sched.stabilized = stable
    sched.passes = passes
    sol = Solution(routes, set(order), list(order))
    return sol, sched


def route_timing(route, inst: Instance) -> float:
    """Return time of a route that never waits and never refills."""
    t, s = inst.mhc_travel, inst.service_time
    if not route:
        return 0.0
    total = t[0][route[0]] + t[route[-1]][0]
    for a, b in zip(route, route[1:]):
        total += t[a][b]
    return total + sum(s[i] for i in route)

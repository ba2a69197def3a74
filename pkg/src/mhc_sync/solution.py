"""Solution and schedule containers, objective, and the constraint-by-constraint checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .instance import Instance

TOL = 1e-6


class StructuralError(ValueError):
    """The solution cannot even be read as routes over the instance's nodes."""


@dataclass
class Solution:
    routes: list[list[int]]
    resupply_nodes: set[int] = field(default_factory=set)
    truck_route: list[int] = field(default_factory=list)

    def copy(self) -> "Solution":
        return Solution([list(r) for r in self.routes], set(self.resupply_nodes), list(self.truck_route))

    def to_dict(self) -> dict:
        return {
            "routes": [list(r) for r in self.routes],
            "resupply_nodes": sorted(self.resupply_nodes),
            "truck_route": list(self.truck_route),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Solution":
        return cls(
            [list(map(int, r)) for r in doc["routes"]],
            set(map(int, doc.get("resupply_nodes", []))),
            list(map(int, doc.get("truck_route", []))),
        )


@dataclass
class Schedule:
    """Settled timing and inventory state. Arrays are indexed by node id (depot = 0).

    ``mhc_wait`` is the MHC's idle time at a resupply node waiting for the truck,
    ``truck_wait`` the truck's idle time waiting for the MHC to finish service.
    """

    completion: list[float]
    truck_arrival: list[float]
    mhc_wait: list[float]
    truck_wait: list[float]
    inventory: list[list[int]]
    resupplied: list[list[int]]
    latest_arrival: float
    truck_total_time: float
    route_returns: list[float] = field(default_factory=list)
    stabilized: bool = True
    passes: int = 1

    def to_dict(self) -> dict:
        return {
            "completion": self.completion,
            "truck_arrival": self.truck_arrival,
            "mhc_wait": self.mhc_wait,
            "truck_wait": self.truck_wait,
            "inventory": self.inventory,
            "resupplied": self.resupplied,
            "latest_arrival": self.latest_arrival,
            "truck_total_time": self.truck_total_time,
            "route_returns": self.route_returns,
            "stabilized": self.stabilized,
            "passes": self.passes,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Schedule":
        return cls(**doc)


def solution_document(inst: Instance, sol: Solution, sched: Schedule) -> dict:
    return {
        "instance": inst.name,
        "objective": objective(sched),
        "total_distance": total_distance(sol, inst),
        "solution": sol.to_dict(),
        "schedule": sched.to_dict(),
    }


def dump_solution(inst: Instance, sol: Solution, sched: Schedule) -> str:
    return json.dumps(solution_document(inst, sol, sched), indent=1)


def load_solution(text: str) -> tuple[Solution, Schedule]:
    doc = json.loads(text)
    return Solution.from_dict(doc["solution"]), Schedule.from_dict(doc["schedule"])


def objective(sched: Schedule) -> float:
    """Latest MHC return to the depot plus the truck's total routing time."""
    return sched.latest_arrival + sched.truck_total_time


def route_length(route, travel) -> float:
    if not route:
        return 0.0
    total = travel[0][route[0]] + travel[route[-1]][0]
    for a, b in zip(route, route[1:]):
        total += travel[a][b]
    return total


def total_distance(sol: Solution, inst: Instance) -> float:
    """MHC route lengths in the MHC metric plus the closed truck tour in the truck metric."""
    return sum(route_length(r, inst.mhc_travel) for r in sol.routes) + route_length(
        sol.truck_route, inst.truck_travel
    )


@dataclass
class Violation:
    constraint: str
    context: str
    magnitude: float = 0.0

    def __str__(self):
        return f"{self.constraint} [{self.context}] {self.magnitude:.3g}"


@dataclass
class FeasibilityReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def constraints(self) -> set[str]:
        return {v.constraint for v in self.violations}


def _structure(inst: Instance, sol: Solution, sched: Schedule) -> None:
    n = len(inst.nodes)
    bad = []
    for r, route in enumerate(sol.routes):
        for i in route:
            if not isinstance(i, int) or not 1 <= i < n:
                bad.append(f"route {r}: unknown customer {i!r}")
    for i in list(sol.resupply_nodes) + list(sol.truck_route):
        if not isinstance(i, int) or not 1 <= i < n:
            bad.append(f"truck/resupply: unknown customer {i!r}")
    for name in ("completion", "truck_arrival", "mhc_wait", "truck_wait"):
        if len(getattr(sched, name)) != n:
            bad.append(f"schedule.{name}: expected {n} entries")
    for name in ("inventory", "resupplied"):
        arr = getattr(sched, name)
        if len(arr) != n or any(len(row) != inst.num_products for row in arr):
            bad.append(f"schedule.{name}: expected {n}x{inst.num_products}")
    if bad:
        raise StructuralError("; ".join(bad))


def validate_solution(inst: Instance, sol: Solution, sched: Schedule, tol: float = TOL) -> FeasibilityReport:
    """Check a solution/schedule pair against the routing, timing and inventory constraints.

    Conditional (big-M) constraints are checked in their logical form: the equality
    must hold on every arc that is used; unused arcs are not checked.
    """
    _structure(inst, sol, sched)
    rep = FeasibilityReport()
    add = rep.violations.append
    t, r, xi, Q = inst.mhc_travel, inst.truck_travel, inst.resupply_time, inst.capacity
    s, d = inst.service_time, inst.demand
    n = len(inst.nodes)
    K = range(inst.num_products)
    c, a, w, u = sched.completion, sched.truck_arrival, sched.mhc_wait, sched.truck_wait
    g, q = sched.inventory, sched.resupplied
    z = [0] * n
    for i in sol.resupply_nodes:
        z[i] = 1

    # MHC arcs
    x_arcs = []
    for route in sol.routes:
        seq = [0] + list(route) + [0]
        x_arcs.extend(zip(seq, seq[1:]))
    indeg = [0] * n
    outdeg = [0] * n
    for i, j in x_arcs:
        outdeg[i] += 1
        indeg[j] += 1
    for j in inst.customers:
        if indeg[j] != 1:
            add(Violation("visit_once", f"node {j} visited {indeg[j]} times", abs(indeg[j] - 1)))
        if indeg[j] != outdeg[j]:
            add(Violation("flow_balance", f"node {j} in {indeg[j]} out {outdeg[j]}", abs(indeg[j] - outdeg[j])))
    used = sum(1 for route in sol.routes if route)
    if used != inst.num_mhc or outdeg[0] - (len(sol.routes) - used) != inst.num_mhc:
        add(Violation("route_count", f"{used} nonempty routes for {inst.num_mhc} MHCs", abs(used - inst.num_mhc)))
    if len(sol.routes) != inst.num_mhc:
        add(Violation("route_count", f"{len(sol.routes)} routes for {inst.num_mhc} MHCs"))

    # truck arcs
    y_arcs = []
    if sol.truck_route:
        seq = [0] + list(sol.truck_route) + [0]
        y_arcs = list(zip(seq, seq[1:]))
    tin = [0] * n
    tout = [0] * n
    for i, j in y_arcs:
        tout[i] += 1
        tin[j] += 1
    for j in range(n):
        if tin[j] != tout[j]:
            add(Violation("truck_flow", f"truck in/out at {j}: {tin[j]}/{tout[j]}", abs(tin[j] - tout[j])))
    for i in inst.customers:
        if z[i] != tin[i]:
            add(Violation("truck_visits_refills", f"node {i}: z={z[i]} truck visits={tin[i]}", abs(z[i] - tin[i])))
    if tout[0] > 1:
        add(Violation("truck_depot_exit", f"truck leaves depot {tout[0]} times", tout[0] - 1))

    # MHC timing
    def cw(i):
        return (0.0, 0.0) if i == 0 else (c[i], w[i])

    for i, j in x_arcs:
        if j == 0:
            continue
        ci, wi = cw(i)
        expect = ci + wi + xi * z[i] + t[i][j] + s[j]
        gap = c[j] - expect
        if gap > tol:
            add(Violation("mhc_time_upper", f"arc {i}->{j}", gap))
        elif gap < -tol:
            add(Violation("mhc_time_lower", f"arc {i}->{j}", -gap))

    # truck timing
    for i, j in y_arcs:
        if j == 0:
            continue
        ai, ui = (0.0, 0.0) if i == 0 else (a[i], u[i])
        expect = ai + ui + xi * z[i] + r[i][j]
        gap = a[j] - expect
        if gap < -tol:
            add(Violation("truck_time_lower", f"truck arc {i}->{j}", -gap))
        elif gap > tol:
            add(Violation("truck_time_upper", f"truck arc {i}->{j}", gap))

    # waits
    for i in inst.customers:
        if z[i]:
            if abs(w[i] - max(0.0, a[i] - c[i])) > tol:
                add(Violation("mhc_wait", f"node {i}: w={w[i]:.6g} a-c={a[i] - c[i]:.6g}", abs(w[i] - max(0.0, a[i] - c[i]))))
            if abs(u[i] - max(0.0, c[i] - a[i])) > tol:
                add(Violation("truck_wait", f"node {i}: u={u[i]:.6g} c-a={c[i] - a[i]:.6g}", abs(u[i] - max(0.0, c[i] - a[i]))))
        else:
            if abs(w[i]) > tol:
                add(Violation("mhc_wait", f"node {i}: wait without resupply", abs(w[i])))
            if abs(u[i]) > tol:
                add(Violation("truck_wait", f"node {i}: truck wait without resupply", abs(u[i])))

    # latest arrival
    latest = 0.0
    for route in sol.routes:
        if route:
            last = route[-1]
            back = c[last] + w[last] + xi * z[last] + t[last][0]
            latest = max(latest, back)
            if back - sched.latest_arrival > tol:
                add(Violation("latest_arrival", f"route ending {last} returns at {back:.6g}", back - sched.latest_arrival))
    if sched.latest_arrival - latest > tol:
        add(Violation("latest_arrival", "latest arrival not tight", sched.latest_arrival - latest))

    # inventory
    for i, j in x_arcs:
        if i == 0 or j == 0:
            continue
        for k in K:
            expect = g[i][k] - d[i][k] + q[i][k]
            if g[j][k] - expect > tol:
                add(Violation("load_flow_upper", f"arc {i}->{j} product {k}", g[j][k] - expect))
            elif expect - g[j][k] > tol:
                add(Violation("load_flow_lower", f"arc {i}->{j} product {k}", expect - g[j][k]))
    for j in inst.customers:
        for k in K:
            if g[j][k] < d[j][k] - tol:
                add(Violation("demand_met", f"node {j} product {k}", d[j][k] - g[j][k]))
        load = sum(g[j])
        if load > Q + tol:
            add(Violation("capacity", f"node {j} arrival load {load}", load - Q))
        after = sum(g[j][k] - d[j][k] + q[j][k] for k in K)
        if after > Q + tol:
            add(Violation("capacity", f"node {j} load after refill {after}", after - Q))
        refill = sum(q[j])
        if refill > Q * z[j] + tol:
            add(Violation("refill_needs_truck", f"node {j} refill {refill} with z={z[j]}", refill - Q * z[j]))

    # domains and objective bookkeeping
    for name, arr in (("completion", c), ("truck_arrival", a), ("mhc_wait", w), ("truck_wait", u)):
        worst = min(arr[1:], default=0.0)
        if worst < -tol:
            add(Violation("domain", f"negative {name}", -worst))
    if any(v < 0 for row in g for v in row) or any(v < 0 for row in q for v in row):
        add(Violation("domain", "negative inventory or refill"))
    truck_len = sum(r[i][j] for i, j in y_arcs)
    if abs(truck_len - sched.truck_total_time) > tol:
        add(Violation("truck_time", "truck_total_time differs from truck arcs", abs(truck_len - sched.truck_total_time)))
    return rep

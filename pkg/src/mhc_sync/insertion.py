"""Cheapest-insertion and regret insertion over a pluggable route model.

Insertion ranks candidates by the synchronization-free objective: the largest
route duration after the insertion, where a route's duration counts travel,
service and the fixed refill time at every forced refill but no truck waits.
Repairs inside the search add the change in a per-route truck tour estimate,
since refills that the duration prices at the refill time alone really cost a
truck trip. Many candidates tie on the max (any insertion into a route that stays
shorter than the longest one), so ties fall to the increase of the route's own
cost, then to the lowest (route, position, node).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .instance import Instance
from .scheduler import schedule
from .solution import Schedule, Solution, objective

REPAIR_METHODS = ("greedy", "regret1", "regret2")


@dataclass
class Evaluation:
    """What the search needs to know about one complete candidate."""

    objective: float
    routes: list[list[int]]
    refill_nodes: list[int]
    waiting_nodes: list[int]
    route_returns: list[float]
    detail: object = None
    extra: dict = field(default_factory=dict)


class SyncModel:
    """Routes evaluated with the en-route truck resupply heuristic."""

    name = "sync"

    def __init__(self, inst: Instance, objective: str = "full"):
        if objective not in ("full", "latest_arrival"):
            raise ValueError(f"unknown objective {objective!r}")
        self.inst = inst
        self.objective_kind = objective
        # Truck travel only matters to the search when the objective charges for it.
        self.truck_weight = 1.0 if objective == "full" else 0.0
        self.max_travel = max(max(row) for row in inst.mhc_travel)
        self._t = inst.mhc_travel
        self._r = inst.truck_travel
        self._s = inst.service_time
        self._tot = inst.total_demand
        self._cap = inst.capacity
        self._xi = inst.resupply_time

    def duration(self, route) -> float:
        t, s, tot, cap = self._t, self._s, self._tot, self._cap
        if not route:
            return 0.0
        prev = 0
        total = 0.0
        fill = 0
        refills = 0
        for i in route:
            total += t[prev][i] + s[i]
            dv = tot[i]
            if fill + dv > cap:
                refills += 1
                fill = dv
            else:
                fill += dv
            prev = i
        return total + t[prev][0] + refills * self._xi

    def insertion_durations(self, route, v) -> list[float]:
        """Duration of ``route`` with ``v`` inserted at each position 0..len(route)."""
        return [dur for dur, _ in self.insertion_profile(route, v)]

    def profile(self, route) -> tuple[float, float]:
        """(duration, truck tour over the route's refill points)."""
        return self._walk(route, None, 0)

    def insertion_profile(self, route, v) -> list[tuple[float, float]]:
        """:meth:`profile` of ``route`` with ``v`` inserted at each position 0..len(route)."""
        t, s = self._t, self._s
        L = len(route)
        travel = s[v]
        prev = 0
        for i in route:
            travel += t[prev][i] + s[i]
            prev = i
        travel += t[prev][0]
        tv = t[v]
        out = []
        prev = 0
        for p in range(L + 1):
            nxt = route[p] if p < L else 0
            detour = t[prev][v] + tv[nxt] - t[prev][nxt]
            refills, tour = self._bins(route, v, p)
            out.append((travel + detour + refills * self._xi, tour))
            prev = nxt
        return out

    def _walk(self, route, v, p):
        t, s = self._t, self._s
        if not route and v is None:
            return 0.0, 0.0
        prev = 0
        total = 0.0
        seq = route if v is None else route[:p] + [v] + route[p:]
        for i in seq:
            total += t[prev][i] + s[i]
            prev = i
        total += t[prev][0]
        refills, tour = self._bins(seq, None, 0)
        return total + refills * self._xi, tour

    def _bins(self, route, v, p):
        """Refill count and closed truck tour length for ``route`` (with ``v`` at ``p``)."""
        tot, cap, r = self._tot, self._cap, self._r
        fill = 0
        refills = 0
        tour = 0.0
        last_stop = 0
        prev = 0
        L = len(route)
        for idx in range(L + (v is not None)):
            if v is None:
                i = route[idx]
            elif idx < p:
                i = route[idx]
            elif idx == p:
                i = v
            else:
                i = route[idx - 1]
            dv = tot[i]
            if fill + dv > cap:
                refills += 1
                tour += r[last_stop][prev]
                last_stop = prev
                fill = dv
            else:
                fill += dv
            prev = i
        if refills:
            tour += r[last_stop][0]
        return refills, tour

    def evaluate(self, routes) -> Evaluation:
        sol, sched = schedule(routes, self.inst)
        if self.objective_kind == "full":
            f = objective(sched)
        else:
            f = sched.latest_arrival
        waiting = [i for i in sol.truck_route if sched.mhc_wait[i] > 1e-9 or sched.truck_wait[i] > 1e-9]
        return Evaluation(
            objective=f,
            routes=sol.routes,
            refill_nodes=list(sol.truck_route),
            waiting_nodes=waiting,
            route_returns=list(sched.route_returns),
            detail=(sol, sched),
        )

    @staticmethod
    def unpack(ev: Evaluation) -> tuple[Solution, Schedule]:
        return ev.detail


def insert_nodes(
    routes, removed, model, method: str = "greedy", truck_aware: bool = True, rng=None, noise: float = 0.0
) -> list[list[int]]:
    """Reinsert ``removed`` into ``routes`` (modified in place and returned).

    ``greedy`` repeatedly takes the globally cheapest (node, position). ``regret1``
    and ``regret2`` insert first the node whose 2nd (resp. 3rd) best candidate is
    furthest from its best; with fewer candidates the worst available one is used.
    While there are as many empty routes as nodes left, only empty routes are
    offered, so no MHC is left idle.

    With ``truck_aware`` the cost also carries the change in the route's own truck
    tour (depot, its refill points in order, depot), weighted by ``model.truck_weight``.
    A positive ``noise`` adds a uniform perturbation in [-noise, noise] times the
    largest travel time to every candidate, drawn from ``rng`` once per candidate.
    """
    if method not in REPAIR_METHODS:
        raise ValueError(f"unknown repair method {method!r}")
    k = REPAIR_METHODS.index(method)
    lam = model.truck_weight if truck_aware else 0.0
    pending = sorted(set(removed))
    R = len(routes)
    prof = [model.profile(rt) for rt in routes]
    amp = noise * model.max_travel if noise > 0 else 0.0

    def options(route, v):
        opts = model.insertion_profile(route, v)
        if amp:
            return [(nd, nt, amp * (2 * rng.random() - 1)) for nd, nt in opts]
        return [(nd, nt, 0.0) for nd, nt in opts]

    cand = {v: [options(rt, v) for rt in routes] for v in pending}

    while pending:
        n_empty = sum(1 for rt in routes if not rt)
        only_empty = n_empty >= len(pending)
        durs = [d for d, _ in prof]
        i1 = max(range(R), key=lambda r: (durs[r], -r))
        top = durs[i1]
        second = max((durs[r] for r in range(R) if r != i1), default=0.0)

        best_pick = None
        for v in pending:
            opts = []
            for r in range(R):
                if only_empty and routes[r]:
                    continue
                other = second if r == i1 else top
                base_d, base_t = prof[r]
                for pos, (nd, nt, eps) in enumerate(cand[v][r]):
                    dt = lam * (nt - base_t) + eps
                    opts.append(((nd if nd > other else other) + dt, nd - base_d + dt, r, pos))
            opts.sort()
            c1 = opts[0]
            if k == 0:
                key = (c1, v)
            else:
                ck = opts[min(k, len(opts) - 1)]
                key = ((c1[0] - ck[0], c1[1] - ck[1]), c1, v)
            if best_pick is None or key < best_pick[0]:
                best_pick = (key, v, c1)

        _, v, (_, _, r, pos) = best_pick
        routes[r].insert(pos, v)
        pending.remove(v)
        del cand[v]
        prof[r] = model.profile(routes[r])
        for u in pending:
            cand[u][r] = options(routes[r], u)
    return routes

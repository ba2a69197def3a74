"""Baseline without a truck: MHCs return to the depot to reload.

Each MHC's customer sequence is cut into capacity-feasible trips by an exact
split (minimum route duration for that sequence). The depot has a single reload
bay served first come, first served (ties by MHC index); a reload takes the same
time as an en-route resupply.
"""

from __future__ import annotations

import csv
import heapq
import io
from dataclasses import dataclass, field

from .alns import AlnsConfig, run
from .insertion import Evaluation, SyncModel
from .instance import Instance
from .solution import Schedule, Solution, total_distance

GAP_COLUMNS = (
    "network", "capacity_class", "num_mhc", "n",
    "td_sync", "la_sync", "td_mt", "la_mt", "distance_gap", "arrival_gap",
)


class TripCapacityError(ValueError):
    pass


@dataclass
class ReloadEvent:
    mhc: int
    arrival: float
    start: float
    end: float

    @property
    def wait(self) -> float:
        return self.start - self.arrival


@dataclass
class MtSolution:
    trips: list[list[list[int]]]
    reloads: list[ReloadEvent] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "trips": self.trips,
            "reloads": [vars(e) for e in self.reloads],
        }


@dataclass
class MtTimes:
    trip_returns: list[list[float]]
    reloads: list[ReloadEvent]
    latest_arrival: float
    total_distance: float

    @property
    def route_returns(self) -> list[float]:
        return [rets[-1] if rets else 0.0 for rets in self.trip_returns]


def trip_length(trip, inst: Instance) -> float:
    t = inst.mhc_travel
    if not trip:
        return 0.0
    total = t[0][trip[0]] + t[trip[-1]][0]
    for a, b in zip(trip, trip[1:]):
        total += t[a][b]
    return total


def mt_schedule(sol: MtSolution, inst: Instance) -> MtTimes:
    """Simulate every MHC through its trips with FIFO queueing at the reload bay."""
    s, xi = inst.service_time, inst.resupply_time
    durations = []
    for m, trips in enumerate(sol.trips):
        row = []
        for trip in trips:
            load = sum(inst.total_demand[i] for i in trip)
            if load > inst.capacity:
                raise TripCapacityError(f"MHC {m}: trip {trip} carries {load} > {inst.capacity}")
            row.append(trip_length(trip, inst) + sum(s[i] for i in trip))
        durations.append(row)

    returns: list[list[float]] = [[] for _ in sol.trips]
    queue = []
    for m, row in enumerate(durations):
        if row:
            returns[m].append(row[0])
            if len(row) > 1:
                heapq.heappush(queue, (row[0], m))
    bay_free = 0.0
    events = []
    while queue:
        arrival, m = heapq.heappop(queue)
        start = max(arrival, bay_free)
        end = start + xi
        bay_free = end
        events.append(ReloadEvent(m, arrival, start, end))
        k = len(returns[m])
        back = end + durations[m][k]
        returns[m].append(back)
        if k + 1 < len(durations[m]):
            heapq.heappush(queue, (back, m))

    td = sum(trip_length(trip, inst) for trips in sol.trips for trip in trips)
    la = max((r[-1] for r in returns if r), default=0.0)
    return MtTimes(returns, events, la, td)


def split_trips(route, inst: Instance) -> tuple[float, list[list[int]]]:
    """Cut ``route`` into capacity-feasible trips minimizing its total duration.

    Duration counts travel, service and one reload per extra trip; queueing is
    not known at this point and is left to :func:`mt_schedule`.
    """
    if not route:
        return 0.0, []
    t, s, tot, cap, xi = inst.mhc_travel, inst.service_time, inst.total_demand, inst.capacity, inst.resupply_time
    L = len(route)
    best = [0.0] + [float("inf")] * L
    cut = [0] * (L + 1)
    for i in range(L):
        if best[i] == float("inf"):
            continue
        base = best[i] + (xi if i > 0 else 0.0)
        load = 0
        inner = 0.0
        for j in range(i, L):
            node = route[j]
            load += tot[node]
            if load > cap:
                break
            if j > i:
                inner += t[route[j - 1]][node]
            inner += s[node]
            cost = base + t[0][route[i]] + inner + t[node][0]
            if cost < best[j + 1]:
                best[j + 1] = cost
                cut[j + 1] = i
    trips = []
    j = L
    while j > 0:
        i = cut[j]
        trips.append(list(route[i:j]))
        j = i
    trips.reverse()
    return best[L], trips


class MultiTripModel:
    """Route model for the search: a route is one MHC's customers across all its trips."""

    name = "multitrip"

    def __init__(self, inst: Instance):
        self.inst = inst
        self.truck_weight = 0.0
        self.max_travel = max(max(row) for row in inst.mhc_travel)

    def duration(self, route) -> float:
        return split_trips(route, self.inst)[0]

    def profile(self, route) -> tuple[float, float]:
        return self.duration(route), 0.0

    def insertion_profile(self, route, v) -> list[tuple[float, float]]:
        out = []
        for p in range(len(route) + 1):
            out.append((split_trips(route[:p] + [v] + route[p:], self.inst)[0], 0.0))
        return out

    def insertion_durations(self, route, v) -> list[float]:
        return [d for d, _ in self.insertion_profile(route, v)]

    def build(self, routes) -> MtSolution:
        return MtSolution([split_trips(rt, self.inst)[1] for rt in routes])

    def evaluate(self, routes) -> Evaluation:
        sol = self.build(routes)
        times = mt_schedule(sol, self.inst)
        sol.reloads = times.reloads
        reload_nodes = []
        waiting = []
        waits = {}
        for e in times.reloads:
            waits.setdefault(e.mhc, []).append(e.wait)
        for m, trips in enumerate(sol.trips):
            for k, trip in enumerate(trips[:-1]):
                reload_nodes.append(trip[-1])
                if waits[m][k] > 1e-9:
                    waiting.append(trip[-1])
        return Evaluation(
            objective=times.latest_arrival,
            routes=[list(rt) for rt in routes],
            refill_nodes=reload_nodes,
            waiting_nodes=waiting,
            route_returns=times.route_returns,
            detail=(sol, times),
        )


def solve_multitrip(inst: Instance, cfg: AlnsConfig | None = None):
    """Minimize the latest MHC return under depot reloading; returns (MtSolution, MtTimes, result)."""
    res = run(inst, cfg or AlnsConfig(), MultiTripModel(inst))
    sol, times = res.best.detail
    return sol, times, res


@dataclass
class GapReport:
    td_sync: float
    la_sync: float
    td_mt: float
    la_mt: float
    network: str = ""
    capacity_class: str = ""
    num_mhc: int = 0
    n: int = 0

    @property
    def distance_gap(self) -> float:
        """Extra distance of the synchronized plan, in % of the multi-trip distance."""
        return (self.td_sync - self.td_mt) / self.td_mt * 100.0

    @property
    def arrival_gap(self) -> float:
        """Reduction of the latest return time, in % of the multi-trip value."""
        return (self.la_mt - self.la_sync) / self.la_mt * 100.0

    def row(self) -> list:
        return [
            self.network, self.capacity_class, self.num_mhc, self.n,
            f"{self.td_sync:.2f}", f"{self.la_sync:.2f}", f"{self.td_mt:.2f}", f"{self.la_mt:.2f}",
            f"{self.distance_gap:.2f}", f"{self.arrival_gap:.2f}",
        ]


def compare(sync_result: tuple[Solution, Schedule], mt_result: tuple[MtSolution, MtTimes], inst: Instance,
            **labels) -> GapReport:
    sol, sched = sync_result
    _, times = mt_result
    return GapReport(
        td_sync=total_distance(sol, inst),
        la_sync=sched.latest_arrival,
        td_mt=times.total_distance,
        la_mt=times.latest_arrival,
        **labels,
    )


def run_comparison(inst: Instance, cfg: AlnsConfig | None = None, **labels) -> GapReport:
    """Solve both models on ``inst``, each minimizing the latest MHC return."""
    cfg = cfg or AlnsConfig()
    sync = run(inst, cfg, SyncModel(inst, objective="latest_arrival"))
    mt = run(inst, cfg, MultiTripModel(inst))
    return compare(sync.best.detail, mt.best.detail, inst, **labels)


def gap_table(reports) -> str:
    """Comparison CSV with Avg./Min./Max. footer rows over the gap columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GAP_COLUMNS)
    reports = list(reports)
    for rep in reports:
        w.writerow(rep.row())
    if reports:
        dg = [r.distance_gap for r in reports]
        ag = [r.arrival_gap for r in reports]
        for label, fn in (("Avg.", lambda xs: sum(xs) / len(xs)), ("Min.", min), ("Max.", max)):
            w.writerow([label, "", "", "", "", "", "", "", f"{fn(dg):.2f}", f"{fn(ag):.2f}"])
    return buf.getvalue()


def _splits(route, inst: Instance):
    """Every capacity-feasible way to cut ``route`` into consecutive trips."""
    L = len(route)
    for mask in range(1 << max(L - 1, 0)):
        trips, cur = [], [route[0]]
        for j in range(1, L):
            if mask >> (j - 1) & 1:
                trips.append(cur)
                cur = []
            cur.append(route[j])
        trips.append(cur)
        if all(sum(inst.total_demand[i] for i in tr) <= inst.capacity for tr in trips):
            yield trips


def exact_multitrip(inst: Instance, limit: int = 6) -> tuple[MtSolution, MtTimes]:
    """Minimum LA_MT over every routing and every trip split; desk-scale only."""
    from itertools import product as cartesian

    from .oracle import enumerate_routings

    best = None
    for routes in enumerate_routings(inst, limit=limit, max_mhc=inst.num_mhc):
        for trips in cartesian(*(list(_splits(rt, inst)) for rt in routes)):
            sol = MtSolution([list(t) for t in trips])
            times = mt_schedule(sol, inst)
            if best is None or times.latest_arrival < best[1].latest_arrival:
                best = (sol, times)
    sol, times = best
    sol.reloads = times.reloads
    return best

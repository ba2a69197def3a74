import math
import random
from itertools import product

import pytest

from mhc_sync.alns import AlnsConfig
from mhc_sync.multitrip import (
    GAP_COLUMNS,
    GapReport,
    MtSolution,
    TripCapacityError,
    _splits,
    compare,
    exact_multitrip,
    gap_table,
    mt_schedule,
    solve_multitrip,
    split_trips,
)
from mhc_sync.scheduler import schedule
from mhc_sync.solution import total_distance

from conftest import make_instance, random_instance, tiny4


def test_single_trip():
    inst = make_instance([(0, 0), (0, 10)], [[3]], capacity=5, service=20)
    times = mt_schedule(MtSolution([[[1]]]), inst)
    assert times.latest_arrival == 40.0 and times.reloads == []


def test_fifo_queue_wait():
    # First trips return at 10 and 12; one bay, reload 10: the second starts at 20.
    inst = make_instance([(0, 0), (5, 0), (6, 0), (0, 1), (0, 2)], [[4]] * 4, capacity=4, xi=10.0)
    times = mt_schedule(MtSolution([[[1], [3]], [[2], [4]]]), inst)
    first, second = times.reloads
    assert (first.mhc, first.start, first.end) == (0, 10.0, 20.0)
    assert (second.mhc, second.arrival, second.start) == (1, 12.0, 20.0)
    assert second.wait == 8.0
    assert times.latest_arrival == 34.0


def test_queue_tie_goes_to_lower_index():
    inst = make_instance([(0, 0), (5, 0), (-5, 0), (0, 1), (0, 2)], [[4]] * 4, capacity=4, xi=10.0)
    times = mt_schedule(MtSolution([[[1], [3]], [[2], [4]]]), inst)
    assert [e.mhc for e in times.reloads] == [0, 1]


def test_tiny4_split_distance():
    inst = tiny4()
    times = mt_schedule(MtSolution([[[1, 2], [3]]]), inst)
    assert times.total_distance == pytest.approx(10 + 10 + math.sqrt(200) + 20)
    assert times.latest_arrival == pytest.approx(10 + 10 + math.sqrt(200) + 2 + 20)


def test_capacity_violation():
    with pytest.raises(TripCapacityError):
        mt_schedule(MtSolution([[[1, 2, 3]]]), tiny4())


def test_split_is_optimal():
    rng = random.Random(4)
    for _ in range(200):
        inst = random_instance(rng, n_min=2, n_max=8, max_mhc=1)
        route = list(inst.customers)
        rng.shuffle(route)
        best, trips = split_trips(route, inst)
        assert [i for tr in trips for i in tr] == route
        brute = min(
            mt_schedule(MtSolution([s]), inst).latest_arrival for s in _splits(route, inst)
        )
        assert best == pytest.approx(brute, rel=1e-12)
        assert mt_schedule(MtSolution([trips]), inst).latest_arrival == pytest.approx(best)


def test_bay_never_overlaps():
    rng = random.Random(6)
    for _ in range(200):
        inst = random_instance(rng, n_min=4, n_max=9, max_mhc=3)
        routes = [[] for _ in range(inst.num_mhc)]
        for i in inst.customers:
            routes[rng.randrange(inst.num_mhc)].append(i)
        sol = MtSolution([split_trips(rt, inst)[1] for rt in routes])
        times = mt_schedule(sol, inst)
        ev = sorted(times.reloads, key=lambda e: e.start)
        for a, b in zip(ev, ev[1:]):
            assert b.start >= a.end - 1e-12
        for trips in sol.trips:
            for tr in trips:
                assert sum(inst.total_demand[i] for i in tr) <= inst.capacity


def test_without_capacity_pressure_models_agree():
    rng = random.Random(8)
    for _ in range(50):
        inst = random_instance(rng, n_min=3, n_max=8)
        roomy = make_instance(
            [(nd.x, nd.y) for nd in inst.nodes], [list(r) for r in inst.demand[1:]],
            capacity=sum(inst.total_demand), num_mhc=inst.num_mhc, service=inst.service_time[1],
        )
        routes = [[] for _ in range(roomy.num_mhc)]
        for k, i in enumerate(roomy.customers):
            routes[k % roomy.num_mhc].append(i)
        sol, sched = schedule(routes, roomy)
        times = mt_schedule(MtSolution([[rt] for rt in routes]), roomy)
        assert total_distance(sol, roomy) == pytest.approx(times.total_distance)
        assert sched.latest_arrival == pytest.approx(times.latest_arrival)


def test_search_close_to_exhaustive():
    rng = random.Random(12)
    close = 0
    trials = 8
    for _ in range(trials):
        inst = random_instance(rng, n_min=4, n_max=6, max_mhc=2, products=1)
        sol, times, _ = solve_multitrip(inst, AlnsConfig(iter_max=1500, seed=1))
        _, exact = exact_multitrip(inst)
        assert times.latest_arrival >= exact.latest_arrival - 1e-9
        for trips in sol.trips:
            for tr in trips:
                assert sum(inst.total_demand[i] for i in tr) <= inst.capacity
        close += times.latest_arrival <= 1.02 * exact.latest_arrival
    assert close == trials


def test_gap_formulas():
    rep = GapReport(td_sync=876, la_sync=465, td_mt=777, la_mt=554)
    assert round(rep.distance_gap, 2) == 12.74
    assert rep.arrival_gap == pytest.approx((554 - 465) / 554 * 100)
    assert abs(rep.arrival_gap - 16.06) <= 0.05
    same = GapReport(100.0, 50.0, 100.0, 50.0)
    assert same.distance_gap == 0.0 and same.arrival_gap == 0.0


def test_compare_uses_both_results():
    inst = tiny4()
    sync = schedule([[1, 2, 3]], inst)
    sol = MtSolution([[[1, 2], [3]]])
    rep = compare(sync, (sol, mt_schedule(sol, inst)), inst)
    assert rep.td_sync == pytest.approx(40 + 2 * math.sqrt(200))
    assert rep.la_sync == pytest.approx(42.0)
    assert rep.distance_gap > 0 and rep.arrival_gap > 0


def test_gap_table_footer():
    reps = [GapReport(876, 465, 777, 554, "R", "T", 3, 30), GapReport(822, 399, 806, 446, "R", "T", 4, 30)]
    lines = gap_table(reps).strip().split("\n")
    assert lines[0].split(",") == list(GAP_COLUMNS)
    assert [ln.split(",")[0] for ln in lines[-3:]] == ["Avg.", "Min.", "Max."]
    assert all(len(ln.split(",")) == len(GAP_COLUMNS) for ln in lines)
    avg = lines[-3].split(",")
    assert float(avg[-2]) == pytest.approx((12.74 + 1.99) / 2, abs=0.01)
    assert gap_table([]).strip() == ",".join(GAP_COLUMNS)

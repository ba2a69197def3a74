"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line and then asserts.

Set MHC_ACCEPTANCE_FULL=1 to run the 100 feasibility runs at the full 10,000
iterations instead of the reduced default (the timed 10,000-iteration runs are
always performed).
"""

import math
import os
import random
import statistics
import time

import pytest

from mhc_sync.alns import AlnsConfig, OperatorStats, accept, run, trace_csv
from mhc_sync.cli import experiment_tables, _experiment_job, _Job
from mhc_sync.insertion import SyncModel
from mhc_sync.multitrip import run_comparison
from mhc_sync.oracle import exact_solve
from mhc_sync.scheduler import schedule
from mhc_sync.solution import objective, validate_solution
from mhc_sync.instance import GeneratorConfig

from conftest import ACCEPTANCE_LINES, generated, random_instance, random_routes, tiny4

FULL = os.environ.get("MHC_ACCEPTANCE_FULL") == "1"
SUITE_ITERS = 10_000 if FULL else 1_500
KINDS = ("R", "C", "RC")

pytestmark = pytest.mark.slow


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def suite():
    """100 seeded runs on 30-node R/C/RC instances."""
    out = []
    for s in range(100):
        inst = generated(KINDS[s % 3], 30, 3, 2, seed=s)
        t0 = time.perf_counter()
        res = run(inst, AlnsConfig(iter_max=SUITE_ITERS, seed=s))
        sol, sched = res.best.detail
        out.append({
            "kind": KINDS[s % 3],
            "feasible": validate_solution(inst, sol, sched, tol=1e-6).passed,
            "ratio": res.objective / res.initial.objective,
            "time": time.perf_counter() - t0,
        })
    return out


def test_criterion_1_feasibility(suite):
    n_ok = sum(r["feasible"] for r in suite)
    timed = []
    for k, kind in enumerate(KINDS):
        inst = generated(kind, 30, 3, 2, seed=1000 + k)
        t0 = time.perf_counter()
        res = run(inst, AlnsConfig(iter_max=10_000, seed=k))
        timed.append(time.perf_counter() - t0)
        sol, sched = res.best.detail
        n_ok += validate_solution(inst, sol, sched, tol=1e-6).passed
    ok = n_ok == 103 and max(timed) < 120
    report(1, ok, f"{n_ok}/103 feasible ({len(suite)} runs at {SUITE_ITERS} iters + 3 at 10000); "
                  f"10k-iteration wall times {', '.join(f'{t:.1f}s' for t in timed)} (budget 120s)")
    assert ok


def _oracle_sweep(capacity):
    rng = random.Random(2024)
    within, worst_oracle, gaps, refills = 0, 0.0, [], 0
    for j in range(30):
        n = (5, 6, 7)[j % 3]
        inst = generated(KINDS[j % 3], n, 2, 2, seed=rng.randrange(2 ** 31), capacity=capacity)
        t0 = time.perf_counter()
        sol, _, f_opt = exact_solve(inst)
        worst_oracle = max(worst_oracle, time.perf_counter() - t0)
        refills += bool(sol.truck_route)
        res = run(inst, AlnsConfig(iter_max=5000, seed=j))
        gap = (res.objective - f_opt) / f_opt
        assert gap >= -1e-9, "search beat the exhaustive optimum"
        gaps.append(gap)
        within += gap <= 0.02
    return within, worst_oracle, gaps, refills


def test_criterion_2_oracle_equivalence():
    # Default capacity (26) rarely forces a refill at this size; capacity 12 forces several.
    parts, ok = [], True
    for cap in (26, 12):
        within, worst, gaps, refills = _oracle_sweep(cap)
        ok &= within >= 27 and worst <= 60
        parts.append(f"capacity {cap}: {within}/30 within 2% (need 27), optimum uses the truck in {refills}/30, "
                     f"mean gap {100 * statistics.fmean(gaps):.2f}%, max gap {100 * max(gaps):.2f}%, slowest oracle {worst:.1f}s")
    report(2, ok, "; ".join(parts))
    assert ok


def test_criterion_3_scheduler():
    _, sched = schedule([[1, 2, 3]], tiny4())
    tiny_ok = abs(objective(sched) - 70.284271247) <= 1e-6
    rng = random.Random(3)
    feasible = exclusive = stable = 0
    trials = 1000
    for _ in range(trials):
        inst = random_instance(rng, n_min=3, n_max=12, max_mhc=4)
        sol, sc = schedule(random_routes(rng, inst), inst)
        feasible += validate_solution(inst, sol, sc).passed
        exclusive += all(min(sc.mhc_wait[i], sc.truck_wait[i]) == 0.0 for i in sol.truck_route)
        stable += sc.stabilized
    ok = tiny_ok and feasible == trials and exclusive == trials and stable >= 0.99 * trials
    report(3, ok, f"TINY-4 objective {objective(sched):.9f}; fuzz: {feasible}/{trials} feasible, "
                  f"{exclusive}/{trials} with min(w,u)=0, {stable}/{trials} stabilized within cap")
    assert ok


def test_criterion_4_acceptance_rule():
    rng = random.Random(4)
    trials = 100_000
    rate = sum(accept(13.0, 10.0, 3.0, rng) for _ in range(trials)) / trials
    improving = sum(accept(9.0, 10.0, t, rng) for t in (1e-6, 1.0, 1e6) for _ in range(10_000))
    ok = abs(rate - math.exp(-1)) <= 0.01 and improving == 30_000
    report(4, ok, f"rate at delta/T=1: {rate:.4f} (target {math.exp(-1):.4f} +/- 0.01); improving accepted {improving}/30000")
    assert ok


def test_criterion_5_adaptive_weights():
    inst = generated("RC", 30, 3, 2, seed=5)
    res = run(inst, AlnsConfig(iter_max=3000, seed=5))
    segs = res.stats.segments
    bad = [
        s["iteration"] for s in segs
        if min(s["weights"]) <= 0 or abs(sum(s["weights"]) - 1) > 1e-12 or any(s["scores"]) or any(s["uses"])
    ]
    ok = len(segs) == 20 and all(s["iteration"] == 150 * (k + 1) for k, s in enumerate(segs)) and not bad
    report(5, ok, f"{len(segs)} segment updates at multiples of 150; violations at {bad or 'none'}")
    assert ok


def test_criterion_6_comparison_direction():
    cells = {}
    for kind in KINDS:
        for cap, cls in ((22, "T"), (32, "E")):
            for m in (3, 4):
                reps = []
                for s in range(10):
                    inst = generated(kind, 30, m, 1, seed=s, capacity=cap, demand_choices=(5,))
                    reps.append(run_comparison(inst, AlnsConfig(iter_max=1000, seed=s)))
                cells[(kind, cls, m)] = reps
    all_reps = [r for reps in cells.values() for r in reps]
    dg = statistics.fmean(r.distance_gap for r in all_reps)
    ag = statistics.fmean(r.arrival_gap for r in all_reps)
    per_cell = "; ".join(
        f"{k}{c}{m}: {statistics.fmean(r.distance_gap for r in v):+.1f}/{statistics.fmean(r.arrival_gap for r in v):+.1f}"
        for (k, c, m), v in cells.items()
    )
    from mhc_sync.multitrip import GapReport

    unit = round(GapReport(876, 465, 777, 554).distance_gap, 2) == 12.74
    ok = dg > 0 and ag > 0 and unit
    report(6, ok, f"mean distance gap {dg:+.2f}%, mean arrival gap {ag:+.2f}% over {len(all_reps)} instances; "
                  f"unit gap 12.74 {'ok' if unit else 'wrong'}; per cell (dist/arrival %) {per_cell}")
    assert ok


def test_criterion_7_beats_construction(suite):
    mean_ratio = statistics.fmean(r["ratio"] for r in suite)
    ok = mean_ratio <= 0.95
    report(7, ok, f"mean best/construction {mean_ratio:.4f} over {len(suite)} runs at {SUITE_ITERS} iterations (need <= 0.95)")
    assert ok


def test_criterion_8_scale():
    inst = generated("R", 100, 8, 2, seed=8)
    t0 = time.perf_counter()
    res = run(inst, AlnsConfig(iter_max=10_000, seed=8))
    elapsed = time.perf_counter() - t0
    sol, sched = res.best.detail
    feasible = validate_solution(inst, sol, sched).passed
    ok = res.iterations == 10_000 and elapsed < 1800 and feasible
    report(8, ok, f"100 nodes, 8 MHCs, 2 products: {res.iterations} iterations in {elapsed:.0f}s (budget 1800s), "
                  f"objective {res.objective:.1f} from {res.initial.objective:.1f}, feasible={feasible}")
    assert ok


def test_criterion_9_determinism():
    inst = generated("C", 30, 3, 2, seed=9)
    a = run(inst, AlnsConfig(iter_max=1000, seed=99))
    b = run(inst, AlnsConfig(iter_max=1000, seed=99))
    jobs = [_Job(GeneratorConfig("RC", 20, 2, 2, seed=s), None, AlnsConfig(iter_max=100, seed=s)) for s in (1, 2)]
    csv_a = experiment_tables([_experiment_job(j) for j in jobs])[:2]
    csv_b = experiment_tables([_experiment_job(j) for j in jobs])[:2]
    ok = a.objective == b.objective and trace_csv(a.trace) == trace_csv(b.trace) and csv_a == csv_b
    report(9, ok, f"best {a.objective!r} vs {b.objective!r}; trace bytes equal={trace_csv(a.trace) == trace_csv(b.trace)}; "
                  f"experiment CSV bytes equal={csv_a == csv_b}")
    assert ok

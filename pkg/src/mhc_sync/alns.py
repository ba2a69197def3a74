"""Adaptive large neighborhood search over MHC routes.

Nine destroy operators are drawn by roulette wheel on adaptive weights; one of
three insertion repairs is drawn uniformly. Candidates are accepted by a
simulated-annealing rule and the current solution is reset to the best one after
a run of non-improving iterations.
"""

from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import dataclass, field

from .construction import build_routes
from .insertion import REPAIR_METHODS, Evaluation, SyncModel, insert_nodes
from .instance import Instance
from .solution import validate_solution

DESTROY_NAMES = (
    "random_node",
    "longest_node_cost",
    "resupply_nodes",
    "wait_time_nodes",
    "entire_route",
    "longest_route",
    "after_resupply",
    "prior_resupply",
    "historical",
)
N_DESTROY = len(DESTROY_NAMES)
TRACE_COLUMNS = ("iteration", "operator", "repair", "f_new", "f_current", "f_best", "accepted", "temperature")


@dataclass
class AlnsConfig:
    iter_max: int = 25_000
    segment_length: int = 150
    gamma: float = 0.8
    temp0: float | None = None  # None: 5% of the construction objective
    cooling: float = 0.9975
    max_no_improve: int = 2000
    scores: tuple[float, float, float, float] = (10.0, 7.0, 5.0, 1.0)
    destroy_fraction_range: tuple[float, float] = (0.10, 0.15)
    min_removed: int = 3
    repair_noise: float = 0.5
    noise_probability: float = 0.5
    seed: int = 0
    check_feasibility: bool = False
    time_limit: float | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling must lie in (0, 1)")
        lo, hi = self.destroy_fraction_range
        if not 0 < lo <= hi < 1:
            raise ValueError("destroy fractions must lie in (0, 1)")
        if self.segment_length < 1 or self.max_no_improve < 1 or self.iter_max < 0:
            raise ValueError("segment_length, max_no_improve must be >= 1 and iter_max >= 0")
        if min(self.scores) <= 0:
            raise ValueError("scores must be positive")


@dataclass
class OperatorStats:
    weights: list[float] = field(default_factory=lambda: [1.0] * N_DESTROY)
    scores: list[float] = field(default_factory=lambda: [0.0] * N_DESTROY)
    uses: list[int] = field(default_factory=lambda: [0] * N_DESTROY)
    new_best: list[int] = field(default_factory=lambda: [0] * N_DESTROY)
    fallbacks: list[int] = field(default_factory=lambda: [0] * N_DESTROY)
    total_uses: list[int] = field(default_factory=lambda: [0] * N_DESTROY)
    segments: list[dict] = field(default_factory=list)

    def record(self, op: int, score: float) -> None:
        self.scores[op] += score
        self.uses[op] += 1
        self.total_uses[op] += 1

    def to_dict(self) -> dict:
        return {
            "names": list(DESTROY_NAMES),
            "weights": self.weights,
            "new_best": self.new_best,
            "fallbacks": self.fallbacks,
            "total_uses": self.total_uses,
        }


def select_destroy(stats: OperatorStats, rng: random.Random) -> int:
    """Roulette wheel: index ``d`` with probability ``w_d / sum(w)``."""
    total = sum(stats.weights)
    x = rng.random() * total
    acc = 0.0
    for d, wd in enumerate(stats.weights):
        acc += wd
        if x < acc:
            return d
    return len(stats.weights) - 1


def accept(f_new: float, f_current: float, temperature: float, rng: random.Random) -> bool:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if f_new < f_current:
        return True
    return rng.random() < math.exp(-(f_new - f_current) / temperature)


def update_weights(stats: OperatorStats, gamma: float) -> OperatorStats:
    """Blend each used operator's weight with its mean segment score, normalize, reset."""
    new = list(stats.weights)
    for d in range(len(new)):
        if stats.uses[d]:
            new[d] = gamma * new[d] + (1 - gamma) * stats.scores[d] / stats.uses[d]
    if any(stats.uses):
        total = sum(new)
        new = [wd / total for wd in new]
    stats.weights = new
    stats.scores = [0.0] * len(new)
    stats.uses = [0] * len(new)
    return stats


# -- destroy operators --------------------------------------------------------


class DestroyContext:
    """Per-run state shared by the destroy operators."""

    def __init__(self, inst: Instance, cfg: AlnsConfig, rng: random.Random):
        self.inst = inst
        self.cfg = cfg
        self.rng = rng
        self.history: dict[tuple[int, int, int], float] = {}

    def fraction(self) -> float:
        lo, hi = self.cfg.destroy_fraction_range
        return self.rng.uniform(lo, hi)

    def remember(self, routes, f: float) -> None:
        """Keep, per (node, route, predecessor) placement, the best objective seen with it."""
        hist = self.history
        for r, route in enumerate(routes):
            prev = 0
            for i in route:
                key = (i, r, prev)
                old = hist.get(key)
                if old is None or f < old:
                    hist[key] = f
                prev = i


def _n_customers(routes):
    return sum(len(rt) for rt in routes)


def _pick_route(routes, rng):
    live = [r for r, rt in enumerate(routes) if rt]
    return rng.choice(live)


def destroy_random_node(routes, ev, ctx):
    r = _pick_route(routes, ctx.rng)
    k = max(ctx.cfg.min_removed, math.ceil(ctx.fraction() * len(routes[r])))
    return ctx.rng.sample(routes[r], min(k, len(routes[r])))


def destroy_longest_node_cost(routes, ev, ctx):
    t = ctx.inst.mhc_travel
    saving = []
    for route in routes:
        seq = [0] + route + [0]
        for p in range(1, len(seq) - 1):
            a, i, b = seq[p - 1], seq[p], seq[p + 1]
            saving.append((-(t[a][i] + t[i][b] - t[a][b]), i))
    saving.sort()
    k = max(ctx.cfg.min_removed, math.ceil(ctx.fraction() * _n_customers(routes)))
    return [i for _, i in saving[:k]]


def destroy_resupply_nodes(routes, ev, ctx):
    refill = sorted(ev.refill_nodes)
    if not refill:
        return []
    return ctx.rng.sample(refill, math.ceil(len(refill) / 2))


def destroy_wait_nodes(routes, ev, ctx):
    return sorted(ev.waiting_nodes)


def destroy_entire_route(routes, ev, ctx):
    return list(routes[_pick_route(routes, ctx.rng)])


def destroy_longest_route(routes, ev, ctx):
    ret = ev.route_returns
    r = max(range(len(routes)), key=lambda m: (ret[m], -m))
    return list(routes[r])


def _refill_chains(routes, ev, ctx, after: bool):
    refill = sorted(ev.refill_nodes)
    if not refill:
        return []
    refill_set = set(refill)
    chosen = ctx.rng.sample(refill, math.ceil(len(refill) / 2))
    where = {i: (r, p) for r, rt in enumerate(routes) for p, i in enumerate(rt)}
    out = []
    for i in chosen:
        r, p = where[i]
        route = routes[r]
        step = 1 if after else -1
        j = p + step
        while 0 <= j < len(route) and route[j] not in refill_set:
            out.append(route[j])
            j += step
    return out


def destroy_after_resupply(routes, ev, ctx):
    return _refill_chains(routes, ev, ctx, after=True)


def destroy_prior_resupply(routes, ev, ctx):
    return _refill_chains(routes, ev, ctx, after=False)


def destroy_historical(routes, ev, ctx):
    hist = ctx.history
    scored = []
    for r, route in enumerate(routes):
        prev = 0
        for i in route:
            scored.append((-hist.get((i, r, prev), math.inf), i))
            prev = i
    scored.sort()
    k = max(ctx.cfg.min_removed, math.ceil(ctx.fraction() * _n_customers(routes)))
    return [i for _, i in scored[:k]]


DESTROY_OPERATORS = (
    destroy_random_node,
    destroy_longest_node_cost,
    destroy_resupply_nodes,
    destroy_wait_nodes,
    destroy_entire_route,
    destroy_longest_route,
    destroy_after_resupply,
    destroy_prior_resupply,
    destroy_historical,
)


def destroy(op: int, routes, ev: Evaluation, ctx: DestroyContext):
    """Apply destroy operator ``op`` (0-based).

    Returns ``(partial_routes, removed, applied_op)``; operators that find nothing
    to remove fall back to random-node removal and report ``applied_op == 0``.
    """
    removed = DESTROY_OPERATORS[op](routes, ev, ctx)
    applied = op
    if not removed:
        removed = destroy_random_node(routes, ev, ctx)
        applied = 0
    seen = set()
    removed = [i for i in removed if not (i in seen or seen.add(i))]
    partial = [[i for i in rt if i not in seen] for rt in routes]
    return partial, removed, applied


def repair(method: str, partial, removed, model, rng=None, noise: float = 0.0) -> list[list[int]]:
    return insert_nodes([list(rt) for rt in partial], removed, model, method, rng=rng, noise=noise)


# -- main loop ----------------------------------------------------------------


@dataclass
class TraceRow:
    iteration: int
    operator: int
    repair: str
    f_new: float
    f_current: float
    f_best: float
    accepted: bool
    temperature: float


@dataclass
class AlnsResult:
    best: Evaluation
    initial: Evaluation
    stats: OperatorStats
    trace: list[TraceRow]
    iterations: int
    elapsed: float

    @property
    def objective(self) -> float:
        return self.best.objective


def trace_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in trace:
        w.writerow([
            row.iteration,
            row.operator + 1,
            row.repair,
            repr(row.f_new),
            repr(row.f_current),
            repr(row.f_best),
            int(row.accepted),
            repr(row.temperature),
        ])
    return buf.getvalue()


def run(inst: Instance, cfg: AlnsConfig | None = None, model=None, initial_routes=None) -> AlnsResult:
    """Search from the greedy construction for ``cfg.iter_max`` iterations."""
    cfg = cfg or AlnsConfig()
    model = model or SyncModel(inst)
    rng = random.Random(cfg.seed)
    ctx = DestroyContext(inst, cfg, rng)
    stats = OperatorStats()
    start = time.perf_counter()

    routes0 = initial_routes if initial_routes is not None else build_routes(inst, model)
    initial = model.evaluate(routes0)
    best = current = initial
    ctx.remember(initial.routes, initial.objective)
    temp = cfg.temp0 if cfg.temp0 is not None else 0.05 * initial.objective
    if temp <= 0:
        temp = 1e-9
    s_best, s_better, s_accept, s_reject = cfg.scores
    no_improve = 0
    trace: list[TraceRow] = []
    it = 0

    while it < cfg.iter_max:
        if cfg.time_limit is not None and time.perf_counter() - start > cfg.time_limit:
            break
        op = select_destroy(stats, rng)
        method = REPAIR_METHODS[rng.randrange(len(REPAIR_METHODS))]
        partial, removed, applied = destroy(op, current.routes, current, ctx)
        if applied != op:
            stats.fallbacks[op] += 1
        noise = cfg.repair_noise if rng.random() < cfg.noise_probability else 0.0
        new_routes = repair(method, partial, removed, model, rng, noise)
        cand = model.evaluate(new_routes)
        ctx.remember(cand.routes, cand.objective)
        f_new = cand.objective

        accepted = True
        if f_new < best.objective:
            best = current = cand
            no_improve = 0
            score = s_best
            stats.new_best[applied] += 1
        else:
            no_improve += 1
            if f_new < current.objective:
                current = cand
                score = s_better
            elif accept(f_new, current.objective, temp, rng):
                current = cand
                score = s_accept
            else:
                accepted = False
                score = s_reject
        stats.record(applied, score)
        if accepted and cfg.check_feasibility and isinstance(model, SyncModel):
            sol, sched = cand.detail
            rep = validate_solution(inst, sol, sched)
            if not rep.passed:
                raise AssertionError(f"infeasible candidate accepted: {rep.violations[:3]}")

        trace.append(TraceRow(it + 1, applied, method, f_new, current.objective, best.objective, accepted, temp))
        temp *= cfg.cooling
        it += 1
        if it % cfg.segment_length == 0:
            update_weights(stats, cfg.gamma)
            stats.segments.append({
                "iteration": it,
                "weights": list(stats.weights),
                "scores": list(stats.scores),
                "uses": list(stats.uses),
            })
        if no_improve >= cfg.max_no_improve:
            current = best
            no_improve = 0

    return AlnsResult(best, initial, stats, trace, it, time.perf_counter() - start)


def solve(inst: Instance, cfg: AlnsConfig | None = None):
    """Run the search with the synchronized model; returns (Solution, Schedule, result)."""
    res = run(inst, cfg, SyncModel(inst))
    sol, sched = res.best.detail
    return sol, sched, res

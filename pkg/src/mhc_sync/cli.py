"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 bad input data, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alns import DESTROY_NAMES, AlnsConfig, run, trace_csv
from .insertion import SyncModel
from .instance import GeneratorConfig, Instance, InstanceError, generate_instance, parse_solomon, synthetic_solomon
from .multitrip import GapReport, gap_table, run_comparison
from .oracle import OracleSizeError, exact_solve
from .solution import dump_solution, objective, validate_solution

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

EXPERIMENT_COLUMNS = ("network", "n", "num_mhc", "num_products", "seed", "construction", "objective", "improvement", "status")
STATS_COLUMNS = ("operator", "name", "new_best", "share")
CAPACITY_CLASS = {22: "T", 32: "E"}
# Large-instance grid: (network, nodes, MHCs), two products throughout.
LARGE_PRESET = tuple((k, n, m) for k in ("R", "C", "RC") for n, ms in ((75, (4, 5, 6)), (100, (6, 7, 8))) for m in ms)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _alns_flags(p):
    d = AlnsConfig()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--iters", type=int, default=d.iter_max)
    p.add_argument("--segment", type=int, default=d.segment_length)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--temp0", type=float, default=d.temp0)
    p.add_argument("--cooling", type=float, default=d.cooling)
    p.add_argument("--max-no-improve", type=int, default=d.max_no_improve)


def _instance_flags(p, multi=False):
    d = GeneratorConfig()
    nargs = "+" if multi else None
    p.add_argument("--network", choices=("R", "C", "RC"), nargs=nargs, default=[d.network_kind] if multi else d.network_kind)
    p.add_argument("--nodes", type=int, nargs=nargs, default=[d.n_nodes] if multi else d.n_nodes)
    p.add_argument("--mhc", type=int, nargs=nargs, default=[d.num_mhc] if multi else d.num_mhc)
    p.add_argument("--capacity", type=int, nargs=nargs, default=[d.capacity] if multi else d.capacity)
    p.add_argument("--products", type=int, default=d.num_products)
    p.add_argument("--demand", type=int, nargs="+", default=list(d.demand_choices))
    p.add_argument("--service-time", type=float, default=d.service_time)
    p.add_argument("--resupply-time", type=float, default=d.resupply_time)
    p.add_argument("--truck-speed", type=float, default=d.truck_speed_factor)
    p.add_argument("--solomon", type=Path, help="Solomon-format coordinate file (default: synthetic layout)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mhc-sync", description="MHC routing with en-route truck resupply")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write an instance document")
    _instance_flags(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path)

    s = sub.add_parser("solve", help="run the search on an instance document")
    s.add_argument("instance", type=Path)
    _alns_flags(s)
    s.add_argument("--out", type=Path, required=True, help="output directory")
    s.add_argument("--format", choices=("csv", "json"), default="json", help="summary format on stdout")

    o = sub.add_parser("oracle", help="exhaustive optimum of a desk-scale instance")
    o.add_argument("instance", type=Path)
    o.add_argument("--limit", type=int, default=8)
    o.add_argument("--out", type=Path)

    c = sub.add_parser("compare", help="synchronized vs multi-trip gaps on generated instances")
    _instance_flags(c, multi=True)
    _alns_flags(c)
    c.add_argument("--instances", type=int, default=10, help="instances per cell")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", type=Path)
    c.set_defaults(capacity=[22, 32], products=1, demand=[5], nodes=[30], mhc=[3, 4], network=["R", "C", "RC"])

    st = sub.add_parser("stats", help="share of new best solutions per destroy operator")
    st.add_argument("runs", type=Path, nargs="+", help="stats.json files or solve output directories")
    st.add_argument("--out", type=Path)
    st.add_argument("--format", choices=("csv", "json"), default="csv")

    e = sub.add_parser("experiment", help="batch of seeded runs")
    _instance_flags(e, multi=True)
    _alns_flags(e)
    e.add_argument("--runs", type=int, default=10, help="seeds per size")
    e.add_argument("--preset", choices=("large",))
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", type=Path, required=True, help="output directory")
    return p


def _cfg(args) -> AlnsConfig:
    return AlnsConfig(
        iter_max=args.iters,
        segment_length=args.segment,
        gamma=args.gamma,
        temp0=args.temp0,
        cooling=args.cooling,
        max_no_improve=args.max_no_improve,
        seed=args.seed,
    )


def _coords(kind, solomon: Path | None, seed: int):
    text = solomon.read_text() if solomon else synthetic_solomon(kind, 100, seed=seed)
    return parse_solomon(text)


def _generator(args, kind, n, m, cap, seed) -> GeneratorConfig:
    return GeneratorConfig(
        network_kind=kind,
        n_nodes=n,
        num_mhc=m,
        num_products=args.products,
        capacity=cap,
        demand_choices=tuple(args.demand),
        service_time=args.service_time,
        resupply_time=args.resupply_time,
        truck_speed_factor=args.truck_speed,
        seed=seed,
    )


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _load_instance(path: Path) -> Instance:
    return Instance.from_json(path.read_text())


def cmd_generate(args) -> int:
    cfg = _generator(args, args.network, args.nodes, args.mhc, args.capacity, args.seed)
    inst = generate_instance(cfg, _coords(args.network, args.solomon, args.seed))
    _write(inst.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    res = run(inst, _cfg(args), SyncModel(inst))
    sol, sched = res.best.detail
    report = validate_solution(inst, sol, sched)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "solution.json").write_text(dump_solution(inst, sol, sched) + "\n")
    (args.out / "trace.csv").write_text(trace_csv(res.trace))
    (args.out / "stats.json").write_text(json.dumps(res.stats.to_dict(), indent=2) + "\n")
    summary = {
        "instance": inst.name,
        "seed": args.seed,
        "iterations": res.iterations,
        "construction": res.initial.objective,
        "objective": res.objective,
        "feasible": report.passed,
    }
    if args.format == "json":
        print(json.dumps(summary))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(summary.keys())
        w.writerow(summary.values())
        sys.stdout.write(buf.getvalue())
    return EXIT_OK if report.passed else EXIT_INTERNAL


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    sol, sched, f = exact_solve(inst, limit=args.limit)
    _write(dump_solution(inst, sol, sched) + "\n", args.out)
    print(f"objective {f!r}", file=sys.stderr)
    return EXIT_OK


@dataclass(frozen=True)
class _Job:
    gen: GeneratorConfig
    solomon: str | None
    alns: AlnsConfig


def _compare_job(job: _Job) -> GapReport:
    coords = parse_solomon(job.solomon) if job.solomon else _coords(job.gen.network_kind, None, job.gen.seed)
    inst = generate_instance(job.gen, coords)
    return run_comparison(
        inst, job.alns,
        network=job.gen.network_kind,
        capacity_class=CAPACITY_CLASS.get(job.gen.capacity, str(job.gen.capacity)),
        num_mhc=job.gen.num_mhc,
        n=job.gen.n_nodes,
    )


def _map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def run_seeds(batch_seed: int, count: int) -> list[int]:
    """Per-run seeds derived from one batch seed."""
    return [int(x) for x in np.random.SeedSequence(batch_seed).generate_state(count, dtype=np.uint32)] if count else []


def comparison_jobs(args) -> list[_Job]:
    solomon = args.solomon.read_text() if args.solomon else None
    seeds = run_seeds(args.seed, args.instances)
    jobs = []
    for kind in args.network:
        for cap in args.capacity:
            for m in args.mhc:
                for n in args.nodes:
                    for s in seeds:
                        alns = _cfg(args)
                        alns.seed = s
                        jobs.append(_Job(_generator(args, kind, n, m, cap, s), solomon, alns))
    return jobs


def cmd_compare(args) -> int:
    reports = _map(_compare_job, comparison_jobs(args), args.workers)
    _write(gap_table(reports), args.out)
    return EXIT_OK


def operator_shares(stats_docs) -> list[tuple[int, str, int, float]]:
    """Sum new-best counts per destroy operator over runs; share in percent."""
    counts = [0] * len(DESTROY_NAMES)
    for doc in stats_docs:
        nb = doc["new_best"]
        if len(nb) != len(counts):
            raise InstanceError(f"stats document has {len(nb)} operators, expected {len(counts)}")
        for d, k in enumerate(nb):
            counts[d] += int(k)
    total = sum(counts)
    return [(d + 1, DESTROY_NAMES[d], k, 100.0 * k / total if total else 0.0) for d, k in enumerate(counts)]


def cmd_stats(args) -> int:
    docs = []
    for p in args.runs:
        path = p / "stats.json" if p.is_dir() else p
        docs.append(json.loads(path.read_text()))
    rows = operator_shares(docs)
    if args.format == "json":
        text = json.dumps([dict(zip(STATS_COLUMNS, r)) for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(STATS_COLUMNS)
        for op, name, k, share in rows:
            w.writerow([op, name, k, f"{share:.2f}"])
        text = buf.getvalue()
    _write(text, args.out)
    return EXIT_OK


def _experiment_job(job: _Job) -> dict:
    row = {
        "network": job.gen.network_kind,
        "n": job.gen.n_nodes,
        "num_mhc": job.gen.num_mhc,
        "num_products": job.gen.num_products,
        "seed": job.alns.seed,
    }
    t0 = time.perf_counter()
    try:
        coords = parse_solomon(job.solomon) if job.solomon else _coords(job.gen.network_kind, None, job.gen.seed)
        inst = generate_instance(job.gen, coords)
        res = run(inst, job.alns, SyncModel(inst))
        sol, sched = res.best.detail
        ok = validate_solution(inst, sol, sched).passed
        row.update(
            construction=res.initial.objective,
            objective=objective(sched),
            improvement=1.0 - objective(sched) / res.initial.objective,
            status="ok" if ok else "infeasible",
        )
    except Exception as exc:  # a failed run is recorded; the batch goes on
        row.update(construction="", objective="", improvement="", status=f"error: {type(exc).__name__}: {exc}")
    row["wall_time"] = time.perf_counter() - t0
    return row


def experiment_jobs(args) -> list[_Job]:
    solomon = args.solomon.read_text() if args.solomon else None
    if args.preset == "large":
        grid = [(k, n, m, args.capacity[0]) for k, n, m in LARGE_PRESET]
    else:
        grid = [(k, n, m, c) for k in args.network for n in args.nodes for m in args.mhc for c in args.capacity]
    seeds = run_seeds(args.seed, args.runs)
    jobs = []
    for kind, n, m, cap in grid:
        for s in seeds:
            alns = _cfg(args)
            alns.seed = s
            jobs.append(_Job(_generator(args, kind, n, m, cap, s), solomon, alns))
    return jobs


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def experiment_tables(rows) -> tuple[str, str, str]:
    """(runs CSV, box-plot source CSV, wall-time CSV). Only the last depends on the clock."""
    runs, box, times = io.StringIO(), io.StringIO(), io.StringIO()
    wr = csv.writer(runs, lineterminator="\n")
    wb = csv.writer(box, lineterminator="\n")
    wt = csv.writer(times, lineterminator="\n")
    wr.writerow(EXPERIMENT_COLUMNS)
    wb.writerow(("network", "n", "num_mhc", "objective"))
    wt.writerow(("network", "n", "num_mhc", "seed", "wall_time"))
    for r in rows:
        wr.writerow([_fmt(r[c]) for c in EXPERIMENT_COLUMNS])
        wt.writerow([r["network"], r["n"], r["num_mhc"], r["seed"], f"{r['wall_time']:.3f}"])
        if r["status"] == "ok":
            wb.writerow([r["network"], r["n"], r["num_mhc"], _fmt(r["objective"])])
    ok = [r for r in rows if r["status"] == "ok"]
    if rows:
        mean_obj = _fmt(statistics.fmean(r["objective"] for r in ok)) if ok else ""
        mean_imp = _fmt(statistics.fmean(r["improvement"] for r in ok)) if ok else ""
        wr.writerow(["summary", "", "", "", len(rows), "", mean_obj, mean_imp, f"{len(ok)}/{len(rows)} ok"])
    return runs.getvalue(), box.getvalue(), times.getvalue()


def run_experiment(args) -> list[dict]:
    rows = _map(_experiment_job, experiment_jobs(args), args.workers)
    runs, box, times = experiment_tables(rows)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "runs.csv").write_text(runs)
    (args.out / "boxplot.csv").write_text(box)
    (args.out / "timings.csv").write_text(times)
    return rows


def cmd_experiment(args) -> int:
    run_experiment(args)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "stats": cmd_stats,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, OracleSizeError, FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

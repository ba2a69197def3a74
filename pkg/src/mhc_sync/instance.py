"""Problem data: Solomon coordinate reader, instance generator and travel matrices."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NETWORK_KINDS = ("R", "C", "RC")

# Depot positions of the R1/C1/RC1 Solomon families.
_SOLOMON_DEPOTS = {"R": (35.0, 35.0), "C": (40.0, 50.0), "RC": (40.0, 50.0)}


class InstanceError(ValueError):
    """Raised for malformed input files or unusable instance data."""


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class GeneratorConfig:
    network_kind: str = "R"
    n_nodes: int = 30
    num_mhc: int = 3
    num_products: int = 2
    capacity: int = 26
    demand_choices: tuple[int, ...] = (4, 5)
    service_time: float = 20.0
    resupply_time: float = 10.0
    truck_speed_factor: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.network_kind not in NETWORK_KINDS:
            raise InstanceError(f"unknown network kind {self.network_kind!r}")
        if self.truck_speed_factor <= 0:
            raise InstanceError("truck_speed_factor must be positive")
        if not self.demand_choices:
            raise InstanceError("demand_choices must be nonempty")
        if self.num_mhc < 1 or self.num_products < 1 or self.n_nodes < 1:
            raise InstanceError("n_nodes, num_mhc and num_products must be >= 1")


@dataclass(frozen=True)
class Instance:
    """Immutable problem data. Per-node arrays are indexed by node id, depot row included."""

    nodes: tuple[Node, ...]
    demand: tuple[tuple[int, ...], ...]
    service_time: tuple[float, ...]
    mhc_travel: tuple[tuple[float, ...], ...]
    truck_travel: tuple[tuple[float, ...], ...]
    num_mhc: int
    capacity: int
    resupply_time: float
    num_products: int
    truck_speed_factor: float = 1.0
    seed: int | None = None
    name: str = ""
    total_demand: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "total_demand", tuple(sum(row) for row in self.demand))

    @property
    def n(self) -> int:
        """Number of customers."""
        return len(self.nodes) - 1

    @property
    def customers(self) -> range:
        return range(1, len(self.nodes))

    # -- native document -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "nodes": [{"id": nd.id, "x": nd.x, "y": nd.y} for nd in self.nodes],
            "demand": [list(row) for row in self.demand],
            "service_time": list(self.service_time),
            "capacity": self.capacity,
            "resupply_time": self.resupply_time,
            "num_mhc": self.num_mhc,
            "num_products": self.num_products,
            "truck_speed_factor": self.truck_speed_factor,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        try:
            nodes = [Node(int(d["id"]), float(d["x"]), float(d["y"])) for d in doc["nodes"]]
            rho = float(doc.get("truck_speed_factor", 1.0))
            demand = [[int(v) for v in row] for row in doc["demand"]]
            n_products = int(doc.get("num_products", len(demand[0]) if demand else 1))
            st = doc["service_time"]
            if isinstance(st, (int, float)):
                st = [0.0] + [float(st)] * (len(nodes) - 1)
            t, r = build_matrices(nodes, rho)
            return cls(
                nodes=tuple(nodes),
                demand=tuple(tuple(row) for row in demand),
                service_time=tuple(float(v) for v in st),
                mhc_travel=t,
                truck_travel=r,
                num_mhc=int(doc["num_mhc"]),
                capacity=int(doc["capacity"]),
                resupply_time=float(doc["resupply_time"]),
                num_products=n_products,
                truck_speed_factor=rho,
                seed=doc.get("seed"),
                name=doc.get("name", ""),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise InstanceError(f"bad instance document: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


def parse_solomon(text: str | Iterable[str]) -> list[Node]:
    """Read depot and customer coordinates from a Solomon VRPTW file.

    Only the id/x/y columns are used; demand and time-window columns are ignored.
    Customer 0 is the depot.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    start = None
    for lineno, line in enumerate(lines, 1):
        if line.strip().upper().startswith("CUSTOMER"):
            start = lineno
            break
    if start is None:
        raise InstanceError("missing CUSTOMER section")

    nodes: list[Node] = []
    seen: set[int] = set()
    for lineno, line in enumerate(lines[start:], start + 1):
        parts = line.split()
        if not parts:
            continue
        if not nodes and not parts[0].isdigit():
            continue  # column header ("CUST NO.  XCOORD. ...")
        if len(parts) < 3:
            raise InstanceError(f"line {lineno}: expected at least 3 columns, got {len(parts)}")
        try:
            nid, x, y = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise InstanceError(f"line {lineno}: malformed customer row {line.strip()!r}") from None
        if nid in seen:
            raise InstanceError(f"line {lineno}: duplicate customer id {nid}")
        seen.add(nid)
        nodes.append(Node(nid, x, y))
    if not nodes:
        raise InstanceError("CUSTOMER section has no rows")
    if sorted(seen) != list(range(len(nodes))):
        raise InstanceError("customer ids must be contiguous from 0")
    return sorted(nodes, key=lambda nd: nd.id)


def build_matrices(nodes: Sequence[Node], rho: float = 1.0):
    """Euclidean MHC travel times and truck times scaled by ``rho``."""
    if len(nodes) < 2:
        raise InstanceError("need a depot and at least one customer")
    xy = np.array([[nd.x, nd.y] for nd in nodes], dtype=float)
    diff = xy[:, None, :] - xy[None, :, :]
    t = np.sqrt((diff ** 2).sum(axis=-1))
    t = (t + t.T) / 2.0
    np.fill_diagonal(t, 0.0)
    r = rho * t
    return tuple(map(tuple, t.tolist())), tuple(map(tuple, r.tolist()))


def generate_instance(cfg: GeneratorConfig, coords: Sequence[Node]) -> Instance:
    """Attach random single-product demands and constant times to ``coords``.

    Uses the depot plus the first ``cfg.n_nodes`` customers of ``coords``.
    """
    if len(coords) < cfg.n_nodes + 1:
        raise InstanceError(f"need {cfg.n_nodes + 1} coordinates, got {len(coords)}")
    if cfg.capacity < max(cfg.demand_choices):
        raise InstanceError(
            f"capacity {cfg.capacity} below largest single-node demand {max(cfg.demand_choices)}"
        )
    if cfg.num_mhc > cfg.n_nodes:
        raise InstanceError("more MHCs than customers")
    nodes = [Node(i, float(nd.x), float(nd.y)) for i, nd in enumerate(coords[: cfg.n_nodes + 1])]
    rng = np.random.default_rng(cfg.seed)
    amounts = rng.choice(np.asarray(cfg.demand_choices), size=cfg.n_nodes)
    products = rng.integers(0, cfg.num_products, size=cfg.n_nodes)
    demand = [tuple([0] * cfg.num_products)]
    for amt, k in zip(amounts.tolist(), products.tolist()):
        row = [0] * cfg.num_products
        row[k] = int(amt)
        demand.append(tuple(row))
    t, r = build_matrices(nodes, cfg.truck_speed_factor)
    return Instance(
        nodes=tuple(nodes),
        demand=tuple(demand),
        service_time=(0.0,) + (float(cfg.service_time),) * cfg.n_nodes,
        mhc_travel=t,
        truck_travel=r,
        num_mhc=cfg.num_mhc,
        capacity=cfg.capacity,
        resupply_time=float(cfg.resupply_time),
        num_products=cfg.num_products,
        truck_speed_factor=cfg.truck_speed_factor,
        seed=cfg.seed,
        name=f"{cfg.network_kind}-{cfg.n_nodes}-{cfg.num_mhc}-{cfg.num_products}-s{cfg.seed}",
    )


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed


def validate_instance(inst: Instance, tol: float = 1e-9) -> ValidationReport:
    out: list[str] = []
    n = len(inst.nodes)
    if [nd.id for nd in inst.nodes] != list(range(n)):
        out.append("node ids not contiguous from 0")
    for name, mat in (("mhc_travel", inst.mhc_travel), ("truck_travel", inst.truck_travel)):
        if len(mat) != n or any(len(row) != n for row in mat):
            out.append(f"{name}: wrong shape")
            continue
        a = np.asarray(mat, dtype=float)
        if not np.allclose(a, a.T, atol=tol, rtol=0):
            out.append(f"{name}: matrix not symmetric")
        if np.any(np.abs(np.diag(a)) > tol):
            out.append(f"{name}: nonzero diagonal")
        if np.any(a < -tol):
            out.append(f"{name}: negative entries")
    if len(inst.demand) != n or any(len(row) != inst.num_products for row in inst.demand):
        out.append("demand: wrong shape")
    else:
        for i, row in enumerate(inst.demand):
            if any((not float(v).is_integer()) or v < 0 for v in row):
                out.append(f"node {i}: demand must be nonnegative integers")
            if i > 0 and sum(row) > inst.capacity:
                out.append(f"node {i}: unservable node (demand {sum(row)} > capacity {inst.capacity})")
        if any(inst.demand[0]):
            out.append("depot has demand")
    if len(inst.service_time) != n or any(s < 0 for s in inst.service_time):
        out.append("service_time: wrong shape or negative")
    if inst.num_mhc < 1:
        out.append("num_mhc must be >= 1")
    if inst.num_mhc > n - 1:
        out.append(f"num_mhc {inst.num_mhc} exceeds number of customers {n - 1}")
    if inst.resupply_time < 0:
        out.append("resupply_time negative")
    return ValidationReport(out)


def synthetic_solomon(kind: str, n_customers: int = 100, seed: int = 0, name: str | None = None) -> str:
    """Write a Solomon-layout file with R (uniform), C (clustered) or RC (mixed) coordinates.

    The demand/time-window columns are filled with placeholders since readers ignore them.
    """
    if kind not in NETWORK_KINDS:
        raise InstanceError(f"unknown network kind {kind!r}")
    rng = np.random.default_rng(seed)

    def uniform(m):
        return rng.integers(0, 101, size=(m, 2)).astype(float)

    def clustered(m):
        n_clusters = max(2, m // 10)
        centres = rng.uniform(10, 90, size=(n_clusters, 2))
        which = rng.integers(0, n_clusters, size=m)
        pts = centres[which] + rng.normal(0, 5.0, size=(m, 2))
        return np.clip(np.round(pts), 0, 100)

    if kind == "R":
        pts = uniform(n_customers)
    elif kind == "C":
        pts = clustered(n_customers)
    else:
        half = n_customers // 2
        pts = np.vstack([clustered(half), uniform(n_customers - half)])
        pts = pts[rng.permutation(n_customers)]
    dx, dy = _SOLOMON_DEPOTS[kind]
    rows = [f"{0:5d} {dx:9.0f} {dy:9.0f} {0:9d} {0:9d} {1236:9d} {0:9d}"]
    for i, (x, y) in enumerate(pts.tolist(), 1):
        rows.append(f"{i:5d} {x:9.0f} {y:9.0f} {10:9d} {0:9d} {1000:9d} {10:9d}")
    header = [
        name or f"{kind}-SYN-{seed}",
        "",
        "VEHICLE",
        "NUMBER     CAPACITY",
        "  25         200",
        "",
        "CUSTOMER",
        "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME",
        "",
    ]
    return "\n".join(header + rows) + "\n"


def euclid(a: Node, b: Node) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)

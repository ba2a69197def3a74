import random

import pytest

from mhc_sync.instance import GeneratorConfig, Instance, Node, build_matrices, generate_instance, parse_solomon, synthetic_solomon


def make_instance(coords, demands, capacity, num_mhc=1, service=0.0, xi=2.0, rho=1.0, name="hand"):
    """Hand-built instance. ``coords[0]`` is the depot; ``demands`` holds one row per customer."""
    nodes = [Node(i, float(x), float(y)) for i, (x, y) in enumerate(coords)]
    k = len(demands[0]) if demands else 1
    t, r = build_matrices(nodes, rho)
    return Instance(
        nodes=tuple(nodes),
        demand=tuple([tuple([0] * k)] + [tuple(row) for row in demands]),
        service_time=tuple([0.0] + [float(service)] * (len(nodes) - 1)),
        mhc_travel=t,
        truck_travel=r,
        num_mhc=num_mhc,
        capacity=capacity,
        resupply_time=xi,
        num_products=k,
        truck_speed_factor=rho,
        name=name,
    )


def tiny4(num_mhc=1):
    return make_instance([(0, 0), (0, 10), (10, 10), (10, 0)], [[4], [4], [4]], capacity=10, num_mhc=num_mhc)


def random_instance(rng: random.Random, n_min=3, n_max=9, max_mhc=3, products=None):
    """Small random instance with random capacity pressure, service and resupply times."""
    n = rng.randint(n_min, n_max)
    k = products or rng.randint(1, 3)
    coords = [(rng.uniform(0, 50), rng.uniform(0, 50)) for _ in range(n + 1)]
    demands = []
    for _ in range(n):
        row = [0] * k
        row[rng.randrange(k)] = rng.randint(1, 6)
        demands.append(row)
    cap = rng.randint(max(sum(r) for r in demands), 16)
    return make_instance(
        coords, demands, capacity=cap, num_mhc=rng.randint(1, min(max_mhc, n)),
        service=rng.choice([0.0, 5.0, 20.0]), xi=rng.choice([0.0, 2.0, 10.0]), rho=rng.choice([0.5, 1.0, 1.5]),
    )


def random_routes(rng: random.Random, inst: Instance):
    nodes = list(inst.customers)
    rng.shuffle(nodes)
    m = inst.num_mhc
    cuts = sorted(rng.sample(range(1, len(nodes)), m - 1)) if m > 1 else []
    bounds = [0] + cuts + [len(nodes)]
    return [nodes[a:b] for a, b in zip(bounds, bounds[1:])]


def generated(kind="R", n=30, m=3, k=2, seed=0, **kw):
    coords = parse_solomon(synthetic_solomon(kind, 100, seed=seed))
    return generate_instance(GeneratorConfig(kind, n, m, k, seed=seed, **kw), coords)


@pytest.fixture
def tiny():
    return tiny4()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhc_sync.instance import (
    GeneratorConfig,
    Instance,
    InstanceError,
    Node,
    build_matrices,
    generate_instance,
    parse_solomon,
    synthetic_solomon,
    validate_instance,
)

from conftest import make_instance

HEADER = """C101

VEHICLE
NUMBER     CAPACITY
  25         200

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME

"""


def test_parse_depot_row():
    nodes = parse_solomon(HEADER + "    0      40         50          0          0       1236          0\n")
    assert nodes == [Node(0, 40.0, 50.0)]


def test_parse_full_size_file():
    nodes = parse_solomon(synthetic_solomon("C", 100, seed=3))
    assert len(nodes) == 101
    assert [nd.id for nd in nodes] == list(range(101))


def test_parse_missing_customer_header():
    with pytest.raises(InstanceError, match="CUSTOMER"):
        parse_solomon("C101\nVEHICLE\n 25 200\n 0 40 50 0 0 1236 0\n")


def test_parse_error_names_line():
    with pytest.raises(InstanceError, match="line 11"):
        parse_solomon(HEADER + " 0 40 50 0 0 1236 0\n 1 abc 3 0 0 1 0\n")


def test_parse_duplicate_id():
    with pytest.raises(InstanceError, match="duplicate"):
        parse_solomon(HEADER + " 0 40 50 0 0 1236 0\n 1 1 1 0 0 1 0\n 1 2 2 0 0 1 0\n")


def test_matrices_345():
    t, r = build_matrices([Node(0, 0, 0), Node(1, 3, 4)], rho=0.8)
    assert t[0][1] == 5.0
    assert r[0][1] == pytest.approx(4.0)
    assert t[0][0] == t[1][1] == 0.0


coords = st.lists(
    st.tuples(st.floats(-1e3, 1e3, allow_nan=False), st.floats(-1e3, 1e3, allow_nan=False)),
    min_size=3, max_size=12,
)


@given(coords, st.floats(0.1, 3.0))
@settings(max_examples=150, deadline=None)
def test_matrices_metric(pts, rho):
    nodes = [Node(i, x, y) for i, (x, y) in enumerate(pts)]
    t, r = build_matrices(nodes, rho)
    n = len(nodes)
    for i in range(n):
        assert t[i][i] == 0.0
        for j in range(n):
            assert t[i][j] == t[j][i] >= 0
            assert r[i][j] == pytest.approx(rho * t[i][j], rel=1e-12, abs=1e-12)
            for k in range(n):
                assert t[i][j] <= t[i][k] + t[k][j] + 1e-9 * (1 + t[i][j])


def test_generated_demands_single_product():
    coords = parse_solomon(synthetic_solomon("R", 100, seed=1))
    inst = generate_instance(GeneratorConfig("R", 40, 3, 2, seed=11), coords)
    for i in inst.customers:
        nz = [v for v in inst.demand[i] if v]
        assert len(nz) == 1 and nz[0] in (4, 5)
    assert validate_instance(inst).passed


def test_generation_is_deterministic():
    coords = parse_solomon(synthetic_solomon("RC", 100, seed=2))
    cfg = GeneratorConfig("RC", 30, 3, 2, seed=5)
    assert generate_instance(cfg, coords).to_json() == generate_instance(cfg, coords).to_json()
    other = generate_instance(GeneratorConfig("RC", 30, 3, 2, seed=6), coords)
    assert other.demand != generate_instance(cfg, coords).demand


def test_capacity_26_serves_five_nodes_of_5():
    from mhc_sync.scheduler import plan_loads

    inst = make_instance([(0, 0)] + [(i, 0) for i in range(1, 12)], [[5]] * 11, capacity=26)
    plan = plan_loads(list(range(1, 12)), inst)
    assert plan.initial_load == [25]
    assert plan.nodes == [5, 10]


def test_generator_rejects_small_capacity():
    coords = parse_solomon(synthetic_solomon("R", 100))
    with pytest.raises(InstanceError):
        generate_instance(GeneratorConfig("R", 10, 2, 1, capacity=4, demand_choices=(4, 5)), coords)


def test_validate_reports_asymmetry_and_unservable():
    inst = make_instance([(0, 0), (1, 1), (2, 2)], [[30], [4]], capacity=26)
    t = [list(row) for row in inst.mhc_travel]
    t[0][1] += 1.0
    bad = Instance(**{**{f: getattr(inst, f) for f in (
        "nodes", "demand", "service_time", "truck_travel", "num_mhc", "capacity",
        "resupply_time", "num_products")}, "mhc_travel": tuple(map(tuple, t))})
    msgs = " | ".join(validate_instance(bad).violations)
    assert "matrix not symmetric" in msgs
    assert "unservable node" in msgs


def test_instance_document_roundtrip():
    coords = parse_solomon(synthetic_solomon("C", 100, seed=4))
    inst = generate_instance(GeneratorConfig("C", 20, 2, 3, truck_speed_factor=0.7, seed=9), coords)
    back = Instance.from_json(inst.to_json())
    assert back == inst
    assert math.isclose(back.truck_travel[1][2], 0.7 * back.mhc_travel[1][2])


def test_bad_document():
    with pytest.raises(InstanceError):
        Instance.from_dict({"nodes": []})

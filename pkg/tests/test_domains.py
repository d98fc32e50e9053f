import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aggmos.aggregation import PAVED, UNPAVED, coverage_length_scheme, path_cost, solution_cost
from aggmos.core import ContractError, MOGraph
from aggmos.domains import (
    InspectionSpec,
    OUSpec,
    RoadFormatError,
    RoadSpec,
    UncertainObstacle,
    edge_obstacle_risk,
    format_road_edges,
    gaussian_tail,
    generate_inspection_instance,
    generate_ou_instance,
    generate_road_network,
    load_road_network,
    parse_road_edges,
    point_obstacle_risk,
    segment_samples,
    shadow_risk,
)
from aggmos.instance import InstanceFormatError, dumps_instance, load_instance, loads_instance, save_instance


@pytest.fixture(scope="module")
def obstacle():
    # sigma 1 and 30 shadows: step 0.1, shadow 10 sits one sigma out.
    return UncertainObstacle(center=(0.0, 0.0), half_extents=(1.0, 2.0), sigma=1.0, num_shadows=30)


def test_shadow_risk_examples(obstacle):
    assert shadow_risk(obstacle, 0) == 0.5
    assert shadow_risk(obstacle, 10) == pytest.approx(0.158655, abs=1e-6)
    assert shadow_risk(obstacle, 29) < 0.003
    assert gaussian_tail(8.0) < 1e-14
    with pytest.raises(ContractError):
        shadow_risk(obstacle, 30)
    with pytest.raises(ContractError):
        shadow_risk(obstacle, -1)


def test_shadow_nesting_and_monotone_risk(obstacle):
    risks = [shadow_risk(obstacle, j) for j in range(obstacle.num_shadows)]
    assert all(a > b for a, b in zip(risks, risks[1:]))
    for j in range(obstacle.num_shadows - 1):
        a, b = obstacle.shadow_half_extents(j), obstacle.shadow_half_extents(j + 1)
        assert a[0] < b[0] and a[1] < b[1]


def test_obstacle_rejects_indistinguishable_shadows():
    with pytest.raises(ContractError):
        UncertainObstacle((0.0, 0.0), (1.0, 1.0), sigma=1.0, num_shadows=500, shadow_step=0.1)


def test_point_obstacle_risk_examples(obstacle):
    assert point_obstacle_risk((50.0, 0.0), obstacle) == 0.0
    assert point_obstacle_risk((0.5, 0.5), obstacle) == shadow_risk(obstacle, 0)
    # Between the boundaries of shadows 2 (x = 1.2) and 3 (x = 1.3).
    assert point_obstacle_risk((1.25, 0.0), obstacle) == shadow_risk(obstacle, 3)
    assert point_obstacle_risk((1.3, 0.0), obstacle) == shadow_risk(obstacle, 3)
    # Outside the largest shadow (x > 1 + 29 * 0.1).
    assert point_obstacle_risk((3.95, 0.0), obstacle) == 0.0


def test_edge_obstacle_risk_examples(obstacle):
    assert edge_obstacle_risk((10.0, -10.0), (10.0, 10.0), obstacle, 0.05) == 0.0
    assert edge_obstacle_risk((-10.0, 0.0), (10.0, 0.0), obstacle, 0.05) == shadow_risk(obstacle, 0)
    p = (1.25, 0.0)
    assert edge_obstacle_risk(p, p, obstacle, 0.05) == point_obstacle_risk(p, obstacle)


def test_segment_samples():
    pts = segment_samples((0.0, 0.0), (1.0, 0.0), 0.3)
    assert len(pts) == 5
    assert np.allclose(pts[0], (0, 0)) and np.allclose(pts[-1], (1, 0))
    assert np.max(np.diff(pts[:, 0])) <= 0.3
    with pytest.raises(ContractError):
        segment_samples((0, 0), (1, 1), 0.0)


coord = st.floats(min_value=-6.0, max_value=6.0, allow_nan=False)


@settings(max_examples=200)
@given(coord, coord, coord, coord, st.floats(min_value=0.01, max_value=2.0))
def test_edge_risk_properties(obstacle, x1, y1, x2, y2, res):
    p1, p2 = (x1, y1), (x2, y2)
    r = edge_obstacle_risk(p1, p2, obstacle, res)
    assert 0.0 <= r <= 0.5
    assert r >= point_obstacle_risk(p1, obstacle)
    assert r >= point_obstacle_risk(p2, obstacle)
    assert edge_obstacle_risk(p1, p2, obstacle, res / 2) >= r


@settings(max_examples=100)
@given(coord, coord)
def test_point_risk_is_effective_shadow(obstacle, x, y):
    r = point_obstacle_risk((x, y), obstacle)
    inside = [j for j in range(obstacle.num_shadows) if obstacle.contains((x, y), j)]
    assert r == (shadow_risk(obstacle, inside[0]) if inside else 0.0)


def _small_ou(**kw):
    spec = dict(num_obstacles=3, prm_samples=150, prm_radius=15.0, rng_seed=3, num_pairs=5)
    spec.update(kw)
    return generate_ou_instance(OUSpec(**spec))


def test_ou_instance_structure():
    inst, obstacles = _small_ou()
    g = inst.graph
    assert (inst.m, g.d) == (4, 4) and inst.scheme == "max-risk-length"
    assert len(obstacles) == 3
    for u, v, c in g.edges():
        assert all(0.0 <= r <= 1.0 for r in c[:-1])
        assert c[-1] == pytest.approx(math.dist(inst.points[u], inst.points[v]), abs=1e-6)
        assert g.cost(v, u) == c
    diag = math.hypot(100, 100)
    for s, t in inst.pairs:
        assert math.dist(inst.points[s], inst.points[t]) >= 0.6 * diag
        for ob in obstacles:
            # Outside the nominal obstacle; outer shadows are allowed.
            assert not ob.contains(inst.points[s], 0) and not ob.contains(inst.points[t], 0)
            assert point_obstacle_risk(inst.points[s], ob) < shadow_risk(ob, 0)


def test_ou_m_follows_obstacle_count():
    inst, _ = _small_ou(num_obstacles=0)
    assert inst.m == 1 and inst.make_scheme().k == 1
    inst, _ = _small_ou(num_obstacles=12)
    assert inst.m == 13 and inst.graph.d == 13


def test_ou_deterministic():
    a, _ = _small_ou(rng_seed=11)
    b, _ = _small_ou(rng_seed=11)
    c, _ = _small_ou(rng_seed=12)
    assert dumps_instance(a) == dumps_instance(b)
    assert dumps_instance(a) != dumps_instance(c)


def test_ou_without_valid_pair_is_an_error():
    with pytest.raises(ContractError):
        _small_ou(prm_samples=5, prm_radius=1.0, min_pair_fraction=0.99)


def test_parse_road_edges():
    text = "# comment\n0 1 3.5 paved\n1 2 2 unpaved  # trailing\n\n"
    edges = parse_road_edges(text.splitlines())
    assert edges == [(0, 1, 3.5, PAVED), (1, 2, 2.0, UNPAVED)]


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("0 1 3.5 gravel", "line 1"),
        ("0 1 -3 paved", "non-negative"),
        ("0 1 x paved", "malformed"),
        ("0 1 paved", "expected"),
    ],
)
def test_parse_road_errors(line, fragment):
    with pytest.raises(RoadFormatError, match=fragment):
        parse_road_edges([line])


def test_road_error_reports_line_number():
    with pytest.raises(RoadFormatError, match="line 3"):
        parse_road_edges(["0 1 1 paved", "# ok", "1 2 1 dirt"])


def test_load_road_network(tmp_path):
    f = tmp_path / "roads.txt"
    f.write_text("0 1 3.5 paved\n1 2 2.0 unpaved\n")
    g, scheme = load_road_network(f, order="MLC")
    assert g.num_edges == 2
    assert g.cost(0, 1) == (3.5, 1.0)
    assert scheme.name == "road" and scheme.labels[0] == "max_unpaved_run"
    assert parse_road_edges(format_road_edges(g).splitlines()) == [(0, 1, 3.5, PAVED), (1, 2, 2.0, UNPAVED)]


def test_generate_road_network():
    inst = generate_road_network(RoadSpec(rows=10, cols=12, rng_seed=4, num_pairs=6))
    g = inst.graph
    assert g.num_vertices == 120 and g.d == 2 and inst.m == 3
    assert all(c[1] in (0.0, 1.0) for _, _, c in g.edges())
    assert len(inst.pairs) == 6
    one_way = generate_road_network(RoadSpec(rows=10, cols=12, rng_seed=4, num_pairs=6, one_way=True)).graph
    assert all(u < v for u, v, _ in one_way.edges())
    assert one_way.num_edges * 2 == g.num_edges


def test_inspection_examples():
    inst, insp = generate_inspection_instance(InspectionSpec(num_vertices=8, num_pois=0, rng_seed=1))
    assert inst.m == 1 and inst.make_scheme().k == 1
    inst, insp = generate_inspection_instance(InspectionSpec(num_vertices=8, num_pois=3, rng_seed=1))
    assert (inst.m, inst.graph.d) == (4, 4)
    assert all(u < v for u, v, _ in inst.graph.edges())
    again, _ = generate_inspection_instance(InspectionSpec(num_vertices=8, num_pois=3, rng_seed=1))
    assert dumps_instance(inst) == dumps_instance(again)


def test_inspection_edge_covering_everything():
    g = MOGraph(2, 4, [(0, 1, (1.0, 1.0, 1.0, 3.0))])
    assert solution_cost((0, 1), g, coverage_length_scheme(4)) == (0.0, 3.0)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 15), min_size=1, max_size=8))
def test_coverage_accumulates_as_union(masks):
    q = 4
    g = MOGraph(len(masks) + 1, q + 1)
    for i, mask in enumerate(masks):
        g.add_edge(i, i + 1, tuple(float(mask >> b & 1) for b in range(q)) + (1.0,))
    hidden = path_cost(tuple(range(len(masks) + 1)), g, coverage_length_scheme(q + 1))
    union = 0
    for mask in masks:
        union |= mask
    assert hidden[:q] == tuple(float(union >> b & 1) for b in range(q))
    assert hidden[q] == float(len(masks))


def test_instance_round_trip(tmp_path):
    inst, _ = _small_ou(num_obstacles=2)
    path = tmp_path / "ou.json"
    save_instance(inst, path)
    back = load_instance(path)
    assert dumps_instance(back) == path.read_text()
    assert back.pairs == inst.pairs and back.m == inst.m
    assert list(back.graph.edges()) == list(inst.graph.edges())


def test_instance_format_errors():
    with pytest.raises(InstanceFormatError):
        loads_instance("not json")
    with pytest.raises(InstanceFormatError):
        loads_instance('{"format": "other"}')
    with pytest.raises(InstanceFormatError):
        loads_instance('{"format": "aggmos.instance.v1", "num_vertices": 2}')

"""Small seeded instances shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from aggmos.aggregation import max_risk_length_scheme, trivial_scheme
from aggmos.core import MOGraph
from aggmos.domains import (
    InspectionSpec,
    OUSpec,
    RoadSpec,
    generate_inspection_instance,
    generate_ou_instance,
    generate_road_network,
)

START, A, B, U, GOAL = range(5)


def fig1_graph() -> MOGraph:
    """Two obstacles A and B; hidden cost ``(risk_A, risk_B, length)``.

    ``start -> a -> u`` passes A with risk 0.3 (pi2), ``start -> b -> u``
    passes B with risk 0.2 (pi3), ``u -> goal`` passes A with risk 0.9
    (pi4) and ``start -> goal`` is the long collision-free detour (pi1).
    """
    g = MOGraph(5, 3)
    g.add_edge(START, A, (0.3, 0.0, 1.0))
    g.add_edge(A, U, (0.3, 0.0, 1.0))
    g.add_edge(START, B, (0.0, 0.2, 1.0))
    g.add_edge(B, U, (0.0, 0.2, 1.0))
    g.add_edge(U, GOAL, (0.9, 0.0, 1.0))
    g.add_edge(START, GOAL, (0.0, 0.0, 5.0))
    return g


def fig1_scheme():
    return max_risk_length_scheme(3)


def small_ou(seed: int, m: int):
    """OU roadmap with at most 12 vertices and ``m - 1`` obstacles."""
    spec = OUSpec(num_obstacles=m - 1, sigma=3.0, num_shadows=10, prm_samples=12, prm_radius=38.0,
                  rng_seed=seed, num_pairs=1, min_pair_fraction=0.4, obstacle_size=(0.05, 0.15))
    inst, _ = generate_ou_instance(spec)
    (s, t), = inst.pairs
    return inst.graph, inst.make_scheme(), s, t


def small_road(seed: int, order: str = "LCM", one_way: bool = True):
    """3x4 road grid. One-way (acyclic) by default so that every walk is a simple path."""
    spec = RoadSpec(rows=3, cols=4, drop_fraction=0.2, rng_seed=seed, num_pairs=1, min_pair_fraction=0.5,
                    one_way=one_way)
    inst = generate_road_network(spec)
    (s, t), = inst.pairs
    return inst.graph, inst.make_scheme(order), s, t


def small_inspection(seed: int):
    rng = random.Random(seed)
    spec = InspectionSpec(num_vertices=rng.randint(5, 12), num_pois=rng.randint(1, 4),
                          coverage_density=0.3, edge_probability=0.35, rng_seed=seed)
    inst, _ = generate_inspection_instance(spec)
    (s, t), = inst.pairs
    return inst.graph, inst.make_scheme(), s, t


def random_trivial(seed: int, n: int = 8, d: int = 2, p: float = 0.35):
    """Random digraph with integer additive costs (ties are common)."""
    rng = random.Random(seed)
    g = MOGraph(n, d)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                g.add_edge(u, v, tuple(float(rng.randint(1, 5)) for _ in range(d)))
    return g, trivial_scheme(d), 0, n - 1

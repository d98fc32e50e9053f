"""Instance generators for obstacle uncertainty, road networks and inspection.

Obstacle uncertainty (OU)
    Each obstacle is an axis-aligned rectangle whose true extent is the
    nominal one inflated by a Gaussian amount. Shadow ``j`` is the nominal
    rectangle inflated by ``j * shadow_step``, and its risk is the
    probability that the true inflation exceeds that amount. A point's risk
    for an obstacle is the risk of the smallest shadow containing it. An
    edge's risk is the maximum over points sampled along the segment.

Roads
    Plain-text edge lists, one directed edge per line: ``u v length type``
    where ``type`` is ``paved`` or ``unpaved``. ``#`` starts a comment.

Inspection
    Layered DAGs whose edges carry binary POI-coverage bits and a length.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from .aggregation import PAVED, UNPAVED, AggregationScheme, road_scheme
from .core import ContractError, MOGraph
from .instance import Instance

RISK_DECIMALS = 6


def quantize(x: float, decimals: int = RISK_DECIMALS) -> float:
    return round(float(x), decimals) + 0.0


def gaussian_tail(z: float) -> float:
    """``1 - Phi(z)`` for the standard normal."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class UncertainObstacle:
    center: tuple[float, float]
    half_extents: tuple[float, float]
    sigma: float
    num_shadows: int = 30
    shadow_step: float | None = None  # defaults to 3 * sigma / num_shadows
    risks: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.sigma <= 0 or min(self.half_extents) <= 0 or self.num_shadows <= 0:
            raise ContractError("obstacle needs positive sigma, extents and shadow count")
        if self.shadow_step is None:
            object.__setattr__(self, "shadow_step", 3.0 * self.sigma / self.num_shadows)
        if self.shadow_step <= 0:
            raise ContractError("shadow_step must be positive")
        risks = tuple(quantize(gaussian_tail(j * self.shadow_step / self.sigma)) for j in range(self.num_shadows))
        if any(a <= b for a, b in zip(risks, risks[1:])):
            raise ContractError(
                "shadow risks are not strictly decreasing after quantization; "
                "reduce shadow_step or num_shadows"
            )
        object.__setattr__(self, "risks", risks)

    def shadow_half_extents(self, j: int) -> tuple[float, float]:
        inflate = j * self.shadow_step
        return (self.half_extents[0] + inflate, self.half_extents[1] + inflate)

    def contains(self, x: Sequence[float], j: int) -> bool:
        # Compare the excess over the obstacle, as _shadow_indices does, so
        # boundary points agree exactly.
        excess = max(abs(x[0] - self.center[0]) - self.half_extents[0],
                     abs(x[1] - self.center[1]) - self.half_extents[1], 0.0)
        return excess <= j * self.shadow_step


def shadow_risk(obstacle: UncertainObstacle, j: int) -> float:
    """Probability that the obstacle's true inflation exceeds that of shadow ``j``."""
    if not 0 <= j < obstacle.num_shadows:
        raise ContractError(f"shadow index {j} outside [0, {obstacle.num_shadows})")
    return obstacle.risks[j]


def _shadow_indices(obstacle: UncertainObstacle, pts: np.ndarray) -> np.ndarray:
    """Index of the smallest shadow containing each point (``num_shadows`` if none)."""
    dx = np.abs(pts[:, 0] - obstacle.center[0]) - obstacle.half_extents[0]
    dy = np.abs(pts[:, 1] - obstacle.center[1]) - obstacle.half_extents[1]
    excess = np.maximum(np.maximum(dx, dy), 0.0)
    step = obstacle.shadow_step
    j = np.ceil(excess / step)
    # Repair float rounding so that j is the least index with excess <= j * step.
    j = np.where(excess > j * step, j + 1, j)
    j = np.where((j > 0) & (excess <= (j - 1) * step), j - 1, j)
    return np.minimum(j, obstacle.num_shadows).astype(np.int64)


def _risks_at(obstacle: UncertainObstacle, pts: np.ndarray) -> np.ndarray:
    table = np.asarray(obstacle.risks + (0.0,))
    return table[_shadow_indices(obstacle, pts)]


def point_obstacle_risk(x: Sequence[float], obstacle: UncertainObstacle) -> float:
    """Risk of the effective (smallest containing) shadow at ``x``; 0 outside all shadows."""
    return float(_risks_at(obstacle, np.asarray([x], dtype=float))[0])


def segment_samples(p1: Sequence[float], p2: Sequence[float], resolution: float) -> np.ndarray:
    """Endpoints plus evenly spaced points, spacing <= ``resolution``.

    The number of segments is a power of two, so halving the resolution
    yields a superset of the samples.
    """
    if resolution <= 0:
        raise ContractError("resolution must be positive")
    a = np.asarray(p1, dtype=float)
    b = np.asarray(p2, dtype=float)
    length = float(np.hypot(*(b - a)))
    n = 1
    while length / n > resolution:
        n *= 2
    t = np.arange(n + 1, dtype=float) / n
    return a[None, :] + t[:, None] * (b - a)[None, :]


def edge_obstacle_risk(p1: Sequence[float], p2: Sequence[float], obstacle: UncertainObstacle,
                       resolution: float) -> float:
    """Maximum point risk along the segment ``p1 -> p2``."""
    return float(_risks_at(obstacle, segment_samples(p1, p2, resolution)).max())


@dataclass(frozen=True)
class Roadmap:
    points: np.ndarray
    edges: tuple[tuple[int, int], ...]
    bounds: tuple[float, float, float, float]


def radius_roadmap(rng: np.random.Generator, bounds: tuple[float, float, float, float],
                   samples: int, radius: float) -> Roadmap:
    """Uniform samples connected to every other sample within ``radius``."""
    x0, y0, x1, y1 = bounds
    pts = np.column_stack([rng.uniform(x0, x1, samples), rng.uniform(y0, y1, samples)])
    pts = np.round(pts, RISK_DECIMALS) + 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    iu, ju = np.nonzero(np.triu(dist <= radius, k=1))
    return Roadmap(points=pts, edges=tuple(zip(iu.tolist(), ju.tolist())), bounds=bounds)


def _components(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    comp = [-1] * n
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = s
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if comp[w] < 0:
                    comp[w] = s
                    queue.append(w)
    return comp


def sample_pairs(rng: np.random.Generator, points: np.ndarray, comp: Sequence[int], min_distance: float,
                 count: int, allowed: Sequence[bool] | None = None,
                 reach: np.ndarray | None = None) -> list[tuple[int, int]]:
    """Up to ``count`` distinct ordered pairs in one component, at least ``min_distance`` apart.

    ``allowed`` restricts both endpoints to the marked vertices. ``reach``
    (``reach[s, t]``: ``t`` reachable from ``s``) replaces the component
    test on directed graphs. All valid pairs are listed first and a random
    subset is drawn from them.
    """
    pts = np.asarray(points, dtype=float)
    comp_arr = np.asarray(comp)
    ok = np.ones(len(pts), dtype=bool) if allowed is None else np.asarray(allowed, dtype=bool)
    cand = np.flatnonzero(ok)
    sub = pts[cand]
    dist = np.hypot(sub[:, None, 0] - sub[None, :, 0], sub[:, None, 1] - sub[None, :, 1])
    if reach is None:
        same = comp_arr[cand][:, None] == comp_arr[cand][None, :]
    else:
        same = np.asarray(reach, dtype=bool)[np.ix_(cand, cand)]
    valid = same & (dist >= min_distance)
    np.fill_diagonal(valid, False)
    flat = np.flatnonzero(valid)
    if flat.size == 0:
        raise ContractError("no start/goal pair satisfies the distance threshold")
    chosen = rng.choice(flat.size, size=min(count, flat.size), replace=False)
    k = len(cand)
    return [(int(cand[i // k]), int(cand[i % k])) for i in flat[chosen]]


def random_obstacles(rng: np.random.Generator, bounds: tuple[float, float, float, float], count: int,
                     size_range: tuple[float, float], sigma: float, num_shadows: int,
                     shadow_step: float | None) -> list[UncertainObstacle]:
    x0, y0, x1, y1 = bounds
    width = x1 - x0
    out = []
    for _ in range(count):
        cx, cy = rng.uniform(x0, x1), rng.uniform(y0, y1)
        hx, hy = rng.uniform(size_range[0], size_range[1], size=2) * width
        out.append(UncertainObstacle(
            center=(quantize(cx), quantize(cy)),
            half_extents=(quantize(hx), quantize(hy)),
            sigma=sigma,
            num_shadows=num_shadows,
            shadow_step=shadow_step,
        ))
    return out


@dataclass
class OUSpec:
    bounds: tuple[float, float, float, float] = (0.0, 0.0, 100.0, 100.0)
    num_obstacles: int = 12
    num_shadows: int = 30
    shadow_step: float | None = None
    sigma: float = 2.0
    prm_samples: int = 800
    prm_radius: float = 7.0
    resolution: float | None = None  # defaults to shadow_step / 2
    rng_seed: int = 0
    num_pairs: int = 20
    min_pair_fraction: float = 0.6
    obstacle_size: tuple[float, float] = (0.04, 0.1)


def generate_ou_instance(spec: OUSpec) -> tuple[Instance, list[UncertainObstacle]]:
    """PRM roadmap with per-obstacle edge risks plus length (``m = obstacles + 1``)."""
    if spec.num_obstacles < 0 or spec.prm_samples < 2 or spec.prm_radius <= 0:
        raise ContractError("invalid OU generation parameters")
    rng = np.random.default_rng(spec.rng_seed)
    obstacles = random_obstacles(rng, spec.bounds, spec.num_obstacles, spec.obstacle_size, spec.sigma,
                                 spec.num_shadows, spec.shadow_step)
    roadmap = radius_roadmap(rng, spec.bounds, spec.prm_samples, spec.prm_radius)
    m = spec.num_obstacles + 1
    step = spec.shadow_step or 3.0 * spec.sigma / spec.num_shadows
    resolution = spec.resolution or step / 2.0

    pts = roadmap.points
    graph = MOGraph(spec.prm_samples, m)
    for u, v in roadmap.edges:
        risks = []
        for ob in obstacles:
            reach = max(ob.shadow_half_extents(ob.num_shadows - 1))
            lo = np.minimum(pts[u], pts[v])
            hi = np.maximum(pts[u], pts[v])
            c = np.asarray(ob.center)
            if np.any(lo > c + reach) or np.any(hi < c - reach):
                risks.append(0.0)
            else:
                risks.append(edge_obstacle_risk(pts[u], pts[v], ob, resolution))
        length = quantize(math.dist(pts[u], pts[v]))
        cost = tuple(risks) + (length,)
        graph.add_edge(u, v, cost)
        graph.add_edge(v, u, cost)

    x0, y0, x1, y1 = spec.bounds
    diag = math.hypot(x1 - x0, y1 - y0)
    comp = _components(spec.prm_samples, roadmap.edges)
    # Start and goal must be collision-free for the nominal obstacles; outer
    # shadows are allowed.
    free = np.ones(len(pts), dtype=bool)
    for ob in obstacles:
        free &= _shadow_indices(ob, pts) > 0
    pairs = sample_pairs(rng, pts, comp, spec.min_pair_fraction * diag, spec.num_pairs, allowed=free)
    params = {
        "bounds": list(spec.bounds),
        "num_obstacles": spec.num_obstacles,
        "num_shadows": spec.num_shadows,
        "shadow_step": step,
        "sigma": spec.sigma,
        "prm_samples": spec.prm_samples,
        "prm_radius": spec.prm_radius,
        "resolution": resolution,
        "obstacles": [[*ob.center, *ob.half_extents] for ob in obstacles],
    }
    inst = Instance(domain="ou", scheme="max-risk-length", graph=graph, m=m, pairs=pairs,
                    seed=spec.rng_seed, params=params, points=[tuple(p) for p in pts.tolist()])
    return inst, obstacles


class RoadFormatError(ValueError):
    """A road edge-list line could not be parsed or validated."""


ROAD_TYPES = {"unpaved": UNPAVED, "paved": PAVED}


def parse_road_edges(lines: Iterable[str]) -> list[tuple[int, int, float, int]]:
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise RoadFormatError(f"line {lineno}: expected 'u v length type', got {raw.strip()!r}")
        try:
            u, v, length = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise RoadFormatError(f"line {lineno}: malformed numbers in {raw.strip()!r}") from None
        if u < 0 or v < 0:
            raise RoadFormatError(f"line {lineno}: vertex ids must be non-negative")
        if not length >= 0 or math.isinf(length):
            raise RoadFormatError(f"line {lineno}: length must be a finite non-negative number")
        kind = ROAD_TYPES.get(parts[3].lower())
        if kind is None:
            raise RoadFormatError(f"line {lineno}: road type must be 'paved' or 'unpaved', got {parts[3]!r}")
        edges.append((u, v, length, kind))
    return edges


def road_graph(edges: Sequence[tuple[int, int, float, int]], num_vertices: int | None = None) -> MOGraph:
    n = num_vertices if num_vertices is not None else 1 + max((max(u, v) for u, v, _, _ in edges), default=0)
    graph = MOGraph(n, 2)
    for u, v, length, kind in edges:
        graph.add_edge(u, v, (length, float(kind)))
    return graph


def load_road_network(file: str | FsPath, order: str = "LCM") -> tuple[MOGraph, AggregationScheme]:
    with open(file, encoding="utf-8") as fh:
        edges = parse_road_edges(fh)
    return road_graph(edges), road_scheme(order)


def format_road_edges(graph: MOGraph) -> str:
    lines = ["# u v length type"]
    for u, v, (length, kind) in graph.edges():
        lines.append(f"{u} {v} {length:.6f} {'paved' if kind == PAVED else 'unpaved'}")
    return "\n".join(lines) + "\n"


@dataclass
class RoadSpec:
    rows: int = 45
    cols: int = 45
    spacing: float = 100.0
    jitter: float = 0.3
    paved_fraction: float = 0.5
    drop_fraction: float = 0.15
    rng_seed: int = 0
    num_pairs: int = 20
    min_pair_fraction: float = 0.6
    one_way: bool = False  # only right/down arcs: the network is acyclic


def _reachability(graph: MOGraph) -> np.ndarray:
    n = graph.num_vertices
    reach = np.zeros((n, n), dtype=bool)
    for s in range(n):
        todo = [s]
        reach[s, s] = True
        while todo:
            u = todo.pop()
            for v, _ in graph.successors(u):
                if not reach[s, v]:
                    reach[s, v] = True
                    todo.append(v)
    return reach


def generate_road_network(spec: RoadSpec) -> Instance:
    """Jittered grid road network with random paved/unpaved segments.

    Each undirected road is stored as two directed edges sharing a type.
    Roads are dropped at random, keeping the grid connected through a
    spanning tree of the kept edges. With ``one_way`` only the arc towards
    the higher vertex id is kept, so the network has no cycles.
    """
    if spec.rows < 1 or spec.cols < 1 or not 0 <= spec.paved_fraction <= 1:
        raise ContractError("invalid road generation parameters")
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.rows * spec.cols
    base = np.array([(c * spec.spacing, r * spec.spacing) for r in range(spec.rows) for c in range(spec.cols)], dtype=float)
    pts = base + rng.uniform(-spec.jitter, spec.jitter, size=base.shape) * spec.spacing
    pts = np.round(pts, 3) + 0.0

    candidates = []
    for r in range(spec.rows):
        for c in range(spec.cols):
            v = r * spec.cols + c
            if c + 1 < spec.cols:
                candidates.append((v, v + 1))
            if r + 1 < spec.rows:
                candidates.append((v, v + spec.cols))
    order = rng.permutation(len(candidates))
    # Random spanning tree first (union-find over a random order) so dropping keeps connectivity.
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    in_tree = [False] * len(candidates)
    for i in order:
        u, v = candidates[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            in_tree[i] = True
    keep = [in_tree[i] or rng.random() >= spec.drop_fraction for i in range(len(candidates))]
    kinds = rng.random(len(candidates)) < spec.paved_fraction

    graph = MOGraph(n, 2)
    kept_edges = []
    for i, (u, v) in enumerate(candidates):
        if not keep[i]:
            continue
        length = quantize(math.dist(pts[u], pts[v]), 3)
        kind = float(PAVED if kinds[i] else UNPAVED)
        graph.add_edge(u, v, (length, kind))
        if not spec.one_way:
            graph.add_edge(v, u, (length, kind))
        kept_edges.append((u, v))

    diag = math.dist(pts.min(axis=0), pts.max(axis=0))
    comp = _components(n, kept_edges)
    reach = _reachability(graph) if spec.one_way else None
    pairs = sample_pairs(rng, pts, comp, spec.min_pair_fraction * diag, spec.num_pairs, reach=reach)
    params = {
        "rows": spec.rows,
        "cols": spec.cols,
        "spacing": spec.spacing,
        "paved_fraction": spec.paved_fraction,
        "drop_fraction": spec.drop_fraction,
        "one_way": spec.one_way,
    }
    return Instance(domain="road", scheme="road", graph=graph, m=3, pairs=pairs, seed=spec.rng_seed,
                    params=params, points=[tuple(p) for p in pts.tolist()])


@dataclass
class InspectionSpec:
    num_vertices: int = 12
    num_pois: int = 3
    coverage_density: float = 0.2
    edge_probability: float = 0.3
    max_length: float = 10.0
    rng_seed: int = 0


@dataclass
class InspectionInstance:
    graph: MOGraph
    coverage: dict[tuple[int, int], int]  # edge -> bitmask over POIs
    num_pois: int

    def __post_init__(self) -> None:
        limit = 1 << self.num_pois
        if any(not 0 <= mask < limit for mask in self.coverage.values()):
            raise ContractError("coverage bitmask wider than the number of POIs")


def generate_inspection_instance(spec: InspectionSpec) -> tuple[Instance, InspectionInstance]:
    """Random DAG over ``0..n-1`` with a guaranteed chain ``i -> i+1``.

    Edges only go from lower to higher ids so every path is simple; the
    brute-force oracle then covers every walk.
    """
    if spec.num_vertices < 2 or spec.num_pois < 0:
        raise ContractError("invalid inspection generation parameters")
    rng = np.random.default_rng(spec.rng_seed)
    n, q = spec.num_vertices, spec.num_pois
    graph = MOGraph(n, q + 1)
    coverage: dict[tuple[int, int], int] = {}
    for u in range(n):
        for v in range(u + 1, n):
            if v != u + 1 and rng.random() >= spec.edge_probability:
                continue
            bits = rng.random(q) < spec.coverage_density
            length = quantize(rng.uniform(1.0, spec.max_length), 3)
            graph.add_edge(u, v, tuple(float(b) for b in bits) + (length,))
            coverage[(u, v)] = sum(1 << i for i, b in enumerate(bits) if b)
    params = {
        "num_pois": q,
        "coverage_density": spec.coverage_density,
        "edge_probability": spec.edge_probability,
    }
    inst = Instance(domain="inspection", scheme="coverage-length", graph=graph, m=q + 1,
                    pairs=[(0, n - 1)], seed=spec.rng_seed, params=params)
    return inst, InspectionInstance(graph, coverage, q)


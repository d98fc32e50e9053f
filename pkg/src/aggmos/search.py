"""Best-first multi-objective search with objective aggregation.

:func:`mos_astar` runs one of two modes over the same hidden-cost search:

* ``baseline`` orders Open by the hidden ``f`` vector and tests solution
  dominance in hidden space. Solutions are aggregated and filtered only
  after the search terminates.
* ``objagg`` orders Open by ``agg(f)`` and tests solution dominance in the
  aggregated space, which prunes far more nodes when ``k < m``.

Path dominance is the same in both modes: a node is discarded when an
already expanded node at the same vertex has a hidden cost that dominates
its own. The approximation factor only loosens the solution test.
"""

from __future__ import annotations

import heapq
import math
import operator
import time
from collections import deque
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum

from .aggregation import AggregationScheme
from .core import (
    ApproxFactor,
    ContractError,
    CostVector,
    MOGraph,
    ParetoFrontier,
    Path,
    approx_factor,
    pareto_filter,
)

INF = math.inf


class SearchKind(str, Enum):
    BASELINE = "baseline"
    OBJAGG = "objagg"


@dataclass(frozen=True)
class SearchMode:
    """Search mode plus approximation factor.

    ``eps`` may be a scalar (applied to every compared dimension) or a
    per-dimension sequence: of length ``m`` for baseline, ``k`` for objagg.
    """

    kind: SearchKind = SearchKind.OBJAGG
    eps: float | tuple[float, ...] = 0.0

    @classmethod
    def baseline(cls, eps: float | Sequence[float] = 0.0) -> SearchMode:
        return cls(SearchKind.BASELINE, eps if isinstance(eps, (int, float)) else tuple(eps))

    @classmethod
    def objagg(cls, eps: float | Sequence[float] = 0.0) -> SearchMode:
        return cls(SearchKind.OBJAGG, eps if isinstance(eps, (int, float)) else tuple(eps))

    @classmethod
    def parse(cls, kind: str, eps: float | Sequence[float] = 0.0) -> SearchMode:
        try:
            k = SearchKind(kind.lower())
        except ValueError:
            raise ContractError(f"unknown search mode {kind!r}") from None
        return cls(k, eps if isinstance(eps, (int, float)) else tuple(eps))

    def compared_dim(self, scheme: AggregationScheme) -> int:
        return scheme.m if self.kind is SearchKind.BASELINE else scheme.k

    def eps_vector(self, scheme: AggregationScheme) -> ApproxFactor:
        return approx_factor(self.eps, self.compared_dim(scheme))


class Heuristic:
    """Per-vertex hidden-space lower bounds (``values[v]`` has dim ``m``)."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[CostVector]) -> None:
        self.values = list(values)

    def __call__(self, v: int) -> CostVector:
        return self.values[v]

    def __len__(self) -> int:
        return len(self.values)


def _dijkstra(pred: list[list[tuple[int, CostVector]]], source: int, edge_index: int,
              combine: Callable[[float, float], float] = operator.add) -> list[float]:
    """Single-source distances on reversed arcs; ``combine=max`` gives bottleneck values."""
    dist = [INF] * len(pred)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for w, c in pred[u]:
            nd = combine(d, c[edge_index])
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _reverse_reach(pred: list[list[tuple[int, CostVector]]], sources: set[int]) -> set[int]:
    seen = set(sources)
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        for w, _ in pred[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _gain_bounds(graph: MOGraph, goal: int, scheme: AggregationScheme, pred) -> dict[int, set[int]]:
    """Vertices from which each gain component can still be collected en route to ``goal``."""
    reach_goal = _reverse_reach(pred, {goal})
    out: dict[int, set[int]] = {}
    for i in scheme.gain_components:
        tails = {u for u, v, c in graph.edges() if c[i] > 0.0 and v in reach_goal}
        out[i] = _reverse_reach(pred, tails)
    return out


def graph_distance_heuristic(graph: MOGraph, goal: int, scheme: AggregationScheme) -> Heuristic:
    """Shortest-path distance to ``goal`` on the additive (length) components.

    Max-type components (per-obstacle risk) get the bottleneck value: the
    least possible maximum edge cost on any way to the goal. Coverage bits
    get 1 where the POI can still be seen on some way to the goal, since
    seeing more only helps.
    """
    scheme.check_graph(graph)
    graph.check_vertex(goal)
    pred = graph.reversed_adjacency()
    values = [[0.0] * scheme.m for _ in range(graph.num_vertices)]
    for hidden_i, edge_i in scheme.distance_components:
        dist = _dijkstra(pred, goal, edge_i)
        for v, dv in enumerate(dist):
            values[v][hidden_i] = dv
    for hidden_i, edge_i in scheme.bottleneck_components:
        dist = _dijkstra(pred, goal, edge_i, max)
        for v, dv in enumerate(dist):
            values[v][hidden_i] = dv
    if scheme.gain_components:
        for i, verts in _gain_bounds(graph, goal, scheme, pred).items():
            for v in verts:
                values[v][i] = 1.0
    values[goal] = [0.0] * scheme.m
    return Heuristic([tuple(v) for v in values])


def zero_heuristic(graph: MOGraph, goal: int, scheme: AggregationScheme) -> Heuristic:
    """The uninformed bound: zero, except coverage bits which are optimistically 1."""
    vals = [0.0] * scheme.m
    for i in scheme.gain_components:
        vals[i] = 1.0
    blind = tuple(vals)
    values = [blind] * graph.num_vertices
    values[goal] = (0.0,) * scheme.m
    return Heuristic(values)


class SearchNode:
    """A partial path: vertex, hidden ``g``/``f``, aggregated ``f`` and parent."""

    __slots__ = ("vertex", "g", "f", "f_agg", "parent", "seq")

    def __init__(self, vertex: int, g: CostVector, f: CostVector, f_agg: CostVector,
                 parent: SearchNode | None, seq: int) -> None:
        self.vertex = vertex
        self.g = g
        self.f = f
        self.f_agg = f_agg
        self.parent = parent
        self.seq = seq

    def path(self) -> Path:
        out = []
        node: SearchNode | None = self
        while node is not None:
            out.append(node.vertex)
            node = node.parent
        return tuple(reversed(out))

    def __repr__(self) -> str:
        return f"SearchNode(v={self.vertex}, g={self.g}, f_agg={self.f_agg}, seq={self.seq})"


def _dominated_by_any(vectors: list[CostVector], q: CostVector) -> bool:
    le = operator.le
    for s in vectors:
        if all(map(le, s, q)):
            return True
    return False


def _eps_dominated_by_any(vectors: list[CostVector], q: CostVector, scale: CostVector) -> bool:
    le = operator.le
    bound = tuple(map(operator.mul, q, scale))
    for s in vectors:
        if all(map(le, s, bound)):
            return True
    return False


class OpenList:
    """Lexicographic priority queue over ``(sort key, seq)``; FIFO among equal keys."""

    __slots__ = ("_heap", "_key")

    def __init__(self, key: Callable[[SearchNode], CostVector]) -> None:
        self._heap: list[tuple[CostVector, int, SearchNode]] = []
        self._key = key

    def push(self, node: SearchNode) -> None:
        heapq.heappush(self._heap, (self._key(node), node.seq, node))

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)


def get_best_node(open_list: OpenList) -> SearchNode:
    if not open_list._heap:
        raise ContractError("get_best_node on an empty Open list")
    return heapq.heappop(open_list._heap)[2]


class ClosedStore:
    """Hidden-space keys of expanded nodes, grouped by vertex.

    With ``skip_first`` the first key component is not compared. That is
    exact when nodes are expanded in lexicographic order of a monotone ``f``
    under a consistent heuristic, because the first component of every
    stored key is then already no larger than the query's.
    """

    __slots__ = ("_by_vertex", "_key", "_skip")

    def __init__(self, scheme: AggregationScheme, skip_first: bool = False) -> None:
        self._by_vertex: dict[int, list[CostVector]] = {}
        self._key = scheme.key
        self._skip = 1 if skip_first else 0

    def _k(self, g: CostVector) -> CostVector:
        k = g if self._key is None else self._key(g)
        return k[self._skip:] if self._skip else k

    def insert(self, node: SearchNode) -> None:
        self._by_vertex.setdefault(node.vertex, []).append(self._k(node.g))

    def dominates(self, node: SearchNode) -> bool:
        stored = self._by_vertex.get(node.vertex)
        if not stored:
            return False
        return _dominated_by_any(stored, self._k(node.g))

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_vertex.values())


class SolutionStore:
    """Solutions found so far, compared in the space the mode prescribes."""

    __slots__ = ("nodes", "_vectors", "_scale", "_project", "_skip")

    def __init__(self, project: Callable[[SearchNode], CostVector], eps: ApproxFactor, skip_first: bool = False) -> None:
        self.nodes: list[SearchNode] = []
        self._vectors: list[CostVector] = []
        self._project = project
        self._skip = 1 if skip_first else 0
        scale = tuple(1.0 + e for e in eps)[self._skip:]
        self._scale = None if all(e == 0.0 for e in eps) else scale

    def insert(self, node: SearchNode) -> None:
        self.nodes.append(node)
        self._vectors.append(self._project(node)[self._skip:])

    def dominates(self, node: SearchNode) -> bool:
        if not self._vectors:
            return False
        q = self._project(node)[self._skip:]
        if self._scale is None:
            return _dominated_by_any(self._vectors, q)
        return _eps_dominated_by_any(self._vectors, q, self._scale)

    def __len__(self) -> int:
        return len(self.nodes)


def is_dominated_sol(node: SearchNode, sols: SolutionStore) -> bool:
    return sols.dominates(node)


def is_dominated_path(node: SearchNode, closed: ClosedStore) -> bool:
    return closed.dominates(node)


def compute_cost(g_parent: CostVector, c: CostVector, scheme: AggregationScheme) -> CostVector:
    return scheme.ext(g_parent, c)


@dataclass
class SearchStats:
    expansions: int = 0
    generations: int = 0
    sols_found: int = 0
    runtime: float = 0.0
    peak_open: int = 0
    pruned_sol: int = 0
    pruned_path: int = 0

    def as_dict(self) -> dict[str, float]:
        return {
            "expansions": self.expansions,
            "generations": self.generations,
            "sols_found": self.sols_found,
            "runtime_s": self.runtime,
            "peak_open": self.peak_open,
            "pruned_sol": self.pruned_sol,
            "pruned_path": self.pruned_path,
        }


@dataclass
class SearchResult:
    """Solution-space frontier of ``(cost, path)`` plus search statistics.

    ``hidden_frontier`` holds the undominated hidden costs of the solutions
    Sols collected (meaningful as the hidden-objective frontier in baseline
    mode). When ``timed_out`` is set the frontiers are partial.
    """

    frontier: ParetoFrontier
    stats: SearchStats
    hidden_frontier: ParetoFrontier = field(default_factory=ParetoFrontier)
    timed_out: bool = False


def mos_astar(
    graph: MOGraph,
    start: int,
    goal: int,
    scheme: AggregationScheme,
    heuristic: Heuristic | None = None,
    mode: SearchMode | None = None,
    *,
    timeout: float | None = None,
    max_expansions: int | None = None,
    reduce_dims: bool | None = None,
) -> SearchResult:
    """Compute the (approximate) Pareto frontier of ``start -> goal`` paths.

    ``reduce_dims`` drops the first key component from dominance checks
    (NAMOA-dr style). By default it is used in baseline mode whenever every
    hidden component is monotone under extension; it is never used in
    objagg mode. It assumes a consistent heuristic.
    """
    scheme.check_graph(graph)
    graph.check_vertex(start)
    graph.check_vertex(goal)
    mode = mode or SearchMode()
    if heuristic is None:
        heuristic = graph_distance_heuristic(graph, goal, scheme)
    if len(heuristic) != graph.num_vertices:
        raise ContractError("heuristic must cover every vertex")
    if len(heuristic(start)) != scheme.m:
        raise ContractError(f"heuristic has dim {len(heuristic(start))}, scheme has m={scheme.m}")
    eps = mode.eps_vector(scheme)
    baseline = mode.kind is SearchKind.BASELINE

    can_reduce = baseline and scheme.fully_monotone and scheme.key is None
    if reduce_dims is None:
        reduce_dims = can_reduce
    elif reduce_dims and not can_reduce:
        raise ContractError("dimensionality reduction needs baseline mode and a monotone scheme")

    ext, agg, estimate, hkey = scheme.ext, scheme.agg, scheme.estimate, scheme.key
    hvals = heuristic.values
    succ = graph.successors

    if baseline:
        if hkey is None:
            open_list = OpenList(lambda n: n.f)
            sols = SolutionStore(lambda n: n.f, eps, skip_first=reduce_dims)
        else:
            open_list = OpenList(lambda n: hkey(n.f))
            sols = SolutionStore(lambda n: hkey(n.f), eps)
    else:
        open_list = OpenList(lambda n: n.f_agg)
        sols = SolutionStore(lambda n: n.f_agg, eps)
    closed = ClosedStore(scheme, skip_first=reduce_dims)

    stats = SearchStats()
    t0 = time.perf_counter()
    deadline = None if timeout is None else t0 + timeout
    timed_out = False

    g0 = scheme.zero()
    f0 = estimate(g0, hvals[start])
    seq = 0
    open_list.push(SearchNode(start, g0, f0, agg(f0), None, seq))
    peak = 1

    heap = open_list._heap
    while heap:
        if deadline is not None and time.perf_counter() > deadline:
            timed_out = True
            break
        if max_expansions is not None and stats.expansions >= max_expansions:
            timed_out = True
            break
        n = get_best_node(open_list)
        if INF in n.f:
            continue
        if sols.dominates(n):
            stats.pruned_sol += 1
            continue
        if closed.dominates(n):
            stats.pruned_path += 1
            continue
        if n.vertex == goal:
            sols.insert(n)
            stats.sols_found += 1
            continue
        stats.expansions += 1
        g = n.g
        for v, c in succ(n.vertex):
            seq += 1
            g2 = ext(g, c)
            f2 = estimate(g2, hvals[v])
            open_list.push(SearchNode(v, g2, f2, agg(f2), n, seq))
        stats.generations += len(succ(n.vertex))
        closed.insert(n)
        if len(heap) > peak:
            peak = len(heap)

    stats.runtime = time.perf_counter() - t0
    stats.peak_open = peak

    found = [(s.g, s.path()) for s in sols.nodes]
    frontier = pareto_filter((agg(g), p) for g, p in found)
    keyed = pareto_filter((scheme.hidden_key(g), (g, p)) for g, p in found)
    hidden = ParetoFrontier((g, p) for _, (g, p) in keyed)
    return SearchResult(frontier=frontier, stats=stats, hidden_frontier=hidden, timed_out=timed_out)

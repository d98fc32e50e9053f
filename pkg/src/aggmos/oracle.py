"""Brute-force Pareto frontiers for small instances.

Everything here enumerates simple paths and evaluates them with the
aggregation module; it shares no code with the search engine.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .aggregation import AggregationScheme, solution_cost
from .core import ContractError, MOGraph, ParetoFrontier, Path, eps_dominates, pareto_filter

DEFAULT_MAX_PATHS = 10**6


class EnumerationIncomplete(RuntimeError):
    """The enumeration budget ran out before all paths were listed."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_paths: int = DEFAULT_MAX_PATHS
    max_path_length: int | None = None  # vertex count; None means |V|

    def __post_init__(self) -> None:
        if self.max_paths <= 0 or (self.max_path_length is not None and self.max_path_length <= 0):
            raise ContractError("enumeration budget must be positive")


def enumerate_simple_paths(graph: MOGraph, start: int, goal: int,
                           budget: EnumerationBudget | None = None) -> list[Path]:
    """All simple ``start -> goal`` paths in DFS order with ascending neighbour ids."""
    graph.check_vertex(start)
    graph.check_vertex(goal)
    budget = budget or EnumerationBudget()
    max_len = budget.max_path_length or graph.num_vertices
    nbrs = [sorted(v for v, _ in graph.successors(u)) for u in range(graph.num_vertices)]

    paths: list[Path] = []
    stack = [start]
    on_path = {start}
    iters = [iter(nbrs[start])]
    if start == goal:
        return [(start,)]
    while iters:
        nxt = next(iters[-1], None)
        if nxt is None:
            iters.pop()
            on_path.discard(stack.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == goal:
            if len(stack) + 1 > max_len:
                raise EnumerationIncomplete(f"a path exceeds max_path_length={max_len}")
            paths.append(tuple(stack) + (goal,))
            if len(paths) > budget.max_paths:
                raise EnumerationIncomplete(f"more than max_paths={budget.max_paths} paths")
            continue
        # Only extend prefixes that can still finish, so every branch yields a
        # path and max_paths bounds the total work.
        if not _can_reach(nbrs, nxt, goal, on_path | {nxt}):
            continue
        if len(stack) + 1 >= max_len:
            # Extending further could only reach the goal beyond the length limit.
            raise EnumerationIncomplete(f"paths longer than max_path_length={max_len} exist")
        stack.append(nxt)
        on_path.add(nxt)
        iters.append(iter(nbrs[nxt]))
    return paths


def _can_reach(nbrs: list[list[int]], src: int, goal: int, blocked: set[int]) -> bool:
    seen = set(blocked)
    todo = [src]
    while todo:
        u = todo.pop()
        for w in nbrs[u]:
            if w == goal:
                return True
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return False


def brute_force_pof(graph: MOGraph, start: int, goal: int, scheme: AggregationScheme,
                    budget: EnumerationBudget | None = None) -> ParetoFrontier:
    """Pareto frontier of solution costs over every simple path."""
    scheme.check_graph(graph)
    paths = enumerate_simple_paths(graph, start, goal, budget)
    return pareto_filter((solution_cost(p, graph, scheme), p) for p in paths)


def verify_eps_cover(exact: ParetoFrontier | Sequence, approx: ParetoFrontier | Sequence,
                     eps: Sequence[float]) -> bool:
    """True iff every exact cost is eps-dominated by some approximate cost."""
    exact_costs = [c for c, _ in exact] if isinstance(exact, ParetoFrontier) else [tuple(c) for c in exact]
    approx_costs = [c for c, _ in approx] if isinstance(approx, ParetoFrontier) else [tuple(c) for c in approx]
    return all(any(eps_dominates(y, x, eps) for y in approx_costs) for x in exact_costs)

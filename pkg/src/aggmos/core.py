"""Cost vectors, dominance relations and the multi-objective graph model.

Cost vectors are plain tuples of floats. They are immutable, hashable and
compare componentwise for equality, which is all the search needs. The
helpers here validate dimensions and raise :class:`ContractError` on misuse.
"""

from __future__ import annotations

import math
import operator
from collections.abc import Iterable, Iterator, Sequence
from typing import Any, Generic, TypeVar

CostVector = tuple[float, ...]
ApproxFactor = tuple[float, ...]
Path = tuple[int, ...]

T = TypeVar("T")


class ContractError(ValueError):
    """Raised when an operation is called outside its contract."""


def cost_vector(values: Iterable[float]) -> CostVector:
    """Build a validated cost vector (non-negative, non-empty)."""
    vec = tuple(float(v) for v in values)
    if not vec:
        raise ContractError("cost vector must have at least one component")
    for v in vec:
        if not v >= 0.0:  # also rejects NaN
            raise ContractError(f"cost components must be non-negative, got {vec}")
    return vec


def approx_factor(eps: float | Sequence[float], dim: int) -> ApproxFactor:
    """Expand a scalar (or check a per-dimension list) into an approximation factor."""
    if isinstance(eps, (int, float)):
        vec = (float(eps),) * dim
    else:
        vec = tuple(float(e) for e in eps)
        if len(vec) != dim:
            raise ContractError(f"approximation factor has {len(vec)} components, expected {dim}")
    for e in vec:
        if not e >= 0.0:
            raise ContractError(f"approximation factor components must be >= 0, got {vec}")
    return vec


def zero(dim: int) -> CostVector:
    return (0.0,) * dim


def _check_dims(p: Sequence[float], q: Sequence[float]) -> None:
    if len(p) != len(q):
        raise ContractError(f"dimension mismatch: {len(p)} vs {len(q)}")


def dominates(p: Sequence[float], q: Sequence[float]) -> bool:
    """``p ⪯ q``: every component of ``p`` is at most the one of ``q`` (reflexive)."""
    _check_dims(p, q)
    for a, b in zip(p, q):
        if a > b:
            return False
    return True


def strictly_dominates(p: Sequence[float], q: Sequence[float]) -> bool:
    return dominates(p, q) and tuple(p) != tuple(q)


def lex_less(p: Sequence[float], q: Sequence[float]) -> bool:
    """Lexicographic order that also holds for equal vectors."""
    _check_dims(p, q)
    for a, b in zip(p, q):
        if a < b:
            return True
        if a > b:
            return False
    return True


def eps_dominates(p: Sequence[float], q: Sequence[float], eps: Sequence[float]) -> bool:
    """``p ⪯_eps q``: ``p_i <= (1 + eps_i) * q_i`` for every component."""
    _check_dims(p, q)
    _check_dims(p, eps)
    for a, b, e in zip(p, q, eps):
        if a > (1.0 + e) * b:
            return False
    return True


def vec_add(p: Sequence[float], q: Sequence[float]) -> CostVector:
    if len(p) != len(q):
        raise ContractError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return tuple(map(operator.add, p, q))


def is_finite(p: Sequence[float]) -> bool:
    return all(math.isfinite(v) for v in p)


class ParetoFrontier(Generic[T]):
    """Mutually non-dominated ``(cost, payload)`` entries, sorted lexicographically."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[CostVector, T]] = ()) -> None:
        self._entries = tuple(entries)

    @property
    def entries(self) -> tuple[tuple[CostVector, T], ...]:
        return self._entries

    @property
    def costs(self) -> list[CostVector]:
        return [c for c, _ in self._entries]

    def cost_set(self) -> set[CostVector]:
        return {c for c, _ in self._entries}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[CostVector, T]]:
        return iter(self._entries)

    def __repr__(self) -> str:
        return f"ParetoFrontier({list(self.costs)!r})"


def pareto_filter(items: Iterable[tuple[Sequence[float], Any]]) -> ParetoFrontier:
    """Keep the items whose vector no other item strictly dominates.

    Among items with identical vectors the first inserted one is kept.
    """
    indexed = [(tuple(float(x) for x in vec), i, payload) for i, (vec, payload) in enumerate(items)]
    if not indexed:
        return ParetoFrontier()
    dim = len(indexed[0][0])
    for vec, _, _ in indexed:
        if len(vec) != dim:
            raise ContractError("pareto_filter needs vectors of one dimension")
    # After a lexicographic sort only earlier vectors can dominate later ones;
    # the stable index keeps the first duplicate.
    indexed.sort(key=lambda t: (t[0], t[1]))
    kept: list[tuple[CostVector, Any]] = []
    for vec, _, payload in indexed:
        if any(dominates(k, vec) for k, _ in kept):
            continue
        kept.append((vec, payload))
    return ParetoFrontier(kept)


class MOGraph:
    """Directed graph whose edges carry ``d``-dimensional cost vectors.

    Parallel edges are rejected because paths are vertex sequences and the
    cost of a path must be unambiguous.
    """

    def __init__(self, num_vertices: int, d: int, edges: Iterable[tuple[int, int, Sequence[float]]] = ()) -> None:
        if num_vertices <= 0:
            raise ContractError("graph needs at least one vertex")
        if d <= 0:
            raise ContractError("edge cost dimension must be positive")
        self.num_vertices = num_vertices
        self.d = d
        self._succ: list[list[tuple[int, CostVector]]] = [[] for _ in range(num_vertices)]
        self._cost: dict[tuple[int, int], CostVector] = {}
        for u, v, c in edges:
            self.add_edge(u, v, c)

    def add_edge(self, u: int, v: int, cost: Sequence[float]) -> None:
        if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
            raise ContractError(f"edge ({u}, {v}) references a vertex outside [0, {self.num_vertices})")
        c = cost_vector(cost)
        if len(c) != self.d:
            raise ContractError(f"edge ({u}, {v}) has cost dim {len(c)}, graph has d={self.d}")
        if (u, v) in self._cost:
            raise ContractError(f"duplicate edge ({u}, {v})")
        self._cost[(u, v)] = c
        self._succ[u].append((v, c))

    def successors(self, u: int) -> list[tuple[int, CostVector]]:
        return self._succ[u]

    def cost(self, u: int, v: int) -> CostVector:
        try:
            return self._cost[(u, v)]
        except KeyError:
            raise ContractError(f"({u}, {v}) is not an edge") from None

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._cost

    def edges(self) -> Iterator[tuple[int, int, CostVector]]:
        for u, succ in enumerate(self._succ):
            for v, c in succ:
                yield u, v, c

    @property
    def num_edges(self) -> int:
        return len(self._cost)

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.num_vertices):
            raise ContractError(f"vertex {v!r} is not in [0, {self.num_vertices})")

    def check_path(self, path: Sequence[int]) -> Path:
        if len(path) == 0:
            raise ContractError("a path needs at least one vertex")
        for v in path:
            self.check_vertex(v)
        for u, v in zip(path, path[1:]):
            if (u, v) not in self._cost:
                raise ContractError(f"path uses missing edge ({u}, {v})")
        return tuple(path)

    def reversed_adjacency(self) -> list[list[tuple[int, CostVector]]]:
        pred: list[list[tuple[int, CostVector]]] = [[] for _ in range(self.num_vertices)]
        for u, v, c in self.edges():
            pred[v].append((u, c))
        return pred

    def __repr__(self) -> str:
        return f"MOGraph(|V|={self.num_vertices}, |E|={self.num_edges}, d={self.d})"

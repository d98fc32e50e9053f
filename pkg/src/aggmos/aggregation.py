"""Path-cost extension and objective aggregation schemes.

A scheme bundles an extension function (hidden cost + edge cost -> hidden
cost) with an aggregation function (hidden cost -> solution cost). Four
schemes are built in and can be looked up by name:

``trivial``
    additive costs, identity aggregation (``d == m == k``).
``max-risk-length``
    edge cost ``(r_1, ..., r_{m-1}, length)``; per-obstacle risks combine
    by ``max``, length is summed, and the solution cost is
    ``(1 - prod(1 - r_i), length)``.
``coverage-length``
    same extension with binary coverage bits in place of risks; the
    solution cost is ``(#unseen POIs, length)``.
``road``
    edge cost ``(length, type)`` with type 1 = paved, 0 = unpaved; hidden
    cost ``(total, consecutive unpaved, max consecutive unpaved)``;
    solution cost ``(total, max consecutive unpaved)``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .core import ContractError, CostVector, MOGraph, vec_add, zero

ExtFn = Callable[[Sequence[float], Sequence[float]], CostVector]
AggFn = Callable[[Sequence[float]], CostVector]

PAVED = 1
UNPAVED = 0


def ext_trivial(g: Sequence[float], c: Sequence[float]) -> CostVector:
    return vec_add(g, c)


def agg_identity(g: Sequence[float]) -> CostVector:
    return tuple(g)


def ext_max_plus(g: Sequence[float], c: Sequence[float]) -> CostVector:
    """Componentwise max on all but the last component, which is summed."""
    if len(g) != len(c):
        raise ContractError(f"dimension mismatch: {len(g)} vs {len(c)}")
    return (*map(max, g[:-1], c[:-1]), g[-1] + c[-1])


def agg_risk_product(g: Sequence[float]) -> CostVector:
    """``(1 - prod(1 - r_i), length)`` for hidden ``(r_1, ..., r_{m-1}, length)``."""
    if len(g) < 2:
        raise ContractError("risk aggregation needs m >= 2")
    survive = 1.0
    for r in g[:-1]:
        if not 0.0 <= r <= 1.0:
            raise ContractError(f"risk component {r} outside [0, 1]")
        survive *= 1.0 - r
    return (1.0 - survive, g[-1])


def agg_count_uncovered(g: Sequence[float]) -> CostVector:
    """``(#POIs not seen, length)`` for hidden ``(o_1, ..., o_q, length)``."""
    if len(g) < 2:
        raise ContractError("coverage aggregation needs m >= 2")
    seen = 0.0
    for o in g[:-1]:
        if o != 0.0 and o != 1.0:
            raise ContractError(f"coverage component {o} is not binary")
        seen += o
    return (float(len(g) - 1) - seen, g[-1])


def ext_road(g: Sequence[float], c: Sequence[float]) -> CostVector:
    """Extend ``(total, consecutive unpaved, max consecutive unpaved)`` by ``(length, type)``."""
    if len(g) != 3 or len(c) != 2:
        raise ContractError("road extension needs g of dim 3 and c of dim 2")
    total, con, longest = g
    length, kind = c
    if kind == UNPAVED:
        con = con + length
        return (total + length, con, con if con > longest else longest)
    if kind == PAVED:
        return (total + length, 0.0, longest)
    raise ContractError(f"road type must be 0 (unpaved) or 1 (paved), got {kind}")


def agg_road(g: Sequence[float]) -> CostVector:
    if len(g) != 3:
        raise ContractError("road aggregation needs dim 3")
    return (g[0], g[2])


@dataclass(frozen=True)
class AggregationScheme:
    """An extension/aggregation pair together with its dimensions.

    ``key`` maps a hidden vector into the space where smaller is better in
    every component. Hidden-space dominance (path pruning and the straw-man
    solution test) compares keys. It is the identity except for coverage,
    where a seen-bit ``1`` is better than ``0``.

    ``estimate(g, h)`` combines a hidden cost with a heuristic value into an
    optimistic bound on the cost of any completion. It is ``g + h`` except
    for risk and coverage components, which combine by ``max``.

    ``distance_components`` lists ``(hidden index, edge index)`` pairs whose
    hidden component is the plain sum of that edge component, so that
    shortest-path distances are admissible for them.
    ``bottleneck_components`` does the same for components that take the
    maximum of an edge component; their bound combines with ``g`` by ``max``.
    """

    name: str
    d: int
    m: int
    k: int
    ext: ExtFn
    agg: AggFn
    ext_monotone_mask: tuple[bool, ...]
    agg_monotone: bool = True
    distance_components: tuple[tuple[int, int], ...] = ()
    bottleneck_components: tuple[tuple[int, int], ...] = ()
    gain_components: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()
    key: Callable[[Sequence[float]], CostVector] | None = None
    estimate: Callable[[Sequence[float], Sequence[float]], CostVector] = field(default=vec_add)

    def __post_init__(self) -> None:
        if len(self.ext_monotone_mask) != self.m:
            raise ContractError("ext_monotone_mask must have one entry per hidden component")

    def zero(self) -> CostVector:
        return zero(self.m)

    def hidden_key(self, g: Sequence[float]) -> CostVector:
        return tuple(g) if self.key is None else self.key(g)

    def hidden_dominates(self, p: Sequence[float], q: Sequence[float]) -> bool:
        a, b = self.hidden_key(p), self.hidden_key(q)
        return all(x <= y for x, y in zip(a, b))

    @property
    def fully_monotone(self) -> bool:
        return all(self.ext_monotone_mask)

    def check_graph(self, graph: MOGraph) -> None:
        if graph.d != self.d:
            raise ContractError(f"scheme {self.name!r} expects d={self.d}, graph has d={graph.d}")


def trivial_scheme(d: int) -> AggregationScheme:
    return AggregationScheme(
        name="trivial",
        d=d,
        m=d,
        k=d,
        ext=ext_trivial,
        agg=agg_identity,
        ext_monotone_mask=(True,) * d,
        distance_components=tuple((i, i) for i in range(d)),
        labels=tuple(f"c{i + 1}" for i in range(d)),
    )


def max_risk_length_scheme(m: int) -> AggregationScheme:
    if m < 1:
        raise ContractError("max-risk-length needs m >= 1")
    if m == 1:
        # No obstacles: plain shortest path; risk of the empty product is 0.
        return AggregationScheme(
            name="max-risk-length",
            d=1,
            m=1,
            k=1,
            ext=ext_trivial,
            agg=agg_identity,
            ext_monotone_mask=(True,),
            distance_components=((0, 0),),
            labels=("length",),
        )
    return AggregationScheme(
        name="max-risk-length",
        d=m,
        m=m,
        k=2,
        ext=ext_max_plus,
        agg=agg_risk_product,
        ext_monotone_mask=(True,) * m,
        distance_components=((m - 1, m - 1),),
        bottleneck_components=tuple((i, i) for i in range(m - 1)),
        labels=tuple(f"risk{i + 1}" for i in range(m - 1)) + ("length",),
        estimate=ext_max_plus,
    )


def _coverage_key(g: Sequence[float]) -> CostVector:
    last = len(g) - 1
    return tuple(1.0 - o for o in g[:last]) + (g[last],)


def coverage_length_scheme(m: int) -> AggregationScheme:
    if m < 1:
        raise ContractError("coverage-length needs m >= 1")
    if m == 1:
        return AggregationScheme(
            name="coverage-length",
            d=1,
            m=1,
            k=1,
            ext=ext_trivial,
            agg=agg_identity,
            ext_monotone_mask=(True,),
            distance_components=((0, 0),),
            labels=("length",),
        )
    return AggregationScheme(
        name="coverage-length",
        d=m,
        m=m,
        k=2,
        ext=ext_max_plus,
        agg=agg_count_uncovered,
        ext_monotone_mask=(True,) * m,
        distance_components=((m - 1, m - 1),),
        gain_components=tuple(range(m - 1)),
        labels=tuple(f"poi{i + 1}" for i in range(m - 1)) + ("length",),
        key=_coverage_key,
        estimate=ext_max_plus,
    )


ROAD_ORDERS = ("LCM", "LMC", "CLM", "CML", "MLC", "MCL")


def road_scheme(order: str = "LCM") -> AggregationScheme:
    """Road scheme with hidden components laid out in ``order``.

    ``L`` is total length, ``C`` the consecutive unpaved length and ``M``
    the longest unpaved stretch. Only the hidden layout changes; the
    solution cost is always ``(total, longest unpaved)``.
    """
    order = order.upper()
    if sorted(order) != ["C", "L", "M"]:
        raise ContractError(f"road order must be a permutation of LCM, got {order!r}")
    canonical = "LCM"
    to_canon = tuple(order.index(ch) for ch in canonical)  # canonical slot -> hidden index
    from_canon = tuple(canonical.index(ch) for ch in order)  # hidden index -> canonical slot
    idx_l, idx_m = order.index("L"), order.index("M")

    if order == canonical:
        ext, agg = ext_road, agg_road
    else:

        def ext(g: Sequence[float], c: Sequence[float]) -> CostVector:
            if len(g) != 3:
                raise ContractError("road extension needs g of dim 3")
            r = ext_road((g[to_canon[0]], g[to_canon[1]], g[to_canon[2]]), c)
            return (r[from_canon[0]], r[from_canon[1]], r[from_canon[2]])

        def agg(g: Sequence[float]) -> CostVector:
            if len(g) != 3:
                raise ContractError("road aggregation needs dim 3")
            return (g[idx_l], g[idx_m])

    return AggregationScheme(
        name="road",
        d=2,
        m=3,
        k=2,
        ext=ext,
        agg=agg,
        ext_monotone_mask=tuple(ch != "C" for ch in order),
        distance_components=((idx_l, 0),),
        labels=tuple({"L": "length", "C": "unpaved_run", "M": "max_unpaved_run"}[ch] for ch in order),
    )


SCHEMES: dict[str, Callable[..., AggregationScheme]] = {
    "trivial": lambda m, order=None: trivial_scheme(m),
    "max-risk-length": lambda m, order=None: max_risk_length_scheme(m),
    "coverage-length": lambda m, order=None: coverage_length_scheme(m),
    "road": lambda m=3, order=None: road_scheme(order or "LCM"),
}


def get_scheme(name: str, m: int | None = None, order: str | None = None) -> AggregationScheme:
    """Look up a built-in scheme by name.

    ``m`` is required for every scheme except ``road`` (always ``m=3``);
    ``order`` only applies to ``road``.
    """
    try:
        factory = SCHEMES[name]
    except KeyError:
        raise ContractError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
    if name == "road":
        if m not in (None, 3):
            raise ContractError("road scheme has m=3")
        return factory(order=order)
    if order is not None:
        raise ContractError(f"scheme {name!r} has no hidden ordering option")
    if m is None:
        raise ContractError(f"scheme {name!r} needs m")
    return factory(m)


def path_cost(path: Sequence[int], graph: MOGraph, scheme: AggregationScheme) -> CostVector:
    """Fold the extension function along ``path`` starting from the zero vector."""
    scheme.check_graph(graph)
    path = graph.check_path(path)
    g = scheme.zero()
    for u, v in zip(path, path[1:]):
        g = scheme.ext(g, graph.cost(u, v))
    return g


def solution_cost(path: Sequence[int], graph: MOGraph, scheme: AggregationScheme) -> CostVector:
    return scheme.agg(path_cost(path, graph, scheme))

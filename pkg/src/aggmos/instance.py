"""Instance files: a graph, its scheme binding and start/goal candidates.

Instances are stored as JSON with a fixed key order. Floats are written
with six decimals so that generating the same instance twice produces
byte-identical files::

    {
      "format": "aggmos.instance.v1",
      "domain": "ou",
      "scheme": "max-risk-length",
      "m": 13,
      "d": 13,
      "num_vertices": 800,
      "seed": 7,
      "params": {...},
      "points": [[x, y], ...] | null,
      "pairs": [[start, goal], ...],
      "edges": [
        [u, v, [c_1, ..., c_d]],
        ...
      ]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any

from .aggregation import AggregationScheme, get_scheme
from .core import ContractError, MOGraph

FORMAT = "aggmos.instance.v1"


class InstanceFormatError(ValueError):
    """The instance document is malformed."""


@dataclass
class Instance:
    domain: str
    scheme: str
    graph: MOGraph
    m: int
    pairs: list[tuple[int, int]] = field(default_factory=list)
    seed: int | None = None
    params: dict[str, Any] = field(default_factory=dict)
    points: list[tuple[float, float]] | None = None

    def make_scheme(self, order: str | None = None) -> AggregationScheme:
        scheme = get_scheme(self.scheme, m=self.m, order=order)
        scheme.check_graph(self.graph)
        return scheme


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ContractError("instance files cannot hold non-finite numbers")
        return f"{x + 0.0:.6f}"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps_instance(inst: Instance) -> str:
    g = inst.graph
    head = [
        ("format", FORMAT),
        ("domain", inst.domain),
        ("scheme", inst.scheme),
        ("m", inst.m),
        ("d", g.d),
        ("num_vertices", g.num_vertices),
        ("seed", inst.seed),
        ("params", inst.params),
        ("points", None if inst.points is None else [list(p) for p in inst.points]),
        ("pairs", [list(p) for p in inst.pairs]),
    ]
    lines = ["{"]
    lines += [f"  {json.dumps(k)}: {_fmt(v)}," for k, v in head]
    edges = [f"    [{u}, {v}, {_fmt(list(c))}]" for u, v, c in g.edges()]
    lines.append('  "edges": [')
    lines.append(",\n".join(edges))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(line for line in lines if line) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise InstanceFormatError(f"expected format {FORMAT!r}")
    try:
        graph = MOGraph(int(doc["num_vertices"]), int(doc["d"]))
        for u, v, c in doc["edges"]:
            graph.add_edge(int(u), int(v), c)
        points = doc.get("points")
        return Instance(
            domain=str(doc["domain"]),
            scheme=str(doc["scheme"]),
            graph=graph,
            m=int(doc["m"]),
            pairs=[(int(s), int(t)) for s, t in doc.get("pairs", [])],
            seed=doc.get("seed"),
            params=doc.get("params") or {},
            points=None if points is None else [tuple(p) for p in points],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise InstanceFormatError(f"malformed instance: {exc}") from None


def save_instance(inst: Instance, path: str | FsPath) -> None:
    FsPath(path).write_text(dumps_instance(inst), encoding="utf-8")


def load_instance(path: str | FsPath) -> Instance:
    return loads_instance(FsPath(path).read_text(encoding="utf-8"))

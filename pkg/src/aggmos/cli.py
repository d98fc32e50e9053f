"""Command-line interface: ``aggmos {gen,run,compare,verify}``.

Exit codes: 0 success, 1 verification failed or invalid generator
parameters, 2 missing input, 3 schema or dimension mismatch, 4 instance
too large for the oracle.

``AGGMOS_TIMEOUT`` sets the default per-search timeout in seconds.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path as FsPath
from typing import Any

from .aggregation import AggregationScheme, solution_cost
from .core import ContractError, ParetoFrontier, approx_factor
from .domains import (
    InspectionSpec,
    OUSpec,
    RoadSpec,
    generate_inspection_instance,
    generate_ou_instance,
    generate_road_network,
)
from .instance import Instance, InstanceFormatError, load_instance, save_instance
from .oracle import EnumerationBudget, EnumerationIncomplete, brute_force_pof, verify_eps_cover
from .search import SearchMode, SearchResult, graph_distance_heuristic, mos_astar, zero_heuristic

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_MISSING = 2
EXIT_MISMATCH = 3
EXIT_ORACLE_BUDGET = 4

TIMEOUT_ENV = "AGGMOS_TIMEOUT"
CSV_HEADER = ["instance", "pair", "eps", "mode", "runtime_s", "expansions", "frontier", "timed_out"]
REPORT_FORMAT = "aggmos.report.v1"


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


@dataclass
class RunReport:
    """Result of one search; ``frontier`` is ``None`` when the search timed out."""

    instance: str
    mode: str
    eps: list[float]
    start: int
    goal: int
    rng_seed: int | None
    timed_out: bool
    frontier: list[dict[str, Any]] | None
    stats: dict[str, float]
    order: str | None = None
    format: str = REPORT_FORMAT

    @classmethod
    def from_result(cls, instance: str, mode: SearchMode, scheme: AggregationScheme, start: int, goal: int,
                    seed: int | None, result: SearchResult, order: str | None = None) -> RunReport:
        frontier = None
        if not result.timed_out:
            frontier = [{"cost": list(c), "path": list(p)} for c, p in result.frontier]
        stats = result.stats.as_dict()
        stats["frontier_size"] = len(result.frontier)
        return cls(instance=instance, mode=mode.kind.value, eps=list(mode.eps_vector(scheme)), start=start,
                   goal=goal, rng_seed=seed, timed_out=result.timed_out, frontier=frontier, stats=stats,
                   order=order)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"report is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("format") != REPORT_FORMAT:
            raise ValueError(f"expected report format {REPORT_FORMAT!r}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ValueError(f"malformed report: {exc}") from None

    def frontier_costs(self) -> list[tuple[float, ...]]:
        return [tuple(e["cost"]) for e in self.frontier or []]


def parse_eps(text: str) -> float | tuple[float, ...]:
    """``"0.1"`` -> ``0.1``; ``"0,0.2"`` -> ``(0.0, 0.2)``."""
    try:
        parts = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eps {text!r}") from None
    if not parts:
        raise argparse.ArgumentTypeError("eps must not be empty")
    if any(p < 0 for p in parts):
        raise argparse.ArgumentTypeError("eps components must be >= 0")
    return parts[0] if len(parts) == 1 and "," not in text else tuple(parts)


def default_timeout() -> float | None:
    raw = os.environ.get(TIMEOUT_ENV)
    if not raw:
        return None
    try:
        value = float(raw)
    except ValueError:
        raise CliError(f"{TIMEOUT_ENV} must be a number, got {raw!r}", EXIT_FAIL) from None
    return value if value > 0 else None


def _load(path: str) -> Instance:
    if not FsPath(path).is_file():
        raise CliError(f"instance file not found: {path}", EXIT_MISSING)
    try:
        return load_instance(path)
    except (InstanceFormatError, ContractError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_MISMATCH) from None


def _scheme(inst: Instance, order: str | None) -> AggregationScheme:
    if order is not None and inst.scheme != "road":
        raise CliError(f"--order only applies to road instances, not {inst.scheme!r}", EXIT_MISMATCH)
    try:
        return inst.make_scheme(order)
    except ContractError as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from None


def _endpoints(inst: Instance, args: argparse.Namespace) -> tuple[int, int]:
    if args.start is not None or args.goal is not None:
        if args.start is None or args.goal is None:
            raise CliError("--start and --goal must be given together", EXIT_FAIL)
        start, goal = args.start, args.goal
    else:
        if not inst.pairs:
            raise CliError("instance has no start/goal pairs; pass --start and --goal", EXIT_MISSING)
        if not 0 <= args.pair < len(inst.pairs):
            raise CliError(f"--pair must be in [0, {len(inst.pairs)})", EXIT_FAIL)
        start, goal = inst.pairs[args.pair]
    for v in (start, goal):
        if not 0 <= v < inst.graph.num_vertices:
            raise CliError(f"vertex {v} outside [0, {inst.graph.num_vertices})", EXIT_MISMATCH)
    return start, goal


def _heuristic(name: str, inst: Instance, goal: int, scheme: AggregationScheme):
    if name == "zero":
        return zero_heuristic(inst.graph, goal, scheme)
    return graph_distance_heuristic(inst.graph, goal, scheme)


def _mode(kind: str, eps: float | tuple[float, ...], scheme: AggregationScheme) -> SearchMode:
    mode = SearchMode.parse(kind, eps)
    try:
        mode.eps_vector(scheme)
    except ContractError as exc:
        raise CliError(f"--eps: {exc}", EXIT_MISMATCH) from None
    return mode


# gen


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        if args.domain == "ou":
            spec = OUSpec(num_obstacles=args.obstacles, sigma=args.sigma, num_shadows=args.shadows,
                          prm_samples=args.vertices or 800, prm_radius=args.radius, rng_seed=args.seed,
                          num_pairs=args.pairs, obstacle_size=(args.obstacle_min, args.obstacle_max))
            inst, _ = generate_ou_instance(spec)
        elif args.domain == "road":
            spec = RoadSpec(rows=args.rows, cols=args.cols, paved_fraction=args.paved_fraction,
                            drop_fraction=args.drop_fraction, rng_seed=args.seed, num_pairs=args.pairs,
                            one_way=args.one_way)
            inst = generate_road_network(spec)
        else:
            spec = InspectionSpec(num_vertices=args.vertices or 12, num_pois=args.pois,
                                  coverage_density=args.coverage_density, edge_probability=args.edge_probability,
                                  rng_seed=args.seed)
            inst, _ = generate_inspection_instance(spec)
    except (ContractError, ValueError) as exc:
        raise CliError(f"invalid parameters: {exc}", EXIT_FAIL) from None
    out = args.out or f"{args.domain}-{args.seed}.json"
    save_instance(inst, out)
    g = inst.graph
    print(out)
    print(f"domain={inst.domain} scheme={inst.scheme} |V|={g.num_vertices} |E|={g.num_edges} m={inst.m} d={g.d}")
    return EXIT_OK


# run


def cmd_run(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    scheme = _scheme(inst, args.order)
    start, goal = _endpoints(inst, args)
    eps = args.eps_per_dim if args.eps_per_dim is not None else args.eps
    mode = _mode(args.mode, eps, scheme)
    timeout = args.timeout if args.timeout is not None else default_timeout()
    result = mos_astar(inst.graph, start, goal, scheme, _heuristic(args.heuristic, inst, goal, scheme), mode,
                       timeout=timeout, max_expansions=args.max_expansions)
    report = RunReport.from_result(FsPath(args.instance).name, mode, scheme, start, goal, inst.seed, result,
                                   order=args.order)
    text = report.to_json()
    if args.out:
        FsPath(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# compare


@dataclass
class CompareCell:
    instance: str
    pair: int
    eps: float
    mode: str
    runtime_s: float
    expansions: int
    frontier: int
    timed_out: bool

    def row(self) -> list[str]:
        return [self.instance, str(self.pair), f"{self.eps:g}", self.mode, f"{self.runtime_s:.6f}",
                str(self.expansions), str(self.frontier), str(self.timed_out).lower()]


@dataclass
class _Job:
    path: str
    order: str | None
    pair: int
    start: int
    goal: int
    eps: float
    mode: str
    heuristic: str
    timeout: float | None
    max_expansions: int | None


_worker_cache: dict[tuple[str, str | None], tuple[Instance, AggregationScheme, dict]] = {}


def _run_job(job: _Job) -> CompareCell:
    key = (job.path, job.order)
    if key not in _worker_cache:
        inst = load_instance(job.path)
        _worker_cache.clear()
        _worker_cache[key] = (inst, inst.make_scheme(job.order), {})
    inst, scheme, heuristics = _worker_cache[key]
    if job.goal not in heuristics:
        heuristics[job.goal] = _heuristic(job.heuristic, inst, job.goal, scheme)
    res = mos_astar(inst.graph, job.start, job.goal, scheme, heuristics[job.goal],
                    SearchMode.parse(job.mode, job.eps), timeout=job.timeout, max_expansions=job.max_expansions)
    return CompareCell(FsPath(job.path).name, job.pair, job.eps, job.mode, res.stats.runtime,
                       res.stats.expansions, len(res.frontier), res.timed_out)


def speedup_summary(cells: Sequence[CompareCell]) -> list[CompareCell]:
    """Median over pairs of ``baseline_runtime / objagg_runtime``, one row per eps.

    ``timed_out`` on a summary row marks a censored median: some baseline
    cell hit its limit, so its runtime (and the ratio) is a lower bound.
    """
    by_key: dict[tuple[str, int, float], dict[str, CompareCell]] = {}
    for c in cells:
        by_key.setdefault((c.instance, c.pair, c.eps), {})[c.mode] = c
    out = []
    for eps in sorted({c.eps for c in cells}):
        ratios, exp_ratios, censored = [], [], False
        for (_, _, e), modes in by_key.items():
            if e != eps or "baseline" not in modes or "objagg" not in modes:
                continue
            b, o = modes["baseline"], modes["objagg"]
            ratios.append(b.runtime_s / max(o.runtime_s, 1e-9))
            exp_ratios.append(b.expansions / max(o.expansions, 1))
            censored = censored or b.timed_out
        if ratios:
            out.append(CompareCell("summary", -1, eps, "speedup", statistics.median(ratios),
                                   round(statistics.median(exp_ratios)), len(ratios), censored))
    return out


def format_compare_csv(cells: Sequence[CompareCell], summary: Sequence[CompareCell]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in cells:
        writer.writerow(c.row())
    for s in summary:
        row = s.row()
        row[1] = "median"
        if s.timed_out:
            row[4] = ">=" + row[4]
        writer.writerow(row)
    return buf.getvalue()


def cmd_compare(args: argparse.Namespace) -> int:
    timeout = args.timeout if args.timeout is not None else default_timeout()
    jobs: list[_Job] = []
    for path in args.instance:
        inst = _load(path)
        scheme = _scheme(inst, args.order)
        pairs = inst.pairs[: args.pairs] if args.pairs else inst.pairs
        if not pairs:
            raise CliError(f"{path}: instance has no start/goal pairs", EXIT_MISSING)
        for eps in args.eps_list:
            for kind in ("objagg", "baseline"):
                _mode(kind, eps, scheme)
        for i, (s, t) in enumerate(pairs):
            for eps in args.eps_list:
                for kind in ("objagg", "baseline"):
                    jobs.append(_Job(path, args.order, i, s, t, eps, kind, args.heuristic, timeout,
                                     args.max_expansions))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            cells = list(pool.map(_run_job, jobs))
    else:
        cells = [_run_job(j) for j in jobs]
    _worker_cache.clear()
    text = format_compare_csv(cells, speedup_summary(cells))
    if args.out:
        FsPath(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# verify


@dataclass
class CheckOutcome:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyResult:
    checks: list[CheckOutcome] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(CheckOutcome(name, ok, detail))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def check_report(report: RunReport, inst: Instance, scheme: AggregationScheme, exact: ParetoFrontier,
                 out: VerifyResult) -> None:
    if report.timed_out or report.frontier is None:
        out.add("report frontier", False, "report is from a timed-out run")
        return
    costs_ok = True
    for entry in report.frontier:
        try:
            path = tuple(entry["path"])
            real = solution_cost(path, inst.graph, scheme)
        except (ContractError, KeyError, TypeError) as exc:
            costs_ok = False
            out.add("report path", False, str(exc))
            continue
        ok = path[:1] == (report.start,) and path[-1:] == (report.goal,)
        ok = ok and len(real) == len(entry["cost"]) and all(abs(a - b) <= 1e-9 for a, b in zip(real, entry["cost"]))
        costs_ok = costs_ok and ok
    out.add("report costs match paths", costs_ok)
    costs = report.frontier_costs()
    if report.mode == "objagg" and not any(report.eps):
        out.add("report frontier equals oracle", set(costs) == exact.cost_set())
    else:
        eps = approx_factor(max(report.eps), scheme.k)
        out.add("report frontier eps-covers oracle", verify_eps_cover(exact, costs, eps))


def verify_instance(inst: Instance, scheme: AggregationScheme, start: int, goal: int, eps: float,
                    budget: EnumerationBudget, report: RunReport | None = None) -> VerifyResult:
    """Oracle against both modes at ``eps=0`` and at ``eps``.

    Raises :class:`EnumerationIncomplete` when the oracle budget runs out.
    """
    exact = brute_force_pof(inst.graph, start, goal, scheme, budget)
    h = graph_distance_heuristic(inst.graph, goal, scheme)
    out = VerifyResult()
    if report is not None:
        check_report(report, inst, scheme, exact, out)
        return out
    for kind in ("objagg", "baseline"):
        res = mos_astar(inst.graph, start, goal, scheme, h, SearchMode.parse(kind, 0.0))
        out.add(f"{kind} eps=0 equals oracle", res.frontier.cost_set() == exact.cost_set(),
                f"{len(res.frontier)} vs {len(exact)} solutions")
    if eps > 0:
        cover = approx_factor(eps, scheme.k)
        for kind in ("objagg", "baseline"):
            res = mos_astar(inst.graph, start, goal, scheme, h, SearchMode.parse(kind, eps))
            out.add(f"{kind} eps={eps:g} covers oracle", verify_eps_cover(exact, res.frontier, cover))
            if kind == "objagg":
                out.add(f"{kind} eps={eps:g} frontier size", len(res.frontier) <= len(exact),
                        f"{len(res.frontier)} <= {len(exact)}")
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    report = None
    if args.report:
        if not FsPath(args.report).is_file():
            raise CliError(f"report file not found: {args.report}", EXIT_MISSING)
        try:
            report = RunReport.from_json(FsPath(args.report).read_text(encoding="utf-8"))
        except ValueError as exc:
            raise CliError(str(exc), EXIT_MISMATCH) from None
        order = report.order
        start, goal = report.start, report.goal
    else:
        order = args.order
        start, goal = _endpoints(inst, args)
    scheme = _scheme(inst, order)
    budget = EnumerationBudget(max_paths=args.max_paths)
    try:
        result = verify_instance(inst, scheme, start, goal, args.eps, budget, report)
    except EnumerationIncomplete as exc:
        print(f"instance too large to verify: {exc}", file=sys.stderr)
        return EXIT_ORACLE_BUDGET
    for c in result.checks:
        line = f"{'PASS' if c.ok else 'FAIL'} {c.name}"
        print(line + (f" ({c.detail})" if c.detail else ""))
    return EXIT_OK if result.ok else EXIT_FAIL


# parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _eps_list(text: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eps list {text!r}") from None
    if not vals or any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("eps list needs non-negative values")
    return vals


def _add_endpoint_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--start", type=int, help="start vertex (default: from --pair)")
    p.add_argument("--goal", type=int, help="goal vertex (default: from --pair)")
    p.add_argument("--pair", type=int, default=0, help="index into the instance's stored pairs")
    p.add_argument("--order", help="road hidden-objective order, a permutation of LCM")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aggmos", description="Multi-objective search with aggregated objectives.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--domain", choices=["ou", "road", "inspection"], required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output path (default: <domain>-<seed>.json)")
    gen.add_argument("--pairs", type=_positive_int, default=20, help="start/goal pairs to sample")
    gen.add_argument("--vertices", type=_positive_int, help="PRM samples (ou) or vertex count (inspection)")
    gen.add_argument("--obstacles", type=int, default=12, help="ou: number of uncertain obstacles")
    gen.add_argument("--sigma", type=float, default=2.0, help="ou: obstacle position std-dev")
    gen.add_argument("--shadows", type=int, default=30, help="ou: shadows per obstacle")
    gen.add_argument("--radius", type=float, default=7.0, help="ou: PRM connection radius")
    gen.add_argument("--obstacle-min", type=float, default=0.04, help="ou: min obstacle half-size (fraction of width)")
    gen.add_argument("--obstacle-max", type=float, default=0.1, help="ou: max obstacle half-size (fraction of width)")
    gen.add_argument("--rows", type=_positive_int, default=45, help="road: grid rows")
    gen.add_argument("--cols", type=_positive_int, default=45, help="road: grid columns")
    gen.add_argument("--paved-fraction", type=float, default=0.5, help="road: share of paved segments")
    gen.add_argument("--drop-fraction", type=float, default=0.15, help="road: share of grid edges removed")
    gen.add_argument("--one-way", action="store_true", help="road: keep one direction per road (acyclic)")
    gen.add_argument("--pois", type=int, default=3, help="inspection: points of interest")
    gen.add_argument("--coverage-density", type=float, default=0.2, help="inspection: P(edge sees a POI)")
    gen.add_argument("--edge-probability", type=float, default=0.3, help="inspection: P(extra DAG edge)")
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="search one start/goal pair and print a JSON report")
    run.add_argument("--instance", required=True)
    run.add_argument("--mode", choices=["baseline", "objagg"], default="objagg")
    run.add_argument("--eps", type=parse_eps, default=0.0, help="scalar or comma-separated per-dimension list")
    run.add_argument("--eps-per-dim", type=_eps_list, help="per-dimension approximation factors")
    run.add_argument("--heuristic", choices=["distance", "zero"], default="distance")
    run.add_argument("--timeout", type=float, help=f"seconds (default: ${TIMEOUT_ENV} or none)")
    run.add_argument("--max-expansions", type=_positive_int)
    run.add_argument("--out", help="write the report here instead of stdout")
    _add_endpoint_args(run)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="baseline vs objagg over stored pairs, CSV output")
    cmp_.add_argument("--instance", nargs="+", required=True)
    cmp_.add_argument("--eps-list", type=_eps_list, default=[0.0, 0.1])
    cmp_.add_argument("--pairs", type=_positive_int, help="use the first N stored pairs (default: all)")
    cmp_.add_argument("--heuristic", choices=["distance", "zero"], default="distance")
    cmp_.add_argument("--timeout", type=float, help=f"seconds per search (default: ${TIMEOUT_ENV} or none)")
    cmp_.add_argument("--max-expansions", type=_positive_int)
    cmp_.add_argument("--order", help="road hidden-objective order")
    cmp_.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    cmp_.add_argument("--out", help="write CSV here instead of stdout")
    cmp_.set_defaults(func=cmd_compare)

    ver = sub.add_parser("verify", help="check both modes (or a report) against the brute-force oracle")
    ver.add_argument("--instance", required=True)
    ver.add_argument("--eps", type=float, default=0.1, help="also check eps-cover at this factor")
    ver.add_argument("--report", help="verify the frontier stored in a run report instead")
    ver.add_argument("--max-paths", type=_positive_int, default=10**6, help="oracle enumeration budget")
    _add_endpoint_args(ver)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"aggmos: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

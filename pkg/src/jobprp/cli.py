"""Experiment harness.

    jobprp [run] -na 8 -nc 2 -ns 3 -np 1560 -o orders.txt -c 320 -m 2 -sr ss -csv out.csv
    jobprp aggregate out1.csv out2.csv
    jobprp graph -na 2 -nc 2 -ns 1 -np 4 --edges g.txt --manifest nodes.txt

Exit codes: 0 success, 1 bad input data, 2 usage error, 3 exact-solver bound exceeded.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import statistics
import sys
from collections import defaultdict
from dataclasses import dataclass, fields
from pathlib import Path

from .batching import BatchingResult, OrderRouter, optimal_baseline, quality_of_solution, time_savings_heuristic
from .oracle import solve_exact
from .orders import OrderFileError, parse_order_file
from .routing import HEURISTICS, CapabilityError, dump_routes_json, make_router
from .routing.optimal import DEFAULT_EXACT_BOUND
from .warehouse import (WarehouseConfig, config_from_mapping, generate_warehouse, load_products,
                        parse_key_values)

log = logging.getLogger("jobprp")

HEADER = ["delta", "orders", "method", "savings_router", "batch_router",
          "objective_m", "pickers", "quality", "elapsed_s"]
ORACLE_COLUMN = "oracle_objective"

EXIT_DATA, EXIT_USAGE, EXIT_CAPABILITY = 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class ResultRow:
    delta: int | str
    orders: int
    method: int
    savings_router: str
    batch_router: str
    objective_m: float
    pickers: int
    quality: float
    elapsed_s: float
    oracle_objective: float | None = None

    def as_csv(self, with_oracle: bool) -> list[str]:
        row = [str(self.delta), str(self.orders), str(self.method), self.savings_router,
               self.batch_router, f"{self.objective_m:.2f}", str(self.pickers),
               f"{self.quality:.4f}", f"{self.elapsed_s:.4f}"]
        if with_oracle:
            row.append("" if self.oracle_objective is None else f"{self.oracle_objective:.2f}")
        return row


def resolve_routers(method: int, sr: str | None, br: str | None) -> tuple[str, str]:
    """Validate a (method, savings router, batch router) combination."""
    if method == 3:
        if sr not in (None, "opt") or br not in (None, "opt"):
            raise UsageError("method 3 uses the optimal router for savings and batches (-sr opt -br opt)")
        return "opt", "opt"
    if method not in (1, 2):
        raise UsageError(f"unknown method {method}")
    if sr not in HEURISTICS:
        raise UsageError(f"method {method} needs -sr nn, ss or lg")
    if method == 1:
        br = br or sr
        if br not in HEURISTICS:
            raise UsageError("method 1 needs a heuristic batch router (-br nn, ss or lg)")
    else:
        br = br or "opt"
        if br != "opt":
            raise UsageError("method 2 routes batches optimally (-br opt)")
    return sr, br


def _add_warehouse_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file with warehouse and run settings")
    p.add_argument("-na", type=int, dest="num_aisles")
    p.add_argument("-nc", type=int, dest="num_cross_aisles")
    p.add_argument("-ns", type=int, dest="num_shelves")
    p.add_argument("-np", type=int, dest="min_products")
    p.add_argument("--aisle-width", type=float)
    p.add_argument("--cross-aisle-width", type=float)
    p.add_argument("--slot-width", type=float)
    p.add_argument("--rack-depth", type=float)
    p.add_argument("--depot-offset", type=float)
    p.add_argument("-l", "--products", help="product file: product_id,category,... per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jobprp", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="batch and route order files with one method")
    _add_warehouse_args(run)
    run.add_argument("-o", "--orders", nargs="+", help="order file(s), one instance each")
    run.add_argument("-c", "--capacity", type=int, help="picker capacity in items")
    run.add_argument("-m", "--method", type=int, choices=[1, 2, 3])
    run.add_argument("-sr", choices=["nn", "ss", "lg", "opt"], dest="savings_router")
    run.add_argument("-br", choices=["nn", "ss", "lg", "opt"], dest="batch_router")
    run.add_argument("-csv", dest="output", help="result CSV path (stdout if omitted)")
    run.add_argument("--oracle", action="store_true", help="also solve exactly and report oracle_objective")
    run.add_argument("--routes-json", help="write node coordinates and batch polylines here")
    run.add_argument("--exact-bound", type=int, default=DEFAULT_EXACT_BOUND,
                     help="largest pick count the optimal router accepts")

    agg = sub.add_parser("aggregate", help="median objective and time per method/router group")
    agg.add_argument("inputs", nargs="+")
    agg.add_argument("-csv", dest="output")

    graph = sub.add_parser("graph", help="export the warehouse graph")
    _add_warehouse_args(graph)
    graph.add_argument("--edges", required=True, help="edge list output: 'u v length' per line")
    graph.add_argument("--manifest", help="node manifest output: 'node kind x y' per line")
    return parser


_FLAG_KEYS = {"na": "num_aisles", "nc": "num_cross_aisles", "ns": "num_shelves", "np": "min_products",
              "c": "capacity", "m": "method", "sr": "savings_router", "br": "batch_router",
              "csv": "output", "l": "products", "o": "orders"}
_WAREHOUSE_FIELDS = {f.name for f in fields(WarehouseConfig)}


def merged_settings(args) -> dict:
    """Command-line flags over ``--config`` values."""
    settings = {}
    if args.config:
        for key, value in parse_key_values(Path(args.config).read_text(encoding="utf-8")).items():
            settings[_FLAG_KEYS.get(key, key)] = value
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            settings[key] = value
    return settings


def warehouse_from(settings: dict):
    values = {k: str(v) for k, v in settings.items() if k in _WAREHOUSE_FIELDS}
    missing = {"num_aisles", "num_cross_aisles", "num_shelves", "min_products"} - values.keys()
    if missing:
        raise UsageError("missing warehouse parameter(s): " + ", ".join(sorted(missing)))
    try:
        config = config_from_mapping(values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    products = load_products(settings["products"]) if settings.get("products") else None
    try:
        return generate_warehouse(config, products)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _baseline_key(order_path: Path, warehouse, capacity: int) -> str:
    digest = hashlib.sha256(order_path.read_bytes())
    digest.update(repr((warehouse.config, tuple(warehouse.slot_assignment), capacity)).encode())
    return digest.hexdigest()


class BaselineStore:
    """Sidecar JSON cache of no-batching baselines, keyed by instance content."""

    def __init__(self, path: Path | None):
        self.path = path
        self.values = {}
        if path is not None and path.exists():
            self.values = json.loads(path.read_text(encoding="utf-8"))

    def get(self, key, compute):
        if key not in self.values:
            self.values[key] = compute()
            if self.path is not None:
                self.path.write_text(json.dumps(self.values, indent=1), encoding="utf-8")
        return self.values[key]


def run_instance(order_path: Path, warehouse, capacity: int, method: int, sr: str, br: str,
                 exact_bound: int, baselines: BaselineStore, oracle: bool) -> tuple[ResultRow, BatchingResult]:
    orders = parse_order_file(order_path)
    for o in orders:
        if o.weight > capacity:
            raise OrderFileError(f"{order_path}: order {o.order_id} holds {o.weight} items, "
                                 f"above the picker capacity {capacity}")
        for p in o.picks:
            warehouse.locate(p)

    def build(name):
        return OrderRouter(make_router(name, warehouse, **({"max_picks": exact_bound} if name == "opt" else {})))

    baseline = baselines.get(
        _baseline_key(order_path, warehouse, capacity),
        lambda: optimal_baseline(orders.orders, warehouse, exact_bound=exact_bound).objective,
    )
    result = time_savings_heuristic(orders.orders, build(sr), build(br), capacity)
    row = ResultRow(
        delta=orders.delta_days if orders.delta_days is not None else "",
        orders=len(orders),
        method=method,
        savings_router=sr,
        batch_router=br,
        objective_m=result.objective / 10,
        pickers=result.picker_count,
        quality=quality_of_solution(baseline, result.objective),
        elapsed_s=result.elapsed,
    )
    if oracle:
        row.oracle_objective = solve_exact(orders.orders, capacity, warehouse, exact_bound=exact_bound).objective / 10
    return row, result


def cmd_run(args) -> int:
    settings = merged_settings(args)
    for key in ("orders", "capacity", "method"):
        if settings.get(key) in (None, ""):
            raise UsageError(f"missing required setting: {key}")
    method = int(settings["method"])
    sr, br = resolve_routers(method, settings.get("savings_router"), settings.get("batch_router"))
    capacity = int(settings["capacity"])
    exact_bound = int(settings.get("exact_bound", DEFAULT_EXACT_BOUND))
    order_paths = settings["orders"]
    if isinstance(order_paths, str):
        order_paths = order_paths.split()
    warehouse = warehouse_from(settings)

    output = settings.get("output")
    sidecar = Path(str(output) + ".baseline.json") if output else None
    baselines = BaselineStore(sidecar)

    rows, routes = [], {}
    for path in map(Path, order_paths):
        row, result = run_instance(path, warehouse, capacity, method, sr, br, exact_bound,
                                   baselines, bool(settings.get("oracle")))
        rows.append(row)
        for k, batch in enumerate(result.batches, start=1):
            routes[f"{path.stem}/batch{k}"] = batch.route
        log.info("%s: objective %.2f m with %d pickers", path.name, row.objective_m, row.pickers)

    with_oracle = bool(settings.get("oracle"))
    fh = open(output, "w", newline="", encoding="utf-8") if output else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER + ([ORACLE_COLUMN] if with_oracle else []))
        for row in rows:
            writer.writerow(row.as_csv(with_oracle))
    finally:
        if output:
            fh.close()

    if settings.get("routes_json"):
        with open(settings["routes_json"], "w", encoding="utf-8") as fh:
            dump_routes_json(fh, warehouse, routes)
    return 0


def aggregate(paths) -> list[dict]:
    """Median objective, elapsed time and quality per (method, savings router, batch router)."""
    groups = defaultdict(list)
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                groups[(row["method"], row["savings_router"], row["batch_router"])].append(row)
    if not groups:
        raise ValueError("no result rows to aggregate")
    report = []
    for (method, sr, br), rows in sorted(groups.items()):
        report.append({
            "method": method,
            "savings_router": sr,
            "batch_router": br,
            "runs": len(rows),
            "median_objective_m": statistics.median(float(r["objective_m"]) for r in rows),
            "median_quality": statistics.median(float(r["quality"]) for r in rows),
            "median_elapsed_s": statistics.median(float(r["elapsed_s"]) for r in rows),
        })
    return report


def cmd_aggregate(args) -> int:
    report = aggregate(args.inputs)
    fh = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=list(report[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(report)
    finally:
        if args.output:
            fh.close()
    return 0


def cmd_graph(args) -> int:
    warehouse = warehouse_from(merged_settings(args))
    with open(args.edges, "w", encoding="utf-8") as fh:
        warehouse.export_edges(fh)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            warehouse.export_manifest(fh)
    return 0


COMMANDS = {"run": cmd_run, "aggregate": cmd_aggregate, "graph": cmd_graph}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in COMMANDS and argv[0] not in ("-h", "--help"):
        argv.insert(0, "run")
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"jobprp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"jobprp: exact solver bound exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (OrderFileError, KeyError, ValueError, OSError) as exc:
        print(f"jobprp: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

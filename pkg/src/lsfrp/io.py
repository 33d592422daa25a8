"""Instance/solution serialization and the seeded random-instance generator.

File schemas (see docs/formats.md for normative examples):
  lsfrp-instance-v1  -- problem data; money fields are integer cents
  lsfrp-solution-v1  -- solver output incl. diagnostics

Both writers emit canonical JSON (sorted keys, two-space indent) so that
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .instance import (
    CARGO_TYPES,
    Demand,
    EmptyPoint,
    Instance,
    Ship,
    Visit,
    make_arc,
    validate,
)
from .solution import DemandFlow, Diagnostics, EmptyFlow, Solution

INSTANCE_SCHEMA = "lsfrp-instance-v1"
SOLUTION_SCHEMA = "lsfrp-solution-v1"


class ParseError(ValueError):
    pass


def _canonical(payload: dict) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _money_out(value: float, where: str) -> int:
    cents = round(value)
    if abs(value - cents) > 1e-6:
        raise ValueError(f"{where}: money value {value!r} is not an integral cent count")
    return int(cents)


def _num(value: float):
    """Canonical JSON number: integral floats emit as ints."""
    return int(value) if float(value).is_integer() else float(value)


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


# -- instance files -------------------------------------------------------------


def write_instance(instance: Instance) -> bytes:
    payload = {
        "schema": INSTANCE_SCHEMA,
        "sink": instance.sink,
        "visits": [
            {
                "id": v.id,
                "port_fee": _money_out(v.port_fee, f"visit {v.id}"),
                "move_cost": _money_out(v.move_cost, f"visit {v.id}"),
                "time_index": v.time_index,
            }
            for v in instance.visits
        ],
        "ships": [
            {
                "id": s.id,
                "start_visit": s.start_visit,
                "capacity_dc": _num(s.capacity_dc),
                "capacity_rf": _num(s.capacity_rf),
                "ship_type": s.ship_type,
            }
            for s in instance.ships
        ],
        "arcs": [
            {
                "from": a.src,
                "to": a.dst,
                "sail_cost": {t: _money_out(c, f"arc {a.src}->{a.dst}") for t, c in a.sail_cost},
            }
            for a in instance.arcs
        ],
        "demands": [
            {
                "id": m.id,
                "origin": m.origin,
                "destinations": sorted(m.destinations),
                "cargo_type": m.cargo_type,
                "amount": _num(m.amount),
                "revenue_per_teu": _money_out(m.revenue, f"demand {m.id}"),
            }
            for m in instance.demands
        ],
        "empty_points": [
            {"visit": p.visit, "cargo_type": p.cargo_type, "amount": _num(p.amount)}
            for p in instance.empty_points
        ],
        "empty_revenue": {
            q: _money_out(r, f"empty_revenue[{q}]") for q, r in sorted(instance.empty_revenue.items())
        },
    }
    return _canonical(payload)


def parse_instance(data: bytes | str) -> Instance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    if doc.get("schema") != INSTANCE_SCHEMA:
        raise ParseError(f"unsupported schema {doc.get('schema')!r}, expected {INSTANCE_SCHEMA!r}")

    visits = []
    for i, v in enumerate(doc.get("visits", [])):
        where = f"visits[{i}]"
        visits.append(
            Visit(
                id=str(_need(v, "id", where)),
                port_fee=float(_need(v, "port_fee", where)),
                move_cost=float(_need(v, "move_cost", where)),
                time_index=int(v.get("time_index", 0)),
            )
        )
    ships = []
    for i, s in enumerate(doc.get("ships", [])):
        where = f"ships[{i}]"
        ships.append(
            Ship(
                id=str(_need(s, "id", where)),
                start_visit=str(_need(s, "start_visit", where)),
                capacity_dc=float(_need(s, "capacity_dc", where)),
                capacity_rf=float(_need(s, "capacity_rf", where)),
                ship_type=str(s.get("ship_type", "T0")),
            )
        )
    arcs = []
    for i, a in enumerate(doc.get("arcs", [])):
        where = f"arcs[{i}]"
        cost = _need(a, "sail_cost", where)
        if not isinstance(cost, dict):
            raise ParseError(f"{where}: sail_cost must map ship type to cost")
        arcs.append(
            make_arc(
                str(_need(a, "from", where)),
                str(_need(a, "to", where)),
                {str(t): float(c) for t, c in cost.items()},
            )
        )
    demands = []
    for i, m in enumerate(doc.get("demands", [])):
        where = f"demands[{i}]"
        dests = _need(m, "destinations", where)
        if not isinstance(dests, list):
            raise ParseError(f"{where}: destinations must be a list")
        demands.append(
            Demand(
                id=str(_need(m, "id", where)),
                origin=str(_need(m, "origin", where)),
                destinations=frozenset(str(d) for d in dests),
                cargo_type=str(_need(m, "cargo_type", where)),
                amount=float(_need(m, "amount", where)),
                revenue=float(_need(m, "revenue_per_teu", where)),
            )
        )
    points = []
    for i, p in enumerate(doc.get("empty_points", [])):
        where = f"empty_points[{i}]"
        points.append(
            EmptyPoint(
                visit=str(_need(p, "visit", where)),
                cargo_type=str(_need(p, "cargo_type", where)),
                amount=float(_need(p, "amount", where)),
            )
        )
    revenue = {str(q): float(r) for q, r in doc.get("empty_revenue", {}).items()}

    instance = Instance(
        ships, visits, str(_need(doc, "sink", "instance")), arcs, demands, points, revenue
    )
    report = validate(instance)
    if not report.ok:
        raise ParseError("invalid instance:\n" + str(report))
    return instance


# -- solution files -------------------------------------------------------------


def _finite_or_none(value):
    if value is None or not math.isfinite(value):
        return None
    return value


def write_solution(solution: Solution) -> bytes:
    d = solution.diagnostics
    payload = {
        "schema": SOLUTION_SCHEMA,
        "method": solution.method,
        "status": solution.status,
        "objective": _finite_or_none(solution.objective),
        "bound": _finite_or_none(solution.bound),
        "ship_paths": {s: list(p) for s, p in solution.ship_paths.items()},
        "demand_flows": [
            {"demand": f.demand, "ship": f.ship, "destination": f.destination, "amount": f.amount}
            for f in solution.demand_flows
        ],
        "empty_flows": [
            {"cargo_type": f.cargo_type, "ship": f.ship, "from": f.src, "to": f.dst, "amount": f.amount}
            for f in solution.empty_flows
        ],
        "diagnostics": {
            "columns_generated": d.columns_generated,
            "rmp_iterations": d.rmp_iterations,
            "bnb_nodes": d.bnb_nodes,
            "cuts_dc": dict(sorted(d.cuts_dc.items())),
            "cuts_rf": dict(sorted(d.cuts_rf.items())),
            "splits": d.splits,
            "model_rows": d.model_rows,
            "model_cols": d.model_cols,
            "model_nonzeros": d.model_nonzeros,
            "wall_time_sec": d.wall_time_sec,
        },
        "meta": solution.meta,
    }
    return _canonical(payload)


def parse_solution(data: bytes | str) -> Solution:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if doc.get("schema") != SOLUTION_SCHEMA:
        raise ParseError(f"unsupported schema {doc.get('schema')!r}, expected {SOLUTION_SCHEMA!r}")
    diag = doc.get("diagnostics", {})
    return Solution(
        method=doc.get("method", ""),
        status=doc.get("status", ""),
        objective=doc.get("objective"),
        bound=doc.get("bound"),
        ship_paths={s: tuple(p) for s, p in doc.get("ship_paths", {}).items()},
        demand_flows=[
            DemandFlow(f["demand"], f["ship"], f["destination"], float(f["amount"]))
            for f in doc.get("demand_flows", [])
        ],
        empty_flows=[
            EmptyFlow(f["cargo_type"], f["ship"], f["from"], f["to"], float(f["amount"]))
            for f in doc.get("empty_flows", [])
        ],
        diagnostics=Diagnostics(
            columns_generated=diag.get("columns_generated", 0),
            rmp_iterations=diag.get("rmp_iterations", 0),
            bnb_nodes=diag.get("bnb_nodes", 0),
            cuts_dc=diag.get("cuts_dc", {}),
            cuts_rf=diag.get("cuts_rf", {}),
            splits=diag.get("splits", 0),
            model_rows=diag.get("model_rows", 0),
            model_cols=diag.get("model_cols", 0),
            model_nonzeros=diag.get("model_nonzeros", 0),
            wall_time_sec=diag.get("wall_time_sec", 0.0),
        ),
        meta=doc.get("meta", {}),
    )


# -- random generator -----------------------------------------------------------


@dataclass
class GeneratorParams:
    ships: int = 3
    ship_types: int = 1
    visits: int = 12  # excludes the sink, includes ship start visits
    arc_density: float = 0.5
    demands: int = 8
    reefer_fraction: float = 0.25
    empty_points: int = 0
    seed: int = 0
    sail_cost_range: tuple[int, int] = (5, 40)
    port_fee_range: tuple[int, int] = (0, 10)
    move_cost_range: tuple[int, int] = (1, 8)
    revenue_range: tuple[int, int] = (20, 90)
    amount_range: tuple[int, int] = (5, 60)
    capacity_dc_range: tuple[int, int] = (60, 160)
    empty_amount_range: tuple[int, int] = (5, 40)
    empty_revenue: int = 150
    dest_count_max: int = 3

    def check(self) -> None:
        if self.ships < 0 or self.visits < 0 or self.demands < 0 or self.empty_points < 0:
            raise ValueError("counts must be nonnegative")
        if self.ship_types not in (1, 2):
            raise ValueError("ship_types must be 1 or 2")
        if not 0 < self.arc_density <= 1:
            raise ValueError("arc_density must be in (0, 1]")
        if not 0 <= self.reefer_fraction <= 1:
            raise ValueError("reefer_fraction must be in [0, 1]")
        if self.ships > 0 and self.visits < self.ships + 1:
            raise ValueError("need at least one non-start visit per instance")
        if self.demands > 0 and self.visits - self.ships < 2:
            raise ValueError("demands need at least two non-start visits")
        if self.empty_points > 0 and self.visits - self.ships < 2:
            raise ValueError("empty points need at least two non-start visits")
        for rng in (
            self.sail_cost_range,
            self.port_fee_range,
            self.move_cost_range,
            self.revenue_range,
            self.amount_range,
            self.capacity_dc_range,
            self.empty_amount_range,
        ):
            if rng[0] > rng[1]:
                raise ValueError(f"inverted range {rng}")


def generate_random(params: GeneratorParams) -> Instance:
    """Build a layered time-space instance; identical params give identical
    instances byte for byte."""
    params.check()
    rng = random.Random(params.seed)
    sink = "tau"
    types = [f"T{k}" for k in range(params.ship_types)] if params.ships else []

    # layered skeleton: ship starts, middle layers, every visit has a sink arc
    n_mid = params.visits - params.ships
    width = max(2, params.ships + 1)
    # at least two middle layers whenever possible so demands have room
    n_layers = max(1 if n_mid < 2 else 2, math.ceil(n_mid / width)) if n_mid else 0
    layers: list[list[str]] = [[f"o{k}" for k in range(params.ships)]]
    mid_ids = [f"v{k}" for k in range(n_mid)]
    for li in range(n_layers):
        layers.append([m for i, m in enumerate(mid_ids) if i % n_layers == li])

    visits = []
    for li, layer in enumerate(layers):
        for vid in layer:
            visits.append(
                Visit(
                    id=vid,
                    port_fee=rng.randint(*params.port_fee_range),
                    move_cost=rng.randint(*params.move_cost_range),
                    time_index=li,
                )
            )

    ships = []
    caps: dict[str, tuple[int, int]] = {}
    for t in types:
        dc = rng.randint(*params.capacity_dc_range)
        rf = rng.randint(0, dc // 3)
        caps[t] = (dc, rf)
    for k in range(params.ships):
        t = types[k % len(types)]
        ships.append(Ship(f"s{k}", f"o{k}", caps[t][0], caps[t][1], t))

    def sail_costs() -> dict[str, float]:
        return {t: float(rng.randint(*params.sail_cost_range)) for t in sorted(types)} or {"T0": 0.0}

    arc_pairs: list[tuple[str, str, dict[str, float]]] = []
    seen: set[tuple[str, str]] = set()

    def add_arc(u: str, v: str, cost: dict[str, float] | None = None) -> None:
        if (u, v) not in seen and u != v:
            seen.add((u, v))
            arc_pairs.append((u, v, cost if cost is not None else sail_costs()))

    for li in range(len(layers) - 1):
        src_layer, dst_layer = layers[li], layers[li + 1]
        for u in src_layer:
            linked = False
            for v in dst_layer:
                if rng.random() < params.arc_density:
                    add_arc(u, v)
                    linked = True
            if not linked and dst_layer:
                add_arc(u, rng.choice(dst_layer))
        if src_layer:
            for v in dst_layer:
                if not any(p[1] == v for p in arc_pairs):
                    add_arc(rng.choice(src_layer), v)
        # sparse skip arcs one layer ahead (start visits stay layer-1 only)
        if li >= 1 and li + 2 < len(layers):
            for u in src_layer:
                for v in layers[li + 2]:
                    if rng.random() < params.arc_density / 3:
                        add_arc(u, v)
    zero = {t: 0.0 for t in sorted(types)} or {"T0": 0.0}
    for layer in layers:
        for u in layer:
            add_arc(u, sink, dict(zero))

    arcs = [make_arc(u, v, c) for u, v, c in arc_pairs]

    # forward reachability over the generated arcs (for demand placement)
    succ: dict[str, set[str]] = {v.id: set() for v in visits}
    out: dict[str, list[str]] = {v.id: [] for v in visits}
    for u, v, _ in arc_pairs:
        if v != sink:
            out[u].append(v)
    order = [vid for layer in layers for vid in layer]
    for u in reversed(order):
        for v in out[u]:
            succ[u] |= {v} | succ[v]

    non_start = [vid for layer in layers[1:] for vid in layer]
    demands = []
    for k in range(params.demands):
        origin = None
        for _ in range(50):
            cand = rng.choice(non_start) if non_start else None
            if cand and succ[cand]:
                origin = cand
                break
        if origin is None:
            candidates = [v for v in non_start if succ[v]] or [v for v in order if succ[v]]
            if not candidates:
                raise ValueError("generated graph admits no demand placement")
            origin = candidates[0]
        pool = sorted(succ[origin])
        n_dest = rng.randint(1, min(params.dest_count_max, len(pool)))
        dests = rng.sample(pool, n_dest)
        q = "rf" if rng.random() < params.reefer_fraction else "dc"
        demands.append(
            Demand(
                id=f"m{k}",
                origin=origin,
                destinations=frozenset(dests),
                cargo_type=q,
                amount=float(rng.randint(*params.amount_range)),
                revenue=float(rng.randint(*params.revenue_range)),
            )
        )

    points: list[EmptyPoint] = []
    taken: set[tuple[str, str]] = set()
    for k in range(params.empty_points):
        placed = False
        for _ in range(80):
            q = "rf" if rng.random() < params.reefer_fraction else "dc"
            if k % 2 == 0:
                visit = rng.choice(non_start)
                ok = bool(succ[visit]) and (visit, q) not in taken
                amount = float(rng.randint(*params.empty_amount_range))
            else:
                surpluses = [p for p in points if p.amount > 0 and p.cargo_type == q]
                if not surpluses:
                    continue
                src = rng.choice(surpluses)
                pool2 = [v for v in sorted(succ[src.visit]) if (v, q) not in taken]
                if not pool2:
                    continue
                visit = rng.choice(pool2)
                ok = True
                amount = -float(rng.randint(*params.empty_amount_range))
            if ok:
                points.append(EmptyPoint(visit, q, amount))
                taken.add((visit, q))
                placed = True
                break
        if not placed:
            break

    revenue = {q: float(params.empty_revenue) for q in CARGO_TYPES}
    instance = Instance(ships, visits, sink, arcs, demands, points, revenue)
    report = validate(instance)
    if not report.ok:
        raise AssertionError(f"generator produced invalid instance (seed {params.seed}):\n{report}")
    return instance

"""Compact per-ship pricing with lazy capacity constraints.

Instead of one flow variable per (demand, arc), each demand gets a single
total-flow variable per ship; base rows only cap what is loaded at each
node.  Joint capacity along the path is enforced lazily: every integer
candidate is replayed from the start visit (cargo loads at its origin and
unloads at the first visited destination), and wherever the onboard total
exceeds a capacity a cut over every demand that can be aboard there is
added.  Cuts persist in a per-ship pool across pricing rounds.

Multi-destination demands whose variables a cut could wrongly tie together
are split into per-destination variables sharing one availability cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import lp
from .colgen import CgConfig, Column, _usable_pricing_result, run_column_generation
from .formulations import evaluate_objective
from .instance import Instance, ReachIndex, Ship, build_reach_index
from .lp import EQ, LE, LinearModel
from .solution import OPTIMAL, DemandFlow, Diagnostics, EmptyFlow, Solution


@dataclass(frozen=True)
class Member:
    """One compact flow variable: a demand or a per-destination slice of one."""

    key: str
    demand: str
    origin: str
    destinations: frozenset[str]
    cargo_type: str
    amount: float  # parent availability
    revenue: float
    unload_cost: float


@dataclass(frozen=True)
class Cut:
    """Capacity cut at a node: every member/empty pair that can be aboard
    when leaving the node, against one capacity scope."""

    ship: str
    node: str
    scope: str  # "dc" (total, incl. empties) or "rf" (laden reefer only)
    demand_keys: tuple[str, ...]
    empty_keys: tuple[tuple[str, str, str], ...]
    rhs: float


class SplitRequiredError(ValueError):
    """Unequal unload costs across destinations need per-destination splits."""


# flows below this are treated as solver noise, far under any real TEU amount
FLOW_EPS = 1e-5


# -- demand-triple splitting -----------------------------------------------------


def _four_criteria_split(instance: Instance, reach: ReachIndex, demand_ids) -> set[str]:
    """Demands meeting all four splitting criteria against the candidate set."""
    out = set()
    pool = [instance.demand_by_id[mid] for mid in sorted(demand_ids)]
    for m in pool:
        if len(m.destinations) < 2:
            continue
        hit = False
        for d1 in sorted(m.destinations):
            if hit:
                break
            avoiding = reach.reach_avoiding(m.origin, {d1})
            for d2 in sorted(m.destinations):
                if d2 == d1 or not reach.can_reach(d1, d2):
                    continue  # criterion 1: d2 lies beyond d1
                for other in pool:
                    if other.id == m.id:
                        continue
                    o2 = other.origin
                    # criterion 2: the second origin interleaves d1 and d2
                    if not (reach.can_reach(d1, o2) and reach.can_reach(o2, d2)):
                        continue
                    # criterion 3: the other demand can still deliver past d2
                    if not any(reach.can_reach(d2, dd) for dd in other.destinations):
                        continue
                    # criterion 4: the first origin can reach o2 around d1
                    if o2 not in avoiding:
                        continue
                    out.add(m.id)
                    hit = True
                    break
                if hit:
                    break
    return out


def _conflict_split(instance: Instance, reach: ReachIndex, demand_ids) -> set[str]:
    """Split trigger actually used by the builder: criteria 1, 2 and 4.

    Dropping criterion 3 is a deliberate safety margin: whenever another
    demand can load while this one may already have unloaded at an earlier
    destination, a static cut over total flows could tie the two together
    even though they never share the ship.  Splitting is optimum-preserving,
    so the wider trigger only costs a few extra variables.
    """
    out = set()
    pool = [instance.demand_by_id[mid] for mid in sorted(demand_ids)]
    for m in pool:
        if len(m.destinations) < 2:
            continue
        hit = False
        for d1 in sorted(m.destinations):
            if hit:
                break
            avoiding = reach.reach_avoiding(m.origin, {d1})
            for d2 in sorted(m.destinations):
                if d2 == d1 or not reach.can_reach(d1, d2):
                    continue
                for other in pool:
                    if other.id == m.id:
                        continue
                    o2 = other.origin
                    if not (reach.can_reach(d1, o2) and reach.can_reach(o2, d2)):
                        continue
                    if o2 not in avoiding:
                        continue
                    out.add(m.id)
                    hit = True
                    break
                if hit:
                    break
    return out


def split_demand_triples(
    instance: Instance, ship_id: str, reach: ReachIndex | None = None
) -> dict[str, list[frozenset[str]]]:
    """Split map for one ship's pricing model: demand id -> destination sets,
    one per variable.  A demand is split into per-destination members iff
    all four splitting criteria hold over the demands this ship can move."""
    reach = reach or build_reach_index(instance)
    movable = reach.movable[ship_id]
    to_split = _four_criteria_split(instance, reach, movable)
    out: dict[str, list[frozenset[str]]] = {}
    for mid in sorted(movable):
        m = instance.demand_by_id[mid]
        if mid in to_split:
            out[mid] = [frozenset({d}) for d in sorted(m.destinations)]
        else:
            out[mid] = [m.destinations]
    return out


def _members_for_ship(
    instance: Instance, reach: ReachIndex, ship_id: str, splitting: bool
) -> list[Member]:
    movable = reach.movable[ship_id]
    to_split: set[str] = set()
    if splitting:
        to_split = _conflict_split(instance, reach, movable)
    members: list[Member] = []
    for mid in sorted(movable):
        m = instance.demand_by_id[mid]
        unload = {instance.visit_by_id[d].move_cost for d in m.destinations}
        split = mid in to_split or (splitting and len(unload) > 1)
        if not split and len(unload) > 1:
            raise SplitRequiredError(
                f"demand {mid!r} has unequal unload costs across destinations; "
                "enable splitting to price it compactly"
            )
        if split and len(m.destinations) > 1:
            for d in sorted(m.destinations):
                members.append(
                    Member(
                        key=f"{mid}@{d}",
                        demand=mid,
                        origin=m.origin,
                        destinations=frozenset({d}),
                        cargo_type=m.cargo_type,
                        amount=m.amount,
                        revenue=m.revenue,
                        unload_cost=instance.visit_by_id[d].move_cost,
                    )
                )
        else:
            members.append(
                Member(
                    key=mid,
                    demand=mid,
                    origin=m.origin,
                    destinations=m.destinations,
                    cargo_type=m.cargo_type,
                    amount=m.amount,
                    revenue=m.revenue,
                    unload_cost=next(iter(unload)),
                )
            )
    return members


# -- compact model ----------------------------------------------------------------


@dataclass
class CompactModel:
    model: LinearModel
    ship: Ship
    yvars: dict[tuple[str, str], int]
    xvars: dict[str, int]
    evars: dict[tuple[str, str, str], int]
    members: dict[str, Member]
    node_price: dict[str, float]
    carry_nodes: dict[str, frozenset[str]]  # member key -> nodes it can depart loaded
    empty_nodes: dict[tuple[str, str, str], frozenset[str]]
    split_parents: int = 0


def build_compact_pricing(
    instance: Instance,
    ship_id: str,
    node_price: dict[str, float] | None = None,
    carried_cuts: tuple[Cut, ...] = (),
    reach: ReachIndex | None = None,
    splitting: bool = True,
    excluded: frozenset[str] = frozenset(),
) -> CompactModel | None:
    """Per-ship compact pricing model: path rows, load-node capacities,
    origin/destination gates, split caps, empty pairs and carried cuts.
    Returns None when exclusions cut every start->sink path."""
    reach = reach or build_reach_index(instance)
    node_price = node_price or {}
    ins = instance
    ship = ins.ship_by_id[ship_id]
    sink = ins.sink
    if ship.start_visit in excluded:
        return None
    model = LinearModel(f"compact[{ship_id}]")

    yvars: dict[tuple[str, str], int] = {}
    for a in ins.arcs:
        if not reach.can_reach(ship.start_visit, a.src):
            continue
        if a.src in excluded or a.dst in excluded:
            continue
        cost = a.cost_for(ship.ship_type)
        fee = 0.0 if a.dst == sink else ins.visit_by_id[a.dst].port_fee
        price = 0.0 if a.dst == sink else node_price.get(a.dst, 0.0)
        yvars[(a.src, a.dst)] = model.add_var(
            0.0, 1.0, obj=-(cost + fee + price), integer=True, name=f"y[{a.src},{a.dst}]"
        )

    start_coeffs = {
        yvars[(a.src, a.dst)]: 1.0
        for a in ins.out_arcs[ship.start_visit]
        if (a.src, a.dst) in yvars
    }
    if not start_coeffs:
        return None
    model.add_constr(start_coeffs, EQ, 1.0, "start")
    model.add_constr(
        {yvars[(a.src, a.dst)]: 1.0 for a in ins.in_arcs[sink] if (a.src, a.dst) in yvars},
        EQ, 1.0, "sink",
    )
    for v in ins.visits:
        if v.id == ship.start_visit:
            continue
        coeffs: dict[int, float] = {}
        for a in ins.in_arcs[v.id]:
            k = yvars.get((a.src, a.dst))
            if k is not None:
                coeffs[k] = coeffs.get(k, 0.0) + 1.0
        for a in ins.out_arcs[v.id]:
            k = yvars.get((a.src, a.dst))
            if k is not None:
                coeffs[k] = coeffs.get(k, 0.0) - 1.0
        if coeffs:
            model.add_constr(coeffs, EQ, 0.0, f"cons[{v.id}]")

    members = _members_for_ship(ins, reach, ship_id, splitting)
    reachable_members = []
    xvars: dict[str, int] = {}
    carry_nodes: dict[str, frozenset[str]] = {}
    gate_arcs: dict[str, frozenset[tuple[str, str]]] = {}
    for mem in members:
        # cut membership is exclusion-independent so carried cuts stay valid
        # when a pricing round sees the full graph again
        carry_nodes[mem.key] = frozenset(
            i
            for (i, j) in reach.carry_arc_set(mem.origin, mem.destinations)
            if reach.can_reach(ship.start_visit, i)
        )
        arcs = frozenset(
            (i, j) for (i, j) in reach.arc_set(mem.origin, mem.destinations)
            if (i, j) in yvars
        )
        if not arcs:
            continue
        gate_arcs[mem.key] = arcs
        cap = ship.capacity_rf if mem.cargo_type == "rf" else ship.capacity_dc
        coef = mem.revenue - ins.visit_by_id[mem.origin].move_cost - mem.unload_cost
        xvars[mem.key] = model.add_var(
            0.0, min(mem.amount, cap), obj=coef, name=f"x[{mem.key}]"
        )
        reachable_members.append(mem)
    member_by_key = {m.key: m for m in members}

    # empty-equipment pair variables, one per reachable (surplus, deficit)
    evars: dict[tuple[str, str, str], int] = {}
    empty_nodes: dict[tuple[str, str, str], frozenset[str]] = {}
    empty_gate_arcs: dict[tuple[str, str, str], frozenset[tuple[str, str]]] = {}
    surpluses = [p for p in ins.empty_points if p.amount > 0]
    deficits = [p for p in ins.empty_points if p.amount < 0]
    for sp in surpluses:
        if not reach.can_reach(ship.start_visit, sp.visit):
            continue
        for dp in deficits:
            if dp.cargo_type != sp.cargo_type or sp.visit == dp.visit:
                continue
            if not reach.can_reach(sp.visit, dp.visit):
                continue
            q = sp.cargo_type
            key = (q, sp.visit, dp.visit)
            full_arcs = reach.arc_set(sp.visit, {dp.visit})
            empty_nodes[key] = frozenset(
                i for (i, j) in full_arcs if reach.can_reach(ship.start_visit, i)
            )
            if sp.visit in excluded or dp.visit in excluded:
                continue
            pair_arcs = frozenset((i, j) for (i, j) in full_arcs if (i, j) in yvars)
            if not pair_arcs:
                continue
            coef = (
                ins.empty_revenue[q]
                - ins.visit_by_id[sp.visit].move_cost
                - ins.visit_by_id[dp.visit].move_cost
            )
            evars[key] = model.add_var(
                0.0, min(sp.amount, -dp.amount, ship.capacity_dc), obj=coef,
                name=f"e[{q},{sp.visit},{dp.visit}]",
            )
            empty_gate_arcs[key] = pair_arcs

    # an empty pair moves only if the ship leaves its surplus and enters its
    # deficit along arcs the pair can travel
    for key, var in sorted(evars.items()):
        q, src, dst = key
        bound = model.ub[var]
        out_gate = {yvars[(i, j)]: -bound for (i, j) in empty_gate_arcs[key] if i == src}
        out_gate[var] = 1.0
        model.add_constr(out_gate, LE, 0.0, f"egate_o[{q},{src},{dst}]")
        in_gate = {yvars[(i, j)]: -bound for (i, j) in empty_gate_arcs[key] if j == dst}
        in_gate[var] = 1.0
        model.add_constr(in_gate, LE, 0.0, f"egate_d[{q},{src},{dst}]")

    # load-node capacity rows: everything picked up at k departs aboard
    load_nodes: dict[str, tuple[list[str], list[tuple[str, str, str]]]] = {}
    for mem in reachable_members:
        load_nodes.setdefault(mem.origin, ([], []))[0].append(mem.key)
    for key in evars:
        load_nodes.setdefault(key[1], ([], []))[1].append(key)
    for k in sorted(load_nodes):
        dkeys, ekeys = load_nodes[k]
        outflow = {
            yvars[(a.src, a.dst)]: 1.0
            for a in ins.out_arcs[k]
            if a.dst != sink and (a.src, a.dst) in yvars
        }
        total = {xvars[d]: 1.0 for d in dkeys}
        total.update({evars[e]: 1.0 for e in ekeys})
        for y, c in outflow.items():
            total[y] = -ship.capacity_dc
        model.add_constr(total, LE, 0.0, f"load_dc[{k}]")
        rf = {xvars[d]: 1.0 for d in dkeys if member_by_key[d].cargo_type == "rf"}
        if rf:
            for y in outflow:
                rf[y] = -ship.capacity_rf
            model.add_constr(rf, LE, 0.0, f"load_rf[{k}]")

    # origin / destination gates per member
    for mem in reachable_members:
        cap = ship.capacity_rf if mem.cargo_type == "rf" else ship.capacity_dc
        bound = min(mem.amount, cap)
        out_gate = {
            yvars[(i, j)]: -bound
            for (i, j) in gate_arcs[mem.key]
            if i == mem.origin
        }
        out_gate[xvars[mem.key]] = 1.0
        model.add_constr(out_gate, LE, 0.0, f"gate_o[{mem.key}]")
        in_gate = {
            yvars[(i, j)]: -bound
            for (i, j) in gate_arcs[mem.key]
            if j in mem.destinations
        }
        in_gate[xvars[mem.key]] = 1.0
        model.add_constr(in_gate, LE, 0.0, f"gate_d[{mem.key}]")

    # shared availability for split families
    by_parent: dict[str, list[str]] = {}
    for mem in reachable_members:
        by_parent.setdefault(mem.demand, []).append(mem.key)
    split_parents = 0
    for parent, keys in sorted(by_parent.items()):
        if len(keys) > 1:
            split_parents += 1
            model.add_constr(
                {xvars[k]: 1.0 for k in keys}, LE, ins.demand_by_id[parent].amount,
                f"avail[{parent}]",
            )

    # empty supply / deficit conservation
    by_src: dict[tuple[str, str], list] = {}
    by_dst: dict[tuple[str, str], list] = {}
    for (q, src, dst), var in evars.items():
        by_src.setdefault((q, src), []).append(var)
        by_dst.setdefault((q, dst), []).append(var)
    for p in surpluses:
        group = by_src.get((p.cargo_type, p.visit), [])
        if len(group) > 1:
            model.add_constr({v: 1.0 for v in group}, LE, p.amount, f"sup[{p.cargo_type},{p.visit}]")
    for p in deficits:
        group = by_dst.get((p.cargo_type, p.visit), [])
        if len(group) > 1:
            model.add_constr({v: 1.0 for v in group}, LE, -p.amount, f"def[{p.cargo_type},{p.visit}]")

    ctx = CompactModel(
        model=model,
        ship=ship,
        yvars=yvars,
        xvars=xvars,
        evars=evars,
        members=member_by_key,
        node_price=dict(node_price),
        carry_nodes=carry_nodes,
        empty_nodes=empty_nodes,
        split_parents=split_parents,
    )
    for cut in carried_cuts:
        model.add_constr(*_cut_row(ctx, cut))
    return ctx


def _cut_row(ctx: CompactModel, cut: Cut):
    coeffs = {ctx.xvars[k]: 1.0 for k in cut.demand_keys if k in ctx.xvars}
    for e in cut.empty_keys:
        if e in ctx.evars:
            coeffs[ctx.evars[e]] = 1.0
    return coeffs, LE, cut.rhs, f"lazy[{cut.scope},{cut.node}]"


def _trace(ctx: CompactModel, x) -> tuple[str, ...]:
    path = [ctx.ship.start_visit]
    # follow the unique outgoing used arc until the sink
    heads = {}
    for (i, j), var in ctx.yvars.items():
        if x[var] > 0.5:
            heads[i] = j
    while path[-1] in heads:
        path.append(heads[path[-1]])
    return tuple(path)


def separate_cuts(ctx: CompactModel, x, pool_keys: frozenset = frozenset()) -> list[Cut]:
    """Replay the candidate path tracking onboard load per scope; emit one
    cut per (node, scope) where a capacity is exceeded."""
    ship = ctx.ship
    path = _trace(ctx, x)
    loads: dict[str, float] = {}
    for key, var in ctx.xvars.items():
        val = float(x[var])
        if val > FLOW_EPS:
            loads[key] = val
    eloads: dict[tuple[str, str, str], float] = {}
    for key, var in ctx.evars.items():
        val = float(x[var])
        if val > FLOW_EPS:
            eloads[key] = val

    aboard: dict[str, float] = {}
    aboard_e: dict[tuple[str, str, str], float] = {}
    cuts: list[Cut] = []
    emitted: set[tuple[str, str]] = set()
    for node in path[:-1]:
        for key in list(aboard):
            if node in ctx.members[key].destinations:
                del aboard[key]
        for key in list(aboard_e):
            if key[2] == node:
                del aboard_e[key]
        for key, val in loads.items():
            if ctx.members[key].origin == node:
                aboard[key] = val
        for key, val in eloads.items():
            if key[1] == node:
                aboard_e[key] = val

        total = sum(aboard.values()) + sum(aboard_e.values())
        rf = sum(v for k, v in aboard.items() if ctx.members[k].cargo_type == "rf")
        if total > ship.capacity_dc + lp.TOL_FEAS and (node, "dc") not in emitted:
            if (node, "dc") in pool_keys:
                raise RuntimeError(f"carried cut at {node!r} failed to bind (dc scope)")
            emitted.add((node, "dc"))
            cuts.append(
                Cut(
                    ship=ship.id,
                    node=node,
                    scope="dc",
                    demand_keys=tuple(
                        k for k in sorted(ctx.members) if node in ctx.carry_nodes[k]
                    ),
                    empty_keys=tuple(
                        e for e in sorted(ctx.empty_nodes) if node in ctx.empty_nodes[e]
                    ),
                    rhs=ship.capacity_dc,
                )
            )
        if rf > ship.capacity_rf + lp.TOL_FEAS and (node, "rf") not in emitted:
            if (node, "rf") in pool_keys:
                raise RuntimeError(f"carried cut at {node!r} failed to bind (rf scope)")
            emitted.add((node, "rf"))
            cuts.append(
                Cut(
                    ship=ship.id,
                    node=node,
                    scope="rf",
                    demand_keys=tuple(
                        k
                        for k in sorted(ctx.members)
                        if ctx.members[k].cargo_type == "rf" and node in ctx.carry_nodes[k]
                    ),
                    empty_keys=(),
                    rhs=ship.capacity_rf,
                )
            )
    return cuts


def replay_column(ctx: CompactModel, x) -> tuple[tuple[str, ...], list[DemandFlow], list[EmptyFlow]]:
    """Path plus realized flows: members unload at the first visited member
    destination after their origin."""
    path = _trace(ctx, x)
    pos = {node: k for k, node in enumerate(path)}
    flows: dict[tuple[str, str], float] = {}
    for key, var in ctx.xvars.items():
        val = float(x[var])
        if val <= FLOW_EPS:
            continue
        mem = ctx.members[key]
        o = pos.get(mem.origin)
        if o is None:
            raise RuntimeError(f"member {key} loaded off-path")
        stops = sorted(p for d in mem.destinations if (p := pos.get(d)) is not None and p > o)
        if not stops:
            raise RuntimeError(f"member {key} has no destination on path")
        dest = path[stops[0]]
        flows[(mem.demand, dest)] = flows.get((mem.demand, dest), 0.0) + val
    empty_flows = [
        EmptyFlow(q, ctx.ship.id, src, dst, float(x[var]))
        for (q, src, dst), var in sorted(ctx.evars.items())
        if x[var] > FLOW_EPS
    ]
    demand_flows = [
        DemandFlow(mid, ctx.ship.id, dest, amt) for (mid, dest), amt in sorted(flows.items())
    ]
    return path, demand_flows, empty_flows


# -- pricing engine -----------------------------------------------------------------


class CompactPricing:
    """Pricing engine with per-ship cut pools carried across rounds."""

    def __init__(self, instance: Instance, reach: ReachIndex, splitting: bool = True):
        self.instance = instance
        self.reach = reach
        self.splitting = splitting
        self.pools: dict[str, list[Cut]] = {s.id: [] for s in instance.ships}
        self.pool_keys: dict[str, set[tuple[str, str]]] = {s.id: set() for s in instance.ships}
        self.model_sizes: dict[str, tuple[int, int, int]] = {}
        self.split_counts: dict[str, int] = {}
        self.bnb_nodes = 0
        self.incumbent_log: list[tuple[str, tuple[str, ...], dict[str, float]]] = []

    def price(
        self,
        ship_id: str,
        node_price: dict[str, float],
        excluded: frozenset[str],
        stop_above: float | None = None,
        time_limit: float | None = None,
    ):
        ins = self.instance
        ctx = build_compact_pricing(
            ins,
            ship_id,
            node_price,
            tuple(self.pools[ship_id]),
            self.reach,
            self.splitting,
            excluded,
        )
        if ctx is None:
            return None, -math.inf
        if ship_id not in self.model_sizes:
            self.model_sizes[ship_id] = ctx.model.size_triple()
            self.split_counts[ship_id] = ctx.split_parents

        pool_keys = frozenset(self.pool_keys[ship_id])

        def on_candidate(x):
            new_cuts = separate_cuts(ctx, x, pool_keys)
            rows = []
            for cut in new_cuts:
                self.pools[ship_id].append(cut)
                self.pool_keys[ship_id].add((cut.node, cut.scope))
                rows.append(lp.Constraint(*_cut_row(ctx, cut)))
            return rows

        mip = lp.solve_mip(
            ctx.model, on_candidate=on_candidate, stop_above=stop_above, time_limit=time_limit
        )
        self.bnb_nodes += mip.nodes
        mip = _usable_pricing_result(mip, stop_above)
        if mip is None:
            return None, -math.inf
        start = ins.ship_by_id[ship_id].start_visit
        value = mip.objective - (node_price or {}).get(start, 0.0)
        path, flows, empty_flows = replay_column(ctx, mip.x)
        col = Column(
            ship=ship_id,
            path=path,
            nodes=frozenset(path[:-1]),
            flows=flows,
            empty_flows=empty_flows,
        )
        col.profit = evaluate_objective(
            ins,
            Solution(
                "pricing", OPTIMAL,
                ship_paths={ship_id: path},
                demand_flows=flows,
                empty_flows=empty_flows,
            ),
        )
        self.incumbent_log.append((ship_id, path, {k: float(mip.x[v]) for k, v in ctx.xvars.items()}))
        return col, value

    def fill_diagnostics(self, diag: Diagnostics) -> None:
        for sid, pool in self.pools.items():
            dc = sum(1 for c in pool if c.scope == "dc")
            rf = sum(1 for c in pool if c.scope == "rf")
            if dc:
                diag.cuts_dc[sid] = dc
            if rf:
                diag.cuts_rf[sid] = rf
        diag.splits = sum(self.split_counts.values())
        if self.model_sizes:
            sizes = list(self.model_sizes.values())
            diag.model_rows = round(sum(s[0] for s in sizes) / len(sizes))
            diag.model_cols = round(sum(s[1] for s in sizes) / len(sizes))
            diag.model_nonzeros = round(sum(s[2] for s in sizes) / len(sizes))


def run_colgen_lazy(instance: Instance, config: CgConfig | None = None) -> Solution:
    """Column generation with the compact lazy-constraint pricing engine."""
    config = config or CgConfig()
    config.pricing = "compact"
    reach = build_reach_index(instance)
    engine = CompactPricing(instance, reach, splitting=config.splitting)
    sol = run_column_generation(instance, config, engine=engine)
    return sol


def capacity_violations(instance: Instance, solution: Solution) -> list[str]:
    """Replay a solution's flows along each ship path and report every leg
    where a capacity scope is exceeded (empty string list means sound)."""
    out: list[str] = []
    for sid, path in solution.ship_paths.items():
        ship = instance.ship_by_id[sid]
        pos = {node: k for k, node in enumerate(path)}
        legs_total = [0.0] * max(len(path) - 1, 0)
        legs_rf = [0.0] * max(len(path) - 1, 0)
        for f in solution.demand_flows:
            if f.ship != sid:
                continue
            m = instance.demand_by_id[f.demand]
            for leg in range(pos[m.origin], pos[f.destination]):
                legs_total[leg] += f.amount
                if m.cargo_type == "rf":
                    legs_rf[leg] += f.amount
        for f in solution.empty_flows:
            if f.ship != sid:
                continue
            for leg in range(pos[f.src], pos[f.dst]):
                legs_total[leg] += f.amount  # empties never use reefer plugs
        for leg in range(len(path) - 1):
            if legs_total[leg] > ship.capacity_dc + lp.TOL_FEAS:
                out.append(
                    f"{sid}: total load {legs_total[leg]:.3f} > {ship.capacity_dc} "
                    f"on {path[leg]}->{path[leg + 1]}"
                )
            if legs_rf[leg] > ship.capacity_rf + lp.TOL_FEAS:
                out.append(
                    f"{sid}: reefer load {legs_rf[leg]:.3f} > {ship.capacity_rf} "
                    f"on {path[leg]}->{path[leg + 1]}"
                )
    return out

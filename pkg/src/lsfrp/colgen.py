"""Dantzig-Wolfe column generation over ship-path columns.

The restricted master problem selects one path column per ship subject to
node-disjointness; pricing solves a per-ship profit maximization with the
master duals priced into node entries.  Two pricing engines plug in behind
the same interface: the arc-flow single-ship model built here, and the
compact lazy-constraint model from lsfrp.lazy.

The relaxed master is integral whenever all ships share one type; for
mixed fleets a fallback branches on (visit, ship type) usage.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

from . import lp
from .formulations import _cargo_objective, evaluate_objective
from .instance import Instance, ReachIndex, build_reach_index, path_count
from .lp import EQ, GE, LE, LinearModel
from .solution import (
    NO_DISJOINT_ROUTING,
    OPTIMAL,
    TIME_LIMIT,
    DemandFlow,
    Diagnostics,
    EmptyFlow,
    Solution,
)


@dataclass
class Column:
    ship: str
    path: tuple[str, ...]  # start .. sink
    nodes: frozenset[str]  # visits used, sink excluded; empty for dummies
    flows: list[DemandFlow] = field(default_factory=list)
    empty_flows: list[EmptyFlow] = field(default_factory=list)
    profit: float = 0.0  # raw single-ship profit, duals stripped
    is_dummy: bool = False


@dataclass
class MasterDuals:
    pi: dict[str, float]  # per-ship convexity duals, free sign
    mu: dict[str, float]  # per-visit node-once duals
    branch: dict[tuple[str, str], float] = field(default_factory=dict)  # (visit, type)

    def node_price(self, visit: str, ship_type: str) -> float:
        return self.mu.get(visit, 0.0) + self.branch.get((visit, ship_type), 0.0)


@dataclass
class CgConfig:
    pricing: str = "arcflow"  # or "compact"
    splitting: bool = True  # compact engine only
    resolve_each_column: bool = True  # re-solve RMP after every improving column
    time_limit: float | None = None
    oracle_budget: int = 10**6  # unused here; carried for CLI symmetry
    log: "object" = None  # callable taking one machine-parsable progress line


@dataclass
class _BranchState:
    excluded: frozenset[tuple[str, str]] = frozenset()  # (visit, ship_type) banned
    required: tuple[tuple[str, str], ...] = ()  # (visit, ship_type) must be used


def dummy_profit(instance: Instance) -> float:
    """Cost of the artificial direct source->sink column; strictly dominated
    by any real routing so it only appears when no disjoint routing exists."""
    total = 0.0
    for a in instance.arcs:
        for _, c in a.sail_cost:
            total += abs(c)
    for v in instance.visits:
        total += abs(v.port_fee)
    for m in instance.demands:
        total += m.amount * m.revenue
    for p in instance.empty_points:
        total += abs(p.amount) * max(instance.empty_revenue.values(), default=0.0)
    return -(total * 10.0) - 1.0


def make_dummy(instance: Instance, ship_id: str) -> Column:
    ship = instance.ship_by_id[ship_id]
    return Column(
        ship=ship_id,
        path=(ship.start_visit, instance.sink),
        nodes=frozenset(),
        profit=dummy_profit(instance),
        is_dummy=True,
    )


# -- restricted master problem ----------------------------------------------------


def _build_rmp(
    instance: Instance,
    columns: list[Column],
    relax: bool,
    state: _BranchState,
) -> tuple[LinearModel, list[int]]:
    model = LinearModel("rmp")
    zvars = []
    for k, col in enumerate(columns):
        banned = any(
            instance.ship_by_id[col.ship].ship_type == t and node in col.nodes
            for (node, t) in state.excluded
        )
        ub = 0.0 if banned else 1.0
        zvars.append(
            model.add_var(0.0, ub, obj=col.profit, integer=not relax, name=f"z{k}")
        )
    by_ship: dict[str, list[int]] = {s.id: [] for s in instance.ships}
    for k, col in enumerate(columns):
        by_ship[col.ship].append(k)
    for s in instance.ships:
        if not by_ship[s.id]:
            raise ValueError(f"ship {s.id!r} has no column")
        model.add_constr({zvars[k]: 1.0 for k in by_ship[s.id]}, EQ, 1.0, f"conv[{s.id}]")
    for v in instance.visits:
        coeffs = {
            zvars[k]: 1.0 for k, col in enumerate(columns) if v.id in col.nodes
        }
        if coeffs:
            model.add_constr(coeffs, LE, 1.0, f"once[{v.id}]")
    for (node, t) in state.required:
        coeffs = {
            zvars[k]: 1.0
            for k, col in enumerate(columns)
            if node in col.nodes and instance.ship_by_id[col.ship].ship_type == t
        }
        # artificial keeps the row feasible until pricing covers it
        art = model.add_var(0.0, 1.0, obj=dummy_profit(instance), name=f"art[{node},{t}]")
        coeffs[art] = 1.0
        model.add_constr(coeffs, GE, 1.0, f"req[{node},{t}]")
    return model, zvars


def solve_rmp(
    instance: Instance,
    columns: list[Column],
    relax: bool = True,
    state: _BranchState | None = None,
) -> tuple[lp.LpSolution | lp.MipSolution, MasterDuals | None]:
    """Solve the master over the given columns; duals returned when relaxed."""
    state = state or _BranchState()
    model, zvars = _build_rmp(instance, columns, relax, state)
    if relax:
        sol = lp.solve_lp(model)
        if sol.status != lp.OPTIMAL:
            raise RuntimeError(f"relaxed master is {sol.status}")
        n_ship = len(instance.ships)
        pi = {s.id: float(sol.duals[k]) for k, s in enumerate(instance.ships)}
        mu: dict[str, float] = {}
        row = n_ship
        for v in instance.visits:
            if any(v.id in col.nodes for col in columns):
                mu[v.id] = float(sol.duals[row])
                row += 1
        branch = {}
        for (node, t) in state.required:
            branch[(node, t)] = float(sol.duals[row])
            row += 1
        return sol, MasterDuals(pi, mu, branch)
    return lp.solve_mip(model), None


# -- pricing engines ----------------------------------------------------------------


def _usable_pricing_result(mip: lp.MipSolution, stop_above: float | None):
    """A pricing solve is usable when exact, early-stopped, or timed out
    with an incumbent that already clears the reduced-cost threshold;
    anything else on timeout aborts the run (no certificate possible)."""
    if mip.status in (lp.OPTIMAL, lp.STOPPED):
        return mip
    if mip.status == lp.TIME_LIMIT:
        if (
            mip.x is not None
            and stop_above is not None
            and mip.objective > stop_above
        ):
            return mip
        raise lp.SolveTimeLimit("pricing ran out of time")
    return None


class ArcFlowPricing:
    """Single-ship pricing on the revised arc-flow model with node prices."""

    def __init__(self, instance: Instance, reach: ReachIndex):
        self.instance = instance
        self.reach = reach
        if instance.empty_points:
            raise ValueError(
                "arc-flow pricing does not model empty equipment; use compact pricing"
            )
        self.model_sizes: dict[str, tuple[int, int, int]] = {}
        self.bnb_nodes = 0

    def _build(self, ship, node_price, excluded):
        ins, reach = self.instance, self.reach
        sink = ins.sink
        model = LinearModel(f"price[{ship.id}]")
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

        xvars: dict[tuple[str, str, str], int] = {}
        for mid in sorted(reach.movable[ship.id]):
            m = ins.demand_by_id[mid]
            cap = ship.capacity_rf if m.cargo_type == "rf" else ship.capacity_dc
            for (i, j) in sorted(reach.demand_arcs[mid]):
                if (i, j) in yvars:
                    xvars[(mid, i, j)] = model.add_var(
                        0.0, min(m.amount, cap), obj=_cargo_objective(ins, mid, i, j),
                        name=f"x[{mid},{i},{j}]",
                    )

        # routing rows
        start_coeffs = {
            yvars[(a.src, a.dst)]: 1.0
            for a in ins.out_arcs[ship.start_visit]
            if (a.src, a.dst) in yvars
        }
        if not start_coeffs:
            return None, None, None
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

        # capacities, availability, conservation, linking
        arcs_with_cargo = sorted({(i, j) for (_, i, j) in xvars})
        for (i, j) in arcs_with_cargo:
            rf, total = {}, {}
            for m in ins.demands:
                v = xvars.get((m.id, i, j))
                if v is None:
                    continue
                total[v] = 1.0
                if m.cargo_type == "rf":
                    rf[v] = 1.0
            yj = yvars[(i, j)]
            if rf:
                rf[yj] = -ship.capacity_rf
                model.add_constr(rf, LE, 0.0, f"cap_rf[{i},{j}]")
            total[yj] = -ship.capacity_dc
            model.add_constr(total, LE, 0.0, f"cap_dc[{i},{j}]")
        for mid in sorted(reach.movable[ship.id]):
            m = ins.demand_by_id[mid]
            coeffs = {}
            for a in ins.out_arcs[m.origin]:
                v = xvars.get((mid, a.src, a.dst))
                if v is not None:
                    coeffs[v] = 1.0
                yj = yvars.get((a.src, a.dst))
                if yj is not None:
                    coeffs[yj] = coeffs.get(yj, 0.0) - m.amount
            if coeffs:
                model.add_constr(coeffs, LE, 0.0, f"avail[{mid}]")
        by_demand: dict[str, dict[str, tuple[list, list]]] = {}
        for (mid, i, j), var in xvars.items():
            nodes = by_demand.setdefault(mid, {})
            nodes.setdefault(i, ([], []))[1].append(var)
            nodes.setdefault(j, ([], []))[0].append(var)
        for mid, nodes in sorted(by_demand.items()):
            m = ins.demand_by_id[mid]
            for node, (inflow, outflow) in sorted(nodes.items()):
                if node == m.origin:
                    continue
                coeffs = {}
                for v in inflow:
                    coeffs[v] = coeffs.get(v, 0.0) + 1.0
                for v in outflow:
                    coeffs[v] = coeffs.get(v, 0.0) - 1.0
                if not coeffs:
                    continue
                sense = GE if node in m.destinations else EQ
                model.add_constr(coeffs, sense, 0.0, f"flow[{mid},{node}]")
        for (mid, i, j), v in xvars.items():
            m = ins.demand_by_id[mid]
            cap = ship.capacity_rf if m.cargo_type == "rf" else ship.capacity_dc
            model.add_constr(
                {v: 1.0, yvars[(i, j)]: -min(m.amount, cap)}, LE, 0.0, f"link[{mid},{i},{j}]"
            )
        return model, yvars, xvars

    def price(
        self,
        ship_id: str,
        node_price: dict[str, float],
        excluded: frozenset[str],
        stop_above: float | None = None,
        time_limit: float | None = None,
    ):
        """Best column for the ship under the given node prices, or None if
        no start->sink path survives the exclusions.  With stop_above set,
        the search may return any column whose model value clears it."""
        ins = self.instance
        ship = ins.ship_by_id[ship_id]
        if ship.start_visit in excluded:
            return None, -math.inf
        built = self._build(ship, node_price, excluded)
        if built[0] is None:
            return None, -math.inf
        model, yvars, xvars = built
        if ship_id not in self.model_sizes:
            self.model_sizes[ship_id] = model.size_triple()
        mip = lp.solve_mip(model, stop_above=stop_above, time_limit=time_limit)
        self.bnb_nodes += mip.nodes
        mip = _usable_pricing_result(mip, stop_above)
        if mip is None:
            return None, -math.inf
        value = mip.objective - node_price.get(ship.start_visit, 0.0)

        # trace path and net deliveries
        path = [ship.start_visit]
        while path[-1] != ins.sink:
            nxt = None
            for a in ins.out_arcs[path[-1]]:
                k = yvars.get((a.src, a.dst))
                if k is not None and mip.x[k] > 0.5:
                    nxt = a.dst
                    break
            if nxt is None:
                raise RuntimeError("pricing path broke")
            path.append(nxt)
        delivered: dict[tuple[str, str], float] = {}
        for (mid, i, j), var in xvars.items():
            val = float(mip.x[var])
            if abs(val) < 1e-5:
                continue
            m = ins.demand_by_id[mid]
            if j in m.destinations:
                delivered[(mid, j)] = delivered.get((mid, j), 0.0) + val
            if i in m.destinations:
                delivered[(mid, i)] = delivered.get((mid, i), 0.0) - val
        flows = [
            DemandFlow(mid, ship_id, dest, amt)
            for (mid, dest), amt in sorted(delivered.items())
            if amt > 1e-5
        ]
        col = Column(
            ship=ship_id,
            path=tuple(path),
            nodes=frozenset(path[:-1]),
            flows=flows,
            profit=0.0,
        )
        col.profit = evaluate_objective(ins, Solution("pricing", OPTIMAL, ship_paths={ship_id: col.path}, demand_flows=flows))
        return col, value

    def fill_diagnostics(self, diag: Diagnostics) -> None:
        if self.model_sizes:
            sizes = list(self.model_sizes.values())
            diag.model_rows = round(sum(s[0] for s in sizes) / len(sizes))
            diag.model_cols = round(sum(s[1] for s in sizes) / len(sizes))
            diag.model_nonzeros = round(sum(s[2] for s in sizes) / len(sizes))


# -- heuristic initial columns -------------------------------------------------------


def initial_columns(
    instance: Instance,
    reach: ReachIndex | None = None,
    engine=None,
    time_limit: float | None = None,
) -> list[Column]:
    """Greedy start: ships in ascending path-count order, each priced with
    zero duals on the graph minus nodes already claimed; dummy fallback."""
    reach = reach or build_reach_index(instance)
    if engine is None:
        engine = ArcFlowPricing(instance, reach)
    order = sorted(instance.ships, key=lambda s: (path_count(instance, s.id), _ship_index(instance, s.id)))
    used: set[str] = set()
    out: list[Column] = []
    for ship in order:
        col, _ = engine.price(
            ship.id, {}, frozenset(used - {ship.start_visit}), time_limit=time_limit
        )
        if col is None:
            out.append(make_dummy(instance, ship.id))
        else:
            out.append(col)
            used |= col.nodes
    return out


def _ship_index(instance: Instance, ship_id: str) -> int:
    for k, s in enumerate(instance.ships):
        if s.id == ship_id:
            return k
    raise KeyError(ship_id)


def price_ship(
    instance: Instance,
    ship_id: str,
    duals: MasterDuals,
    engine,
    state: _BranchState | None = None,
    rc_tol: float = 1e-6,
    exact: bool = True,
    time_limit: float | None = None,
) -> Column | None:
    """One pricing round; a column comes back only when its reduced cost
    clears the tolerance.

    With exact=False the pricing search may stop at the first column that
    already clears the tolerance; returning None still requires the exact
    optimum, so a clean pass remains a valid LP optimality certificate.
    """
    state = state or _BranchState()
    ship = instance.ship_by_id[ship_id]
    excluded = frozenset(n for (n, t) in state.excluded if t == ship.ship_type)
    prices = {
        v.id: duals.node_price(v.id, ship.ship_type) for v in instance.visits
    }
    stop_above = None
    if not exact:
        stop_above = (
            duals.pi.get(ship_id, 0.0)
            + rc_tol
            + prices.get(ship.start_visit, 0.0)
        )
    col, value = engine.price(
        ship_id, prices, excluded, stop_above=stop_above, time_limit=time_limit
    )
    if col is None:
        return None
    reduced = value - duals.pi.get(ship_id, 0.0)
    if reduced > rc_tol:
        return col
    return None


# -- main driver ----------------------------------------------------------------------


class _TimeBudget:
    def __init__(self, limit: float | None):
        self.t0 = time.monotonic()
        self.limit = limit

    def exceeded(self) -> bool:
        return self.limit is not None and time.monotonic() - self.t0 > self.limit

    def remaining(self) -> float | None:
        if self.limit is None:
            return None
        return max(self.limit - (time.monotonic() - self.t0), 0.01)

    def elapsed(self) -> float:
        return time.monotonic() - self.t0


class ColgenTimeout(RuntimeError):
    pass


def _log_progress(config, diag, sol, columns):
    if config.log is not None:
        config.log(
            f"cg iter={diag.rmp_iterations} columns={sum(1 for c in columns if not c.is_dummy)} "
            f"bound={sol.objective:.9g}"
        )


def _cg_loop(instance, columns, engine, state, config, clock, diag):
    """Price-and-resolve until a full pass adds no column; returns the final
    relaxed master solution and its duals."""
    order = sorted(
        instance.ships,
        key=lambda s: (path_count(instance, s.id), _ship_index(instance, s.id)),
        reverse=True,
    )
    sol, duals = solve_rmp(instance, columns, relax=True, state=state)
    diag.rmp_iterations += 1
    _log_progress(config, diag, sol, columns)
    while True:
        improved = False
        for ship in order:
            if clock.exceeded():
                raise ColgenTimeout()
            rc_tol = lp.TOL_GAP * (1.0 + abs(sol.objective))
            try:
                col = price_ship(
                    instance, ship.id, duals, engine, state, rc_tol,
                    exact=False, time_limit=clock.remaining(),
                )
            except lp.SolveTimeLimit:
                raise ColgenTimeout()
            if col is not None:
                columns.append(col)
                diag.columns_generated += 1
                improved = True
                if config.resolve_each_column:
                    sol, duals = solve_rmp(instance, columns, relax=True, state=state)
                    diag.rmp_iterations += 1
                    _log_progress(config, diag, sol, columns)
        if not improved:
            return sol, duals
        if not config.resolve_each_column:
            sol, duals = solve_rmp(instance, columns, relax=True, state=state)
            diag.rmp_iterations += 1
            _log_progress(config, diag, sol, columns)


def _fractional_pairs(instance, columns, z):
    """Aggregate (visit, ship type) usage; fractional entries drive branching."""
    usage: dict[tuple[str, str], float] = {}
    for k, col in enumerate(columns):
        if z[k] <= lp.TOL_INT:
            continue
        t = instance.ship_by_id[col.ship].ship_type
        for node in col.nodes:
            usage[(node, t)] = usage.get((node, t), 0.0) + z[k]
    out = []
    for key, val in usage.items():
        frac = val - math.floor(val)
        if lp.TOL_INT < frac < 1 - lp.TOL_INT:
            out.append((abs(frac - 0.5), key, val))
    out.sort(key=lambda item: (item[0], item[1]))
    return out


def _is_integral(z: list[float]) -> bool:
    return all(abs(v - round(v)) <= lp.TOL_INT for v in z)


def _chosen_columns(columns, z) -> list[Column]:
    return [col for k, col in enumerate(columns) if z[k] > 0.5]


def _assemble(instance, method, chosen, diag, config) -> Solution:
    if any(c.is_dummy for c in chosen):
        return Solution(method=method, status=NO_DISJOINT_ROUTING, diagnostics=diag)
    sol = Solution(method=method, status=OPTIMAL, diagnostics=diag)
    total = 0.0
    for col in chosen:
        sol.ship_paths[col.ship] = col.path
        sol.demand_flows.extend(col.flows)
        sol.empty_flows.extend(col.empty_flows)
        total += col.profit
    sol.objective = total
    sol.bound = total
    return sol


def run_column_generation(
    instance: Instance,
    config: CgConfig | None = None,
    engine=None,
) -> Solution:
    """Full column generation: heuristic start, pricing loop, integrality
    check, and (visit, ship type) branching when the master is fractional."""
    config = config or CgConfig()
    clock = _TimeBudget(config.time_limit)
    diag = Diagnostics()
    method = "colgen" if config.pricing == "arcflow" else "colgen-lazy"
    reach = build_reach_index(instance)

    if engine is None:
        if config.pricing == "arcflow":
            engine = ArcFlowPricing(instance, reach)
        elif config.pricing == "compact":
            from .lazy import CompactPricing

            engine = CompactPricing(instance, reach, splitting=config.splitting)
        else:
            raise ValueError(f"unknown pricing engine {config.pricing!r}")

    if not instance.ships:
        sol = Solution(method=method, status=OPTIMAL, objective=0.0, bound=0.0, diagnostics=diag)
        return sol

    columns = [make_dummy(instance, s.id) for s in instance.ships]
    try:
        start_cols = initial_columns(instance, reach, engine, time_limit=clock.remaining())
    except lp.SolveTimeLimit:
        diag.wall_time_sec = clock.elapsed()
        return Solution(method=method, status=TIME_LIMIT, diagnostics=diag)
    columns.extend(c for c in start_cols if not c.is_dummy)
    diag.columns_generated = sum(1 for c in columns if not c.is_dummy)

    try:
        root_sol, root_duals = _cg_loop(
            instance, columns, engine, _BranchState(), config, clock, diag
        )
        z = [float(root_sol.x[k]) for k in range(len(columns))]
        root_integral = _is_integral(z)
        if root_integral:
            engine.fill_diagnostics(diag)
            diag.wall_time_sec = clock.elapsed()
            sol = _assemble(instance, method, _chosen_columns(columns, z), diag, config)
            sol.meta["root_master_integral"] = True
            return sol

        # mixed-type fallback: branch on fractional (visit, ship type) usage
        best: Solution | None = None
        best_obj = -math.inf
        types = instance.ship_types
        counter = 0
        heap: list[tuple[float, int, _BranchState]] = [(-root_sol.objective, 0, _BranchState())]
        while heap:
            neg_bound, _, state = heapq.heappop(heap)
            if -neg_bound <= best_obj + lp.TOL_GAP * (1 + abs(best_obj)):
                continue
            if clock.exceeded():
                raise ColgenTimeout()
            diag.bnb_nodes += 1
            node_sol, _ = _cg_loop(instance, columns, engine, state, config, clock, diag)
            if node_sol.objective <= best_obj + lp.TOL_GAP * (1 + abs(best_obj)):
                continue
            z = [float(node_sol.x[k]) for k in range(len(columns))]
            pairs = _fractional_pairs(instance, columns, z)
            if _is_integral(z):
                chosen = _chosen_columns(columns, z)
                cand = _assemble(instance, method, chosen, diag, config)
                val = -math.inf if cand.status != OPTIMAL else cand.objective
                if cand.status == OPTIMAL and val > best_obj:
                    best, best_obj = cand, val
                continue
            if not pairs:
                # all usage aggregates integral yet Z fractional: settle the
                # node with a master MIP over the current column pool
                mip, _ = solve_rmp(instance, columns, relax=False, state=state)
                if mip.status == lp.OPTIMAL and mip.objective > best_obj:
                    if mip.objective < node_sol.objective - lp.TOL_GAP * (1 + abs(mip.objective)):
                        raise RuntimeError(
                            "branching incomplete: master MIP below node bound"
                        )
                    z = [float(mip.x[k]) for k in range(len(columns))]
                    cand = _assemble(instance, method, _chosen_columns(columns, z), diag, config)
                    if cand.status == OPTIMAL:
                        best, best_obj = cand, cand.objective
                continue
            _, (node, t), _ = pairs[0]
            off = _BranchState(
                excluded=state.excluded | {(node, t)}, required=state.required
            )
            # requiring (node, t) shuts the node for every other type
            others = frozenset((node, t2) for t2 in types if t2 != t)
            on = _BranchState(
                excluded=state.excluded | others,
                required=state.required + ((node, t),),
            )
            counter += 1
            heapq.heappush(heap, (-node_sol.objective, counter, off))
            counter += 1
            heapq.heappush(heap, (-node_sol.objective, counter, on))

        engine.fill_diagnostics(diag)
        diag.wall_time_sec = clock.elapsed()
        if best is None:
            return Solution(method=method, status=NO_DISJOINT_ROUTING, diagnostics=diag)
        best.bound = best.objective
        best.meta["root_master_integral"] = False
        return best
    except ColgenTimeout:
        engine.fill_diagnostics(diag)
        diag.wall_time_sec = clock.elapsed()
        return Solution(method=method, status=TIME_LIMIT, diagnostics=diag)

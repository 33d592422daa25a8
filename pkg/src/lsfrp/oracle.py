"""Brute-force reference solver.

Enumerates every node-disjoint assignment of start->sink paths to ships and
prices each ship's cargo on its fixed path with a small LP built straight
from raw instance data (no formulation code reused beyond the LP kernel).
Desk-scale only: refuses when the path-count product exceeds the budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from . import lp
from .instance import Instance, ensure_valid, enumerate_paths, path_count
from .lp import LE, LinearModel
from .solution import OPTIMAL, DemandFlow, Diagnostics, EmptyFlow, Solution

DEFAULT_BUDGET = 10**6


class OracleBudgetError(RuntimeError):
    """Assignment space too large for exhaustive enumeration."""


@dataclass(frozen=True)
class PathAssignment:
    paths: tuple[tuple[str, ...], ...]  # one start->sink path per ship, in ship order


def _node_mask(instance: Instance, path: tuple[str, ...], index: dict[str, int]) -> int:
    mask = 0
    for node in path[:-1]:  # sink shared by all ships
        mask |= 1 << index[node]
    return mask


def enumerate_disjoint_paths(
    instance: Instance, budget: int = DEFAULT_BUDGET
) -> Iterator[PathAssignment]:
    """Yield every pairwise node-disjoint path assignment, lexicographic by
    ship index then path enumeration order."""
    ensure_valid(instance)
    product = 1
    for s in instance.ships:
        product *= max(path_count(instance, s.id), 1)
        if product > budget:
            raise OracleBudgetError(
                f"path assignment space exceeds budget ({product} > {budget})"
            )
    index = {v.id: k for k, v in enumerate(instance.visits)}
    per_ship = [enumerate_paths(instance, s.start_visit) for s in instance.ships]
    masks = [[_node_mask(instance, p, index) for p in paths] for paths in per_ship]

    def rec(k: int, used: int, acc: list[tuple[str, ...]]) -> Iterator[PathAssignment]:
        if k == len(per_ship):
            yield PathAssignment(tuple(acc))
            return
        for p, m in zip(per_ship[k], masks[k]):
            if used & m:
                continue
            acc.append(p)
            yield from rec(k + 1, used | m, acc)
            acc.pop()

    yield from rec(0, 0, [])


def _cargo_lp(instance: Instance, ship, path: tuple[str, ...]):
    """Optimal cargo plan for one ship on a fixed path.

    One delivery variable per (demand, visited destination) and per
    (surplus, deficit) empty pair on the path; cargo occupies the ship from
    its pickup to its drop position.
    """
    pos = {node: k for k, node in enumerate(path)}
    model = LinearModel("cargo")
    dvars: list[tuple[str, str, int, int, int, str]] = []  # demand, dest, load, drop, var, type
    for m in instance.demands:
        if m.origin not in pos:
            continue
        o = pos[m.origin]
        cap = ship.capacity_rf if m.cargo_type == "rf" else ship.capacity_dc
        stops = sorted((pos[d] for d in m.destinations if d in pos and pos[d] > o))
        for p in stops:
            dest = path[p]
            coef = m.revenue - instance.visit_by_id[m.origin].move_cost - instance.visit_by_id[dest].move_cost
            v = model.add_var(0.0, min(m.amount, cap), obj=coef, name=f"z[{m.id},{dest}]")
            dvars.append((m.id, dest, o, p, v, m.cargo_type))
        if len(stops) > 1:
            model.add_constr(
                {v: 1.0 for (_, _, _, _, v, _) in dvars[-len(stops):]}, LE, m.amount, f"a[{m.id}]"
            )
        elif len(stops) == 1:
            pass  # single variable; its upper bound already caps availability

    evars: list[tuple[str, str, str, int, int, int]] = []  # type, src, dst, load, drop, var
    surpluses = [p for p in instance.empty_points if p.amount > 0 and p.visit in pos]
    deficits = [p for p in instance.empty_points if p.amount < 0 and p.visit in pos]
    for sp in surpluses:
        for dp in deficits:
            if dp.cargo_type != sp.cargo_type or pos[dp.visit] <= pos[sp.visit]:
                continue
            q = sp.cargo_type
            coef = (
                instance.empty_revenue[q]
                - instance.visit_by_id[sp.visit].move_cost
                - instance.visit_by_id[dp.visit].move_cost
            )
            v = model.add_var(
                0.0,
                min(sp.amount, -dp.amount, ship.capacity_dc),
                obj=coef,
                name=f"e[{q},{sp.visit},{dp.visit}]",
            )
            evars.append((q, sp.visit, dp.visit, pos[sp.visit], pos[dp.visit], v))
    for sp in surpluses:
        group = [v for (q, src, _, _, _, v) in evars if src == sp.visit and q == sp.cargo_type]
        if len(group) > 1:
            model.add_constr({v: 1.0 for v in group}, LE, sp.amount, f"sup[{sp.visit}]")
    for dp in deficits:
        group = [v for (q, _, dst, _, _, v) in evars if dst == dp.visit and q == dp.cargo_type]
        if len(group) > 1:
            model.add_constr({v: 1.0 for v in group}, LE, -dp.amount, f"def[{dp.visit}]")

    # leg capacities: everything aboard between consecutive visits
    for leg in range(len(path) - 2):  # final leg enters the sink empty
        total = {}
        rf = {}
        for (_, _, load, drop, v, q) in dvars:
            if load <= leg < drop:
                total[v] = 1.0
                if q == "rf":
                    rf[v] = 1.0
        for (_, _, _, load, drop, v) in evars:
            if load <= leg < drop:
                total[v] = 1.0  # empties use total capacity only, laden reefer uses plugs
        if total:
            model.add_constr(total, LE, ship.capacity_dc, f"leg_dc[{leg}]")
        if rf:
            model.add_constr(rf, LE, ship.capacity_rf, f"leg_rf[{leg}]")

    if model.num_vars == 0:
        return 0.0, [], []
    sol = lp.solve_lp(model)
    if sol.status != lp.OPTIMAL:
        raise RuntimeError(f"cargo LP on fixed path is {sol.status}")
    flows = [
        DemandFlow(mid, ship.id, dest, float(sol.x[v]))
        for (mid, dest, _, _, v, _) in dvars
        if sol.x[v] > 1e-9
    ]
    empties = [
        EmptyFlow(q, ship.id, src, dst, float(sol.x[v]))
        for (q, src, dst, _, _, v) in evars
        if sol.x[v] > 1e-9
    ]
    return sol.objective, flows, empties


def brute_force_solve(instance: Instance, budget: int = DEFAULT_BUDGET) -> Solution:
    """Exact optimum by exhaustive assignment enumeration; ties broken by
    enumeration order."""
    ensure_valid(instance)
    index = {v.id: k for k, v in enumerate(instance.visits)}
    # cache per (ship, path) value so shared paths across assignments price once
    per_ship_paths: list[list[tuple[str, ...]]] = []
    per_ship_masks: list[list[int]] = []
    product = 1
    for s in instance.ships:
        product *= max(path_count(instance, s.id), 1)
        if product > budget:
            raise OracleBudgetError(
                f"path assignment space exceeds budget ({product} > {budget})"
            )
    for s in instance.ships:
        paths = enumerate_paths(instance, s.start_visit)
        per_ship_paths.append(paths)
        per_ship_masks.append([_node_mask(instance, p, index) for p in paths])

    cache: dict[tuple[int, int], tuple[float, list, list]] = {}

    def value(k: int, pi: int):
        key = (k, pi)
        if key not in cache:
            ship = instance.ships[k]
            path = per_ship_paths[k][pi]
            base = -instance.path_cost(ship, path)
            cargo, flows, empties = _cargo_lp(instance, ship, path)
            cache[key] = (base + cargo, flows, empties)
        return cache[key]

    best_total = -lp.INF
    best_choice: tuple[int, ...] | None = None

    n_ships = len(instance.ships)
    choice = [0] * n_ships

    def rec(k: int, used: int, acc: float) -> None:
        nonlocal best_total, best_choice
        if k == n_ships:
            if acc > best_total + 1e-12:
                best_total = acc
                best_choice = tuple(choice)
            return
        for pi, mask in enumerate(per_ship_masks[k]):
            if used & mask:
                continue
            choice[k] = pi
            rec(k + 1, used | mask, acc + value(k, pi)[0])

    rec(0, 0, 0.0)

    diag = Diagnostics()
    if best_choice is None:
        from .solution import NO_DISJOINT_ROUTING

        return Solution(method="oracle", status=NO_DISJOINT_ROUTING, diagnostics=diag)
    sol = Solution(method="oracle", status=OPTIMAL, objective=best_total, bound=best_total, diagnostics=diag)
    for k, s in enumerate(instance.ships):
        v, flows, empties = value(k, best_choice[k])
        sol.ship_paths[s.id] = per_ship_paths[k][best_choice[k]]
        sol.demand_flows.extend(flows)
        sol.empty_flows.extend(empties)
    return sol

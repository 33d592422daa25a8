import json

import pytest

from lsfrp.instance import validate
from lsfrp.io import (
    GeneratorParams,
    ParseError,
    generate_random,
    parse_instance,
    parse_solution,
    write_instance,
    write_solution,
)
from lsfrp.oracle import brute_force_solve
from lsfrp.solution import OPTIMAL, DemandFlow, Solution

from fixtures import t1, T1_OPT


def test_instance_round_trip():
    data = write_instance(t1())
    again = write_instance(parse_instance(data))
    assert again == data


def test_parse_rejects_unknown_visit():
    doc = json.loads(write_instance(t1()).decode())
    doc["arcs"].append({"from": "v0", "to": "v9", "sail_cost": {"T0": 1}})
    with pytest.raises(ParseError) as exc:
        parse_instance(json.dumps(doc))
    assert "v9" in str(exc.value)


def test_parse_rejects_malformed_json():
    with pytest.raises(ParseError):
        parse_instance(b"{not json")


def test_parse_rejects_wrong_schema():
    with pytest.raises(ParseError):
        parse_instance(json.dumps({"schema": "other-v9"}))


def test_empty_demand_list_is_valid():
    doc = json.loads(write_instance(t1()).decode())
    doc["demands"] = []
    ins = parse_instance(json.dumps(doc))
    assert validate(ins).ok
    assert not ins.demands


def test_money_must_be_integral_cents():
    ins = t1()
    bad = ins.with_empty_revenue({"dc": 10.5, "rf": 0})
    with pytest.raises(ValueError):
        write_instance(bad)


def test_generator_deterministic():
    p1 = GeneratorParams(ships=3, visits=14, demands=12, seed=1)
    p2 = GeneratorParams(ships=3, visits=14, demands=12, seed=1)
    assert write_instance(generate_random(p1)) == write_instance(generate_random(p2))
    p3 = GeneratorParams(ships=3, visits=14, demands=12, seed=2)
    assert write_instance(generate_random(p3)) != write_instance(generate_random(p1))


def test_generator_output_always_valid():
    for seed in range(25):
        p = GeneratorParams(
            ships=(seed % 4),
            visits=max(2, 5 + seed % 9),
            demands=seed % 10,
            empty_points=seed % 3,
            ship_types=1 + seed % 2,
            seed=seed,
        )
        if p.ships == 0:
            p.demands = 0
            p.empty_points = 0
        ins = generate_random(p)
        report = validate(ins)
        assert report.ok, f"seed {seed}: {report}"


def test_generator_zero_demands_pure_repositioning():
    ins = generate_random(GeneratorParams(ships=2, visits=8, demands=0, seed=3))
    sol = brute_force_solve(ins)
    assert sol.status == OPTIMAL
    assert not sol.demand_flows


def test_generator_infeasible_params():
    with pytest.raises(ValueError):
        GeneratorParams(ships=0, visits=0, demands=3, seed=0).check()
    with pytest.raises(ValueError):
        GeneratorParams(arc_density=0.0).check()
    with pytest.raises(ValueError):
        GeneratorParams(amount_range=(10, 5)).check()


def test_generator_desk_scale_oracle_budget():
    import time

    t0 = time.monotonic()
    ins = generate_random(GeneratorParams(ships=3, visits=14, demands=12, seed=11))
    sol = brute_force_solve(ins)
    assert sol.status == OPTIMAL
    assert time.monotonic() - t0 < 10.0


def test_solution_round_trip_and_objective_field():
    sol = brute_force_solve(t1())
    data = write_solution(sol)
    doc = json.loads(data.decode())
    assert doc["objective"] == T1_OPT
    again = parse_solution(data)
    assert write_solution(again) == data


def test_empty_solution_serializes():
    sol = Solution(method="oracle", status=OPTIMAL, objective=0.0, bound=0.0)
    doc = json.loads(write_solution(sol).decode())
    assert doc["objective"] == 0.0
    assert doc["ship_paths"] == {}


def test_solution_flow_fields():
    sol = Solution(
        method="x",
        status=OPTIMAL,
        objective=1.0,
        ship_paths={"s1": ("v0", "tau")},
        demand_flows=[DemandFlow("m1", "s1", "v2", 10.0)],
    )
    again = parse_solution(write_solution(sol))
    assert again.demand_flows[0].destination == "v2"
    assert again.ship_paths["s1"] == ("v0", "tau")

import math

import pytest

import senergy


def test_interval_union_and_energy():
    x = [0.0, 0.2, 0.1, 0.3, 0.7, 0.9, 0.5]
    edges = [(0, 1), (2, 3), (4, 5)]
    assert senergy.interval_union(x, edges) == [(0.0, 0.3), (0.5, 0.5), (0.7, 0.9)]
    assert abs(senergy.step_energy(x, edges, 1.0) - 0.5) <= 1e-15
    assert senergy.step_energy(x, edges, 0.5) == pytest.approx(math.sqrt(0.3) + math.sqrt(0.2), rel=1e-14)


def test_validate_step():
    assert senergy.validate_step([0.0, 1.0], [(0, 1)], [0.5, 0.5], 0.5) == ""
    assert "agent 0" in senergy.validate_step([0.0, 1.0], [(0, 1)], [0.1, 0.5], 0.25)


def test_bounds():
    assert senergy.bound_theorem1(2, 0.25, 1.0) == pytest.approx(8.0)
    assert senergy.bound_theorem1(4, 0.25, 0.5) == pytest.approx(8192.0)
    assert senergy.ineq_sx(0.5, 0.3)
    with pytest.raises(senergy.SenergyError):
        senergy.bound_theorem1(3, 0.75, 0.5)


def test_simulate_certify_reduce():
    t = senergy.simulate(5, 0.2, policy="uniform-random", steps_cap=200, seed=3)
    assert len(t) > 0
    assert t.check() == ""
    energy = senergy.energy(t, [0.5, 1.0])
    for s, e in zip([0.5, 1.0], energy):
        assert e <= senergy.bound_theorem1(5, 0.2, s)
    cert = senergy.certify(t, 0.5)
    assert cert["steps"] > 0
    assert abs(cert["conservation_gap"]) <= 1e-9 * cert["injected"]
    twist = senergy.reduce(t)
    assert twist.kind == "twist"
    assert twist.check() == ""
    again = senergy.Trace.from_jsonl(t.to_jsonl())
    assert again.to_jsonl() == t.to_jsonl()
    assert senergy.simulate(5, 0.2, policy="uniform-random", steps_cap=200, seed=3).to_jsonl() == t.to_jsonl()


def test_lower_bound():
    t = senergy.lower_bound_trajectory(2, 0.25, 0.1)
    assert senergy.comm_count(t, 0.1) == 4
    assert senergy.lb_recurrence_b(2, 0.5, 0.25) == 2
    assert senergy.lb_recurrence_a(2, 1.0, 0.25) == pytest.approx(2.0)
    row = senergy.sandwich(3, 0.2, 0.2**6)
    assert row["ordered"]
    assert row["lower"] <= row["measured"] <= row["upper"]


def test_kuramoto():
    after = senergy.kuramoto_step([0.0, math.pi / 3], [(0, 1)], 1.0, 0.5)
    assert abs(after[0] - 0.25 * math.sin(math.pi / 3)) <= 1e-12
    assert abs(after[1] - (math.pi / 3 - 0.25 * math.sin(math.pi / 3))) <= 1e-12

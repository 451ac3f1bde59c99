# Copyright 2024 The mess-restoration Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
from dataclasses import replace

import numpy as np
import pytest

from mess_restoration.grid import (
    DistributionSystem,
    PowerFactorError,
    PowerFlowState,
    Topology,
    balance_residuals,
    lindistflow_residual,
    reactive_from_active,
    voltage_residuals,
)

CHAIN = ["b1-b2", "b2-b3", "b3-b4"]


def chain_state() -> PowerFlowState:
    """Full restoration fed from b1 along the chain, tie open"""
    p_load = {"b2": 0.1, "b3": 0.08, "b4": 0.06}
    q_load = {"b2": 0.05, "b3": 0.04, "b4": 0.02}
    p_flow = {"b1-b2": 0.24, "b2-b3": 0.14, "b3-b4": 0.06}
    q_flow = {"b1-b2": 0.11, "b2-b3": 0.06, "b3-b4": 0.02}
    voltage = {"b1": 1.0}
    for branch, (a, b) in zip(CHAIN, [("b1", "b2"), ("b2", "b3"), ("b3", "b4")]):
        voltage[b] = voltage[a] - 0.01 * (p_flow[branch] + q_flow[branch])
    both = np.ones(2)
    return PowerFlowState(
        horizon=2,
        p_injection={"b1": 0.24 * both},
        q_injection={"b1": 0.11 * both},
        p_restored={k: v * both for k, v in p_load.items()},
        q_restored={k: v * both for k, v in q_load.items()},
        p_flow={k: v * both for k, v in p_flow.items()},
        q_flow={k: v * both for k, v in q_flow.items()},
        voltage={k: v * both for k, v in voltage.items()},
    )


def test_consistent_state(feeder: DistributionSystem) -> None:
    topo = Topology.from_closed(feeder.branch_ids, CHAIN)
    state = chain_state()
    assert lindistflow_residual(feeder, topo, state) == pytest.approx(0.0, abs=1e-12)
    assert state.voltage["b4"][0] == pytest.approx(1.0 - 0.0035 - 0.002 - 0.0008)
    assert voltage_residuals(feeder, topo, state).shape == (3, 2)


def test_residuals_locate_the_error(feeder: DistributionSystem) -> None:
    state = chain_state()
    bad_flow = dict(state.p_flow)
    bad_flow["b2-b3"] = np.array([0.14, 0.15])
    broken = PowerFlowState(
        horizon=2,
        p_injection=state.p_injection,
        q_injection=state.q_injection,
        p_restored=state.p_restored,
        q_restored=state.q_restored,
        p_flow=bad_flow,
        q_flow=state.q_flow,
        voltage=state.voltage,
    )
    p_res, q_res = balance_residuals(feeder, broken)
    assert p_res[1].tolist() == pytest.approx([0.0, -0.01])
    assert p_res[2].tolist() == pytest.approx([0.0, 0.01])
    assert np.abs(q_res).max() == pytest.approx(0.0, abs=1e-12)
    topo = Topology.from_closed(feeder.branch_ids, CHAIN)
    assert lindistflow_residual(feeder, topo, broken) == pytest.approx(0.01)


def test_closing_the_tie_adds_a_drop_equation(feeder: DistributionSystem) -> None:
    state = chain_state()
    with_tie = Topology.from_closed(feeder.branch_ids, [*CHAIN, "b1-b4"])
    residuals = voltage_residuals(feeder, with_tie, state)
    assert residuals.shape == (4, 2)
    assert residuals[3, 0] == pytest.approx(0.0063)
    empty = Topology.from_closed(feeder.branch_ids, [])
    assert voltage_residuals(feeder, empty, state).shape == (0, 2)


def test_reactive_load_keeps_power_factor() -> None:
    assert reactive_from_active(100.0, 0.8) == pytest.approx(75.0)
    assert reactive_from_active(100.0, 1.0) == 0.0
    assert reactive_from_active(0.0, 0.9) == 0.0
    assert reactive_from_active(40.0, 0.9) == pytest.approx(
        40.0 * math.sqrt(1 - 0.81) / 0.9
    )
    for power_factor in (0.0, -0.5, 1.01):
        with pytest.raises(PowerFactorError):
            reactive_from_active(1.0, power_factor)


def dense_state(
    ds: DistributionSystem,
    closed: list[str],
    p_load: dict[str, float],
    q_load: dict[str, float],
) -> PowerFlowState:
    """Flows and voltages of a tree fed from the microgrid bus, by dense solves"""
    source = ds.microgrids[0].bus
    buses = list(ds.bus_ids)
    rows = [b for b in buses if b != source]
    incidence = np.zeros((len(buses), len(closed)))
    for k, branch_id in enumerate(closed):
        branch = ds.branch(branch_id)
        incidence[buses.index(branch.from_bus), k] = 1.0
        incidence[buses.index(branch.to_bus), k] = -1.0
    reduced = incidence[[buses.index(b) for b in rows]]
    head = incidence[buses.index(source)]
    p_flow = np.linalg.solve(reduced, -np.array([p_load.get(b, 0.0) for b in rows]))
    q_flow = np.linalg.solve(reduced, -np.array([q_load.get(b, 0.0) for b in rows]))
    r = np.array([ds.branch(b).r_pu for b in closed])
    x = np.array([ds.branch(b).x_pu for b in closed])
    drop = (r * p_flow + x * q_flow) / ds.v0
    voltage = np.linalg.solve(reduced.T, drop - head * ds.v0)
    one = np.ones(1)
    return PowerFlowState(
        horizon=1,
        p_injection={source: (p_load.get(source, 0.0) + head @ p_flow) * one},
        q_injection={source: (q_load.get(source, 0.0) + head @ q_flow) * one},
        p_restored={b: v * one for b, v in p_load.items()},
        q_restored={b: v * one for b, v in q_load.items()},
        p_flow={b: v * one for b, v in zip(closed, p_flow)},
        q_flow={b: v * one for b, v in zip(closed, q_flow)},
        voltage={source: ds.v0 * one, **{b: v * one for b, v in zip(rows, voltage)}},
    )


def test_dense_solve_reproduces_the_chain(feeder: DistributionSystem) -> None:
    expected = chain_state()
    p_load = {b: float(v[0]) for b, v in expected.p_restored.items()}
    q_load = {b: float(v[0]) for b, v in expected.q_restored.items()}
    state = dense_state(feeder, CHAIN, p_load, q_load)
    for bus, voltage in expected.voltage.items():
        assert state.voltage[bus][0] == pytest.approx(voltage[0], abs=1e-12)
    for branch, flow in expected.p_flow.items():
        assert state.p_flow[branch][0] == pytest.approx(flow[0], abs=1e-12)


@pytest.mark.parametrize(
    "closed",
    [
        ["b1-b2", "b2-b3", "b3-b4"],
        ["b1-b2", "b2-b3", "b1-b4"],
        ["b1-b2", "b3-b4", "b1-b4"],
        ["b2-b3", "b3-b4", "b1-b4"],
    ],
)
def test_residual_vanishes_on_dense_solutions(
    feeder: DistributionSystem, closed: list[str]
) -> None:
    rng = np.random.default_rng(7)
    topo = Topology.from_closed(feeder.branch_ids, closed)
    for _ in range(20):
        p = rng.uniform(0.0, 0.2, size=3)
        q = p * rng.uniform(0.0, 0.6, size=3)
        p_load = dict(zip(["b2", "b3", "b4"], p.tolist()))
        q_load = dict(zip(["b2", "b3", "b4"], q.tolist()))
        state = dense_state(feeder, closed, p_load, q_load)
        assert lindistflow_residual(feeder, topo, state) == pytest.approx(
            0.0, abs=1e-12
        )
        assert all(v[0] <= feeder.v0 + 1e-12 for v in state.voltage.values())
        # a wrong voltage shows up as a drop residual of the same size
        shifted = dict(state.voltage)
        shifted["b3"] = shifted["b3"] - 1e-3
        broken = replace(state, voltage=shifted)
        assert lindistflow_residual(feeder, topo, broken) == pytest.approx(1e-3)

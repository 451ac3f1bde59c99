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

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .distribution_system import DistributionSystem
from .radiality import Topology


class PowerFactorError(Exception):
    pass


def reactive_from_active(p_restored: float, power_factor: float) -> float:
    """Reactive load that keeps the power factor of the bus

    :param p_restored: restored active load, any unit
    :param power_factor: in (0, 1]
    :return: reactive load in the matching unit
    """
    if not 0 < power_factor <= 1:
        raise PowerFactorError(f"Power factor {power_factor} not in (0, 1]")
    if power_factor == 1:
        return 0.0
    return p_restored * math.tan(math.acos(power_factor))


Series = Mapping[str, np.ndarray]


@dataclass(frozen=True)
class PowerFlowState:
    """LinDistFlow quantities of one scenario, each an array over intervals

    Missing entries count as zero. All values are per unit.
    """

    horizon: int
    p_injection: Series = field(default_factory=dict)
    q_injection: Series = field(default_factory=dict)
    p_restored: Series = field(default_factory=dict)
    q_restored: Series = field(default_factory=dict)
    p_flow: Series = field(default_factory=dict)
    q_flow: Series = field(default_factory=dict)
    voltage: Series = field(default_factory=dict)

    def value(self, series: Series, key: str) -> np.ndarray:
        if key in series:
            return np.asarray(series[key], dtype=float)
        return np.zeros(self.horizon)


def balance_residuals(
    ds: DistributionSystem, state: PowerFlowState
) -> tuple[np.ndarray, np.ndarray]:
    """Active and reactive nodal balance residuals, shape (buses, intervals)"""
    p_res = np.zeros((len(ds.buses), state.horizon))
    q_res = np.zeros((len(ds.buses), state.horizon))
    for row, bus in enumerate(ds.bus_ids):
        p_out = sum(
            (state.value(state.p_flow, b.branch_id) for b in ds.out_branches[bus]),
            start=np.zeros(state.horizon),
        )
        p_in = sum(
            (state.value(state.p_flow, b.branch_id) for b in ds.in_branches[bus]),
            start=np.zeros(state.horizon),
        )
        q_out = sum(
            (state.value(state.q_flow, b.branch_id) for b in ds.out_branches[bus]),
            start=np.zeros(state.horizon),
        )
        q_in = sum(
            (state.value(state.q_flow, b.branch_id) for b in ds.in_branches[bus]),
            start=np.zeros(state.horizon),
        )
        p_res[row] = (
            state.value(state.p_injection, bus)
            - state.value(state.p_restored, bus)
            - (p_out - p_in)
        )
        q_res[row] = (
            state.value(state.q_injection, bus)
            - state.value(state.q_restored, bus)
            - (q_out - q_in)
        )
    return p_res, q_res


def voltage_residuals(
    ds: DistributionSystem, topo: Topology, state: PowerFlowState
) -> np.ndarray:
    """Voltage-drop residual per closed branch, shape (closed branches, intervals)"""
    rows = []
    for branch in ds.branches:
        if not topo.closed.get(branch.branch_id, False):
            continue
        drop = state.value(state.voltage, branch.from_bus) - state.value(
            state.voltage, branch.to_bus
        )
        expected = (
            branch.r_pu * state.value(state.p_flow, branch.branch_id)
            + branch.x_pu * state.value(state.q_flow, branch.branch_id)
        ) / ds.v0
        rows.append(drop - expected)
    if not rows:
        return np.zeros((0, state.horizon))
    return np.vstack(rows)


def lindistflow_residual(
    ds: DistributionSystem, topo: Topology, state: PowerFlowState
) -> float:
    """Largest violation of the LinDistFlow equations (pu)

    Covers nodal P and Q balance at every bus and the voltage drop along every
    closed branch.
    """
    p_res, q_res = balance_residuals(ds, state)
    v_res = voltage_residuals(ds, topo, state)
    parts = [np.abs(p_res), np.abs(q_res), np.abs(v_res)]
    return float(max((part.max() for part in parts if part.size), default=0.0))

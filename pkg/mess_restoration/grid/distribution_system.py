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
from collections.abc import Iterable
from functools import cached_property

from networkx import Graph, connected_components  # type: ignore
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..scenario import LoadClass


class DistributionSystemError(Exception):
    pass


class Bus(BaseModel):
    """Load bus of a feeder

    Loads are kept in kW/kvar; everything electrical elsewhere is per unit.
    """

    bus_id: str
    feeder: str
    p_kw: float = Field(ge=0)
    q_kvar: float = 0.0
    load_class: LoadClass = LoadClass.residential
    critical: bool = False
    interruption_cost: float = Field(ge=0, description="$/kWh of unserved load")
    v_min: float = 0.95
    v_max: float = 1.05
    model_config = ConfigDict(frozen=True)

    @property
    def power_factor(self) -> float:
        apparent = math.hypot(self.p_kw, self.q_kvar)
        if apparent == 0:
            return 1.0
        return self.p_kw / apparent


class Branch(BaseModel):
    """Line section with fixed orientation ``from_bus`` -> ``to_bus``"""

    branch_id: str
    feeder: str
    from_bus: str
    to_bus: str
    r_pu: float = Field(ge=0)
    x_pu: float = Field(ge=0)
    s_max_pu: float = Field(gt=0)
    switchable: bool = True
    model_config = ConfigDict(frozen=True)


class Microgrid(BaseModel):
    """Microgrid with dispatchable generation at a feeder bus

    Powers in pu, energies in pu·h, costs in $/kWh. ``local_load_pu`` holds the
    local demand for every interval of the run.
    """

    microgrid_id: str
    site: str
    feeder: str
    bus: str
    p_max_pu: float = Field(ge=0)
    q_max_pu: float = Field(ge=0)
    e_max_pu: float = Field(ge=0)
    e_min_pu: float = Field(ge=0)
    e_init_pu: float = Field(ge=0)
    gen_cost: float = Field(ge=0)
    local_load_pu: list[float] = Field(default_factory=list)
    local_power_factor: float = Field(default=1.0, gt=0, le=1)
    local_cost: float = Field(default=10.0, ge=0)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_energy(self) -> Microgrid:
        if not self.e_min_pu <= self.e_init_pu <= self.e_max_pu:
            raise ValueError(
                f"Microgrid {self.microgrid_id}: initial energy {self.e_init_pu}"
                f" outside [{self.e_min_pu}, {self.e_max_pu}]"
            )
        if any(load < 0 for load in self.local_load_pu):
            raise ValueError(f"Microgrid {self.microgrid_id}: negative local load")
        return self

    def local_load(self, t: int) -> float:
        if not self.local_load_pu:
            return 0.0
        return self.local_load_pu[min(t, len(self.local_load_pu) - 1)]


class DistributionSystem(BaseModel):
    """All feeders of the case with their microgrids

    :param v0: microgrid bus voltage (pu)
    :param base_kva: power base for per-unit conversion
    """

    buses: list[Bus]
    branches: list[Branch]
    microgrids: list[Microgrid]
    v0: float = 1.0
    base_kva: float = 1000.0
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_references(self) -> DistributionSystem:
        bus_ids = [b.bus_id for b in self.buses]
        if len(set(bus_ids)) != len(bus_ids):
            raise ValueError("Bus ids must be unique")
        branch_ids = [b.branch_id for b in self.branches]
        if len(set(branch_ids)) != len(branch_ids):
            raise ValueError("Branch ids must be unique")
        known = set(bus_ids)
        for branch in self.branches:
            for end in (branch.from_bus, branch.to_bus):
                if end not in known:
                    raise ValueError(
                        f"Branch {branch.branch_id} references unknown bus {end}"
                    )
        for bus in self.buses:
            if not bus.v_min < self.v0 < bus.v_max:
                raise ValueError(
                    f"Bus {bus.bus_id}: voltage bounds [{bus.v_min}, {bus.v_max}]"
                    f" must enclose v0={self.v0}"
                )
        feeders_with_source = set()
        for mg in self.microgrids:
            if mg.bus not in known:
                raise ValueError(
                    f"Microgrid {mg.microgrid_id} sits at unknown bus {mg.bus}"
                )
            feeders_with_source.add(mg.feeder)
        for feeder in {b.feeder for b in self.buses}:
            if feeder not in feeders_with_source:
                raise ValueError(f"Feeder {feeder} has no microgrid bus")
        return self

    @cached_property
    def _bus_index(self) -> dict[str, Bus]:
        return {b.bus_id: b for b in self.buses}

    @cached_property
    def _branch_index(self) -> dict[str, Branch]:
        return {b.branch_id: b for b in self.branches}

    @property
    def bus_ids(self) -> tuple[str, ...]:
        return tuple(b.bus_id for b in self.buses)

    @property
    def branch_ids(self) -> tuple[str, ...]:
        return tuple(b.branch_id for b in self.branches)

    @property
    def feeders(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(b.feeder for b in self.buses))

    @cached_property
    def microgrid_buses(self) -> frozenset[str]:
        return frozenset(mg.bus for mg in self.microgrids)

    def bus(self, bus_id: str) -> Bus:
        try:
            return self._bus_index[bus_id]
        except KeyError:
            raise DistributionSystemError(f"Unknown bus {bus_id}") from None

    def branch(self, branch_id: str) -> Branch:
        try:
            return self._branch_index[branch_id]
        except KeyError:
            raise DistributionSystemError(f"Unknown branch {branch_id}") from None

    def microgrids_at(self, bus_id: str) -> tuple[Microgrid, ...]:
        return tuple(mg for mg in self.microgrids if mg.bus == bus_id)

    def microgrid_by_site(self, site: str) -> Microgrid:
        for mg in self.microgrids:
            if mg.site == site:
                return mg
        raise DistributionSystemError(f"No microgrid at site {site}")

    @cached_property
    def out_branches(self) -> dict[str, tuple[Branch, ...]]:
        """Branches oriented away from each bus (children side)"""
        result: dict[str, list[Branch]] = {b: [] for b in self.bus_ids}
        for branch in self.branches:
            result[branch.from_bus].append(branch)
        return {bus: tuple(branches) for bus, branches in result.items()}

    @cached_property
    def in_branches(self) -> dict[str, tuple[Branch, ...]]:
        """Branches oriented into each bus (parent side)"""
        result: dict[str, list[Branch]] = {b: [] for b in self.bus_ids}
        for branch in self.branches:
            result[branch.to_bus].append(branch)
        return {bus: tuple(branches) for bus, branches in result.items()}

    def graph(self, damaged: Iterable[str] = ()) -> Graph:
        skip = set(damaged)
        graph = Graph()
        graph.add_nodes_from(self.bus_ids)
        for branch in self.branches:
            if branch.branch_id not in skip:
                graph.add_edge(branch.from_bus, branch.to_bus, branch=branch.branch_id)
        return graph

    def energizable_buses(self, damaged: Iterable[str] = ()) -> frozenset[str]:
        """Buses connected to a microgrid bus through undamaged branches"""
        live: set[str] = set()
        for component in connected_components(self.graph(damaged)):
            if component & self.microgrid_buses:
                live |= component
        return frozenset(live)

    @property
    def fictitious_big_m(self) -> float:
        return float(len(self.buses))

    @property
    def voltage_big_m(self) -> float:
        spread = max(b.v_max for b in self.buses) - min(
            min(b.v_min for b in self.buses), self.v0
        )
        drop = max(
            ((br.r_pu + br.x_pu) * math.sqrt(2) * br.s_max_pu for br in self.branches),
            default=0.0,
        )
        return spread + drop / self.v0

    def __str__(self) -> str:
        lines = [
            f"Feeders: {len(self.feeders)}",
            f"Buses: {len(self.buses)}",
            f"Branches: {len(self.branches)}",
            f"Microgrids: {len(self.microgrids)}",
            "",
        ]
        for mg in self.microgrids:
            lines.append(
                f"{mg.microgrid_id} at {mg.bus} (site {mg.site}):"
                f" P<={mg.p_max_pu} pu, E in [{mg.e_min_pu}, {mg.e_max_pu}] pu·h"
            )
        return "\n".join(lines)

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

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property

from ..grid import DistributionSystem, Microgrid
from ..transport import MessUnit, SiteId, TransportNetwork
from .model import MilpModelError


@dataclass(frozen=True, eq=False)
class RestorationSystem:
    """Static data shared by every model of a run

    :param ds: feeders and microgrids (per unit)
    :param net: road network with microgrid and depot sites
    :param fleet: MESS units
    :param dt_h: interval length in hours
    """

    ds: DistributionSystem
    net: TransportNetwork
    fleet: tuple[MessUnit, ...]
    dt_h: float = 1.0

    def __post_init__(self) -> None:
        if self.dt_h <= 0:
            raise MilpModelError(f"Interval length must be positive, got {self.dt_h}")
        sites = set(self.net.sites)
        for mg in self.ds.microgrids:
            if mg.site not in sites:
                raise MilpModelError(
                    f"Microgrid {mg.microgrid_id} uses unknown site {mg.site}"
                )
        for unit in self.fleet:
            if unit.depot not in self.net.depot_sites:
                raise MilpModelError(
                    f"MESS {unit.mess_id} starts at {unit.depot}, which is not a depot"
                )

    @cached_property
    def microgrid_at_site(self) -> dict[str, Microgrid]:
        return {mg.site: mg for mg in self.ds.microgrids}

    @property
    def microgrid_sites(self) -> tuple[SiteId, ...]:
        return self.net.microgrid_sites

    @property
    def depot_sites(self) -> tuple[SiteId, ...]:
        return self.net.depot_sites

    @property
    def power_to_cost(self) -> float:
        """$ per (pu·h) for a price of 1 $/kWh"""
        return self.ds.base_kva * self.dt_h

    def mess(self, mess_id: str) -> MessUnit:
        for unit in self.fleet:
            if unit.mess_id == mess_id:
                return unit
        raise MilpModelError(f"Unknown MESS {mess_id}")


@dataclass(frozen=True)
class HorizonState:
    """Initial conditions of one prediction horizon

    :param t0: first interval of the horizon within the run
    :param horizon: number of intervals modelled
    :param mess_energy: stored energy per MESS (pu·h)
    :param mg_energy: stored energy per microgrid (pu·h)
    :param final_roll: the horizon reaches the end of the run
    """

    t0: int
    horizon: int
    mess_energy: Mapping[str, float] = field(default_factory=dict)
    mg_energy: Mapping[str, float] = field(default_factory=dict)
    final_roll: bool = False

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise MilpModelError(f"Horizon must be at least 1, got {self.horizon}")

    @classmethod
    def initial(
        cls, system: RestorationSystem, horizon: int, final_roll: bool = False
    ) -> HorizonState:
        return cls(
            t0=0,
            horizon=horizon,
            mess_energy={u.mess_id: u.energy_init for u in system.fleet},
            mg_energy={mg.microgrid_id: mg.e_init_pu for mg in system.ds.microgrids},
            final_roll=final_roll,
        )

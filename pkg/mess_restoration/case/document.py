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

"""Schema of the case JSON document

Powers are in kW, energies in kWh, lengths in km and costs in $/kWh ($/h for
transportation). Relative paths are resolved against the case file.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..scenario import LoadClass
from ..transport import SiteKind


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SiteDocument(_Document):
    id: str
    kind: SiteKind
    node: int


class TransportDocument(_Document):
    roads: list[tuple[int, int, float]]
    sites: list[SiteDocument]


class FeederDocument(_Document):
    name: str
    branches: str
    buses: str
    v_base_kv: float = Field(gt=0)
    v_min: float = 0.95
    v_max: float = 1.05


class MicrogridDocument(_Document):
    id: str
    site: str
    feeder: str
    bus: str
    p_max_kw: float = Field(ge=0)
    q_max_kvar: float = Field(ge=0)
    e_max_kwh: float = Field(ge=0)
    e_min_kwh: float = Field(default=0.0, ge=0)
    e_init_kwh: float = Field(ge=0)
    gen_cost: float | None = Field(default=None, ge=0)
    local_peak_kw: float = Field(default=0.0, ge=0)
    local_power_factor: float = Field(default=1.0, gt=0, le=1)
    local_class: LoadClass = LoadClass.residential
    local_cost: float | None = Field(default=None, ge=0)


class MessDocument(_Document):
    id: str
    depot: str
    p_max_kw: float = Field(gt=0)
    capacity_kwh: float = Field(gt=0)
    soc_init: float = Field(ge=0, le=1)
    soc_min: float = Field(default=0.1, ge=0, le=1)
    soc_max: float = Field(default=0.9, ge=0, le=1)
    eta_ch: float = Field(default=0.95, gt=0, le=1)
    eta_dch: float = Field(default=0.95, gt=0, le=1)
    v_avg_kmh: float = Field(gt=0)
    c_bat: float | None = Field(default=None, ge=0)
    c_tran: float | None = Field(default=None, ge=0)


class MeanTimesDocument(_Document):
    mean_up_h: float = Field(default=math.inf, gt=0)
    mean_down_h: float = Field(default=math.inf, gt=0)


class ReliabilityDocument(_Document):
    """Two-state availability processes of roads and branches

    ``overrides`` and ``initially_down`` use element names such as
    ``road:3-4`` and ``branch:f1/13-14``.
    """

    roads: MeanTimesDocument = Field(default_factory=MeanTimesDocument)
    branches: MeanTimesDocument = Field(default_factory=MeanTimesDocument)
    overrides: dict[str, MeanTimesDocument] = Field(default_factory=dict)
    initially_down: list[str] = Field(default_factory=list)


class CostsDocument(_Document):
    critical: float = Field(default=10.0, ge=0)
    noncritical: float = Field(default=2.0, ge=0)
    local: float = Field(default=10.0, ge=0)
    generation: float = Field(default=0.5, ge=0)
    battery: float = Field(default=0.2, ge=0)
    transportation: float = Field(default=80.0, ge=0)


class HorizonDocument(_Document):
    t_h: int = Field(default=24, ge=1)
    t_p: int = Field(default=12, ge=1)
    dt_h: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _check_lengths(self) -> HorizonDocument:
        if self.t_p > self.t_h:
            raise ValueError(
                f"prediction horizon t_p={self.t_p} exceeds run length t_h={self.t_h}"
            )
        return self


class ScenarioDocument(_Document):
    n_generated: int = Field(default=2000, ge=1)
    n_reduced: int = Field(default=10, ge=1)
    load_error_sd: float = Field(default=0.02, ge=0)
    availability_weight: float | None = Field(default=None, ge=0)
    first_interval_exact: bool = True


class SeedDocument(_Document):
    base: int = 0


class SolverDocument(_Document):
    mip_gap: float = Field(default=1e-4, gt=0)
    int_tol: float = Field(default=1e-6, gt=0)
    feas_tol: float = Field(default=1e-7, gt=0)
    time_limit_s: float | None = Field(default=None, gt=0)
    node_limit: int | None = Field(default=None, ge=1)
    lp_engine: str = "simplex"
    n_workers: int = Field(default=1, ge=1)


class RollingDocument(_Document):
    mode: str = "dynamic"
    transport_cost_weighting: str = "expected"
    require_depot_return: bool = True
    strict_radiality: bool = False
    pairwise_nonanticipativity: bool = False
    reopt_policy: str = "remaining_horizon"
    n_threads: int = Field(default=1, ge=1)
    debug_level: int = Field(default=0, ge=0)


class EventDocument(_Document):
    element: str
    interval: int = Field(ge=0)
    status: str = Field(pattern="^(up|down)$")


class RealizationDocument(_Document):
    events: list[EventDocument] = Field(default_factory=list)


class CaseDocument(_Document):
    name: str
    notes: str = ""
    transport: TransportDocument
    feeders: list[FeederDocument] = Field(min_length=1)
    microgrids: list[MicrogridDocument] = Field(min_length=1)
    mess: list[MessDocument] = Field(default_factory=list)
    load_profiles: dict[LoadClass, list[float]]
    reliability: ReliabilityDocument = Field(default_factory=ReliabilityDocument)
    costs: CostsDocument = Field(default_factory=CostsDocument)
    horizon: HorizonDocument = Field(default_factory=HorizonDocument)
    scenarios: ScenarioDocument = Field(default_factory=ScenarioDocument)
    seeds: SeedDocument = Field(default_factory=SeedDocument)
    solver: SolverDocument = Field(default_factory=SolverDocument)
    rolling: RollingDocument = Field(default_factory=RollingDocument)
    realization: RealizationDocument | None = None

    @model_validator(mode="after")
    def _check_profiles(self) -> CaseDocument:
        for load_class, profile in self.load_profiles.items():
            if not profile:
                raise ValueError(f"load profile {load_class.value} is empty")
            if any(value < 0 for value in profile):
                raise ValueError(f"load profile {load_class.value} has negative values")
        return self

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

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MessUnit(BaseModel):
    """Truck-mounted battery of the fleet

    Power in pu, capacity in pu·h, SOC values as fractions of capacity.
    Battery maintenance cost is in $/kWh moved, transport cost in $/h on the road.
    """

    mess_id: str
    depot: str
    p_max_pu: float = Field(gt=0)
    capacity_pu: float = Field(gt=0)
    soc_init: float = Field(ge=0, le=1)
    soc_min: float = Field(default=0.1, ge=0, le=1)
    soc_max: float = Field(default=0.9, ge=0, le=1)
    eta_ch: float = Field(default=0.95, gt=0, le=1)
    eta_dch: float = Field(default=0.95, gt=0, le=1)
    v_avg_kmh: float = Field(gt=0)
    c_bat: float = Field(default=0.2, ge=0)
    c_tran: float = Field(default=80.0, ge=0)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_soc(self) -> MessUnit:
        if not self.soc_min <= self.soc_init <= self.soc_max:
            raise ValueError(
                f"MESS {self.mess_id}: initial SOC {self.soc_init} outside"
                f" [{self.soc_min}, {self.soc_max}]"
            )
        return self

    @property
    def energy_init(self) -> float:
        return self.soc_init * self.capacity_pu

    @property
    def energy_min(self) -> float:
        return self.soc_min * self.capacity_pu

    @property
    def energy_max(self) -> float:
        return self.soc_max * self.capacity_pu

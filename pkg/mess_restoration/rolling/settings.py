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

import os
from dataclasses import dataclass
from enum import Enum
from typing import Final

from ..milp import ModelSettings, ReoptPolicy, TransportCostWeighting


class RollingSettingsError(Exception):
    pass


WORKERS_ENV: Final = "MESS_RESTORATION_WORKERS"


class FleetMode(str, Enum):
    """How the MESS fleet may be used

    ``no_mess`` removes the fleet, ``allocation`` sends each MESS on one trip
    from its depot at the start of the run and keeps it there, ``dynamic``
    re-plans routes at every interval.
    """

    no_mess = "no-mess"
    allocation = "allocation"
    dynamic = "dynamic"


@dataclass
class RollingSettings:
    mode: FleetMode = FleetMode.dynamic
    transport_cost_weighting: TransportCostWeighting = TransportCostWeighting.expected
    require_depot_return: bool = True
    strict_radiality: bool = False
    pairwise_nonanticipativity: bool = False
    reopt_policy: ReoptPolicy = ReoptPolicy.remaining_horizon
    n_threads: int = 1
    debug_level: int = 0

    def __post_init__(self) -> None:
        for name, kind in (
            ("mode", FleetMode),
            ("transport_cost_weighting", TransportCostWeighting),
            ("reopt_policy", ReoptPolicy),
        ):
            if not isinstance(getattr(self, name), kind):
                raise RollingSettingsError(f"{name} must be of type {kind.__name__}")
        if self.n_threads < 1:
            raise RollingSettingsError(
                f"n_threads must be at least 1, got {self.n_threads}"
            )
        if self.debug_level < 0:
            raise RollingSettingsError("debug_level must be non-negative")

    @classmethod
    def default(cls) -> RollingSettings:
        return RollingSettings()

    def model_settings(self) -> ModelSettings:
        return ModelSettings(
            transport_cost_weighting=self.transport_cost_weighting,
            strict_radiality=self.strict_radiality,
            pairwise_nonanticipativity=self.pairwise_nonanticipativity,
        )


def workers_from_env(default: int) -> int:
    """Worker count from ``MESS_RESTORATION_WORKERS``, ``default`` when unset"""
    value = os.environ.get(WORKERS_ENV)
    if value is None or not value.strip():
        return default
    try:
        workers = int(value)
    except ValueError:
        raise RollingSettingsError(
            f"{WORKERS_ENV} must be an integer, got {value!r}"
        ) from None
    if workers < 1:
        raise RollingSettingsError(f"{WORKERS_ENV} must be at least 1, got {workers}")
    return workers

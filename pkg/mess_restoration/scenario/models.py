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
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ..transport import EdgeKey, RoadStatus, edge_key


class ScenarioError(Exception):
    pass


class ScenarioSettingsError(Exception):
    pass


class LoadClass(str, Enum):
    residential = "residential"
    commercial = "commercial"
    industrial = "industrial"


def road_element(edge: EdgeKey) -> str:
    a, b = edge_key(*edge)
    return f"road:{a}-{b}"


def branch_element(branch_id: str) -> str:
    return f"branch:{branch_id}"


def load_element(bus_id: str) -> str:
    return f"load:{bus_id}"


def tan_phi(power_factor: np.ndarray | float) -> np.ndarray:
    return np.tan(np.arccos(np.asarray(power_factor, dtype=float)))


@dataclass(frozen=True)
class LoadForecast:
    """Predicted active load per bus and interval (kW)

    Reactive load follows from the constant power factor of each bus.
    """

    buses: tuple[str, ...]
    p_kw: np.ndarray
    power_factor: np.ndarray
    load_class: tuple[LoadClass, ...] = ()

    def __post_init__(self) -> None:
        if self.p_kw.ndim != 2 or self.p_kw.shape[0] != len(self.buses):
            raise ScenarioError(
                f"Forecast has shape {self.p_kw.shape} for {len(self.buses)} buses"
            )
        if np.any(self.p_kw < 0):
            raise ScenarioError("Forecast loads must be non-negative")
        if self.power_factor.shape != (len(self.buses),):
            raise ScenarioError("One power factor per bus is required")
        if np.any(self.power_factor <= 0) or np.any(self.power_factor > 1):
            raise ScenarioError("Power factors must lie in (0, 1]")
        if self.load_class and len(self.load_class) != len(self.buses):
            raise ScenarioError("One load class per bus is required")

    @property
    def horizon(self) -> int:
        return int(self.p_kw.shape[1])

    @property
    def q_kvar(self) -> np.ndarray:
        return self.p_kw * tan_phi(self.power_factor)[:, None]

    @property
    def peak_kw(self) -> np.ndarray:
        return self.p_kw.max(axis=1) if self.horizon else np.zeros(len(self.buses))

    def window(self, start: int, length: int) -> LoadForecast:
        if start < 0 or start + length > self.horizon:
            raise ScenarioError(
                f"Window {start}..{start + length} exceeds forecast of"
                f" {self.horizon} intervals"
            )
        return replace(self, p_kw=self.p_kw[:, start : start + length].copy())


@dataclass(frozen=True)
class AvailabilityModel:
    """Two-state up/down process of one road or branch

    Sojourn times are exponential with the given means (hours); an infinite mean
    makes the state absorbing.
    """

    element: str
    mean_up_h: float = math.inf
    mean_down_h: float = math.inf
    initially_up: bool = True

    def __post_init__(self) -> None:
        if not self.mean_up_h > 0 or not self.mean_down_h > 0:
            raise ScenarioError(
                f"Mean up/down times of {self.element} must be positive,"
                f" got {self.mean_up_h}/{self.mean_down_h}"
            )

    @property
    def down_fraction(self) -> float:
        if math.isinf(self.mean_up_h) and math.isinf(self.mean_down_h):
            return 0.0 if self.initially_up else 1.0
        if math.isinf(self.mean_up_h):
            return 0.0
        if math.isinf(self.mean_down_h):
            return 1.0
        return self.mean_down_h / (self.mean_up_h + self.mean_down_h)

    def starting(self, up: bool) -> AvailabilityModel:
        return replace(self, initially_up=up)


@dataclass(frozen=True)
class Scenario:
    """One joint trajectory of loads and element availability

    :param load_kw: realized active load, shape (buses, intervals)
    :param road_up: availability of roads, shape (roads, intervals)
    :param branch_up: availability of branches, shape (branches, intervals)
    """

    probability: float
    load_kw: np.ndarray
    road_up: np.ndarray
    branch_up: np.ndarray

    def __post_init__(self) -> None:
        if not 0 < self.probability <= 1 + 1e-12:
            raise ScenarioError(f"Scenario probability {self.probability} not in (0,1]")

    @property
    def horizon(self) -> int:
        return int(self.load_kw.shape[1])


@dataclass(frozen=True)
class ScenarioSet:
    buses: tuple[str, ...]
    roads: tuple[EdgeKey, ...]
    branches: tuple[str, ...]
    scenarios: tuple[Scenario, ...]
    kantorovich_distance: float | None = None

    def __post_init__(self) -> None:
        if not self.scenarios:
            raise ScenarioError("A scenario set needs at least one scenario")
        horizon = self.scenarios[0].horizon
        for index, scenario in enumerate(self.scenarios):
            expected = [
                (scenario.load_kw.shape, (len(self.buses), horizon)),
                (scenario.road_up.shape, (len(self.roads), horizon)),
                (scenario.branch_up.shape, (len(self.branches), horizon)),
            ]
            for got, want in expected:
                if got != want:
                    raise ScenarioError(
                        f"Scenario {index} has array shape {got}, expected {want}"
                    )
        total = float(sum(s.probability for s in self.scenarios))
        if abs(total - 1.0) > 1e-9:
            raise ScenarioError(f"Scenario probabilities sum to {total}, not 1")

    def __len__(self) -> int:
        return len(self.scenarios)

    def __getitem__(self, index: int) -> Scenario:
        return self.scenarios[index]

    @property
    def horizon(self) -> int:
        return self.scenarios[0].horizon

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([s.probability for s in self.scenarios])

    def road_status(self, index: int) -> RoadStatus:
        up = self.scenarios[index].road_up
        return RoadStatus(
            down=tuple(
                frozenset(
                    road for r, road in enumerate(self.roads) if not bool(up[r, t])
                )
                for t in range(self.horizon)
            )
        )

    def damaged_branches(self, index: int, t: int) -> frozenset[str]:
        up = self.scenarios[index].branch_up
        return frozenset(
            branch for b, branch in enumerate(self.branches) if not bool(up[b, t])
        )

    def expected_load_kw(self) -> np.ndarray:
        return sum(
            (s.probability * s.load_kw for s in self.scenarios),
            start=np.zeros_like(self.scenarios[0].load_kw),
        )

    def expected_up(self, threshold: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
        """Majority availability of roads and branches across scenarios"""
        road = sum(
            (s.probability * s.road_up for s in self.scenarios),
            start=np.zeros(self.scenarios[0].road_up.shape),
        )
        branch = sum(
            (s.probability * s.branch_up for s in self.scenarios),
            start=np.zeros(self.scenarios[0].branch_up.shape),
        )
        return road >= threshold, branch >= threshold

    def permuted(self, order: Sequence[int]) -> ScenarioSet:
        if sorted(order) != list(range(len(self))):
            raise ScenarioError(f"{list(order)} is not a permutation of the scenarios")
        return replace(self, scenarios=tuple(self.scenarios[i] for i in order))


@dataclass(frozen=True)
class ScenarioInputs:
    """Everything needed to sample scenarios for one prediction horizon

    :param forecast: load forecast restricted to the horizon
    :param roads: availability process per road, in road order
    :param branches: availability process per branch id
    :param exact_intervals: leading intervals sampled without load error
    """

    forecast: LoadForecast
    roads: tuple[tuple[EdgeKey, AvailabilityModel], ...] = ()
    branches: tuple[tuple[str, AvailabilityModel], ...] = ()
    dt_h: float = 1.0
    load_error_sd: float = 0.02
    exact_intervals: int = 0

    @property
    def horizon(self) -> int:
        return self.forecast.horizon


@dataclass
class ScenarioSettings:
    n_generated: int = 2000
    n_reduced: int = 10
    load_error_sd: float = 0.02
    availability_weight: float = 1.0
    first_interval_exact: bool = True

    def __post_init__(self) -> None:
        if self.n_generated < 1 or self.n_reduced < 1:
            raise ScenarioSettingsError("Scenario counts must be positive")
        if self.n_reduced > self.n_generated:
            raise ScenarioSettingsError(
                f"Cannot reduce {self.n_generated} scenarios to {self.n_reduced}"
            )
        if self.load_error_sd < 0:
            raise ScenarioSettingsError("Load error standard deviation must be >= 0")
        if self.availability_weight < 0:
            raise ScenarioSettingsError("Availability weight must be >= 0")

    @classmethod
    def default(cls) -> ScenarioSettings:
        return ScenarioSettings()

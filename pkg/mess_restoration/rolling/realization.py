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

"""The trajectory the rolling run is scored against

A realization is either sampled from the same processes that generate
scenarios, with a seed stream disjoint from theirs, or scripted by element
status events. Loads are sampled in both cases.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..scenario import (
    AvailabilityModel,
    LoadForecast,
    ScenarioError,
    branch_element,
    road_element,
    sample_availability,
    sample_load,
)
from ..transport import EdgeKey, RoadStatus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RealizationEvent:
    """Status change of a road or branch, effective from ``interval`` on"""

    element: str
    interval: int
    up: bool


@dataclass(frozen=True)
class Realization:
    """Realized loads (kW) and element availability over the whole run"""

    buses: tuple[str, ...]
    roads: tuple[EdgeKey, ...]
    branches: tuple[str, ...]
    load_kw: np.ndarray
    road_up: np.ndarray
    branch_up: np.ndarray

    def __post_init__(self) -> None:
        horizon = self.load_kw.shape[1]
        if self.road_up.shape != (len(self.roads), horizon):
            raise ScenarioError(f"Road availability has shape {self.road_up.shape}")
        if self.branch_up.shape != (len(self.branches), horizon):
            raise ScenarioError(
                f"Branch availability has shape {self.branch_up.shape}"
            )

    @property
    def horizon(self) -> int:
        return int(self.load_kw.shape[1])

    def road_status(self) -> RoadStatus:
        return RoadStatus(
            down=tuple(
                frozenset(
                    road for r, road in enumerate(self.roads) if not self.road_up[r, t]
                )
                for t in range(self.horizon)
            )
        )

    def damaged_branches(self, t: int) -> frozenset[str]:
        return frozenset(
            branch
            for b, branch in enumerate(self.branches)
            if not self.branch_up[b, t]
        )

    def road_is_up(self, t: int) -> dict[EdgeKey, bool]:
        return {road: bool(self.road_up[r, t]) for r, road in enumerate(self.roads)}

    def branch_is_up(self, t: int) -> dict[str, bool]:
        return {
            branch: bool(self.branch_up[b, t]) for b, branch in enumerate(self.branches)
        }


def sample_realization(
    forecast: LoadForecast,
    roads: Sequence[tuple[EdgeKey, AvailabilityModel]],
    branches: Sequence[tuple[str, AvailabilityModel]],
    dt_h: float,
    seed: int,
    load_error_sd: float = 0.02,
) -> Realization:
    """Sample loads and availability for the whole run from stream ``[seed, 1]``"""
    stream = [seed, 1]
    horizon = forecast.horizon
    return Realization(
        buses=forecast.buses,
        roads=tuple(edge for edge, _ in roads),
        branches=tuple(branch for branch, _ in branches),
        load_kw=sample_load(forecast, stream, load_error_sd),
        road_up=_stack(
            [sample_availability(model, horizon, dt_h, stream) for _, model in roads],
            horizon,
        ),
        branch_up=_stack(
            [
                sample_availability(model, horizon, dt_h, stream)
                for _, model in branches
            ],
            horizon,
        ),
    )


def scripted_realization(
    forecast: LoadForecast,
    roads: Sequence[tuple[EdgeKey, AvailabilityModel]],
    branches: Sequence[tuple[str, AvailabilityModel]],
    events: Sequence[RealizationEvent],
    seed: int,
    load_error_sd: float = 0.02,
) -> Realization:
    """Availability from status events, loads sampled from stream ``[seed, 1]``

    Elements start in the initial state of their availability model.
    """
    horizon = forecast.horizon
    index = {road_element(edge): ("road", r) for r, (edge, _) in enumerate(roads)}
    index.update(
        {branch_element(b): ("branch", k) for k, (b, _) in enumerate(branches)}
    )
    road_up = np.array(
        [[model.initially_up] * horizon for _, model in roads], dtype=bool
    ).reshape(len(roads), horizon)
    branch_up = np.array(
        [[model.initially_up] * horizon for _, model in branches], dtype=bool
    ).reshape(len(branches), horizon)
    for event in sorted(events, key=lambda e: e.interval):
        if event.element not in index:
            raise ScenarioError(f"Event refers to unknown element {event.element}")
        if not 0 <= event.interval < horizon:
            raise ScenarioError(
                f"Event on {event.element} at interval {event.interval} is outside"
                f" the run of {horizon} intervals"
            )
        kind, row = index[event.element]
        target = road_up if kind == "road" else branch_up
        target[row, event.interval :] = event.up
    logger.debug("scripted realization with %d events", len(events))
    return Realization(
        buses=forecast.buses,
        roads=tuple(edge for edge, _ in roads),
        branches=tuple(branch for branch, _ in branches),
        load_kw=sample_load(forecast, [seed, 1], load_error_sd),
        road_up=road_up,
        branch_up=branch_up,
    )


def _stack(rows: list[np.ndarray], horizon: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, horizon), dtype=bool)
    return np.vstack(rows).astype(bool)

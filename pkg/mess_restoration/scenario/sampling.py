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

import hashlib
import logging
import math
from collections.abc import Sequence

import numpy as np

from .models import (
    AvailabilityModel,
    LoadForecast,
    Scenario,
    ScenarioError,
    ScenarioInputs,
    ScenarioSet,
    branch_element,
    load_element,
    road_element,
)

logger = logging.getLogger(__name__)

Seed = int | Sequence[int]


def element_rng(seed: Seed, element: str) -> np.random.Generator:
    """Independent random stream for one element

    The stream depends only on the seed and the element name, so adding or
    removing other elements never changes an element's draws.
    """
    digest = hashlib.sha256(element.encode("utf-8")).digest()
    words = [int.from_bytes(digest[k : k + 4], "little") for k in range(0, 16, 4)]
    base = [seed] if isinstance(seed, int) else list(seed)
    return np.random.default_rng(np.random.SeedSequence([*base, *words]))


def load_trajectories(
    forecast: LoadForecast,
    seed: Seed,
    n_samples: int,
    sd_fraction: float = 0.02,
    exact_intervals: int = 0,
) -> np.ndarray:
    """Realized loads of shape (samples, buses, intervals), truncated at zero"""
    result = np.empty((n_samples, len(forecast.buses), forecast.horizon))
    for b, bus in enumerate(forecast.buses):
        rng = element_rng(seed, load_element(bus))
        noise = rng.standard_normal((n_samples, forecast.horizon))
        noise[:, :exact_intervals] = 0.0
        mean = forecast.p_kw[b]
        result[:, b, :] = np.maximum(mean * (1.0 + sd_fraction * noise), 0.0)
    return result


def sample_load(
    forecast: LoadForecast,
    seed: Seed,
    sd_fraction: float = 0.02,
    exact_intervals: int = 0,
) -> np.ndarray:
    """One realization of the loads, shape (buses, intervals)

    Reactive loads scale with the same ratio since power factors are constant.
    """
    return load_trajectories(forecast, seed, 1, sd_fraction, exact_intervals)[0]


def _sojourns(
    model: AvailabilityModel, up: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    means = np.where(up, model.mean_up_h, model.mean_down_h)
    draws = rng.standard_exponential(up.shape)
    return np.where(np.isinf(means), np.inf, means * draws)


def availability_trajectories(
    model: AvailabilityModel,
    horizon: int,
    dt_h: float,
    rng: np.random.Generator,
    n_samples: int,
) -> np.ndarray:
    """Up flags of shape (samples, intervals) from the alternating renewal process

    An element counts as down in an interval when it is down at the interval start.
    """
    if horizon < 1:
        raise ScenarioError(f"Horizon must be at least 1, got {horizon}")
    up = np.full(n_samples, model.initially_up)
    next_switch = _sojourns(model, up, rng)
    flags = np.empty((n_samples, horizon), dtype=bool)
    for t in range(horizon):
        now = t * dt_h
        switching = next_switch <= now
        while switching.any():
            up[switching] = ~up[switching]
            next_switch[switching] += _sojourns(model, up[switching], rng)
            switching = next_switch <= now
        flags[:, t] = up
    return flags


def sample_availability(
    model: AvailabilityModel, horizon: int, dt_h: float, seed: Seed
) -> np.ndarray:
    rng = element_rng(seed, model.element)
    return availability_trajectories(model, horizon, dt_h, rng, 1)[0]


def generate_scenarios(inputs: ScenarioInputs, n: int, seed: Seed) -> ScenarioSet:
    """``n`` equiprobable joint trajectories over the inputs' horizon"""
    if n < 1:
        raise ScenarioError(f"Need at least one scenario, got {n}")
    horizon = inputs.horizon
    loads = load_trajectories(
        inputs.forecast,
        seed,
        n,
        sd_fraction=inputs.load_error_sd,
        exact_intervals=inputs.exact_intervals,
    )
    road_up = np.empty((n, len(inputs.roads), horizon), dtype=bool)
    for r, (edge, model) in enumerate(inputs.roads):
        rng = element_rng(seed, road_element(edge))
        road_up[:, r, :] = availability_trajectories(
            model, horizon, inputs.dt_h, rng, n
        )
    branch_up = np.empty((n, len(inputs.branches), horizon), dtype=bool)
    for b, (branch_id, model) in enumerate(inputs.branches):
        rng = element_rng(seed, branch_element(branch_id))
        branch_up[:, b, :] = availability_trajectories(
            model, horizon, inputs.dt_h, rng, n
        )
    probability = 1.0 / n
    scenarios = tuple(
        Scenario(
            probability=probability,
            load_kw=loads[i],
            road_up=road_up[i],
            branch_up=branch_up[i],
        )
        for i in range(n)
    )
    logger.debug("generated %d scenarios over %d intervals", n, horizon)
    return ScenarioSet(
        buses=inputs.forecast.buses,
        roads=tuple(edge for edge, _ in inputs.roads),
        branches=tuple(branch for branch, _ in inputs.branches),
        scenarios=_normalised(scenarios),
    )


def _normalised(scenarios: tuple[Scenario, ...]) -> tuple[Scenario, ...]:
    # 1/n summed n times can miss 1.0 by a few ulps
    total = math.fsum(s.probability for s in scenarios)
    if total == 1.0:
        return scenarios
    last = scenarios[-1]
    adjusted = Scenario(
        probability=last.probability + (1.0 - total),
        load_kw=last.load_kw,
        road_up=last.road_up,
        branch_up=last.branch_up,
    )
    return (*scenarios[:-1], adjusted)

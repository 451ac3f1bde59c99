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

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform  # type: ignore

from .models import Scenario, ScenarioError, ScenarioSet

logger = logging.getLogger(__name__)


def scenario_features(
    scenarios: ScenarioSet, availability_weight: float = 1.0
) -> np.ndarray:
    """Feature vector per scenario: loads over bus peaks, then weighted up flags"""
    loads = np.stack([s.load_kw for s in scenarios.scenarios])
    peak = loads.max(axis=(0, 2))
    scale = np.where(peak > 0, peak, 1.0)
    normalised = loads / scale[None, :, None]
    roads = np.stack([s.road_up for s in scenarios.scenarios]).astype(float)
    branches = np.stack([s.branch_up for s in scenarios.scenarios]).astype(float)
    n = len(scenarios)
    return np.hstack(
        [
            normalised.reshape(n, -1),
            availability_weight * roads.reshape(n, -1),
            availability_weight * branches.reshape(n, -1),
        ]
    )


@dataclass(frozen=True)
class BackwardReduction:
    survivors: tuple[int, ...]
    probabilities: np.ndarray
    kantorovich_distance: float


def backward_reduction(
    distances: np.ndarray, probabilities: np.ndarray, k: int
) -> BackwardReduction:
    """Greedy backward deletion down to ``k`` scenarios

    Each step deletes the scenario minimising probability times distance to its
    nearest survivor and moves its probability to that survivor. Ties go to the
    lowest index.
    """
    n = len(probabilities)
    if not 1 <= k <= n:
        raise ScenarioError(f"Cannot reduce {n} scenarios to {k}")
    d = np.array(distances, dtype=float)
    np.fill_diagonal(d, np.inf)
    prob = np.array(probabilities, dtype=float)
    alive = np.ones(n, dtype=bool)
    nearest = np.argmin(d, axis=1) if n > 1 else np.zeros(1, dtype=int)
    nearest_dist = d[np.arange(n), nearest]
    for _ in range(n - k):
        score = np.where(alive, prob * nearest_dist, np.inf)
        deleted = int(np.argmin(score))
        target = int(nearest[deleted])
        prob[target] += prob[deleted]
        prob[deleted] = 0.0
        alive[deleted] = False
        d[:, deleted] = np.inf
        for s in np.flatnonzero(alive & (nearest == deleted)):
            nearest[s] = int(np.argmin(d[s]))
            nearest_dist[s] = d[s, nearest[s]]
    survivors = tuple(int(s) for s in np.flatnonzero(alive))
    original = np.array(distances, dtype=float)
    kantorovich = float(
        sum(
            probabilities[i] * original[i, list(survivors)].min()
            for i in range(n)
            if not alive[i]
        )
    )
    return BackwardReduction(
        survivors=survivors,
        probabilities=prob[list(survivors)],
        kantorovich_distance=kantorovich,
    )


def reduce_scenarios(
    scenarios: ScenarioSet, k: int, availability_weight: float = 1.0
) -> ScenarioSet:
    """Reduce a scenario set to ``k`` representatives"""
    n = len(scenarios)
    if not 1 <= k <= n:
        raise ScenarioError(f"Cannot reduce {n} scenarios to {k}")
    if k == n:
        return scenarios
    features = scenario_features(scenarios, availability_weight)
    distances = squareform(pdist(features, metric="euclidean"))
    reduction = backward_reduction(distances, scenarios.probabilities, k)
    kept = tuple(
        Scenario(
            probability=float(p),
            load_kw=scenarios[i].load_kw,
            road_up=scenarios[i].road_up,
            branch_up=scenarios[i].branch_up,
        )
        for i, p in zip(reduction.survivors, reduction.probabilities)
    )
    logger.debug(
        "reduced %d scenarios to %d, Kantorovich distance %.6g",
        n,
        k,
        reduction.kantorovich_distance,
    )
    return ScenarioSet(
        buses=scenarios.buses,
        roads=scenarios.roads,
        branches=scenarios.branches,
        scenarios=kept,
        kantorovich_distance=reduction.kantorovich_distance,
    )

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

from itertools import combinations

import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform  # type: ignore

from mess_restoration.scenario import (
    Scenario,
    ScenarioError,
    ScenarioSet,
    backward_reduction,
    reduce_scenarios,
    scenario_features,
)


def best_distance(distances: np.ndarray, probabilities: np.ndarray, k: int) -> float:
    n = len(probabilities)
    return min(
        sum(
            probabilities[i] * distances[i, list(kept)].min()
            for i in range(n)
            if i not in kept
        )
        for kept in combinations(range(n), k)
    )


def test_points_on_a_line() -> None:
    distances = squareform(pdist(np.array([[0.0], [1.0], [10.0]])))
    reduction = backward_reduction(distances, np.full(3, 1 / 3), 2)
    assert reduction.survivors == (1, 2)
    assert reduction.probabilities == pytest.approx([2 / 3, 1 / 3])
    assert reduction.kantorovich_distance == pytest.approx(1 / 3)


@pytest.mark.parametrize("seed", range(5))
def test_against_exhaustive_search(seed: int) -> None:
    rng = np.random.default_rng(seed)
    n = 7
    distances = squareform(pdist(rng.random((n, 3))))
    probabilities = rng.dirichlet(np.ones(n))
    for k in range(1, n + 1):
        reduction = backward_reduction(distances, probabilities, k)
        assert len(reduction.survivors) == k
        assert reduction.probabilities.sum() == pytest.approx(1.0)
        kept = probabilities[list(reduction.survivors)]
        assert np.all(reduction.probabilities >= kept)
        optimum = best_distance(distances, probabilities, k)
        assert reduction.kantorovich_distance >= optimum - 1e-12
        if k >= n - 1:
            assert reduction.kantorovich_distance == pytest.approx(optimum)


def test_invalid_target() -> None:
    with pytest.raises(ScenarioError):
        backward_reduction(np.zeros((2, 2)), np.full(2, 0.5), 3)
    with pytest.raises(ScenarioError):
        backward_reduction(np.zeros((2, 2)), np.full(2, 0.5), 0)


def scenario_set(loads: list[float]) -> ScenarioSet:
    return ScenarioSet(
        buses=("b1",),
        roads=((1, 2),),
        branches=(),
        scenarios=tuple(
            Scenario(
                probability=1 / len(loads),
                load_kw=np.array([[value, value]]),
                road_up=np.array([[True, value < 150]]),
                branch_up=np.zeros((0, 2), dtype=bool),
            )
            for value in loads
        ),
    )


def test_features_scale_loads_by_peak() -> None:
    features = scenario_features(scenario_set([100.0, 200.0]), availability_weight=2.0)
    assert features.tolist() == [[0.5, 0.5, 2.0, 2.0], [1.0, 1.0, 2.0, 0.0]]


def test_reduce_a_scenario_set() -> None:
    full = scenario_set([100.0, 101.0, 102.0, 190.0])
    reduced = reduce_scenarios(full, 2)
    assert len(reduced) == 2
    assert reduced.probabilities.sum() == pytest.approx(1.0)
    assert reduced.kantorovich_distance is not None
    assert reduced.kantorovich_distance > 0
    assert sorted(float(s.load_kw[0, 0]) for s in reduced.scenarios)[-1] == 190.0
    assert reduce_scenarios(full, 4) is full

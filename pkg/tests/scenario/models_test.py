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

from pathlib import Path

import numpy as np
import pytest

from mess_restoration.scenario import (
    LoadForecast,
    Scenario,
    ScenarioError,
    ScenarioSet,
    ScenarioSettings,
    ScenarioSettingsError,
    read_scenarios_csv,
    scenarios_to_frame,
    tan_phi,
    write_scenarios_csv,
)


def two_scenarios() -> ScenarioSet:
    return ScenarioSet(
        buses=("b1", "b2"),
        roads=((1, 2), (2, 3)),
        branches=("f/1-2",),
        scenarios=(
            Scenario(
                probability=0.25,
                load_kw=np.array([[10.0, 11.0], [20.0, 21.5]]),
                road_up=np.array([[True, False], [True, True]]),
                branch_up=np.array([[False, True]]),
            ),
            Scenario(
                probability=0.75,
                load_kw=np.array([[12.0, 13.0], [22.0, 23.0]]),
                road_up=np.array([[True, True], [False, True]]),
                branch_up=np.array([[False, False]]),
            ),
        ),
    )


def test_forecast_window_and_reactive_load() -> None:
    forecast = LoadForecast(
        ("b1",), np.array([[10.0, 20.0, 30.0]]), np.array([0.8])
    )
    assert forecast.window(1, 2).p_kw.tolist() == [[20.0, 30.0]]
    assert forecast.q_kvar[0, 0] == pytest.approx(7.5)
    assert float(tan_phi(1.0)) == pytest.approx(0.0)
    with pytest.raises(ScenarioError):
        forecast.window(2, 2)
    with pytest.raises(ScenarioError):
        LoadForecast(("b1",), np.array([[1.0]]), np.array([1.2]))
    with pytest.raises(ScenarioError):
        LoadForecast(("b1", "b2"), np.array([[1.0]]), np.array([1.0, 1.0]))


def test_scenario_set_views() -> None:
    scenarios = two_scenarios()
    assert scenarios.horizon == 2
    assert scenarios.road_status(0).damaged(1) == {(1, 2)}
    assert scenarios.road_status(1).damaged(0) == {(2, 3)}
    assert scenarios.damaged_branches(1, 1) == {"f/1-2"}
    assert scenarios.expected_load_kw()[0].tolist() == pytest.approx([11.5, 12.5])
    roads, branches = scenarios.expected_up()
    assert roads.tolist() == [[True, True], [False, True]]
    assert branches.tolist() == [[False, False]]
    swapped = scenarios.permuted([1, 0])
    assert swapped[0].probability == 0.75
    with pytest.raises(ScenarioError):
        scenarios.permuted([0, 0])


def test_probabilities_must_sum_to_one() -> None:
    scenario = two_scenarios()[0]
    with pytest.raises(ScenarioError):
        ScenarioSet(("b1", "b2"), ((1, 2), (2, 3)), ("f/1-2",), (scenario,))
    with pytest.raises(ScenarioError):
        Scenario(0.0, scenario.load_kw, scenario.road_up, scenario.branch_up)


def test_csv_storage(tmp_path: Path) -> None:
    scenarios = two_scenarios()
    frame = scenarios_to_frame(scenarios)
    assert len(frame) == 2 * (1 + 2 * 5)
    path = tmp_path / "scenarios.csv"
    write_scenarios_csv(scenarios, path)
    loaded = read_scenarios_csv(path)
    assert loaded.buses == scenarios.buses
    assert loaded.roads == scenarios.roads
    assert loaded.branches == scenarios.branches
    for a, b in zip(loaded.scenarios, scenarios.scenarios):
        assert a.probability == b.probability
        assert np.array_equal(a.load_kw, b.load_kw)
        assert np.array_equal(a.road_up, b.road_up)
        assert np.array_equal(a.branch_up, b.branch_up)


def test_csv_with_unknown_element(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text(
        "scenario,interval,element,value\n0,-1,probability,1.0\n0,0,pump:1,3.0\n"
    )
    with pytest.raises(ScenarioError, match="unknown element"):
        read_scenarios_csv(path)


@pytest.mark.parametrize(
    "changes",
    [
        {"n_generated": 0},
        {"n_generated": 5, "n_reduced": 6},
        {"load_error_sd": -0.1},
        {"availability_weight": -1.0},
    ],
)
def test_invalid_settings(changes: dict) -> None:
    with pytest.raises(ScenarioSettingsError):
        ScenarioSettings(**changes)


def test_default_settings() -> None:
    settings = ScenarioSettings.default()
    assert (settings.n_generated, settings.n_reduced) == (2000, 10)
    assert settings.first_interval_exact

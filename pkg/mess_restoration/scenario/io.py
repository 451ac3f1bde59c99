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

from pathlib import Path

import numpy as np
import pandas as pd

from ..transport import EdgeKey, edge_key
from .models import (
    Scenario,
    ScenarioError,
    ScenarioSet,
    branch_element,
    load_element,
    road_element,
)

PROBABILITY = "probability"
COLUMNS = ["scenario", "interval", "element", "value"]


def scenarios_to_frame(scenarios: ScenarioSet) -> pd.DataFrame:
    """Long table with one row per (scenario, interval, element)

    Probabilities are stored as element ``probability`` at interval -1.
    """
    elements = (
        [load_element(b) for b in scenarios.buses]
        + [road_element(r) for r in scenarios.roads]
        + [branch_element(b) for b in scenarios.branches]
    )
    rows: list[tuple[int, int, str, float]] = []
    for s, scenario in enumerate(scenarios.scenarios):
        rows.append((s, -1, PROBABILITY, float(scenario.probability)))
        values = np.vstack(
            [
                scenario.load_kw,
                scenario.road_up.astype(float),
                scenario.branch_up.astype(float),
            ]
        )
        for t in range(scenarios.horizon):
            for e, element in enumerate(elements):
                rows.append((s, t, element, float(values[e, t])))
    return pd.DataFrame(rows, columns=COLUMNS)


def write_scenarios_csv(scenarios: ScenarioSet, path: Path) -> None:
    scenarios_to_frame(scenarios).to_csv(path, index=False)


def read_scenarios_csv(path: Path) -> ScenarioSet:
    frame = pd.read_csv(path, float_precision="round_trip")
    missing = set(COLUMNS) - set(frame.columns)
    if missing:
        raise ScenarioError(f"{path}: missing columns {sorted(missing)}")
    return scenarios_from_frame(frame, source=str(path))


def scenarios_from_frame(frame: pd.DataFrame, source: str = "<frame>") -> ScenarioSet:
    elements = [e for e in dict.fromkeys(frame["element"]) if e != PROBABILITY]
    buses: list[str] = []
    roads: list[EdgeKey] = []
    branches: list[str] = []
    for element in elements:
        kind, _, name = str(element).partition(":")
        match kind:
            case "load":
                buses.append(name)
            case "road":
                a, _, b = name.partition("-")
                roads.append(edge_key(int(a), int(b)))
            case "branch":
                branches.append(name)
            case _:
                raise ScenarioError(f"{source}: unknown element {element!r}")
    ordered = (
        [load_element(b) for b in buses]
        + [road_element(r) for r in roads]
        + [branch_element(b) for b in branches]
    )
    position = {element: i for i, element in enumerate(ordered)}
    values = frame[frame["element"] != PROBABILITY]
    horizon = int(values["interval"].max()) + 1 if len(values) else 1
    scenario_ids = sorted(int(s) for s in frame["scenario"].unique())
    result = []
    for s in scenario_ids:
        rows = frame[frame["scenario"] == s]
        probability = rows[rows["element"] == PROBABILITY]["value"]
        if len(probability) != 1:
            raise ScenarioError(f"{source}: scenario {s} needs one probability row")
        grid = np.full((len(ordered), horizon), np.nan)
        body = rows[rows["element"] != PROBABILITY]
        for element, interval, value in zip(
            body["element"], body["interval"], body["value"]
        ):
            grid[position[element], int(interval)] = value
        if np.isnan(grid).any():
            raise ScenarioError(f"{source}: scenario {s} has missing values")
        n_bus, n_road = len(buses), len(roads)
        result.append(
            Scenario(
                probability=float(probability.iloc[0]),
                load_kw=grid[:n_bus],
                road_up=grid[n_bus : n_bus + n_road] > 0.5,
                branch_up=grid[n_bus + n_road :] > 0.5,
            )
        )
    return ScenarioSet(
        buses=tuple(buses),
        roads=tuple(roads),
        branches=tuple(branches),
        scenarios=tuple(result),
    )

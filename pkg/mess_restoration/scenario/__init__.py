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

"""Load and availability scenarios: sampling, reduction and CSV storage."""

from .io import read_scenarios_csv, scenarios_to_frame, write_scenarios_csv
from .models import (
    AvailabilityModel,
    LoadClass,
    LoadForecast,
    Scenario,
    ScenarioError,
    ScenarioInputs,
    ScenarioSet,
    ScenarioSettings,
    ScenarioSettingsError,
    branch_element,
    load_element,
    road_element,
    tan_phi,
)
from .reduction import backward_reduction, reduce_scenarios, scenario_features
from .sampling import (
    availability_trajectories,
    element_rng,
    generate_scenarios,
    load_trajectories,
    sample_availability,
    sample_load,
)

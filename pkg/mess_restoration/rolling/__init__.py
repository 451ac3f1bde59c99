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

"""Rolling-horizon execution, realizations and the timeline report."""

from .charts import CHART_FILES, write_charts
from .realization import (
    Realization,
    RealizationEvent,
    sample_realization,
    scripted_realization,
)
from .report import (
    BUNDLE_FILES,
    METRICS_FILE,
    Metrics,
    TimelineReport,
    compute_metrics,
)
from .runner import (
    HorizonProblem,
    RollingRun,
    RollingState,
    first_horizon_scenarios,
    run,
    solve_once,
)
from .settings import (
    WORKERS_ENV,
    FleetMode,
    RollingSettings,
    RollingSettingsError,
    workers_from_env,
)

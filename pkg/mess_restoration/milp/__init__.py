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

"""Stochastic restoration MILP, bundled branch and bound and MPS exchange."""

from .audit import (
    AuditReport,
    audit_solution,
    cost_breakdown,
    marker_frame,
    marker_path,
    write_marker_csv,
)
from .branch_and_bound import BranchAndBound, solve
from .builder import (
    FirstStage,
    IntervalDispatch,
    ModelIndex,
    RestorationModel,
    build_model,
    first_stage,
    interval_dispatch,
    most_likely_scenario,
)
from .lp import Relaxation
from .model import (
    Constraint,
    CostTerm,
    LpArrays,
    Marker,
    MilpModel,
    MilpModelError,
    Sense,
    Variable,
    VarKind,
)
from .mps import (
    MpsFormatError,
    export_mps,
    mps_lines,
    parse_mps,
    read_mps,
    read_solution,
    write_solution,
)
from .problem import HorizonState, RestorationSystem
from .reopt import (
    ReoptInfeasibleError,
    ReoptPolicy,
    deterministic_reopt,
    expected_scenario,
)
from .settings import (
    LpEngine,
    ModelSettings,
    Solution,
    SolveOptions,
    SolveOptionsError,
    SolverError,
    SolverMode,
    SolveStatus,
    TransportCostWeighting,
)
from .simplex import LpResult, LpStatus, solve_dense_lp

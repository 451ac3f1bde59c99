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
from collections.abc import Mapping
from enum import Enum

import numpy as np

from ..scenario import Scenario, ScenarioSet
from ..tsn import TimeSpaceNetwork, cut_set
from .branch_and_bound import solve
from .builder import (
    FirstStage,
    IntervalDispatch,
    LayerKey,
    build_model,
    interval_dispatch,
)
from .problem import HorizonState, RestorationSystem
from .settings import ModelSettings, SolveOptions, SolverMode

logger = logging.getLogger(__name__)


class ReoptInfeasibleError(Exception):
    pass


class ReoptPolicy(str, Enum):
    """How far the deterministic re-optimisation looks ahead"""

    remaining_horizon = "remaining_horizon"
    single_interval = "single_interval"


def expected_scenario(
    scenarios: ScenarioSet, horizon: int | None = None
) -> ScenarioSet:
    """Collapse a scenario set to its expectation

    Loads are probability-weighted means; an element is up when it is up with
    probability at least one half. Scenarios conditioned on the realized state
    agree on the first interval, so that interval carries the realization.

    :param horizon: keep only the leading intervals, all of them by default
    """
    horizon = scenarios.horizon if horizon is None else horizon
    if not 1 <= horizon <= scenarios.horizon:
        raise ReoptInfeasibleError(
            f"Cannot take {horizon} intervals from scenarios of {scenarios.horizon}"
        )
    road_up, branch_up = scenarios.expected_up(0.5)
    scenario = Scenario(
        probability=1.0,
        load_kw=scenarios.expected_load_kw()[:, :horizon].copy(),
        road_up=road_up[:, :horizon].copy(),
        branch_up=branch_up[:, :horizon].copy(),
    )
    return ScenarioSet(
        buses=scenarios.buses,
        roads=scenarios.roads,
        branches=scenarios.branches,
        scenarios=(scenario,),
    )


def deterministic_reopt(
    system: RestorationSystem,
    state: HorizonState,
    realized: ScenarioSet,
    layers: Mapping[LayerKey, TimeSpaceNetwork],
    fixed: FirstStage,
    options: SolveOptions | None = None,
    settings: ModelSettings | None = None,
) -> IntervalDispatch:
    """Dispatch for the first interval with routing and topology fixed

    :param realized: single scenario, realized in its first interval
    :param layers: one layer per MESS for scenario 0
    :param fixed: first-stage decisions of the stochastic solve
    :raises ReoptInfeasibleError: the fixed decisions do not fit the layers or the
        model has no feasible point
    """
    if len(realized) != 1:
        raise ReoptInfeasibleError(
            f"Re-optimisation needs one scenario, got {len(realized)}"
        )
    options = options or SolveOptions.default()
    if options.mode != SolverMode.bundled:
        raise ReoptInfeasibleError("Re-optimisation runs on the bundled solver only")
    rm = build_model(system, state, realized, layers, settings)
    model, index = rm.model, rm.index

    for mess, key in fixed.stage_keys().items():
        arcs = cut_set(layers[(mess, 0)], 0)
        if not any(arc.stage_key == key for arc in arcs):
            raise ReoptInfeasibleError(
                f"MESS {mess}: implemented arc {key[0].value} {key[1] or '-'}>"
                f"{key[2] or '-'} is not available after the realization"
            )
        for arc in arcs:
            var = index.zeta[(mess, 0, arc)]
            if arc.stage_key == key:
                model.set_bounds(var, 1.0, 1.0)
            else:
                model.set_bounds(var, 0.0, 0.0)

    for branch in system.ds.branch_ids:
        var = index.alpha[(branch, 0, 0)]
        status = 1.0 if branch in fixed.closed else 0.0
        variable = model.variables[var]
        if not variable.lb <= status <= variable.ub:
            raise ReoptInfeasibleError(
                f"Branch {branch} cannot be {'closed' if status else 'open'}"
                " under the realized damage"
            )
        model.set_bounds(var, status, status)

    solution = solve(model, options)
    if not solution.status.has_solution:
        raise ReoptInfeasibleError(
            f"Re-optimisation at interval {state.t0} is {solution.status.value}"
            f" ({', '.join(solution.infeasibility_hint) or 'no hint'})"
        )
    values = np.asarray(solution.values, dtype=float)
    logger.info(
        "re-optimisation at interval %d: objective %.6g", state.t0, solution.objective
    )
    return interval_dispatch(rm, values, 0)

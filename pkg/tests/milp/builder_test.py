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

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from mess_restoration.case import CaseConfig
from mess_restoration.grid import lindistflow_residual, validate_radial
from mess_restoration.milp import (
    CostTerm,
    FirstStage,
    LpEngine,
    LpResult,
    LpStatus,
    Marker,
    MilpModelError,
    ModelSettings,
    ReoptInfeasibleError,
    Relaxation,
    SolveOptions,
    SolverMode,
    SolveStatus,
    audit_solution,
    build_model,
    cost_breakdown,
    deterministic_reopt,
    expected_scenario,
    first_stage,
    interval_dispatch,
    most_likely_scenario,
    solve,
    solve_dense_lp,
)
from mess_restoration.rolling.runner import HorizonProblem, RollingRun
from mess_restoration.tsn import ArcKind, NodeKind, TsArc, TsNode


@pytest.fixture
def toy2_run(toy2: CaseConfig) -> RollingRun:
    return RollingRun(toy2)


@pytest.fixture
def toy2_problem(toy2_run: RollingRun) -> HorizonProblem:
    return toy2_run.problem(toy2_run.initial_state())


@pytest.fixture
def toy2_values(toy2_run: RollingRun, toy2_problem: HorizonProblem) -> np.ndarray:
    solution = solve(toy2_problem.model.model, toy2_run.options)
    assert solution.status == SolveStatus.optimal
    return np.asarray(solution.values)


def test_identical_scenarios_share_probability(toy2_problem: HorizonProblem) -> None:
    scenarios = toy2_problem.scenarios
    assert len(scenarios) == 2
    assert scenarios.probabilities.tolist() == pytest.approx([0.5, 0.5])
    assert most_likely_scenario(scenarios) == 0


def test_every_constraint_group_is_present(toy2_problem: HorizonProblem) -> None:
    counts = toy2_problem.model.model.marker_counts()
    for marker in (
        Marker.routing_cut,
        Marker.routing_flow,
        Marker.mess_presence,
        Marker.mess_energy,
        Marker.radiality_flow,
        Marker.radiality_count,
        Marker.power_balance,
        Marker.voltage_drop,
        Marker.branch_capacity,
        Marker.microgrid_energy,
        Marker.nonanticipativity,
    ):
        assert counts.get(marker, 0) > 0, marker
    assert Marker.radiality_strict not in counts
    # one cut row per MESS, scenario and interval
    assert counts[Marker.routing_cut] == 1 * 2 * 3


def test_mess_heads_for_the_short_feeder(
    toy2_problem: HorizonProblem, toy2_values: np.ndarray
) -> None:
    rm = toy2_problem.model
    fixed = first_stage(rm, toy2_values)
    assert fixed.stage_keys() == {"mess1": (ArcKind.moving, "d1", "m2")}
    terms = cost_breakdown(rm.model, toy2_values)
    assert terms[CostTerm.transportation] == pytest.approx(80.0)
    assert terms[CostTerm.interruption] >= 0.0
    assert sum(terms.values()) == pytest.approx(rm.model.objective_value(toy2_values))
    assert audit_solution(rm.model, toy2_values, tol=1e-6).ok


def test_first_interval_is_radial_and_balanced(
    toy2_problem: HorizonProblem, toy2_values: np.ndarray
) -> None:
    rm = toy2_problem.model
    system = rm.system
    for s in range(len(toy2_problem.scenarios)):
        dispatch = interval_dispatch(rm, toy2_values, s, 0)
        topology = dispatch.topology(system)
        assert validate_radial(system.ds, topology).ok
        state = dispatch.power_flow_state(system)
        assert lindistflow_residual(system.ds, topology, state) < 1e-6
        assert dispatch.closed == first_stage(rm, toy2_values).closed
    later = interval_dispatch(rm, toy2_values, 0, 1)
    assert later.arcs["mess1"].tail.site == "m2"
    assert later.mess_net_discharge("mess1") > 0


def test_formulation_switches(toy2_problem: HorizonProblem) -> None:
    rm = toy2_problem.model
    strict = build_model(
        rm.system,
        rm.state,
        rm.scenarios,
        rm.layers,
        ModelSettings(strict_radiality=True, pairwise_nonanticipativity=True),
    )
    counts = strict.model.marker_counts()
    default = rm.model.marker_counts()
    assert counts[Marker.radiality_strict] == default[Marker.radiality_bound]
    # two scenarios: one pairwise row per group instead of one row per scenario
    assert 2 * counts[Marker.nonanticipativity] == default[Marker.nonanticipativity]


def test_inputs_are_checked(toy2_problem: HorizonProblem) -> None:
    rm = toy2_problem.model
    with pytest.raises(MilpModelError, match="Scenarios cover"):
        build_model(rm.system, replace(rm.state, horizon=5), rm.scenarios, rm.layers)
    with pytest.raises(MilpModelError, match="No layer"):
        build_model(rm.system, rm.state, rm.scenarios, {})
    with pytest.raises(MilpModelError, match="No initial energy"):
        build_model(
            rm.system, replace(rm.state, mess_energy={}), rm.scenarios, rm.layers
        )


def test_expected_scenario(toy2_problem: HorizonProblem) -> None:
    scenarios = toy2_problem.scenarios
    single = expected_scenario(scenarios)
    assert len(single) == 1
    assert np.allclose(single[0].load_kw, scenarios[0].load_kw)
    assert expected_scenario(scenarios, 1).horizon == 1
    with pytest.raises(ReoptInfeasibleError):
        expected_scenario(scenarios, 4)


def test_reopt_keeps_the_first_stage(
    toy2_run: RollingRun, toy2_problem: HorizonProblem, toy2_values: np.ndarray
) -> None:
    fixed = first_stage(toy2_problem.model, toy2_values)
    state = toy2_run.initial_state()
    dispatch = toy2_run.reopt(state, toy2_problem, fixed)
    assert dispatch.arcs["mess1"].stage_key == fixed.arcs["mess1"].stage_key
    assert dispatch.closed == fixed.closed


def test_reopt_rejects_unavailable_decisions(
    toy2_run: RollingRun, toy2_problem: HorizonProblem, toy2_values: np.ndarray
) -> None:
    system = toy2_problem.model.system
    realized = expected_scenario(toy2_problem.scenarios)
    layers = toy2_run.layers(realized, toy2_run.initial_state(), dump=False)
    fixed = first_stage(toy2_problem.model, toy2_values)
    nowhere = TsArc(
        TsNode(0, NodeKind.site, "d1"), TsNode(1, NodeKind.site, "x9"), ArcKind.moving
    )
    with pytest.raises(ReoptInfeasibleError, match="not available"):
        deterministic_reopt(
            system,
            toy2_problem.state,
            realized,
            layers,
            FirstStage(arcs={"mess1": nowhere}, closed=fixed.closed),
        )
    with pytest.raises(ReoptInfeasibleError, match="one scenario"):
        deterministic_reopt(
            system, toy2_problem.state, toy2_problem.scenarios, layers, fixed
        )
    export = SolveOptions(mode=SolverMode.export_only, export_path=Path("t.mps"))
    with pytest.raises(ReoptInfeasibleError, match="bundled"):
        deterministic_reopt(
            system, toy2_problem.state, realized, layers, fixed, options=export
        )


def test_dense_simplex_solves_the_toy2_relaxation(
    toy2_problem: HorizonProblem,
) -> None:
    arrays = toy2_problem.model.model.to_arrays()
    dense = solve_dense_lp(
        arrays.c,
        arrays.a_ub.toarray(),
        arrays.b_ub,
        arrays.a_eq.toarray(),
        arrays.b_eq,
        arrays.lb,
        arrays.ub,
    )
    highs = Relaxation(arrays, LpEngine.highs, 1e-7).solve(arrays.lb, arrays.ub)
    assert dense.status == LpStatus.optimal
    assert dense.objective == pytest.approx(highs.objective, rel=1e-6, abs=1e-6)
    assert np.all(arrays.a_ub @ dense.x <= arrays.b_ub + 1e-6)
    assert arrays.a_eq @ dense.x == pytest.approx(arrays.b_eq, abs=1e-6)


@pytest.mark.slow
def test_toy2_branch_and_bound_on_the_dense_simplex(
    toy2_run: RollingRun, toy2_problem: HorizonProblem
) -> None:
    model = toy2_problem.model.model
    reference = solve(model, replace(toy2_run.options, lp_engine=LpEngine.highs))
    dense = solve(model, replace(toy2_run.options, lp_engine=LpEngine.simplex))
    assert dense.status == SolveStatus.optimal
    assert dense.objective == pytest.approx(reference.objective, rel=1e-5)


def test_relaxation_falls_back_to_highs_on_a_singular_basis(
    toy2_problem: HorizonProblem, monkeypatch: pytest.MonkeyPatch
) -> None:
    arrays = toy2_problem.model.model.to_arrays()

    def singular(c: np.ndarray, *args: object, **kwargs: object) -> LpResult:
        return LpResult(LpStatus.singular_basis, np.full(len(c), np.nan))

    monkeypatch.setattr("mess_restoration.milp.lp.solve_dense_lp", singular)
    result = Relaxation(arrays, LpEngine.simplex, 1e-7).solve(arrays.lb, arrays.ub)
    assert result.status == LpStatus.optimal
    assert np.all(np.isfinite(result.x))

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

from itertools import product
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import linprog  # type: ignore
from scipy.sparse import csr_matrix  # type: ignore

from mess_restoration.case import load_case
from mess_restoration.milp import (
    LpArrays,
    LpEngine,
    SolveOptions,
    SolveStatus,
    audit_solution,
    solve,
)
from mess_restoration.rolling.runner import HorizonProblem, RollingRun

CASES = Path(__file__).resolve().parents[2] / "cases"
ROW_TOL = 1e-9


@pytest.fixture(scope="module")
def toy1_problem() -> HorizonProblem:
    rolling = RollingRun(load_case(CASES / "toy1.json"))
    return rolling.problem(rolling.initial_state())


def fixed_lp(arrays: LpArrays, lb: np.ndarray, ub: np.ndarray) -> float | None:
    """Optimum of the model with the given bounds, None when infeasible"""
    bounds = [
        (None if np.isinf(low) else low, None if np.isinf(high) else high)
        for low, high in zip(lb, ub)
    ]
    result = linprog(
        arrays.c,
        A_ub=arrays.a_ub if len(arrays.b_ub) else None,
        b_ub=arrays.b_ub if len(arrays.b_ub) else None,
        A_eq=arrays.a_eq if len(arrays.b_eq) else None,
        b_eq=arrays.b_eq if len(arrays.b_eq) else None,
        bounds=bounds,
        method="highs",
    )
    if result.status == 2:
        return None
    assert result.status == 0, result.message
    return float(result.fun) + arrays.offset


def binary_only_rows(matrix: csr_matrix, integer: np.ndarray) -> np.ndarray:
    continuous = csr_matrix(matrix[:, np.flatnonzero(~integer)])
    return np.flatnonzero(np.diff(continuous.indptr) == 0)


def enumerated_optimum(arrays: LpArrays) -> tuple[float, int]:
    """Best objective over every binary assignment, and how many needed an LP

    Rows over binaries alone discard most assignments before any LP is solved.
    """
    binaries = np.flatnonzero(arrays.integer)
    free = binaries[arrays.lb[binaries] < arrays.ub[binaries]]
    assert len(free) <= 20
    points = np.zeros((2 ** len(free), arrays.n_variables))
    points[:, binaries] = arrays.lb[binaries]
    points[:, free] = np.array(list(product([0.0, 1.0], repeat=len(free))))
    keep = np.ones(len(points), dtype=bool)
    ub_rows = binary_only_rows(arrays.a_ub, arrays.integer)
    if len(ub_rows):
        lhs = arrays.a_ub[ub_rows] @ points.T
        keep &= np.all(lhs <= arrays.b_ub[ub_rows, None] + ROW_TOL, axis=0)
    eq_rows = binary_only_rows(arrays.a_eq, arrays.integer)
    if len(eq_rows):
        lhs = arrays.a_eq[eq_rows] @ points.T
        keep &= np.all(np.abs(lhs - arrays.b_eq[eq_rows, None]) <= ROW_TOL, axis=0)
    best = np.inf
    for point in points[keep]:
        lb, ub = arrays.lb.copy(), arrays.ub.copy()
        lb[free] = ub[free] = point[free]
        value = fixed_lp(arrays, lb, ub)
        if value is not None:
            best = min(best, value)
    return best, int(keep.sum())


def test_toy1_is_small_enough_to_enumerate(toy1_problem: HorizonProblem) -> None:
    arrays = toy1_problem.model.model.to_arrays()
    assert 0 < int(arrays.integer.sum()) <= 40


@pytest.mark.parametrize("engine", [LpEngine.simplex, LpEngine.highs])
def test_branch_and_bound_matches_enumeration(
    toy1_problem: HorizonProblem, engine: LpEngine
) -> None:
    model = toy1_problem.model.model
    arrays = model.to_arrays()
    best, n_candidates = enumerated_optimum(arrays)
    assert np.isfinite(best)
    assert n_candidates <= 5000

    solution = solve(model, SolveOptions(mip_gap=1e-9, lp_engine=engine))
    assert solution.status == SolveStatus.optimal
    assert solution.objective == pytest.approx(best, rel=1e-7, abs=1e-7)
    assert audit_solution(model, solution.values).ok

    # the continuous part of the incumbent is optimal for its binaries
    binaries = np.flatnonzero(arrays.integer)
    lb, ub = arrays.lb.copy(), arrays.ub.copy()
    lb[binaries] = ub[binaries] = np.round(solution.values[binaries])
    polished = fixed_lp(arrays, lb, ub)
    assert polished == pytest.approx(solution.objective, rel=1e-7, abs=1e-7)

    relaxed = fixed_lp(arrays, arrays.lb, arrays.ub)
    assert relaxed is not None and relaxed <= best + 1e-7

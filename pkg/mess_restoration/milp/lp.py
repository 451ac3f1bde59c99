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

import numpy as np
from scipy.optimize import linprog  # type: ignore

from .model import LpArrays
from .settings import LpEngine
from .simplex import LpResult, LpStatus, solve_dense_lp

logger = logging.getLogger(__name__)

# dense phase one is only run for hints on models up to this many matrix entries
HINT_SIZE_LIMIT = 4_000_000


class Relaxation:
    """LP relaxation of a model, solved under changing variable bounds"""

    def __init__(self, arrays: LpArrays, engine: LpEngine, feas_tol: float):
        self.arrays = arrays
        self.engine = engine
        self.feas_tol = feas_tol
        self._dense: tuple[np.ndarray, np.ndarray] | None = None

    def _dense_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        if self._dense is None:
            self._dense = (self.arrays.a_ub.toarray(), self.arrays.a_eq.toarray())
        return self._dense

    def solve(self, lb: np.ndarray, ub: np.ndarray) -> LpResult:
        match self.engine:
            case LpEngine.simplex:
                return self._simplex(lb, ub)
            case LpEngine.highs:
                return self._highs(lb, ub)
            case _:
                raise ValueError(f"Unknown LP engine {self.engine}")

    def infeasible_rows(self, lb: np.ndarray, ub: np.ndarray) -> tuple[int, ...]:
        """Rows blamed by a dense phase one, empty for very large models"""
        size = (len(self.arrays.b_ub) + len(self.arrays.b_eq)) * self.arrays.n_variables
        if size > HINT_SIZE_LIMIT:
            logger.debug("model too large for an infeasibility hint")
            return ()
        return self._dense_simplex(lb, ub).infeasible_rows

    def _simplex(self, lb: np.ndarray, ub: np.ndarray) -> LpResult:
        result = self._dense_simplex(lb, ub)
        if result.status == LpStatus.singular_basis:
            logger.warning("dense simplex lost its basis, re-solving with HiGHS")
            return self._highs(lb, ub)
        return result

    def _dense_simplex(self, lb: np.ndarray, ub: np.ndarray) -> LpResult:
        a_ub, a_eq = self._dense_matrices()
        return solve_dense_lp(
            self.arrays.c,
            a_ub,
            self.arrays.b_ub,
            a_eq,
            self.arrays.b_eq,
            lb,
            ub,
            feas_tol=self.feas_tol,
        )

    def _highs(self, lb: np.ndarray, ub: np.ndarray) -> LpResult:
        n = self.arrays.n_variables
        if np.any(lb > ub):
            return LpResult(LpStatus.infeasible, np.full(n, np.nan))
        bounds = [
            (
                None if np.isinf(low) else float(low),
                None if np.isinf(high) else float(high),
            )
            for low, high in zip(lb, ub)
        ]
        has_ub = len(self.arrays.b_ub) > 0
        has_eq = len(self.arrays.b_eq) > 0
        result = linprog(
            self.arrays.c,
            A_ub=self.arrays.a_ub if has_ub else None,
            b_ub=self.arrays.b_ub if has_ub else None,
            A_eq=self.arrays.a_eq if has_eq else None,
            b_eq=self.arrays.b_eq if has_eq else None,
            bounds=bounds,
            method="highs",
            options={
                "primal_feasibility_tolerance": self.feas_tol,
                "dual_feasibility_tolerance": self.feas_tol,
            },
        )
        match result.status:
            case 0:
                x = np.clip(np.asarray(result.x, dtype=float), lb, ub)
                return LpResult(
                    LpStatus.optimal,
                    x,
                    objective=float(self.arrays.c @ x),
                    iterations=int(getattr(result, "nit", 0)),
                )
            case 2:
                return LpResult(LpStatus.infeasible, np.full(n, np.nan))
            case 3:
                return LpResult(LpStatus.unbounded, np.full(n, np.nan))
            case _:
                logger.debug(
                    "HiGHS stopped with status %d: %s", result.status, result.message
                )
                return LpResult(LpStatus.iteration_limit, np.full(n, np.nan))

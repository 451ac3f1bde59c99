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

"""Dense bounded-variable two-phase primal simplex

Variables are shifted so every column is bounded below by zero. Nonbasic
columns sit at zero or at their finite upper bound. Pricing is Dantzig's rule
until a long run of degenerate pivots, after which Bland's rule is used for the
rest of the solve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)

DEGENERATE_RUN = 50
REFRESH_EVERY = 100
PIVOT_TOL = 1e-9
OPTIMALITY_TOL = 1e-9
# smallest tableau entry an artificial is pivoted out on
DRIVE_OUT_TOL = 1e-7


class LpStatus(str, Enum):
    optimal = "optimal"
    infeasible = "infeasible"
    unbounded = "unbounded"
    iteration_limit = "iteration_limit"
    singular_basis = "singular_basis"


class SingularBasisError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LpResult:
    """Outcome of one LP relaxation

    :param objective: ``c x`` without any constant offset
    :param infeasible_rows: rows (``a_ub`` first, then ``a_eq``) whose phase-one
        artificials stayed positive
    """

    status: LpStatus
    x: np.ndarray
    objective: float = math.inf
    infeasible_rows: tuple[int, ...] = ()
    iterations: int = 0


@dataclass(frozen=True)
class _Column:
    source: int
    sign: float
    shift: float


class _Tableau:
    def __init__(
        self, matrix: np.ndarray, rhs: np.ndarray, upper: np.ndarray, basis: list[int]
    ):
        self.matrix = matrix
        self.rhs = rhs
        self.upper = upper
        self.basis = basis
        self.t = matrix.copy()
        self.x_b = rhs.copy()
        self.at_upper = np.zeros(matrix.shape[1], dtype=bool)
        self.active = np.ones(matrix.shape[1], dtype=bool)
        self.iterations = 0

    def values(self) -> np.ndarray:
        y = np.where(self.at_upper, self.upper, 0.0)
        y[self.basis] = self.x_b
        return y

    def refresh(self) -> None:
        if not self.basis:
            return
        b_matrix = self.matrix[:, self.basis]
        nonbasic = np.where(self.at_upper, self.upper, 0.0)
        nonbasic[self.basis] = 0.0
        try:
            self.t = np.linalg.solve(b_matrix, self.matrix)
            self.x_b = np.linalg.solve(b_matrix, self.rhs - self.matrix @ nonbasic)
        except np.linalg.LinAlgError as error:
            raise SingularBasisError(
                f"basis of {len(self.basis)} columns is singular"
            ) from error

    def pivot(self, row: int, col: int) -> None:
        self.t[row] /= self.t[row, col]
        factors = self.t[:, col].copy()
        factors[row] = 0.0
        self.t -= np.outer(factors, self.t[row])
        self.basis[row] = col

    def delete_row(self, row: int) -> None:
        """Drop the constraint owned by the artificial basic in tableau ``row``

        The artificial column is a unit vector, so the constraint it covers is
        not the tableau row once earlier pivots have reordered the basis.
        """
        owner = int(np.argmax(np.abs(self.matrix[:, self.basis[row]])))
        keep = np.arange(self.matrix.shape[0]) != owner
        self.matrix = self.matrix[keep]
        self.rhs = self.rhs[keep]
        del self.basis[row]
        self.refresh()

    def run(self, cost: np.ndarray, max_iterations: int) -> LpStatus:
        bland = False
        degenerate = 0
        in_basis = np.zeros(len(cost), dtype=bool)
        for _ in range(max_iterations):
            in_basis[:] = False
            in_basis[self.basis] = True
            reduced = cost - cost[self.basis] @ self.t if self.basis else cost.copy()
            eligible = self.active & ~in_basis
            improving = eligible & (
                (~self.at_upper & (reduced < -OPTIMALITY_TOL))
                | (self.at_upper & (reduced > OPTIMALITY_TOL))
            )
            candidates = np.flatnonzero(improving)
            if not len(candidates):
                return LpStatus.optimal
            if bland:
                col = int(candidates[0])
            else:
                col = int(candidates[np.argmax(np.abs(reduced[candidates]))])
            direction = -1.0 if self.at_upper[col] else 1.0
            theta, row, leaves_upper = self._ratio_test(col, direction)
            if math.isinf(theta):
                return LpStatus.unbounded
            self.iterations += 1
            step = direction * theta * self.t[:, col]
            self.x_b = self.x_b - step
            if row < 0:
                self.at_upper[col] = not self.at_upper[col]
            else:
                start = self.upper[col] if self.at_upper[col] else 0.0
                leaving = self.basis[row]
                self.at_upper[leaving] = leaves_upper
                self.at_upper[col] = False
                self.pivot(row, col)
                self.x_b[row] = start + direction * theta
            if theta <= PIVOT_TOL:
                degenerate += 1
                if degenerate >= DEGENERATE_RUN and not bland:
                    logger.debug(
                        "switching to Bland's rule after %d degenerate pivots",
                        degenerate,
                    )
                    bland = True
            else:
                degenerate = 0
            if self.iterations % REFRESH_EVERY == 0:
                self.refresh()
        return LpStatus.iteration_limit

    def _ratio_test(self, col: int, direction: float) -> tuple[float, int, bool]:
        """Step length, leaving row (-1 for a bound flip) and leaving bound"""
        best = self.upper[col]
        best_row = -1
        best_var = math.inf
        leaves_upper = False
        alpha = direction * self.t[:, col] if self.basis else np.zeros(0)
        for i in np.flatnonzero(np.abs(alpha) > PIVOT_TOL):
            var = self.basis[i]
            if alpha[i] > 0:
                ratio = max(self.x_b[i], 0.0) / alpha[i]
                to_upper = False
            else:
                bound = self.upper[var]
                if math.isinf(bound):
                    continue
                ratio = max(bound - self.x_b[i], 0.0) / -alpha[i]
                to_upper = True
            if ratio < best or (ratio == best and best_row >= 0 and var < best_var):
                best, best_row, best_var, leaves_upper = ratio, int(i), var, to_upper
        return float(best), best_row, leaves_upper


def solve_dense_lp(
    c: np.ndarray,
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    a_eq: np.ndarray,
    b_eq: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
    feas_tol: float = 1e-7,
    max_iterations: int | None = None,
) -> LpResult:
    """Minimise ``c x`` subject to ``a_ub x <= b_ub``, ``a_eq x = b_eq``, bounds

    A basis that cannot be refactorised ends the solve with
    :attr:`LpStatus.singular_basis` instead of raising.
    """
    try:
        return _solve(c, a_ub, b_ub, a_eq, b_eq, lb, ub, feas_tol, max_iterations)
    except SingularBasisError as error:
        logger.warning("dense simplex stopped: %s", error)
        return LpResult(LpStatus.singular_basis, np.full(len(c), np.nan))


def _solve(
    c: np.ndarray,
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    a_eq: np.ndarray,
    b_eq: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
    feas_tol: float,
    max_iterations: int | None,
) -> LpResult:
    n = len(c)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    if np.any(lb > ub):
        return LpResult(LpStatus.infeasible, np.full(n, np.nan))
    a = np.vstack([np.reshape(a_ub, (-1, n)), np.reshape(a_eq, (-1, n))])
    b = np.concatenate([np.asarray(b_ub, dtype=float), np.asarray(b_eq, dtype=float)])
    m_ub = len(b_ub)
    m = len(b)

    columns: list[_Column] = []
    uppers: list[float] = []
    fixed = np.zeros(n)
    for j in range(n):
        if lb[j] == ub[j]:
            fixed[j] = lb[j]
        elif math.isfinite(lb[j]):
            columns.append(_Column(j, 1.0, lb[j]))
            uppers.append(ub[j] - lb[j])
        elif math.isfinite(ub[j]):
            columns.append(_Column(j, -1.0, ub[j]))
            uppers.append(math.inf)
        else:
            columns.append(_Column(j, 1.0, 0.0))
            columns.append(_Column(j, -1.0, 0.0))
            uppers.extend([math.inf, math.inf])
    shift = fixed.copy()
    for column in columns:
        shift[column.source] += column.shift
    rhs = b - a @ shift
    structural = (
        np.column_stack([column.sign * a[:, column.source] for column in columns])
        if columns
        else np.zeros((m, 0))
    )
    cost = np.array([column.sign * c[column.source] for column in columns])

    slacks = np.zeros((m, m_ub))
    slacks[np.arange(m_ub), np.arange(m_ub)] = 1.0
    flip = rhs < 0
    structural[flip] *= -1.0
    slacks[flip] *= -1.0
    rhs = np.abs(rhs)

    basis: list[int] = []
    artificial_rows = [i for i in range(m) if not (i < m_ub and slacks[i, i] > 0)]
    n_struct = structural.shape[1]
    artificials = np.zeros((m, len(artificial_rows)))
    for k, i in enumerate(artificial_rows):
        artificials[i, k] = 1.0
    art_of_row = {i: n_struct + m_ub + k for k, i in enumerate(artificial_rows)}
    for i in range(m):
        basis.append(art_of_row[i] if i in art_of_row else n_struct + i)

    matrix = np.hstack([structural, slacks, artificials])
    upper = np.concatenate(
        [np.array(uppers, dtype=float), np.full(m_ub + len(artificial_rows), np.inf)]
    )
    total = matrix.shape[1]
    limit = max_iterations or 50 * (m + total) + 1000
    tableau = _Tableau(matrix, rhs, upper, basis)

    if artificial_rows:
        phase_one = np.zeros(total)
        phase_one[n_struct + m_ub :] = 1.0
        status = tableau.run(phase_one, limit)
        tableau.refresh()
        y = tableau.values()
        residual = y[n_struct + m_ub :]
        scale = max(1.0, float(np.abs(rhs).max(initial=0.0)))
        if status == LpStatus.iteration_limit:
            return LpResult(status, np.full(n, np.nan), iterations=tableau.iterations)
        if residual.sum() > feas_tol * scale:
            rows = tuple(
                artificial_rows[k]
                for k in range(len(artificial_rows))
                if residual[k] > feas_tol * scale
            )
            logger.debug("phase one ends with %d infeasible rows", len(rows))
            return LpResult(
                LpStatus.infeasible,
                np.full(n, np.nan),
                infeasible_rows=rows,
                iterations=tableau.iterations,
            )
        _drive_out_artificials(tableau, n_struct + m_ub)
        tableau.active[n_struct + m_ub :] = False
        tableau.upper[n_struct + m_ub :] = 0.0

    phase_two = np.concatenate([cost, np.zeros(total - n_struct)])
    status = tableau.run(phase_two, limit)
    if status != LpStatus.optimal:
        return LpResult(status, np.full(n, np.nan), iterations=tableau.iterations)
    tableau.refresh()
    y = tableau.values()
    x = fixed.copy()
    for k, column in enumerate(columns):
        x[column.source] += column.shift + column.sign * max(y[k], 0.0)
    x = np.clip(x, lb, ub)
    return LpResult(
        LpStatus.optimal,
        x,
        objective=float(c @ x),
        iterations=tableau.iterations,
    )


def _drive_out_artificials(tableau: _Tableau, first_artificial: int) -> None:
    row = 0
    while row < len(tableau.basis):
        if tableau.basis[row] < first_artificial:
            row += 1
            continue
        in_basis = np.zeros(tableau.t.shape[1], dtype=bool)
        in_basis[tableau.basis] = True
        weights = np.abs(tableau.t[row, :first_artificial])
        weights[in_basis[:first_artificial]] = 0.0
        col = int(np.argmax(weights)) if len(weights) else -1
        if col < 0 or weights[col] <= DRIVE_OUT_TOL:
            # redundant equality
            tableau.delete_row(row)
            continue
        value = tableau.upper[col] if tableau.at_upper[col] else 0.0
        tableau.at_upper[col] = False
        tableau.pivot(row, col)
        tableau.x_b[row] = value
        row += 1
    tableau.refresh()

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

import heapq
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .audit import audit_solution, marker_path, write_marker_csv
from .lp import Relaxation
from .model import MilpModel
from .mps import export_mps, read_solution
from .settings import (
    SolveOptions,
    SolverError,
    SolverMode,
    SolveStatus,
    Solution,
)
from .simplex import LpResult, LpStatus

logger = logging.getLogger(__name__)

# row and bound violation above which a candidate incumbent is rejected
AUDIT_TOL = 1e-6


def solve(model: MilpModel, options: SolveOptions | None = None) -> Solution:
    """Solve a model with the bundled solver, or export it for an external one"""
    options = options or SolveOptions.default()
    model.validate()
    match options.mode:
        case SolverMode.bundled:
            return BranchAndBound(model, options).run()
        case SolverMode.export_only:
            return _export_and_import(model, options)
        case _:
            raise ValueError(f"Unknown solver mode {options.mode}")


def _export_and_import(model: MilpModel, options: SolveOptions) -> Solution:
    assert options.export_path is not None
    export_mps(model, options.export_path)
    write_marker_csv(model, marker_path(options.export_path))
    logger.info("model %s exported to %s", model.name, options.export_path)
    if options.solution_path is None or not options.solution_path.is_file():
        raise SolverError(
            f"Model written to {options.export_path}; solution file"
            f" {options.solution_path} not available"
        )
    values = read_solution(options.solution_path, model)
    report = audit_solution(model, values, tol=max(options.feas_tol, 1e-6))
    if not report.ok:
        raise SolverError(
            f"Imported solution {options.solution_path} violates the model:\n{report}"
        )
    return Solution(
        status=SolveStatus.feasible,
        values=values,
        objective=model.objective_value(values),
    )


@dataclass(order=True)
class _Node:
    bound: float
    sequence: int
    lb: np.ndarray = field(compare=False)
    ub: np.ndarray = field(compare=False)
    x: np.ndarray = field(compare=False)


class BranchAndBound:
    """Best-bound branch and bound over LP relaxations

    Both children of a node are solved when the node is branched, so every
    queued node carries its own LP bound. Nodes leave the queue by bound, then
    in creation order; the branching variable is the most fractional binary,
    lowest index first. Child LPs run on a thread pool without affecting the
    search order.
    """

    def __init__(self, model: MilpModel, options: SolveOptions):
        self.model = model
        self.options = options
        self.arrays = model.to_arrays()
        self.relaxation = Relaxation(self.arrays, options.lp_engine, options.feas_tol)
        self.binaries = np.flatnonzero(self.arrays.integer)
        self.incumbent = math.inf
        self.incumbent_x: np.ndarray | None = None
        self.nodes = 0
        self._sequence = itertools.count()

    def run(self) -> Solution:
        started = time.monotonic()
        lb, ub = self.arrays.lb.copy(), self.arrays.ub.copy()
        root = self.relaxation.solve(lb, ub)
        match root.status:
            case LpStatus.infeasible:
                return Solution(
                    status=SolveStatus.infeasible,
                    infeasibility_hint=self._hint(lb, ub, root),
                )
            case LpStatus.unbounded:
                raise SolverError(f"LP relaxation of {self.model.name} is unbounded")
            case LpStatus.iteration_limit | LpStatus.singular_basis:
                raise SolverError(
                    f"LP relaxation of {self.model.name} stopped: {root.status.value}"
                )
            case _:
                pass

        queue = [_Node(root.objective, next(self._sequence), lb, ub, root.x)]
        stopped_by_limit = False
        with ThreadPoolExecutor(max_workers=self.options.n_workers) as pool:
            while queue:
                if self._limit_reached(started):
                    stopped_by_limit = True
                    break
                if self._gap_closed(queue[0].bound):
                    break
                node = heapq.heappop(queue)
                if node.bound >= self.incumbent - self._cutoff():
                    continue
                self.nodes += 1
                branch = self._branching_variable(node.x)
                if branch is None:
                    if self._polish(node):
                        continue
                    branch = self._nearest_integral(node)
                    if branch is None:
                        continue
                children = self._children(node, branch)
                results = list(pool.map(self._solve_child, children))
                for (child_lb, child_ub), result in zip(children, results):
                    if (
                        result.status == LpStatus.optimal
                        and result.objective < self.incumbent - self._cutoff()
                    ):
                        heapq.heappush(
                            queue,
                            _Node(
                                result.objective,
                                next(self._sequence),
                                child_lb,
                                child_ub,
                                result.x,
                            ),
                        )
        return self._result(queue, stopped_by_limit)

    def _solve_child(self, bounds: tuple[np.ndarray, np.ndarray]) -> LpResult:
        return self.relaxation.solve(*bounds)

    def _children(
        self, node: _Node, var: int
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        down_ub = node.ub.copy()
        down_ub[var] = 0.0
        up_lb = node.lb.copy()
        up_lb[var] = 1.0
        return [(node.lb, down_ub), (up_lb, node.ub)]

    def _branching_variable(self, x: np.ndarray) -> int | None:
        if not len(self.binaries):
            return None
        values = x[self.binaries]
        fractionality = np.minimum(values - np.floor(values), np.ceil(values) - values)
        candidates = fractionality > self.options.int_tol
        if not candidates.any():
            return None
        scores = np.where(candidates, fractionality, -1.0)
        return int(self.binaries[int(np.argmax(scores))])

    def _polish(self, node: _Node) -> bool:
        """Re-solve with binaries fixed at their rounded values

        The candidate becomes the incumbent only if every row, bound and
        integrality requirement of the model holds at it. Returns whether a
        valid candidate was found.
        """
        if len(self.binaries):
            lb, ub = node.lb.copy(), node.ub.copy()
            lb[self.binaries] = ub[self.binaries] = np.round(node.x[self.binaries])
            result = self.relaxation.solve(lb, ub)
            if result.status != LpStatus.optimal:
                logger.debug("node %d: rounded binaries are infeasible", self.nodes)
                return False
            x = result.x
        else:
            x = node.x
        report = audit_solution(
            self.model, x, tol=self._audit_tol(), int_tol=self.options.int_tol
        )
        if not report.ok:
            logger.warning("node %d: candidate rejected, %s", self.nodes, report)
            return False
        objective = float(self.arrays.c @ x)
        if objective < self.incumbent:
            self.incumbent = objective
            self.incumbent_x = x
            logger.debug(
                "node %d: incumbent %.9g", self.nodes, objective + self.arrays.offset
            )
        return True

    def _audit_tol(self) -> float:
        return max(10 * self.options.feas_tol, AUDIT_TOL)

    def _nearest_integral(self, node: _Node) -> int | None:
        """Unfixed binary of the node that is not exactly integral"""
        if not len(self.binaries):
            return None
        values = node.x[self.binaries]
        free = node.lb[self.binaries] < node.ub[self.binaries]
        fractionality = np.where(free, np.abs(values - np.round(values)), 0.0)
        if not np.any(fractionality > 0):
            return None
        return int(self.binaries[int(np.argmax(fractionality))])

    def _cutoff(self) -> float:
        if math.isinf(self.incumbent):
            return 0.0
        return 1e-9 * max(1.0, abs(self.incumbent + self.arrays.offset))

    def _gap_closed(self, best_bound: float) -> bool:
        if self.incumbent_x is None:
            return False
        objective = self.incumbent + self.arrays.offset
        gap = (self.incumbent - best_bound) / max(1.0, abs(objective))
        return gap <= self.options.mip_gap

    def _limit_reached(self, started: float) -> bool:
        limit = self.options.node_limit
        if limit is not None and self.nodes >= limit:
            return True
        seconds = self.options.time_limit_s
        return seconds is not None and time.monotonic() - started >= seconds

    def _hint(self, lb: np.ndarray, ub: np.ndarray, root: LpResult) -> tuple[str, ...]:
        if np.any(lb > ub):
            return ("bounds",)
        rows = root.infeasible_rows or self.relaxation.infeasible_rows(lb, ub)
        markers = {
            self.model.constraints[self.arrays.constraint_of(r)].marker for r in rows
        }
        return tuple(m.value for m in sorted(markers, key=lambda m: m.order))

    def _result(self, queue: list[_Node], stopped_by_limit: bool) -> Solution:
        offset = self.arrays.offset
        if self.incumbent_x is None:
            status = SolveStatus.limit if stopped_by_limit else SolveStatus.infeasible
            logger.info(
                "%s: %s after %d nodes", self.model.name, status.value, self.nodes
            )
            return Solution(status=status, nodes=self.nodes)
        bound = min([node.bound for node in queue] + [self.incumbent])
        within_gap = (self.incumbent - bound) / max(
            1.0, abs(self.incumbent + offset)
        ) <= self.options.mip_gap
        status = (
            SolveStatus.optimal
            if within_gap or not (queue or stopped_by_limit)
            else SolveStatus.feasible
        )
        solution = Solution(
            status=status,
            values=self.incumbent_x,
            objective=self.model.objective_value(self.incumbent_x),
            bound=bound + offset,
            nodes=self.nodes,
        )
        logger.info("%s: %s", self.model.name, solution)
        return solution

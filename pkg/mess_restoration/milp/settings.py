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

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np


class SolveOptionsError(Exception):
    pass


class SolverError(Exception):
    pass


class SolverMode(Enum):
    bundled = 0
    export_only = 1


class LpEngine(Enum):
    simplex = 0
    highs = 1


class SolveStatus(str, Enum):
    optimal = "optimal"
    feasible = "feasible"
    infeasible = "infeasible"
    limit = "limit"

    @property
    def has_solution(self) -> bool:
        return self in (SolveStatus.optimal, SolveStatus.feasible)


class TransportCostWeighting(str, Enum):
    expected = "expected"
    nominal = "nominal"


@dataclass
class SolveOptions:
    """Options of the bundled branch-and-bound solver

    :param mip_gap: relative gap at which the search stops
    :param int_tol: distance from 0/1 below which a binary counts as integral
    :param feas_tol: LP feasibility tolerance
    :param time_limit_s: wall-clock limit, ``None`` for no limit
    :param node_limit: limit on processed nodes, ``None`` for no limit
    :param mode: solve in process or only export the model
    :param lp_engine: LP relaxation engine
    :param n_workers: threads evaluating child nodes
    :param export_path: MPS file written in export-only mode
    :param solution_path: solution file imported in export-only mode
    """

    mip_gap: float = 1e-4
    int_tol: float = 1e-6
    feas_tol: float = 1e-7
    time_limit_s: float | None = None
    node_limit: int | None = None
    mode: SolverMode = SolverMode.bundled
    lp_engine: LpEngine = LpEngine.simplex
    n_workers: int = 1
    export_path: Path | None = None
    solution_path: Path | None = None

    def __post_init__(self) -> None:
        for label, value in (
            ("mip_gap", self.mip_gap),
            ("int_tol", self.int_tol),
            ("feas_tol", self.feas_tol),
        ):
            if not value > 0:
                raise SolveOptionsError(f"{label} must be positive, got {value}")
        if self.time_limit_s is not None and not self.time_limit_s > 0:
            raise SolveOptionsError(
                f"time_limit_s must be positive, got {self.time_limit_s}"
            )
        if self.node_limit is not None and self.node_limit < 1:
            raise SolveOptionsError(
                f"node_limit must be at least 1, got {self.node_limit}"
            )
        if self.n_workers < 1:
            raise SolveOptionsError(
                f"n_workers must be at least 1, got {self.n_workers}"
            )
        if not isinstance(self.mode, SolverMode):
            raise SolveOptionsError(f"mode must be of type {SolverMode.__name__}")
        if not isinstance(self.lp_engine, LpEngine):
            raise SolveOptionsError(f"lp_engine must be of type {LpEngine.__name__}")
        if self.mode == SolverMode.export_only and self.export_path is None:
            raise SolveOptionsError("Export-only mode needs an export_path")

    @classmethod
    def default(cls) -> SolveOptions:
        return SolveOptions()


@dataclass
class ModelSettings:
    """Formulation switches of the restoration model

    :param transport_cost_weighting: weight moving arcs by scenario probability
    :param strict_radiality: also emit the redundant fictitious-flow pair
    :param pairwise_nonanticipativity: tie consecutive scenarios instead of
        tying each scenario to the probability-weighted average
    """

    transport_cost_weighting: TransportCostWeighting = TransportCostWeighting.expected
    strict_radiality: bool = False
    pairwise_nonanticipativity: bool = False

    @classmethod
    def default(cls) -> ModelSettings:
        return ModelSettings()


@dataclass
class Solution:
    status: SolveStatus
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = math.inf
    bound: float = -math.inf
    nodes: int = 0
    infeasibility_hint: tuple[str, ...] = ()

    @property
    def gap(self) -> float:
        if not self.status.has_solution:
            return math.inf
        return (self.objective - self.bound) / max(1.0, abs(self.objective))

    def __str__(self) -> str:
        if not self.status.has_solution:
            hint = (
                f" ({', '.join(self.infeasibility_hint)})"
                if self.infeasibility_hint
                else ""
            )
            return f"{self.status.value}{hint}"
        return (
            f"{self.status.value}: objective {self.objective:.6g},"
            f" bound {self.bound:.6g}, gap {self.gap:.2e}, nodes {self.nodes}"
        )

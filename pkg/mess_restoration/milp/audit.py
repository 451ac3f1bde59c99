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

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .model import CostTerm, MilpModel, VarKind


@dataclass(frozen=True)
class AuditReport:
    """Constraint, bound and integrality violations above tolerance"""

    max_violation: float
    rows: tuple[tuple[str, str, float], ...]
    bounds: tuple[tuple[str, float], ...]
    integrality: tuple[tuple[str, float], ...]

    @property
    def ok(self) -> bool:
        return not (self.rows or self.bounds or self.integrality)

    def by_marker(self) -> dict[str, float]:
        worst: dict[str, float] = {}
        for _, marker, amount in self.rows:
            worst[marker] = max(worst.get(marker, 0.0), amount)
        return worst

    def __str__(self) -> str:
        if self.ok:
            return f"all constraints hold (max violation {self.max_violation:.3g})"
        lines = [f"max violation {self.max_violation:.3g}"]
        lines.extend(f"row {name} [{marker}]: {v:.3g}" for name, marker, v in self.rows)
        lines.extend(f"bound {name}: {v:.3g}" for name, v in self.bounds)
        lines.extend(f"integrality {name}: {v:.3g}" for name, v in self.integrality)
        return "\n".join(lines)


def audit_solution(
    model: MilpModel, values: np.ndarray, tol: float = 1e-6, int_tol: float = 1e-6
) -> AuditReport:
    """Evaluate every row and bound of the model at ``values``"""
    rows = []
    worst = 0.0
    for constraint in model.constraints:
        violation = constraint.violation(values)
        worst = max(worst, violation)
        if violation > tol:
            rows.append((constraint.name, constraint.marker.value, violation))
    bounds = []
    integrality = []
    for j, variable in enumerate(model.variables):
        value = float(values[j])
        excess = max(variable.lb - value, value - variable.ub, 0.0)
        worst = max(worst, excess)
        if excess > tol:
            bounds.append((variable.name, excess))
        if variable.kind == VarKind.binary:
            distance = abs(value - round(value))
            if distance > int_tol:
                integrality.append((variable.name, distance))
    return AuditReport(
        max_violation=worst,
        rows=tuple(rows),
        bounds=tuple(bounds),
        integrality=tuple(integrality),
    )


def cost_breakdown(model: MilpModel, values: np.ndarray) -> dict[CostTerm, float]:
    """Objective split by cost term; the parts add up to the objective"""
    return model.term_values(values)


def marker_frame(model: MilpModel) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (i, row.name, row.marker.value, row.sense.value, row.rhs)
            for i, row in enumerate(model.constraints)
        ],
        columns=["row", "name", "marker", "sense", "rhs"],
    )


def marker_path(mps_path: Path) -> Path:
    """Marker table written next to an exported MPS file"""
    return mps_path.with_name(f"{mps_path.stem}_markers.csv")


def write_marker_csv(model: MilpModel, path: Path) -> None:
    marker_frame(model).to_csv(path, index=False, lineterminator="\n")

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
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix  # type: ignore


class MilpModelError(Exception):
    pass


class VarKind(str, Enum):
    continuous = "continuous"
    binary = "binary"


class Sense(str, Enum):
    le = "<="
    ge = ">="
    eq = "="


class Marker(str, Enum):
    """Constraint groups, in export order"""

    routing_cut = "routing_cut"
    routing_flow = "routing_flow"
    mess_presence = "mess_presence"
    mess_mode = "mess_mode"
    mess_exclusive = "mess_exclusive"
    mess_energy = "mess_energy"
    radiality_flow = "radiality_flow"
    radiality_bound = "radiality_bound"
    radiality_strict = "radiality_strict"
    radiality_injection = "radiality_injection"
    radiality_count = "radiality_count"
    power_balance = "power_balance"
    voltage_drop = "voltage_drop"
    branch_capacity = "branch_capacity"
    load_power_factor = "load_power_factor"
    microgrid_injection = "microgrid_injection"
    microgrid_energy = "microgrid_energy"
    nonanticipativity = "nonanticipativity"
    user = "user"

    @property
    def order(self) -> int:
        return list(Marker).index(self)


class CostTerm(str, Enum):
    interruption = "interruption"
    generation = "generation"
    battery = "battery"
    transportation = "transportation"


@dataclass
class Variable:
    name: str
    kind: VarKind = VarKind.continuous
    lb: float = 0.0
    ub: float = math.inf
    cost: float = 0.0
    term: CostTerm | None = None


@dataclass
class Constraint:
    name: str
    coefficients: dict[int, float]
    sense: Sense
    rhs: float
    marker: Marker

    def activity(self, values: np.ndarray) -> float:
        return math.fsum(c * float(values[j]) for j, c in self.coefficients.items())

    def violation(self, values: np.ndarray) -> float:
        lhs = self.activity(values)
        match self.sense:
            case Sense.le:
                return max(0.0, lhs - self.rhs)
            case Sense.ge:
                return max(0.0, self.rhs - lhs)
            case Sense.eq:
                return abs(lhs - self.rhs)
            case _:
                raise ValueError(f"Unknown sense {self.sense}")


@dataclass(frozen=True)
class LpArrays:
    """Matrix form: min c x + offset, a_ub x <= b_ub, a_eq x = b_eq, lb <= x <= ub

    ``ub_rows``/``eq_rows`` map matrix rows back to constraint indices; ``>=``
    rows are negated into ``a_ub``.
    """

    c: np.ndarray
    offset: float
    a_ub: csr_matrix
    b_ub: np.ndarray
    a_eq: csr_matrix
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integer: np.ndarray
    ub_rows: np.ndarray
    eq_rows: np.ndarray

    @property
    def n_variables(self) -> int:
        return len(self.c)

    def constraint_of(self, combined_row: int) -> int:
        """Constraint index of a row in the stacked [a_ub; a_eq] order"""
        if combined_row < len(self.ub_rows):
            return int(self.ub_rows[combined_row])
        return int(self.eq_rows[combined_row - len(self.ub_rows)])


@dataclass
class MilpModel:
    """Solver-agnostic mixed-integer linear model

    Each variable contributes to at most one cost term. Constant parts of the
    objective are kept per term in ``offsets``.
    """

    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    offsets: dict[CostTerm, float] = field(default_factory=dict)
    _by_name: dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def binaries(self) -> list[int]:
        return [j for j, v in enumerate(self.variables) if v.kind == VarKind.binary]

    def add_variable(
        self,
        name: str,
        kind: VarKind = VarKind.continuous,
        lb: float = 0.0,
        ub: float = math.inf,
        cost: float = 0.0,
        term: CostTerm | None = None,
    ) -> int:
        if not name or any(ch.isspace() for ch in name):
            raise MilpModelError(
                f"Variable name {name!r} must be non-empty without spaces"
            )
        if name in self._by_name:
            raise MilpModelError(f"Duplicate variable {name}")
        if kind == VarKind.binary and (lb < 0 or ub > 1):
            raise MilpModelError(f"Binary {name} needs bounds within [0, 1]")
        if lb > ub:
            raise MilpModelError(f"Variable {name} has empty bounds [{lb}, {ub}]")
        self._by_name[name] = len(self.variables)
        self.variables.append(Variable(name, kind, float(lb), float(ub), cost, term))
        return len(self.variables) - 1

    def add_binary(
        self, name: str, cost: float = 0.0, term: CostTerm | None = None
    ) -> int:
        return self.add_variable(name, VarKind.binary, 0.0, 1.0, cost, term)

    def add_cost(self, var: int, coefficient: float, term: CostTerm) -> None:
        variable = self.variables[var]
        if variable.term is not None and variable.term != term:
            raise MilpModelError(
                f"{variable.name} already contributes to {variable.term.value}"
            )
        variable.term = term
        variable.cost += coefficient

    def add_offset(self, term: CostTerm, value: float) -> None:
        self.offsets[term] = self.offsets.get(term, 0.0) + value

    def add_constraint(
        self,
        coefficients: Mapping[int, float] | Iterable[tuple[int, float]],
        sense: Sense,
        rhs: float,
        marker: Marker,
        name: str | None = None,
    ) -> int:
        if name is not None and (not name or any(ch.isspace() for ch in name)):
            raise MilpModelError(f"Constraint name {name!r} must not contain spaces")
        pairs = (
            coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        )
        merged: dict[int, float] = {}
        for var, coefficient in pairs:
            if not 0 <= var < len(self.variables):
                raise MilpModelError(f"Constraint refers to unknown variable {var}")
            merged[var] = merged.get(var, 0.0) + coefficient
        row = len(self.constraints)
        self.constraints.append(
            Constraint(
                name=name or f"{marker.value}_{row}",
                coefficients=merged,
                sense=sense,
                rhs=float(rhs),
                marker=marker,
            )
        )
        return row

    def index_of(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise MilpModelError(f"Unknown variable {name}") from None

    def set_bounds(self, var: int, lb: float, ub: float) -> None:
        if lb > ub:
            raise MilpModelError(
                f"Variable {self.variables[var].name} gets empty bounds [{lb}, {ub}]"
            )
        self.variables[var].lb = float(lb)
        self.variables[var].ub = float(ub)

    def rows_with_marker(self, marker: Marker) -> list[int]:
        return [i for i, row in enumerate(self.constraints) if row.marker == marker]

    def marker_counts(self) -> dict[Marker, int]:
        counts = {marker: 0 for marker in Marker}
        for row in self.constraints:
            counts[row.marker] += 1
        return {marker: n for marker, n in counts.items() if n}

    def validate(self) -> None:
        """Raise when a binary is out of [0, 1] or a variable is never used"""
        used = np.zeros(self.n_variables, dtype=bool)
        for row in self.constraints:
            used[list(row.coefficients)] = True
        for j, variable in enumerate(self.variables):
            if variable.kind == VarKind.binary and (variable.lb < 0 or variable.ub > 1):
                raise MilpModelError(f"Binary {variable.name} not bounded by [0, 1]")
            if not used[j] and variable.cost == 0.0:
                raise MilpModelError(f"Variable {variable.name} is never referenced")

    def objective_value(self, values: np.ndarray) -> float:
        return math.fsum(
            [v.cost * float(values[j]) for j, v in enumerate(self.variables)]
            + list(self.offsets.values())
        )

    def term_values(self, values: np.ndarray) -> dict[CostTerm, float]:
        parts: dict[CostTerm, list[float]] = {
            term: [self.offsets.get(term, 0.0)] for term in CostTerm
        }
        for j, variable in enumerate(self.variables):
            if variable.term is not None:
                parts[variable.term].append(variable.cost * float(values[j]))
        return {term: math.fsum(items) for term, items in parts.items()}

    def to_arrays(self) -> LpArrays:
        n = self.n_variables
        ub_rows = [i for i, row in enumerate(self.constraints) if row.sense != Sense.eq]
        eq_rows = [i for i, row in enumerate(self.constraints) if row.sense == Sense.eq]

        def stack(rows: list[int], flip_ge: bool) -> tuple[csr_matrix, np.ndarray]:
            data, cols, ptr, rhs = [], [], [0], []
            for i in rows:
                row = self.constraints[i]
                sign = -1.0 if flip_ge and row.sense == Sense.ge else 1.0
                for j, coefficient in sorted(row.coefficients.items()):
                    cols.append(j)
                    data.append(sign * coefficient)
                ptr.append(len(cols))
                rhs.append(sign * row.rhs)
            matrix = csr_matrix(
                (np.array(data, dtype=float), np.array(cols, dtype=int), ptr),
                shape=(len(rows), n),
            )
            return matrix, np.array(rhs, dtype=float)

        a_ub, b_ub = stack(ub_rows, flip_ge=True)
        a_eq, b_eq = stack(eq_rows, flip_ge=False)
        return LpArrays(
            c=np.array([v.cost for v in self.variables], dtype=float),
            offset=math.fsum(self.offsets.values()),
            a_ub=a_ub,
            b_ub=b_ub,
            a_eq=a_eq,
            b_eq=b_eq,
            lb=np.array([v.lb for v in self.variables], dtype=float),
            ub=np.array([v.ub for v in self.variables], dtype=float),
            integer=np.array(
                [v.kind == VarKind.binary for v in self.variables], dtype=bool
            ),
            ub_rows=np.array(ub_rows, dtype=int),
            eq_rows=np.array(eq_rows, dtype=int),
        )

    def __str__(self) -> str:
        lines = [
            f"Model {self.name}: {self.n_variables} variables"
            f" ({len(self.binaries)} binary), {self.n_constraints} constraints"
        ]
        for marker, count in self.marker_counts().items():
            lines.append(f"  {marker.value}: {count}")
        return "\n".join(lines)

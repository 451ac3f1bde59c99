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

"""Fixed-format MPS export and import

Rows and columns get generated eight-character names (``R0000001``,
``C0000001``). The model's own names, constraint markers and cost terms are
carried in ``*`` comment lines ahead of ``NAME`` so that reading a file back
restores the model exactly. Other readers ignore these lines.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .model import Constraint, CostTerm, Marker, MilpModel, Sense, VarKind

OBJECTIVE_ROW = "COST"
_SENSE_CODE = {Sense.le: "L", Sense.ge: "G", Sense.eq: "E"}
_CODE_SENSE = {code: sense for sense, code in _SENSE_CODE.items()}


class MpsFormatError(Exception):
    pass


def row_code(position: int) -> str:
    return f"R{position + 1:07d}"


def column_code(index: int) -> str:
    return f"C{index + 1:07d}"


def format_number(value: float) -> str:
    if value == 0:
        return "0"
    if math.isinf(value):
        return "1e+30" if value > 0 else "-1e+30"
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _field(text: str, width: int) -> str:
    return text.ljust(width)


def _entry(code: str, name1: str, name2: str, value: float) -> str:
    # columns 2-3 code, 5-12 name, 15-22 name, 25-36 number
    return (
        " "
        + _field(code, 2)
        + " "
        + _field(name1, 8)
        + "  "
        + _field(name2, 8)
        + "  "
        + format_number(value)
    ).rstrip()


def export_order(model: MilpModel) -> list[int]:
    """Constraint indices sorted by marker order, then index"""
    return sorted(
        range(model.n_constraints),
        key=lambda i: (model.constraints[i].marker.order, i),
    )


def mps_lines(model: MilpModel) -> list[str]:
    order = export_order(model)
    position = {row: k for k, row in enumerate(order)}
    lines = [f"* mess-restoration model {model.name}"]
    for k, row in enumerate(order):
        constraint = model.constraints[row]
        lines.append(
            f"* row {row_code(k)} {row} {constraint.marker.value} {constraint.name}"
        )
    for j, variable in enumerate(model.variables):
        term = variable.term.value if variable.term is not None else "-"
        lines.append(
            f"* col {column_code(j)} {variable.kind.value} {term} {variable.name}"
        )
    for term in CostTerm:
        if term in model.offsets:
            lines.append(f"* offset {term.value} {format_number(model.offsets[term])}")

    lines.append(f"NAME          {model.name}")
    lines.append("ROWS")
    lines.append(f" N  {OBJECTIVE_ROW}")
    for k, row in enumerate(order):
        lines.append(f" {_SENSE_CODE[model.constraints[row].sense]}  {row_code(k)}")

    entries: list[list[tuple[int, float]]] = [[] for _ in model.variables]
    for row, constraint in enumerate(model.constraints):
        for j, coefficient in constraint.coefficients.items():
            entries[j].append((position[row], coefficient))

    lines.append("COLUMNS")
    in_integer_block = False
    markers = 0
    for j, variable in enumerate(model.variables):
        integer = variable.kind == VarKind.binary
        if integer != in_integer_block:
            tag = "'INTORG'" if integer else "'INTEND'"
            lines.append(f"    MARKER{markers:04d}  'MARKER'                 {tag}")
            markers += 1
            in_integer_block = integer
        code = column_code(j)
        if variable.cost != 0:
            lines.append(_entry("", code, OBJECTIVE_ROW, variable.cost))
        for k, coefficient in sorted(entries[j]):
            lines.append(_entry("", code, row_code(k), coefficient))
    if in_integer_block:
        lines.append(f"    MARKER{markers:04d}  'MARKER'                 'INTEND'")

    lines.append("RHS")
    offset = math.fsum(model.offsets.values())
    if offset != 0:
        lines.append(_entry("", "RHS", OBJECTIVE_ROW, -offset))
    for k, row in enumerate(order):
        rhs = model.constraints[row].rhs
        if rhs != 0:
            lines.append(_entry("", "RHS", row_code(k), rhs))

    lines.append("BOUNDS")
    for j, variable in enumerate(model.variables):
        lines.extend(
            _bound_lines(column_code(j), variable.kind, variable.lb, variable.ub)
        )
    lines.append("ENDATA")
    return lines


def _flag_entry(code: str, column: str) -> str:
    return f" {code} BND       {column}"


def _bound_lines(code: str, kind: VarKind, lb: float, ub: float) -> list[str]:
    if lb == ub:
        return [_entry("FX", "BND", code, lb)]
    lines = []
    if math.isinf(lb) and math.isinf(ub):
        return [_flag_entry("FR", code)]
    if math.isinf(lb):
        lines.append(_flag_entry("MI", code))
    elif lb != 0:
        lines.append(_entry("LO", "BND", code, lb))
    if math.isfinite(ub) or kind == VarKind.binary:
        lines.append(_entry("UP", "BND", code, ub))
    return lines


def export_mps(model: MilpModel, path: Path) -> None:
    path.write_text("\n".join(mps_lines(model)) + "\n")


def read_mps(path: Path) -> MilpModel:
    return parse_mps(path.read_text().splitlines(), source=str(path))


def parse_mps(lines: list[str], source: str = "<mps>") -> MilpModel:
    """Rebuild a model from MPS text written by :func:`export_mps`

    Files without the comment block are accepted too; generated names are then
    kept and all rows get the ``user`` marker.
    """
    row_meta: dict[str, tuple[int, Marker, str]] = {}
    col_meta: dict[str, tuple[VarKind, CostTerm | None, str]] = {}
    offsets: dict[CostTerm, float] = {}
    name = "model"
    row_sense: dict[str, Sense] = {}
    row_order: list[str] = []
    columns: dict[str, dict[str, float]] = {}
    column_order: list[str] = []
    integer_columns: set[str] = set()
    rhs: dict[str, float] = {}
    bounds: dict[str, list[tuple[str, float]]] = {}
    section = ""
    integer_block = False

    for number, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        if raw.startswith("*"):
            _read_comment(raw, row_meta, col_meta, offsets)
            continue
        fields = raw.split()
        try:
            if not raw[0].isspace():
                section = fields[0]
                if section == "NAME" and len(fields) > 1:
                    name = fields[1]
                continue
            match section:
                case "ROWS":
                    code, row = fields
                    if code == "N":
                        continue
                    row_sense[row] = _CODE_SENSE[code]
                    row_order.append(row)
                case "COLUMNS":
                    if len(fields) >= 3 and fields[1] == "'MARKER'":
                        integer_block = fields[2] == "'INTORG'"
                        continue
                    col = fields[0]
                    if col not in columns:
                        columns[col] = {}
                        column_order.append(col)
                        if integer_block:
                            integer_columns.add(col)
                    for k in range(1, len(fields) - 1, 2):
                        columns[col][fields[k]] = float(fields[k + 1])
                case "RHS":
                    for k in range(1, len(fields) - 1, 2):
                        rhs[fields[k]] = float(fields[k + 1])
                case "BOUNDS":
                    code, col = fields[0], fields[2]
                    value = float(fields[3]) if len(fields) > 3 else 0.0
                    bounds.setdefault(col, []).append((code, value))
                case _:
                    raise MpsFormatError(f"{source}:{number}: data outside a section")
        except (ValueError, KeyError, IndexError) as error:
            raise MpsFormatError(f"{source}:{number}: cannot parse {raw!r}") from error
    if section != "ENDATA":
        raise MpsFormatError(f"{source}: missing ENDATA")

    model = MilpModel(name=name)
    if col_meta:
        all_columns = list(col_meta)
    else:
        all_columns = column_order + sorted(set(bounds) - set(columns))
    for col in all_columns:
        kind, term, var_name = col_meta.get(
            col,
            (
                VarKind.binary if col in integer_columns else VarKind.continuous,
                None,
                col,
            ),
        )
        lb, ub = _apply_bounds(kind, bounds.get(col, []))
        cost = columns.get(col, {}).get(OBJECTIVE_ROW, 0.0)
        model.add_variable(var_name, kind, lb, ub)
        variable = model.variables[-1]
        variable.cost = cost
        variable.term = term
    index = {col: j for j, col in enumerate(all_columns)}

    rows: list[tuple[int, Constraint]] = []
    for k, row in enumerate(row_order):
        original, marker, row_name = row_meta.get(row, (k, Marker.user, row))
        coefficients = {
            index[col]: entries[row]
            for col, entries in columns.items()
            if row in entries
        }
        rows.append(
            (
                original,
                Constraint(
                    name=row_name,
                    coefficients=dict(sorted(coefficients.items())),
                    sense=row_sense[row],
                    rhs=rhs.get(row, 0.0),
                    marker=marker,
                ),
            )
        )
    model.constraints = [
        constraint for _, constraint in sorted(rows, key=lambda r: r[0])
    ]
    if offsets:
        model.offsets = offsets
    elif OBJECTIVE_ROW in rhs:
        model.offsets = {CostTerm.interruption: -rhs[OBJECTIVE_ROW]}
    return model


def _read_comment(
    raw: str,
    row_meta: dict[str, tuple[int, Marker, str]],
    col_meta: dict[str, tuple[VarKind, CostTerm | None, str]],
    offsets: dict[CostTerm, float],
) -> None:
    fields = raw[1:].split()
    if not fields:
        return
    match fields[0]:
        case "row" if len(fields) == 5:
            row_meta[fields[1]] = (int(fields[2]), Marker(fields[3]), fields[4])
        case "col" if len(fields) == 5:
            term = None if fields[3] == "-" else CostTerm(fields[3])
            col_meta[fields[1]] = (VarKind(fields[2]), term, fields[4])
        case "offset" if len(fields) == 3:
            offsets[CostTerm(fields[1])] = float(fields[2])
        case _:
            pass


def _apply_bounds(
    kind: VarKind, entries: list[tuple[str, float]]
) -> tuple[float, float]:
    lb, ub = 0.0, (1.0 if kind == VarKind.binary else math.inf)
    for code, value in entries:
        if abs(value) >= 1e30:
            value = math.copysign(math.inf, value)
        match code:
            case "UP":
                ub = value
            case "LO":
                lb = value
            case "FX":
                lb = ub = value
            case "FR":
                lb, ub = -math.inf, math.inf
            case "MI":
                lb = -math.inf
            case "PL":
                ub = math.inf
            case "BV":
                lb, ub = 0.0, 1.0
            case _:
                raise MpsFormatError(f"Unsupported bound type {code}")
    return lb, ub


def write_solution(model: MilpModel, values: np.ndarray, path: Path) -> None:
    """Plain ``name value`` lines, one per variable"""
    path.write_text(
        "".join(
            f"{variable.name} {format_number(float(values[j]))}\n"
            for j, variable in enumerate(model.variables)
        )
    )


def read_solution(path: Path, model: MilpModel) -> np.ndarray:
    """Read ``name value`` lines by model name or generated column code

    Variables missing from the file are zero.
    """
    values = np.zeros(model.n_variables)
    codes = {column_code(j): j for j in range(model.n_variables)}
    for number, raw in enumerate(path.read_text().splitlines(), start=1):
        fields = raw.split()
        if not fields or raw.startswith(("*", "#")):
            continue
        if len(fields) != 2:
            raise MpsFormatError(f"{path}:{number}: expected 'name value', got {raw!r}")
        name, text = fields
        j = codes.get(name)
        if j is None:
            j = model.index_of(name)
        try:
            values[j] = float(text)
        except ValueError as error:
            raise MpsFormatError(f"{path}:{number}: bad value {text!r}") from error
    return values

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

import math
from pathlib import Path

import numpy as np
import pytest

from mess_restoration.milp import (
    CostTerm,
    Marker,
    MilpModel,
    MilpModelError,
    MpsFormatError,
    Sense,
    VarKind,
    audit_solution,
    cost_breakdown,
    export_mps,
    marker_frame,
    mps_lines,
    parse_mps,
    read_mps,
    read_solution,
    write_solution,
)


def sample_model() -> MilpModel:
    model = MilpModel(name="sample")
    x = model.add_binary("x_arc", cost=2.5, term=CostTerm.transportation)
    p = model.add_variable("p_dg", lb=0.0, ub=1.5, cost=0.5, term=CostTerm.generation)
    v = model.add_variable("v_bus", lb=0.9025, ub=1.1025)
    f = model.add_variable("f_fict", lb=-math.inf, ub=math.inf)
    s = model.add_variable("s_neg", lb=-math.inf, ub=3.0)
    fixed = model.add_variable("e_init", lb=1.2, ub=1.2)
    model.add_constraint({p: 1.0, x: -1.5}, Sense.le, 0.0, Marker.microgrid_injection)
    model.add_constraint({v: 1.0, f: 0.25}, Sense.eq, 1.0, Marker.voltage_drop, "vd")
    model.add_constraint([(f, 1.0), (s, 1.0), (f, 1.0)], Sense.ge, -2.0, Marker.user)
    model.add_constraint({x: 1.0}, Sense.eq, 1.0, Marker.routing_cut)
    model.add_constraint({fixed: 1.0, p: -1.0}, Sense.ge, 0.0, Marker.mess_energy)
    model.add_offset(CostTerm.interruption, 40.0)
    return model


def test_building_rules() -> None:
    model = sample_model()
    assert model.n_variables == 6
    assert model.binaries == [0]
    assert model.constraints[2].coefficients == {3: 2.0, 4: 1.0}
    assert model.constraints[0].name == "microgrid_injection_0"
    assert model.rows_with_marker(Marker.routing_cut) == [3]
    assert model.index_of("v_bus") == 2
    with pytest.raises(MilpModelError):
        model.add_variable("x_arc")
    with pytest.raises(MilpModelError):
        model.add_variable("has space")
    with pytest.raises(MilpModelError):
        model.add_variable("b", VarKind.binary, ub=2.0)
    with pytest.raises(MilpModelError):
        model.add_variable("empty", lb=2.0, ub=1.0)
    with pytest.raises(MilpModelError):
        model.add_constraint({99: 1.0}, Sense.le, 0.0, Marker.user)
    with pytest.raises(MilpModelError):
        model.add_cost(0, 1.0, CostTerm.battery)
    with pytest.raises(MilpModelError):
        model.set_bounds(1, 3.0, 2.0)
    with pytest.raises(MilpModelError):
        model.index_of("missing")


def test_validate_flags_unused_variables() -> None:
    model = sample_model()
    model.validate()
    model.add_variable("dangling")
    with pytest.raises(MilpModelError, match="never referenced"):
        model.validate()


def test_matrix_form_negates_ge_rows() -> None:
    arrays = sample_model().to_arrays()
    assert arrays.a_ub.shape == (3, 6)
    assert arrays.a_eq.shape == (2, 6)
    assert arrays.ub_rows.tolist() == [0, 2, 4]
    assert arrays.b_ub.tolist() == [0.0, 2.0, 0.0]
    assert arrays.a_ub.toarray()[1].tolist() == [0, 0, 0, -2, -1, 0]
    assert arrays.constraint_of(3) == 1
    assert arrays.offset == 40.0
    assert arrays.integer.tolist() == [True, False, False, False, False, False]


def test_objective_splits_into_terms() -> None:
    model = sample_model()
    values = np.array([1.0, 1.2, 1.0, 0.0, -2.0, 1.2])
    assert model.objective_value(values) == pytest.approx(2.5 + 0.6 + 40.0)
    terms = cost_breakdown(model, values)
    assert terms[CostTerm.transportation] == 2.5
    assert terms[CostTerm.generation] == pytest.approx(0.6)
    assert terms[CostTerm.interruption] == 40.0
    assert terms[CostTerm.battery] == 0.0
    assert math.fsum(terms.values()) == pytest.approx(model.objective_value(values))


def test_audit() -> None:
    model = sample_model()
    good = np.array([1.0, 1.2, 1.0, 0.0, -2.0, 1.2])
    assert audit_solution(model, good).ok
    bad = np.array([0.4, 1.6, 1.0, 0.0, -2.0, 1.2])
    report = audit_solution(model, bad)
    assert not report.ok
    assert {name for name, _, _ in report.rows} == {
        "microgrid_injection_0",
        "routing_cut_3",
        "mess_energy_4",
    }
    assert report.bounds == (("p_dg", pytest.approx(0.1)),)
    assert report.integrality == (("x_arc", pytest.approx(0.4)),)
    assert report.by_marker()["routing_cut"] == pytest.approx(0.6)
    assert "integrality x_arc" in str(report)


def test_marker_table() -> None:
    frame = marker_frame(sample_model())
    assert list(frame.columns) == ["row", "name", "marker", "sense", "rhs"]
    assert frame["marker"].tolist()[1] == "voltage_drop"
    assert frame["name"].tolist()[1] == "vd"


def test_mps_keeps_the_model(tmp_path: Path) -> None:
    model = sample_model()
    path = tmp_path / "sample.mps"
    export_mps(model, path)
    again = read_mps(path)
    assert again.name == "sample"
    assert [
        (v.name, v.kind, v.lb, v.ub, v.cost, v.term) for v in again.variables
    ] == [(v.name, v.kind, v.lb, v.ub, v.cost, v.term) for v in model.variables]
    assert [
        (c.name, c.coefficients, c.sense, c.rhs, c.marker) for c in again.constraints
    ] == [
        (c.name, c.coefficients, c.sense, c.rhs, c.marker) for c in model.constraints
    ]
    assert again.offsets == model.offsets


def test_mps_layout() -> None:
    lines = mps_lines(sample_model())
    start = next(i for i, line in enumerate(lines) if line.startswith("NAME"))
    body = lines[start:]
    assert body[1:3] == ["ROWS", " N  COST"]
    # rows follow the marker order: routing first, user last
    assert body[3] == " E  R0000001"
    assert body[-1] == "ENDATA"
    assert any("'INTORG'" in line for line in body)
    assert " FR BND       C0000004" in body
    assert " MI BND       C0000005" in body
    assert " FX BND       C0000006  1.2" in body
    assert "    RHS       COST      -40" in body


def test_plain_mps_without_comments() -> None:
    text = """NAME          plain
ROWS
 N  COST
 L  LIM
COLUMNS
    MARKER0000  'MARKER'                 'INTORG'
    X1        COST      -1   LIM       1
    MARKER0001  'MARKER'                 'INTEND'
    X2        COST      -2   LIM       1
RHS
    RHS       LIM       4
BOUNDS
 UP BND       X2        3
ENDATA
"""
    model = parse_mps(text.splitlines())
    assert [v.name for v in model.variables] == ["X1", "X2"]
    assert model.variables[0].kind == VarKind.binary
    assert model.variables[1].ub == 3.0
    assert model.constraints[0].marker == Marker.user
    assert model.constraints[0].coefficients == {0: 1.0, 1: 1.0}
    assert model.constraints[0].rhs == 4.0


def test_mps_errors() -> None:
    with pytest.raises(MpsFormatError, match="missing ENDATA"):
        parse_mps(["NAME x", "ROWS", " N  COST"])
    with pytest.raises(MpsFormatError, match=":3:"):
        parse_mps(["NAME x", "ROWS", " Q  R1", "ENDATA"])


def test_solution_files(tmp_path: Path) -> None:
    model = sample_model()
    values = np.array([1.0, 1.2, 1.0, 0.0, -2.0, 1.2])
    path = tmp_path / "answer.sol"
    write_solution(model, values, path)
    assert read_solution(path, model).tolist() == values.tolist()
    coded = tmp_path / "coded.sol"
    coded.write_text("# external solver\nC0000002 0.75\nx_arc 1\n")
    assert read_solution(coded, model).tolist() == [1.0, 0.75, 0, 0, 0, 0]
    broken = tmp_path / "broken.sol"
    broken.write_text("x_arc one\n")
    with pytest.raises(MpsFormatError, match="bad value"):
        read_solution(broken, model)

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

import pytest
from pydantic import ValidationError

from mess_restoration.grid import (
    Bus,
    DistributionSystem,
    DistributionSystemError,
    Microgrid,
    branch_name,
    bus_name,
    impedance_base_ohm,
    read_feeder,
)
from mess_restoration.scenario import LoadClass


def test_indexes_and_orientation(feeder: DistributionSystem) -> None:
    assert feeder.bus_ids == ("b1", "b2", "b3", "b4")
    assert feeder.feeders == ("f",)
    assert feeder.microgrid_buses == {"b1"}
    assert [b.branch_id for b in feeder.out_branches["b1"]] == ["b1-b2", "b1-b4"]
    assert [b.branch_id for b in feeder.in_branches["b4"]] == ["b3-b4", "b1-b4"]
    assert feeder.microgrid_by_site("m").microgrid_id == "mg"
    assert feeder.bus("b2").power_factor == pytest.approx(100 / math.hypot(100, 50))
    with pytest.raises(DistributionSystemError):
        feeder.branch("b2-b4")
    with pytest.raises(DistributionSystemError):
        feeder.microgrid_by_site("nowhere")


def test_energizable_buses(feeder: DistributionSystem) -> None:
    assert feeder.energizable_buses() == set(feeder.bus_ids)
    assert feeder.energizable_buses({"b2-b3"}) == set(feeder.bus_ids)
    assert feeder.energizable_buses({"b1-b2", "b2-b3"}) == {"b1", "b3", "b4"}


def test_big_m_constants(feeder: DistributionSystem) -> None:
    assert feeder.fictitious_big_m == 4.0
    assert feeder.voltage_big_m == pytest.approx(0.1 + 0.02 * math.sqrt(2))


def test_reference_checks(feeder: DistributionSystem) -> None:
    orphan = Bus(bus_id="x1", feeder="g", p_kw=1.0, interruption_cost=1.0)
    with pytest.raises(ValidationError, match="Feeder g has no microgrid bus"):
        DistributionSystem(
            buses=[*feeder.buses, orphan],
            branches=feeder.branches,
            microgrids=feeder.microgrids,
        )
    with pytest.raises(ValidationError, match="must be unique"):
        DistributionSystem(
            buses=[*feeder.buses, feeder.buses[0]],
            branches=feeder.branches,
            microgrids=feeder.microgrids,
        )
    with pytest.raises(ValidationError, match="must enclose"):
        DistributionSystem(
            buses=feeder.buses,
            branches=feeder.branches,
            microgrids=feeder.microgrids,
            v0=1.06,
        )


def test_microgrid_energy_window() -> None:
    fields = dict(
        microgrid_id="mg",
        site="m",
        feeder="f",
        bus="b1",
        p_max_pu=1.0,
        q_max_pu=1.0,
        e_max_pu=2.0,
        e_min_pu=0.5,
        gen_cost=1.0,
    )
    with pytest.raises(ValidationError, match="initial energy"):
        Microgrid(e_init_pu=0.4, **fields)
    mg = Microgrid(e_init_pu=1.0, local_load_pu=[0.1, 0.2], **fields)
    assert mg.local_load(0) == 0.1
    assert mg.local_load(7) == 0.2


def test_read_feeder_tables(tmp_path: Path) -> None:
    branches_csv = tmp_path / "branches.csv"
    branches_csv.write_text(
        "# two sections and a tie\n"
        "from,to,r_ohm,x_ohm,capacity_kva,switchable\n"
        "1,2,0.5,0.4,2000,1\n"
        "2,3,0.6,0.5,1000,0\n"
        "1,3,1.0,0.8,1000,yes\n"
    )
    buses_csv = tmp_path / "buses.csv"
    buses_csv.write_text(
        "bus,p_kw,q_kvar,class,critical,W_usd_per_kwh\n"
        "1,0,0,commercial,0,\n"
        "2,300,150,industrial,1,\n"
        "3,200,100,residential,0,4.5\n"
    )
    buses, branches = read_feeder(branches_csv, buses_csv, "f1", v_base_kv=10.0)
    assert impedance_base_ohm(10.0) == 100.0
    assert [b.bus_id for b in buses] == ["f1/1", "f1/2", "f1/3"]
    assert [b.branch_id for b in branches] == ["f1/1-2", "f1/2-3", "f1/1-3"]
    assert branches[0].r_pu == pytest.approx(0.005)
    assert branches[0].x_pu == pytest.approx(0.004)
    assert branches[0].s_max_pu == 2.0
    assert [b.switchable for b in branches] == [True, False, True]
    assert buses[1].critical and buses[1].load_class == LoadClass.industrial
    assert [b.interruption_cost for b in buses] == [2.0, 10.0, 4.5]
    assert bus_name("f2", 7) == "f2/7"
    assert branch_name("f2", 7, 8) == "f2/7-8"


def test_feeder_table_errors(tmp_path: Path) -> None:
    with pytest.raises(DistributionSystemError, match="does not exist"):
        read_feeder(tmp_path / "no.csv", tmp_path / "no.csv", "f1", 12.66)
    bad = tmp_path / "bad.csv"
    bad.write_text("from,to,r_ohm\n1,2,0.1\n")
    with pytest.raises(DistributionSystemError, match="missing columns"):
        read_feeder(bad, bad, "f1", 12.66)
    with pytest.raises(DistributionSystemError):
        impedance_base_ohm(0.0)

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

import os
from pathlib import Path

import pytest

from mess_restoration.case import CaseConfig, load_case
from mess_restoration.grid import Branch, Bus, DistributionSystem, Microgrid
from mess_restoration.transport import NodeId, Site, SiteId, SiteKind, TransportNetwork

CASES = Path(__file__).resolve().parent.parent / "cases"

RUN_SLOW_ENV = "MESS_RESTORATION_RUN_SLOW_TESTS"


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: runs a full case, opt in via env var")


def pytest_collection_modifyitems(
    config: pytest.Config, items: list[pytest.Item]
) -> None:
    if os.environ.get(RUN_SLOW_ENV, "").strip() not in ("", "0"):
        return
    skip = pytest.mark.skip(reason=f"set {RUN_SLOW_ENV}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def toy2_path() -> Path:
    return CASES / "toy2.json"


@pytest.fixture
def toy2(toy2_path: Path) -> CaseConfig:
    return load_case(toy2_path)


@pytest.fixture
def line_net() -> TransportNetwork:
    """Depot at node 1, microgrids at 2 and 3, 10 km apart in a line"""
    return TransportNetwork.from_edge_list(
        [(1, 2, 10), (2, 3, 10)],
        [
            Site(SiteId("d"), SiteKind.depot, NodeId(1)),
            Site(SiteId("a"), SiteKind.microgrid, NodeId(2)),
            Site(SiteId("b"), SiteKind.microgrid, NodeId(3)),
        ],
    )


@pytest.fixture
def feeder() -> DistributionSystem:
    """Four-bus feeder: microgrid at b1, chain b1-b2-b3-b4 and a tie b1-b4"""
    buses = [
        Bus(bus_id="b1", feeder="f", p_kw=0.0, interruption_cost=2.0),
        Bus(
            bus_id="b2",
            feeder="f",
            p_kw=100.0,
            q_kvar=50.0,
            critical=True,
            interruption_cost=10.0,
        ),
        Bus(bus_id="b3", feeder="f", p_kw=80.0, q_kvar=40.0, interruption_cost=2.0),
        Bus(bus_id="b4", feeder="f", p_kw=60.0, q_kvar=20.0, interruption_cost=2.0),
    ]
    pairs = [("b1", "b2"), ("b2", "b3"), ("b3", "b4"), ("b1", "b4")]
    branches = [
        Branch(
            branch_id=f"{a}-{b}",
            feeder="f",
            from_bus=a,
            to_bus=b,
            r_pu=0.01,
            x_pu=0.01,
            s_max_pu=1.0,
        )
        for a, b in pairs
    ]
    microgrid = Microgrid(
        microgrid_id="mg",
        site="m",
        feeder="f",
        bus="b1",
        p_max_pu=0.5,
        q_max_pu=0.4,
        e_max_pu=2.0,
        e_min_pu=0.1,
        e_init_pu=1.5,
        gen_cost=0.5,
    )
    return DistributionSystem(buses=buses, branches=branches, microgrids=[microgrid])

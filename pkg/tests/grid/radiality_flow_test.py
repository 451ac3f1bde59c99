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
from itertools import chain, combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog  # type: ignore

from mess_restoration.grid import (
    Branch,
    Bus,
    DistributionSystem,
    Microgrid,
    Topology,
    validate_radial,
)
from mess_restoration.milp import (
    HorizonState,
    Marker,
    MilpModel,
    ModelSettings,
    RestorationModel,
    RestorationSystem,
    Sense,
    build_model,
)
from mess_restoration.scenario import Scenario, ScenarioSet
from mess_restoration.transport import NodeId, Site, SiteId, SiteKind, TransportNetwork

RADIALITY = frozenset(
    {
        Marker.radiality_bound,
        Marker.radiality_strict,
        Marker.radiality_flow,
        Marker.radiality_injection,
        Marker.radiality_count,
    }
)


def one_interval_model(
    ds: DistributionSystem, damaged: frozenset[str], strict: bool = False
) -> RestorationModel:
    net = TransportNetwork.from_edge_list(
        [(1, 2, 10)],
        [Site(SiteId(mg.site), SiteKind.microgrid, NodeId(1)) for mg in ds.microgrids],
    )
    system = RestorationSystem(ds, net, fleet=())
    scenario = Scenario(
        probability=1.0,
        load_kw=np.array([[bus.p_kw] for bus in ds.buses]),
        road_up=np.ones((1, 1), dtype=bool),
        branch_up=np.array([[b not in damaged] for b in ds.branch_ids], dtype=bool),
    )
    scenarios = ScenarioSet(ds.bus_ids, net.edges, ds.branch_ids, (scenario,))
    state = HorizonState.initial(system, 1)
    options = ModelSettings(strict_radiality=strict)
    return build_model(system, state, scenarios, {}, options)


def flow_rows_accept(model: MilpModel, fixed: dict[int, float]) -> bool:
    """Whether the fictitious-flow rows admit a point with the given binaries"""
    rows = [row for row in model.constraints if row.marker in RADIALITY]
    columns = sorted({j for row in rows for j in row.coefficients})
    position = {j: k for k, j in enumerate(columns)}
    bounds = []
    for j in columns:
        var = model.variables[j]
        low, high = (fixed[j], fixed[j]) if j in fixed else (var.lb, var.ub)
        if low < var.lb or high > var.ub:
            return False
        bounds.append(
            (None if math.isinf(low) else low, None if math.isinf(high) else high)
        )
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row in rows:
        dense = np.zeros(len(columns))
        for j, c in row.coefficients.items():
            dense[position[j]] = c
        match row.sense:
            case Sense.le:
                a_ub.append(dense)
                b_ub.append(row.rhs)
            case Sense.ge:
                a_ub.append(-dense)
                b_ub.append(-row.rhs)
            case Sense.eq:
                a_eq.append(dense)
                b_eq.append(row.rhs)
    result = linprog(
        np.zeros(len(columns)),
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )
    assert result.status in (0, 2), result.message
    return bool(result.status == 0)


def model_accepts(
    rm: RestorationModel, ds: DistributionSystem, closed: frozenset[str]
) -> bool:
    fixed = {
        rm.index.alpha[(branch, 0, 0)]: float(branch in closed)
        for branch in ds.branch_ids
    }
    return flow_rows_accept(rm.model, fixed)


def all_subsets(items: tuple[str, ...]) -> list[frozenset[str]]:
    return [
        frozenset(subset)
        for subset in chain.from_iterable(
            combinations(items, k) for k in range(len(items) + 1)
        )
    ]


@pytest.mark.parametrize("strict", [False, True])
def test_flow_rows_match_the_tree_check_on_the_loop_feeder(
    feeder: DistributionSystem, strict: bool
) -> None:
    for damaged in all_subsets(feeder.branch_ids):
        rm = one_interval_model(feeder, damaged, strict)
        for closed in all_subsets(feeder.branch_ids):
            topo = Topology.from_closed(feeder.branch_ids, closed)
            expected = validate_radial(feeder, topo, damaged).ok
            assert model_accepts(rm, feeder, closed) == expected, (damaged, closed)


@st.composite
def radial_cases(
    draw: st.DrawFn,
) -> tuple[DistributionSystem, frozenset[str], frozenset[str]]:
    n_buses = draw(st.integers(min_value=2, max_value=5))
    pairs = draw(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=n_buses - 1),
                st.integers(min_value=0, max_value=n_buses - 1),
            ).filter(lambda pair: pair[0] != pair[1]),
            min_size=1,
            max_size=7,
            unique_by=lambda pair: frozenset(pair),
        )
    )
    sources = draw(
        st.lists(
            st.integers(min_value=0, max_value=n_buses - 1),
            min_size=1,
            max_size=2,
            unique=True,
        )
    )
    buses = [
        Bus(bus_id=f"b{i}", feeder="f", p_kw=10.0 * i, interruption_cost=2.0)
        for i in range(n_buses)
    ]
    branches = [
        Branch(
            branch_id=f"b{a}-b{b}",
            feeder="f",
            from_bus=f"b{a}",
            to_bus=f"b{b}",
            r_pu=0.01,
            x_pu=0.01,
            s_max_pu=1.0,
        )
        for a, b in pairs
    ]
    microgrids = [
        Microgrid(
            microgrid_id=f"mg{i}",
            site=f"m{i}",
            feeder="f",
            bus=f"b{i}",
            p_max_pu=0.5,
            q_max_pu=0.4,
            e_max_pu=2.0,
            e_min_pu=0.1,
            e_init_pu=1.0,
            gen_cost=0.5,
        )
        for i in sources
    ]
    ds = DistributionSystem(buses=buses, branches=branches, microgrids=microgrids)
    ids = st.sampled_from(ds.branch_ids)
    damaged = draw(st.frozensets(ids))
    closed = draw(st.frozensets(ids))
    return ds, damaged, closed


@settings(max_examples=60, deadline=None)
@given(radial_cases())
def test_flow_rows_match_the_tree_check(
    case: tuple[DistributionSystem, frozenset[str], frozenset[str]],
) -> None:
    ds, damaged, closed = case
    rm = one_interval_model(ds, damaged)
    topo = Topology.from_closed(ds.branch_ids, closed)
    report = validate_radial(ds, topo, damaged)
    assert model_accepts(rm, ds, closed) == report.ok, report.violations


def test_every_tree_of_the_loop_passes_the_flow_rows(
    feeder: DistributionSystem,
) -> None:
    rm = one_interval_model(feeder, frozenset())
    accepted = [
        closed
        for closed in all_subsets(feeder.branch_ids)
        if model_accepts(rm, feeder, closed)
    ]
    assert len(accepted) == 4
    assert all(len(closed) == 3 for closed in accepted)

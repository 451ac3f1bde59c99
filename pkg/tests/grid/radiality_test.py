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

from itertools import chain, combinations

import networkx as nx  # type: ignore
import pytest

from mess_restoration.grid import DistributionSystem, Topology, validate_radial


def subsets(items: tuple[str, ...]) -> list[tuple[str, ...]]:
    return list(
        chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))
    )


def is_radial(ds: DistributionSystem, closed: set[str], damaged: set[str]) -> bool:
    if closed & damaged:
        return False
    live = ds.energizable_buses(damaged)
    graph = nx.Graph()
    graph.add_nodes_from(live)
    for branch_id in closed:
        branch = ds.branch(branch_id)
        if branch.from_bus not in live or branch.to_bus not in live:
            return False
        graph.add_edge(branch.from_bus, branch.to_bus)
    return bool(nx.is_tree(graph))


@pytest.mark.parametrize(
    "damaged", [set(), {"b2-b3"}, {"b1-b2", "b2-b3"}, {"b1-b2", "b1-b4"}]
)
def test_matches_exhaustive_enumeration(
    feeder: DistributionSystem, damaged: set[str]
) -> None:
    accepted = []
    for closed in subsets(feeder.branch_ids):
        topo = Topology.from_closed(feeder.branch_ids, closed)
        report = validate_radial(feeder, topo, damaged)
        assert report.ok == is_radial(feeder, set(closed), damaged), closed
        if report.ok:
            accepted.append(set(closed))
    assert accepted


def test_every_spanning_tree_of_the_loop(feeder: DistributionSystem) -> None:
    trees = [
        closed
        for closed in subsets(feeder.branch_ids)
        if validate_radial(feeder, Topology.from_closed(feeder.branch_ids, closed)).ok
    ]
    assert len(trees) == 4
    assert all(len(tree) == 3 for tree in trees)


def test_violations_are_explained(feeder: DistributionSystem) -> None:
    everything = Topology.from_closed(feeder.branch_ids, feeder.branch_ids)
    report = validate_radial(feeder, everything, damaged={"b3-b4"})
    assert not report.ok
    assert report.expected_count == 3
    assert report.closed_count == 4
    assert "damaged branch b3-b4 is closed" in report.violations
    assert any("cycle" in violation for violation in report.violations)

    isolated = Topology.from_closed(feeder.branch_ids, ["b1-b2", "b2-b3"])
    report = validate_radial(feeder, isolated)
    assert "buses ['b4'] are not connected to any microgrid" in report.violations

    partial = Topology(closed={"b1-b2": True})
    assert any("undefined" in v for v in validate_radial(feeder, partial).violations)


def test_dead_island_must_stay_open(feeder: DistributionSystem) -> None:
    damaged = {"b1-b2", "b1-b4"}
    assert feeder.energizable_buses(damaged) == {"b1"}
    closed = Topology.from_closed(feeder.branch_ids, ["b2-b3"])
    report = validate_radial(feeder, closed, damaged)
    assert "de-energized buses ['b2', 'b3'] are connected" in report.violations
    assert validate_radial(
        feeder, Topology.from_closed(feeder.branch_ids, []), damaged
    ).ok


def test_switching_changes(feeder: DistributionSystem) -> None:
    before = Topology.from_closed(feeder.branch_ids, ["b1-b2", "b2-b3", "b3-b4"])
    after = Topology.from_closed(feeder.branch_ids, ["b1-b2", "b2-b3", "b1-b4"])
    assert after.changes_from(before) == (("b1-b4", True), ("b3-b4", False))
    assert after.closed_branches == {"b1-b2", "b2-b3", "b1-b4"}
    assert str(validate_radial(feeder, after)) == "radial: 3 closed branches"

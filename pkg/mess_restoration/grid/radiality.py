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

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from networkx.utils import UnionFind  # type: ignore

from .distribution_system import DistributionSystem


@dataclass(frozen=True)
class Topology:
    """Operated branch statuses for one interval and scenario

    :param closed: status per branch id, ``True`` for closed
    :param fictitious_flow: signed fictitious flow per branch
    :param fictitious_injection: fictitious injection per microgrid bus
    """

    closed: Mapping[str, bool]
    fictitious_flow: Mapping[str, float] = field(default_factory=dict)
    fictitious_injection: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_closed(cls, branches: Iterable[str], closed: Iterable[str]) -> Topology:
        closed_set = set(closed)
        return cls(closed={b: b in closed_set for b in branches})

    @property
    def closed_branches(self) -> frozenset[str]:
        return frozenset(b for b, status in self.closed.items() if status)

    def changes_from(self, previous: Topology) -> tuple[tuple[str, bool], ...]:
        """Branches whose status differs from ``previous``, with the new status"""
        return tuple(
            (branch, status)
            for branch, status in sorted(self.closed.items())
            if previous.closed.get(branch) != status
        )


@dataclass(frozen=True)
class RadialityReport:
    violations: tuple[str, ...]
    closed_count: int
    expected_count: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"radial: {self.closed_count} closed branches"
        return "\n".join(self.violations)


def validate_radial(
    ds: DistributionSystem, topo: Topology, damaged: Iterable[str] = ()
) -> RadialityReport:
    """Check that the closed branches form one tree per microgrid bus

    Buses cut off from every microgrid by damage must stay isolated; the
    expected closed count is the number of energizable buses minus the number
    of microgrid buses.
    """
    damaged_set = frozenset(damaged)
    live = ds.energizable_buses(damaged_set)
    violations: list[str] = []
    missing = [b for b in ds.branch_ids if b not in topo.closed]
    if missing:
        violations.append(f"status undefined for branches {missing}")

    forest = UnionFind(ds.bus_ids)
    closed_count = 0
    for branch in ds.branches:
        if not topo.closed.get(branch.branch_id, False):
            continue
        closed_count += 1
        if branch.branch_id in damaged_set:
            violations.append(f"damaged branch {branch.branch_id} is closed")
        if forest[branch.from_bus] == forest[branch.to_bus]:
            violations.append(f"closing {branch.branch_id} creates a cycle")
        else:
            forest.union(branch.from_bus, branch.to_bus)

    for component in forest.to_sets():
        sources = component & ds.microgrid_buses
        if len(sources) > 1:
            violations.append(
                f"microgrid buses {sorted(sources)} share one energized tree"
            )
        elif not sources and component & live:
            violations.append(
                f"buses {sorted(component)} are not connected to any microgrid"
            )
        elif not sources and len(component) > 1:
            violations.append(f"de-energized buses {sorted(component)} are connected")

    expected = len(live) - len(ds.microgrid_buses)
    if closed_count != expected:
        violations.append(f"{closed_count} branches closed, radiality needs {expected}")
    return RadialityReport(
        violations=tuple(violations),
        closed_count=closed_count,
        expected_count=expected,
    )

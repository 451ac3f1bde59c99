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

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass, replace

import numpy as np

from .time_space_network import TimeSpaceNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormulationSize:
    """Routing-block size of the arc formulation against a virtual-node one"""

    binaries_proposed: int
    binaries_virtualnode: int
    constraints_proposed: int
    constraints_virtualnode: int
    virtual_nodes: int = 0
    consistent: bool = True

    def __add__(self, other: FormulationSize) -> FormulationSize:
        return FormulationSize(
            binaries_proposed=self.binaries_proposed + other.binaries_proposed,
            binaries_virtualnode=self.binaries_virtualnode + other.binaries_virtualnode,
            constraints_proposed=self.constraints_proposed + other.constraints_proposed,
            constraints_virtualnode=self.constraints_virtualnode
            + other.constraints_virtualnode,
            virtual_nodes=self.virtual_nodes + other.virtual_nodes,
            consistent=self.consistent and other.consistent,
        )

    @property
    def binary_reduction(self) -> float:
        if self.binaries_virtualnode <= 0:
            return 0.0
        return 1.0 - self.binaries_proposed / self.binaries_virtualnode

    @property
    def constraint_reduction(self) -> float:
        if self.constraints_virtualnode <= 0:
            return 0.0
        return 1.0 - self.constraints_proposed / self.constraints_virtualnode

    @classmethod
    def empty(cls) -> FormulationSize:
        return cls(0, 0, 0, 0)


def virtual_node_count(intervals: np.ndarray) -> int:
    """One virtual node per extra interval of every multi-interval site-to-site trip"""
    count = 0
    n_sites = intervals.shape[0]
    for i in range(n_sites):
        for j in range(n_sites):
            value = intervals[i, j]
            if i != j and not math.isinf(value) and value > 1:
                count += int(value) - 1
    return count


def count_formulation(tsn: TimeSpaceNetwork, intervals: np.ndarray) -> FormulationSize:
    """Binary and constraint counts of one layer in both formulations

    The virtual-node binaries here exclude the site-permutation term, which is
    taken once per scenario by :func:`count_layers`.

    :param tsn: the layer as built
    :param intervals: site-to-site travel-time matrix the layer was built from
    """
    virtual = virtual_node_count(intervals)
    horizon = tsn.horizon
    arcs = len(tsn.arcs)
    nodes = len(tsn.nodes)
    return FormulationSize(
        binaries_proposed=arcs,
        binaries_virtualnode=arcs + (virtual + 1) * 2 * horizon,
        constraints_proposed=nodes,
        constraints_virtualnode=nodes + virtual * horizon,
        virtual_nodes=virtual,
    )


def count_layers(
    layers: Iterable[tuple[TimeSpaceNetwork, np.ndarray]],
) -> FormulationSize:
    """Counts of a whole model: every (layer, travel-time matrix) pair summed

    One permutation of the sites is subtracted from the virtual-node binaries
    per scenario, however many MESS layers the scenario holds.
    """
    total = FormulationSize.empty()
    scenarios: set[int] = set()
    n_sites = 0
    for tsn, intervals in layers:
        total = total + count_formulation(tsn, intervals)
        scenarios.add(tsn.scenario)
        n_sites = max(n_sites, intervals.shape[0])
    permutations = n_sites * (n_sites - 1) * len(scenarios)
    binaries_virtual = total.binaries_virtualnode - permutations
    consistent = binaries_virtual >= 0
    if not consistent:
        logger.warning(
            "Virtual-node binary count is negative (%d) over %d scenarios",
            binaries_virtual,
            len(scenarios),
        )
    return replace(total, binaries_virtualnode=binaries_virtual, consistent=consistent)

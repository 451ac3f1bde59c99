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

import heapq
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .network import EdgeKey, NodeId, RoadStatus, SiteId, TransportNetwork, edge_key


class TravelTimeSettingsError(Exception):
    pass


@dataclass(frozen=True)
class PathResult:
    distance_m: int
    path: tuple[NodeId, ...]


def shortest_paths_from(
    net: TransportNetwork, down: frozenset[EdgeKey], source: NodeId
) -> dict[NodeId, PathResult]:
    """Single-source Dijkstra over the available roads

    Heap entries are ordered by (distance, node sequence) so among equally long
    paths the lexicographically smallest node sequence is settled first.
    Unreachable nodes are absent from the result.
    """
    heap: list[tuple[int, tuple[NodeId, ...]]] = [(0, (source,))]
    settled: dict[NodeId, PathResult] = {}
    while heap:
        distance, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled[node] = PathResult(distance_m=distance, path=path)
        for neighbour in net.graph.neighbors(node):
            if neighbour in settled or edge_key(node, neighbour) in down:
                continue
            length = int(net.graph.edges[node, neighbour]["length_m"])
            heapq.heappush(heap, (distance + length, (*path, neighbour)))
    return settled


@dataclass(frozen=True)
class TravelMatrices:
    """Shortest paths and distances between every ordered pair of sites

    Distances are in metres, ``inf`` marks unreachable pairs. ``intervals`` is only
    set once a speed and interval length have been applied.
    """

    sites: tuple[SiteId, ...]
    distance_m: np.ndarray
    paths: Mapping[tuple[SiteId, SiteId], tuple[NodeId, ...] | None]
    intervals: np.ndarray | None = None

    @property
    def distance_km(self) -> np.ndarray:
        return self.distance_m / 1000.0

    def index(self, site: SiteId) -> int:
        return self.sites.index(site)

    def path(self, site_i: SiteId, site_j: SiteId) -> tuple[NodeId, ...] | None:
        return self.paths[(site_i, site_j)]

    def travel_intervals(self, site_i: SiteId, site_j: SiteId) -> int | None:
        if self.intervals is None:
            raise TravelTimeSettingsError("Travel times have not been computed")
        value = self.intervals[self.index(site_i), self.index(site_j)]
        return None if math.isinf(value) else int(value)

    def with_travel_times(self, v_avg_kmh: float, dt_h: float) -> TravelMatrices:
        return TravelMatrices(
            sites=self.sites,
            distance_m=self.distance_m,
            paths=self.paths,
            intervals=travel_time_matrix(self.distance_km, v_avg_kmh, dt_h),
        )


def shortest_paths(net: TransportNetwork, status: RoadStatus, t: int) -> TravelMatrices:
    """Paths and distances among all sites under the road status of interval t"""
    return _site_matrices(net, status.damaged(t))


@lru_cache(maxsize=4096)
def _site_matrices(net: TransportNetwork, down: frozenset[EdgeKey]) -> TravelMatrices:
    sites = net.site_ids
    n_sites = len(sites)
    distance = np.full((n_sites, n_sites), np.inf)
    paths: dict[tuple[SiteId, SiteId], tuple[NodeId, ...] | None] = {}
    from_node: dict[NodeId, dict[NodeId, PathResult]] = {}
    for i, site_i in enumerate(sites):
        node_i = net.node_of(site_i)
        if node_i not in from_node:
            from_node[node_i] = shortest_paths_from(net, down, node_i)
        reached = from_node[node_i]
        for j, site_j in enumerate(sites):
            result = reached.get(net.node_of(site_j))
            if result is None:
                paths[(site_i, site_j)] = None
            else:
                distance[i, j] = result.distance_m
                paths[(site_i, site_j)] = result.path
    return TravelMatrices(sites=sites, distance_m=distance, paths=paths)


def _exact(value: float) -> Fraction:
    return Fraction(repr(float(value)))


def _check_speed(v_avg_kmh: float, dt_h: float) -> None:
    if not v_avg_kmh > 0:
        raise TravelTimeSettingsError(
            f"Average speed must be positive, got {v_avg_kmh}"
        )
    if not dt_h > 0:
        raise TravelTimeSettingsError(f"Interval length must be positive, got {dt_h}")


def metres_per_interval(v_avg_kmh: float, dt_h: float) -> Fraction:
    _check_speed(v_avg_kmh, dt_h)
    return _exact(v_avg_kmh) * 1000 * _exact(dt_h)


def travel_intervals(distance_m: int, v_avg_kmh: float, dt_h: float) -> int:
    """Whole intervals needed to cover ``distance_m``"""
    return math.ceil(Fraction(distance_m) / metres_per_interval(v_avg_kmh, dt_h))


def travel_time_matrix(
    distance_km: np.ndarray, v_avg_kmh: float, dt_h: float
) -> np.ndarray:
    """Elementwise ceil(d / v_avg / dt); ``inf`` entries stay infinite"""
    _check_speed(v_avg_kmh, dt_h)
    distance_km = np.asarray(distance_km, dtype=float)
    result = np.full(distance_km.shape, np.inf)
    for index, value in np.ndenumerate(distance_km):
        if math.isinf(value):
            continue
        metres = round(value * 1000)
        result[index] = travel_intervals(metres, v_avg_kmh, dt_h)
    return result


@dataclass(frozen=True)
class TravelSchedule:
    """Departure-time dependent travel times for one MESS in one scenario

    ``matrices[t]`` applies to trips leaving during interval ``t``.
    """

    matrices: tuple[TravelMatrices, ...]

    @property
    def horizon(self) -> int:
        return len(self.matrices)

    @property
    def sites(self) -> tuple[SiteId, ...]:
        return self.matrices[0].sites

    def travel_intervals(self, t: int, site_i: SiteId, site_j: SiteId) -> int | None:
        return self.matrices[t].travel_intervals(site_i, site_j)

    def path(self, t: int, site_i: SiteId, site_j: SiteId) -> tuple[NodeId, ...] | None:
        return self.matrices[t].path(site_i, site_j)


def travel_schedule(
    net: TransportNetwork,
    status: RoadStatus,
    horizon: int,
    v_avg_kmh: float,
    dt_h: float,
) -> TravelSchedule:
    """Travel matrices for each departure interval of a prediction horizon

    Matrices are shared between intervals, MESSs and scenarios with the same set
    of damaged roads.
    """
    _check_speed(v_avg_kmh, dt_h)
    return TravelSchedule(
        matrices=tuple(
            _timed_matrices(net, status.damaged(t), float(v_avg_kmh), float(dt_h))
            for t in range(horizon)
        )
    )


@lru_cache(maxsize=4096)
def _timed_matrices(
    net: TransportNetwork, down: frozenset[EdgeKey], v_avg_kmh: float, dt_h: float
) -> TravelMatrices:
    return _site_matrices(net, down).with_travel_times(v_avg_kmh, dt_h)

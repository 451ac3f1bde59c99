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
from dataclasses import dataclass
from fractions import Fraction
from typing import TypeAlias

from .network import EdgeKey, NodeId, RoadStatus, SiteId, TransportNetwork, edge_key
from .shortest_paths import metres_per_interval, shortest_paths_from


class ArcLocationMismatchError(Exception):
    pass


@dataclass(frozen=True)
class AtSite:
    site: SiteId

    def __str__(self) -> str:
        return f"site:{self.site}"


@dataclass(frozen=True)
class AtNode:
    """Stopped at an intersection that hosts no site"""

    node: NodeId

    def __str__(self) -> str:
        return f"node:{self.node}"


@dataclass(frozen=True)
class InTransit:
    """Driving along ``edge`` from ``origin`` towards ``toward``

    :param remaining_m: distance left on the current edge
    :param intervals_remaining: whole intervals until ``toward`` is reached
    :param destination: site the MESS is heading for, if any
    """

    edge: EdgeKey
    origin: NodeId
    toward: NodeId
    remaining_m: int
    intervals_remaining: int
    destination: SiteId | None = None

    def __post_init__(self) -> None:
        if self.intervals_remaining < 1:
            raise ArcLocationMismatchError(
                f"In-transit location on {self.edge} needs at least one interval"
                f" remaining, got {self.intervals_remaining}"
            )
        if edge_key(self.origin, self.toward) != self.edge:
            raise ArcLocationMismatchError(
                f"Nodes {self.origin}->{self.toward} are not the ends of {self.edge}"
            )
        if self.remaining_m <= 0:
            raise ArcLocationMismatchError("In-transit remaining distance must be > 0")

    def __str__(self) -> str:
        return (
            f"transit:{self.origin}-{self.toward}"
            f"({self.intervals_remaining}->{self.destination or '-'})"
        )


MessLocation: TypeAlias = AtSite | AtNode | InTransit


@dataclass(frozen=True)
class Hold:
    site: SiteId

    def __str__(self) -> str:
        return f"hold:{self.site}"


@dataclass(frozen=True)
class Travel:
    """Drive to ``destination`` along ``path``

    ``path`` starts at the node the MESS leaves from: the site node, the current
    intersection, or the node ahead when already in transit.
    """

    destination: SiteId
    path: tuple[NodeId, ...]

    def __str__(self) -> str:
        return f"travel:{self.destination}"


@dataclass(frozen=True)
class Continue:
    """Keep driving towards the node ahead without a site to head for"""

    def __str__(self) -> str:
        return "continue"


MessMove: TypeAlias = Hold | Travel | Continue


def normalize_location(net: TransportNetwork, location: MessLocation) -> MessLocation:
    """An intersection that hosts a site is reported as that site"""
    if isinstance(location, AtNode):
        sites = net.sites_at(location.node)
        if sites:
            return AtSite(sites[0])
    return location


def departure_node(net: TransportNetwork, location: MessLocation) -> NodeId:
    match location:
        case AtSite(site=site):
            return net.node_of(site)
        case AtNode(node=node):
            return node
        case InTransit(toward=toward):
            return toward
        case _:
            raise ArcLocationMismatchError(f"Unknown location {location!r}")


def start_arrivals(
    net: TransportNetwork,
    location: MessLocation,
    status: RoadStatus,
    t: int,
    v_avg_kmh: float,
    dt_h: float,
) -> dict[SiteId, int]:
    """Earliest arrival interval at every reachable site, counted from now

    A MESS at a site is there at interval 0. A MESS in transit first completes its
    current edge and cannot reach anything sooner than one interval from now.
    """
    if isinstance(location, AtSite):
        return {location.site: 0}
    per_interval = metres_per_interval(v_avg_kmh, dt_h)
    committed = location.remaining_m if isinstance(location, InTransit) else 0
    reached = shortest_paths_from(
        net, status.damaged(t), departure_node(net, location)
    )
    arrivals = {}
    for site_id, site in net.sites.items():
        result = reached.get(site.node)
        if result is None:
            continue
        arrival = math.ceil(Fraction(committed + result.distance_m) / per_interval)
        if isinstance(location, InTransit):
            arrival = max(arrival, location.intervals_remaining)
        arrivals[site_id] = arrival
    return arrivals


def route_to(
    net: TransportNetwork,
    location: MessLocation,
    destination: SiteId,
    status: RoadStatus,
    t: int,
) -> Travel:
    """Shortest route from the departure node of ``location`` to a site"""
    start = departure_node(net, location)
    reached = shortest_paths_from(net, status.damaged(t), start)
    target = net.node_of(destination)
    if target not in reached:
        raise ArcLocationMismatchError(
            f"Site {destination} is unreachable from node {start} at interval {t}"
        )
    return Travel(destination=destination, path=reached[target].path)


def advance_mess(
    net: TransportNetwork,
    location: MessLocation,
    move: MessMove,
    status: RoadStatus,
    t: int,
    v_avg_kmh: float,
    dt_h: float,
) -> MessLocation:
    """Location of a MESS at the start of interval t+1 after executing ``move``

    If the MESS ends the interval part-way along a road that is unavailable at
    t+1, it falls back to the origin-side node of that road and can be
    dispatched again from there.

    :param location: location at the start of interval t
    :param move: the move implemented during interval t
    :param status: realized road status, consulted at interval t+1
    """
    budget = metres_per_interval(v_avg_kmh, dt_h)
    match move:
        case Hold(site=site):
            if location != AtSite(site):
                raise ArcLocationMismatchError(
                    f"Cannot hold at {site} from location {location}"
                )
            return location
        case Travel(destination=destination, path=path):
            if not path or path[0] != departure_node(net, location):
                raise ArcLocationMismatchError(
                    f"Route {path} does not depart from location {location}"
                )
            if path[-1] != net.node_of(destination):
                raise ArcLocationMismatchError(
                    f"Route {path} does not end at site {destination}"
                )
            segments = _current_segment(location) + [
                (path[k], path[k + 1], net.length_m(path[k], path[k + 1]))
                for k in range(len(path) - 1)
            ]
            reached = _drive(net, segments, budget, destination, location)
        case Continue():
            if isinstance(location, InTransit):
                reached = _drive(
                    net,
                    _current_segment(location),
                    budget,
                    location.destination,
                    location,
                )
            elif isinstance(location, AtNode):
                reached = location
            else:
                raise ArcLocationMismatchError(
                    f"A MESS at {location} has nothing to continue"
                )
        case _:
            raise ArcLocationMismatchError(f"Unknown move {move!r}")

    if isinstance(reached, InTransit) and not status.is_up(reached.edge, t + 1):
        return normalize_location(net, AtNode(reached.origin))
    return reached


def _current_segment(location: MessLocation) -> list[tuple[NodeId, NodeId, int]]:
    if isinstance(location, InTransit):
        return [(location.origin, location.toward, location.remaining_m)]
    return []


def _drive(
    net: TransportNetwork,
    segments: list[tuple[NodeId, NodeId, int]],
    budget: Fraction,
    destination: SiteId | None,
    location: MessLocation,
) -> MessLocation:
    position = departure_node(net, location) if not segments else segments[0][0]
    left = budget
    for node_a, node_b, length in segments:
        if left >= length:
            left -= length
            position = node_b
            continue
        remaining = length - math.floor(left)
        return InTransit(
            edge=edge_key(node_a, node_b),
            origin=node_a,
            toward=node_b,
            remaining_m=remaining,
            intervals_remaining=math.ceil(Fraction(remaining) / budget),
            destination=destination,
        )
    if destination is not None and position == net.node_of(destination):
        return AtSite(destination)
    return normalize_location(net, AtNode(position))

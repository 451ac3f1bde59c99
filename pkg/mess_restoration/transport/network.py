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
from decimal import Decimal
from enum import Enum
from typing import NewType, TypeAlias

from networkx import Graph, is_connected  # type: ignore

NodeId = NewType("NodeId", int)
SiteId = NewType("SiteId", str)
EdgeKey: TypeAlias = tuple[NodeId, NodeId]


class TransportNetworkError(Exception):
    pass


class SiteKind(str, Enum):
    microgrid = "microgrid"
    depot = "depot"


def edge_key(node_a: int, node_b: int) -> EdgeKey:
    """Undirected road segments are identified by their sorted end nodes"""
    if node_a <= node_b:
        return NodeId(node_a), NodeId(node_b)
    return NodeId(node_b), NodeId(node_a)


def km_to_m(length_km: float | str | Decimal) -> int:
    """Exact decimal kilometres to integer metres"""
    metres = Decimal(str(length_km)) * 1000
    if metres != metres.to_integral_value():
        raise TransportNetworkError(
            f"Road length {length_km} km is not a whole number of metres"
        )
    return int(metres)


@dataclass(frozen=True)
class Site:
    site_id: SiteId
    kind: SiteKind
    node: NodeId


@dataclass(eq=False)
class TransportNetwork:
    """Undirected road graph with the microgrid and depot sites placed on it

    Edge attribute ``length_m`` holds the integer segment length in metres.

    :param graph: networkx graph of intersections and road segments
    :param sites: site id to site mapping, in case-file order
    """

    graph: Graph
    sites: dict[SiteId, Site] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for a, b, data in self.graph.edges(data=True):
            length = data.get("length_m")
            if not isinstance(length, int) or length <= 0:
                raise TransportNetworkError(
                    f"Road {a}-{b} must have a strictly positive length,"
                    f" got {length!r}"
                )
        for site in self.sites.values():
            if site.node not in self.graph:
                raise TransportNetworkError(
                    f"Site {site.site_id} maps to unknown node {site.node}"
                )
        if self.graph.number_of_nodes() > 0 and not is_connected(self.graph):
            raise TransportNetworkError(
                "Road network must be connected when all roads are available"
            )

    @classmethod
    def from_edge_list(
        cls,
        edges: Iterable[tuple[int, int, float | str | Decimal]],
        sites: Iterable[Site],
        nodes: Iterable[int] = (),
    ) -> TransportNetwork:
        graph = Graph()
        graph.add_nodes_from(NodeId(n) for n in nodes)
        for node_a, node_b, length_km in edges:
            if node_a == node_b:
                raise TransportNetworkError(f"Road {node_a}-{node_b} is a self loop")
            if graph.has_edge(node_a, node_b):
                raise TransportNetworkError(f"Road {node_a}-{node_b} listed twice")
            length_m = km_to_m(length_km)
            if length_m <= 0:
                raise TransportNetworkError(
                    f"Road {node_a}-{node_b} must have a strictly positive length"
                )
            graph.add_edge(NodeId(node_a), NodeId(node_b), length_m=length_m)
        site_map: dict[SiteId, Site] = {}
        for site in sites:
            if site.site_id in site_map:
                raise TransportNetworkError(f"Site {site.site_id} listed twice")
            site_map[site.site_id] = site
        return cls(graph=graph, sites=site_map)

    @property
    def site_ids(self) -> tuple[SiteId, ...]:
        return tuple(self.sites)

    @property
    def microgrid_sites(self) -> tuple[SiteId, ...]:
        return tuple(
            s.site_id for s in self.sites.values() if s.kind == SiteKind.microgrid
        )

    @property
    def depot_sites(self) -> tuple[SiteId, ...]:
        return tuple(s.site_id for s in self.sites.values() if s.kind == SiteKind.depot)

    @property
    def edges(self) -> tuple[EdgeKey, ...]:
        return tuple(sorted(edge_key(a, b) for a, b in self.graph.edges))

    def node_of(self, site_id: SiteId) -> NodeId:
        return self.sites[site_id].node

    def sites_at(self, node: NodeId) -> tuple[SiteId, ...]:
        return tuple(s.site_id for s in self.sites.values() if s.node == node)

    def length_m(self, node_a: int, node_b: int) -> int:
        if not self.graph.has_edge(node_a, node_b):
            raise TransportNetworkError(f"No road between {node_a} and {node_b}")
        return int(self.graph.edges[node_a, node_b]["length_m"])


@dataclass(frozen=True)
class RoadStatus:
    """Road availability per interval

    ``down[t]`` holds the edges that are unavailable during interval ``t``.
    Intervals past the recorded horizon repeat the last recorded interval.
    """

    down: tuple[frozenset[EdgeKey], ...]

    def __post_init__(self) -> None:
        if len(self.down) == 0:
            raise TransportNetworkError("Road status needs at least one interval")

    @property
    def horizon(self) -> int:
        return len(self.down)

    @classmethod
    def all_up(cls, horizon: int = 1) -> RoadStatus:
        return cls(down=tuple(frozenset() for _ in range(max(horizon, 1))))

    @classmethod
    def from_down_sets(cls, down: Iterable[Iterable[EdgeKey]]) -> RoadStatus:
        return cls(
            down=tuple(frozenset(edge_key(a, b) for a, b in edges) for edges in down)
        )

    @classmethod
    def from_events(
        cls,
        events: Iterable[tuple[EdgeKey, int, bool]],
        horizon: int,
        initially_down: Iterable[EdgeKey] = (),
    ) -> RoadStatus:
        """Status changes ``(edge, interval, is_up)`` persisting until the next one"""
        by_interval: dict[int, list[tuple[EdgeKey, bool]]] = {}
        for edge, interval, is_up in events:
            by_interval.setdefault(interval, []).append((edge_key(*edge), is_up))
        current = {edge_key(*e) for e in initially_down}
        down = []
        for t in range(horizon):
            for edge, is_up in by_interval.get(t, []):
                if is_up:
                    current.discard(edge)
                else:
                    current.add(edge)
            down.append(frozenset(current))
        return cls(down=tuple(down))

    def damaged(self, t: int) -> frozenset[EdgeKey]:
        if t < 0:
            raise TransportNetworkError(f"Interval {t} is negative")
        return self.down[min(t, self.horizon - 1)]

    def is_up(self, edge: EdgeKey, t: int) -> bool:
        return edge_key(*edge) not in self.damaged(t)

    def shifted(self, start: int, horizon: int) -> RoadStatus:
        return RoadStatus(down=tuple(self.damaged(start + k) for k in range(horizon)))


def status_from_masks(
    edges: Iterable[EdgeKey], up_mask: Mapping[EdgeKey, Iterable[bool]]
) -> RoadStatus:
    """Build a RoadStatus from per-edge up flags over a common horizon"""
    columns = {edge_key(*e): list(up_mask[e]) for e in edges}
    horizon = max((len(v) for v in columns.values()), default=1)
    down = []
    for t in range(horizon):
        down.append(frozenset(e for e, flags in columns.items() if not flags[t]))
    return RoadStatus(down=tuple(down))

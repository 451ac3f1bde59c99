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
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import TypeAlias

from networkx import DiGraph, ancestors, descendants  # type: ignore

from ..transport import SiteId, TravelSchedule

logger = logging.getLogger(__name__)


class InfeasibleLayerError(Exception):
    pass


class CutSetError(Exception):
    pass


class NodeKind(str, Enum):
    source = "source"
    site = "site"
    sink = "sink"


class ArcKind(str, Enum):
    moving = "moving"
    holding = "holding"
    source = "source"
    sink = "sink"


class MoveRule(Enum):
    """Which moving arcs a layer may contain"""

    free = 0
    first_departure = 1
    none = 2


@dataclass(frozen=True, order=True)
class TsNode:
    time: int
    kind: NodeKind
    site: str = ""

    def __str__(self) -> str:
        match self.kind:
            case NodeKind.source:
                return f"source@{self.time}"
            case NodeKind.sink:
                return f"sink@{self.time}"
            case _:
                return f"{self.site}@{self.time}"


StageKey: TypeAlias = tuple[ArcKind, str, str]


@dataclass(frozen=True, order=True)
class TsArc:
    tail: TsNode
    head: TsNode
    kind: ArcKind

    @property
    def span(self) -> int:
        return self.head.time - self.tail.time

    def crosses(self, t: int) -> bool:
        return self.tail.time <= t < self.head.time

    @property
    def stage_key(self) -> StageKey:
        """Identity of the decision independent of scenario-specific arrival times"""
        return self.kind, self.tail.site, self.head.site

    @property
    def label(self) -> str:
        return f"{self.tail}>{self.head}"

    def __str__(self) -> str:
        return f"{self.kind.value} {self.tail} {self.head}"


@dataclass(frozen=True)
class LayerPolicy:
    """Restrictions applied when building one layer

    :param return_to_depot: sink arcs only leave depots (last roll of the run)
    :param moves: which moving arcs may be created
    :param destinations: sites source arcs may land at, ``None`` for all
    """

    return_to_depot: bool = False
    moves: MoveRule = MoveRule.free
    destinations: frozenset[SiteId] | None = None


@dataclass(frozen=True)
class TimeSpaceNetwork:
    """One layer of the time-space network: a MESS in a scenario

    Schedules of the MESS are the source-to-sink paths of the layer.
    """

    mess: str
    scenario: int
    horizon: int
    arcs: tuple[TsArc, ...]
    source: TsNode
    sink: TsNode
    microgrids: frozenset[SiteId] = field(default_factory=frozenset)

    @cached_property
    def nodes(self) -> tuple[TsNode, ...]:
        found = {arc.tail for arc in self.arcs} | {arc.head for arc in self.arcs}
        return tuple(sorted(found))

    @cached_property
    def _in_arcs(self) -> dict[TsNode, tuple[TsArc, ...]]:
        result: dict[TsNode, list[TsArc]] = {node: [] for node in self.nodes}
        for arc in self.arcs:
            result[arc.head].append(arc)
        return {node: tuple(arcs) for node, arcs in result.items()}

    @cached_property
    def _out_arcs(self) -> dict[TsNode, tuple[TsArc, ...]]:
        result: dict[TsNode, list[TsArc]] = {node: [] for node in self.nodes}
        for arc in self.arcs:
            result[arc.tail].append(arc)
        return {node: tuple(arcs) for node, arcs in result.items()}

    @cached_property
    def _cuts(self) -> tuple[tuple[TsArc, ...], ...]:
        return tuple(
            tuple(arc for arc in self.arcs if arc.crosses(t))
            for t in range(self.horizon)
        )

    def in_arcs(self, node: TsNode) -> tuple[TsArc, ...]:
        return self._in_arcs.get(node, ())

    def out_arcs(self, node: TsNode) -> tuple[TsArc, ...]:
        return self._out_arcs.get(node, ())

    def arcs_of_kind(self, kind: ArcKind) -> tuple[TsArc, ...]:
        return tuple(arc for arc in self.arcs if arc.kind == kind)

    @property
    def site_nodes(self) -> tuple[TsNode, ...]:
        return tuple(node for node in self.nodes if node.kind == NodeKind.site)

    def holding_arcs_at(self, site: SiteId, t: int) -> tuple[TsArc, ...]:
        return tuple(
            arc
            for arc in self._cuts[t]
            if arc.kind == ArcKind.holding and arc.tail.site == site
        )

    def charging_arcs(self, t: int) -> dict[SiteId, TsArc]:
        """Holding arcs at microgrids during interval t, keyed by microgrid"""
        return {
            SiteId(arc.tail.site): arc
            for arc in self._cuts[t]
            if arc.kind == ArcKind.holding and arc.tail.site in self.microgrids
        }

    def to_edge_list(self) -> str:
        lines = [
            f"# layer mess={self.mess} scenario={self.scenario} horizon={self.horizon}",
            f"# nodes={len(self.nodes)} arcs={len(self.arcs)}",
        ]
        lines.extend(f"node {node}" for node in self.nodes)
        lines.extend(f"arc {arc}" for arc in self.arcs)
        return "\n".join(lines) + "\n"

    def dump(self, path: Path) -> None:
        path.write_text(self.to_edge_list())


def cut_set(tsn: TimeSpaceNetwork, t: int) -> tuple[TsArc, ...]:
    """All arcs (n1, n2) with time(n1) <= t < time(n2)"""
    if not 0 <= t < tsn.horizon:
        raise CutSetError(f"Interval {t} outside horizon 0..{tsn.horizon - 1}")
    return tsn._cuts[t]


def build_tsn(
    mess: str,
    scenario: int,
    horizon: int,
    schedule: TravelSchedule,
    arrivals: Mapping[SiteId, int],
    depots: Iterable[SiteId],
    microgrids: Iterable[SiteId],
    policy: LayerPolicy | None = None,
) -> TimeSpaceNetwork:
    """Build the layer of one MESS in one scenario

    :param horizon: number of intervals in the prediction horizon
    :param schedule: travel times per departure interval
    :param arrivals: earliest arrival interval at each site from the current
        location (a MESS standing at a site arrives there at 0)
    :param depots: depot sites, which get holding arcs and return sinks
    :param microgrids: microgrid sites
    :param policy: layer restrictions, free movement by default
    """
    if horizon < 1:
        raise InfeasibleLayerError(f"Horizon must be at least 1, got {horizon}")
    if schedule.horizon < horizon:
        raise InfeasibleLayerError(
            f"Travel schedule covers {schedule.horizon} intervals, need {horizon}"
        )
    policy = policy or LayerPolicy()
    depot_set = frozenset(depots)
    microgrid_set = frozenset(microgrids)
    sites = [s for s in schedule.sites if s in depot_set or s in microgrid_set]
    source = TsNode(0, NodeKind.source)
    sink = TsNode(horizon, NodeKind.sink)

    def site_node(site: str, t: int) -> TsNode:
        return TsNode(t, NodeKind.site, site)

    arcs: set[TsArc] = set()
    for site, arrival in arrivals.items():
        if site not in sites or arrival > horizon:
            continue
        if policy.destinations is not None and site not in policy.destinations:
            continue
        arcs.add(TsArc(source, site_node(site, arrival), ArcKind.source))

    start_sites = [site for site, arrival in arrivals.items() if arrival == 0]
    for t in range(horizon):
        for site_i in sites:
            arcs.add(
                TsArc(site_node(site_i, t), site_node(site_i, t + 1), ArcKind.holding)
            )
            if not _may_depart(policy.moves, site_i, t, start_sites):
                continue
            for site_j in sites:
                if site_j == site_i:
                    continue
                span = schedule.travel_intervals(t, site_i, site_j)
                # sites on one road node have no moving arc between them
                if span is None or span < 1 or t + span > horizon:
                    continue
                arcs.add(
                    TsArc(
                        site_node(site_i, t),
                        site_node(site_j, t + span),
                        ArcKind.moving,
                    )
                )

    sink_sites = (
        [s for s in sites if s in depot_set] if policy.return_to_depot else sites
    )
    for site in sink_sites:
        arcs.add(TsArc(site_node(site, horizon), sink, ArcKind.sink))

    if not any(arc.kind == ArcKind.source for arc in arcs):
        if policy.return_to_depot:
            raise InfeasibleLayerError(
                f"MESS {mess} cannot reach any site within {horizon} intervals"
                " and must return to a depot"
            )
        # still on the road when the horizon closes
        arcs.add(TsArc(source, sink, ArcKind.source))

    kept = _prune(arcs, source, sink)
    tsn = TimeSpaceNetwork(
        mess=mess,
        scenario=scenario,
        horizon=horizon,
        arcs=tuple(sorted(kept)),
        source=source,
        sink=sink,
        microgrids=microgrid_set,
    )
    for t in range(horizon):
        if not tsn._cuts[t]:
            raise InfeasibleLayerError(
                f"MESS {mess} in scenario {scenario} has no feasible arc"
                f" during interval {t}"
            )
    logger.debug(
        "layer %s/%d: %d nodes, %d arcs", mess, scenario, len(tsn.nodes), len(tsn.arcs)
    )
    return tsn


def _may_depart(rule: MoveRule, site: str, t: int, start_sites: list[SiteId]) -> bool:
    match rule:
        case MoveRule.free:
            return True
        case MoveRule.first_departure:
            return t == 0 and site in start_sites
        case MoveRule.none:
            return False
        case _:
            raise ValueError("Unknown move rule")


def _prune(arcs: set[TsArc], source: TsNode, sink: TsNode) -> set[TsArc]:
    """Keep only arcs lying on some source-to-sink path"""
    graph = DiGraph()
    graph.add_nodes_from([source, sink])
    graph.add_edges_from((arc.tail, arc.head) for arc in arcs)
    forward = descendants(graph, source) | {source}
    backward = ancestors(graph, sink) | {sink}
    return {arc for arc in arcs if arc.tail in forward and arc.head in backward}


class ArcVarIndex:
    """Bijection between the arcs of a set of layers and consecutive integers

    Ordered by (layer, scenario, time, site, site).
    """

    def __init__(self, layers: Iterable[TimeSpaceNetwork]):
        keyed = []
        for layer in layers:
            for arc in layer.arcs:
                keyed.append(
                    (
                        (
                            layer.mess,
                            layer.scenario,
                            arc.tail.time,
                            arc.tail.site,
                            arc.head.site,
                            arc.head.time,
                            arc.kind.value,
                            arc.tail.kind.value,
                            arc.head.kind.value,
                        ),
                        (layer.mess, layer.scenario, arc),
                    )
                )
        keyed.sort(key=lambda item: item[0])
        self._entries = [entry for _, entry in keyed]
        self._positions = {entry: i for i, entry in enumerate(self._entries)}
        if len(self._positions) != len(self._entries):
            raise ValueError("Layers contain duplicated (mess, scenario) pairs")

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[str, int, TsArc]]:
        return iter(self._entries)

    def index(self, mess: str, scenario: int, arc: TsArc) -> int:
        return self._positions[(mess, scenario, arc)]

    def arc(self, position: int) -> tuple[str, int, TsArc]:
        return self._entries[position]


def pinned_layer(
    mess: str, scenario: int, arc: TsArc, microgrids: Iterable[SiteId]
) -> TimeSpaceNetwork:
    """One-interval layer whose only schedule follows ``arc`` during interval 0

    The arc keeps its kind and end sites but is clipped to end at time 1, so
    its stage key is unchanged.
    """
    if not arc.crosses(0):
        raise CutSetError(f"Arc {arc} does not cover the first interval")
    source = TsNode(0, NodeKind.source)
    sink = TsNode(1, NodeKind.sink)
    if arc.head.kind == NodeKind.sink:
        arcs = [TsArc(source, sink, arc.kind)]
    else:
        head = TsNode(1, NodeKind.site, arc.head.site)
        if arc.kind == ArcKind.source:
            arcs = [TsArc(source, head, ArcKind.source)]
        else:
            tail = TsNode(0, NodeKind.site, arc.tail.site)
            arcs = [TsArc(source, tail, ArcKind.source), TsArc(tail, head, arc.kind)]
        arcs.append(TsArc(head, sink, ArcKind.sink))
    return TimeSpaceNetwork(
        mess=mess,
        scenario=scenario,
        horizon=1,
        arcs=tuple(sorted(arcs)),
        source=source,
        sink=sink,
        microgrids=frozenset(microgrids),
    )

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

import pytest

from mess_restoration.transport import (
    ArcLocationMismatchError,
    AtNode,
    AtSite,
    Continue,
    Hold,
    InTransit,
    NodeId,
    RoadStatus,
    SiteId,
    TransportNetwork,
    Travel,
    advance_mess,
    normalize_location,
    route_to,
    start_arrivals,
)

UP = RoadStatus.all_up(5)


def test_travel_across_intervals(line_net: TransportNetwork) -> None:
    start = AtSite(SiteId("d"))
    move = route_to(line_net, start, SiteId("a"), UP, 0)
    assert move == Travel(SiteId("a"), (1, 2))

    first = advance_mess(line_net, start, move, UP, 0, v_avg_kmh=4, dt_h=1.0)
    assert first == InTransit(
        edge=(1, 2),
        origin=NodeId(1),
        toward=NodeId(2),
        remaining_m=6000,
        intervals_remaining=2,
        destination=SiteId("a"),
    )
    second = advance_mess(line_net, first, Continue(), UP, 1, 4, 1.0)
    assert isinstance(second, InTransit)
    assert second.remaining_m == 2000
    assert second.intervals_remaining == 1
    assert advance_mess(line_net, second, Continue(), UP, 2, 4, 1.0) == AtSite("a")


def test_whole_route_within_one_interval(line_net: TransportNetwork) -> None:
    start = AtSite(SiteId("d"))
    move = route_to(line_net, start, SiteId("b"), UP, 0)
    assert move.path == (1, 2, 3)
    assert advance_mess(line_net, start, move, UP, 0, 20, 1.0) == AtSite("b")


def test_damage_mid_edge_falls_back_to_origin(line_net: TransportNetwork) -> None:
    status = RoadStatus.from_down_sets([[], [(1, 2)]])
    start = AtSite(SiteId("d"))
    move = route_to(line_net, start, SiteId("a"), status, 0)
    after = advance_mess(line_net, start, move, status, 0, 4, 1.0)
    assert after == AtSite("d")


def test_hold_must_match_location(line_net: TransportNetwork) -> None:
    at_d = AtSite(SiteId("d"))
    assert advance_mess(line_net, at_d, Hold(SiteId("d")), UP, 0, 20, 1.0) == at_d
    with pytest.raises(ArcLocationMismatchError):
        advance_mess(line_net, at_d, Hold(SiteId("a")), UP, 0, 20, 1.0)
    with pytest.raises(ArcLocationMismatchError):
        advance_mess(line_net, at_d, Continue(), UP, 0, 20, 1.0)


def test_route_must_start_at_departure_node(line_net: TransportNetwork) -> None:
    with pytest.raises(ArcLocationMismatchError):
        advance_mess(
            line_net,
            AtSite(SiteId("d")),
            Travel(SiteId("b"), (2, 3)),
            UP,
            0,
            20,
            1.0,
        )


def test_unreachable_destination(line_net: TransportNetwork) -> None:
    status = RoadStatus.from_down_sets([[(2, 3)]])
    with pytest.raises(ArcLocationMismatchError):
        route_to(line_net, AtSite(SiteId("d")), SiteId("b"), status, 0)


def test_arrivals_from_a_site(line_net: TransportNetwork) -> None:
    assert start_arrivals(line_net, AtSite(SiteId("a")), UP, 0, 4, 1.0) == {"a": 0}


def test_arrivals_while_in_transit(line_net: TransportNetwork) -> None:
    location = InTransit(
        edge=(1, 2),
        origin=NodeId(1),
        toward=NodeId(2),
        remaining_m=6000,
        intervals_remaining=2,
        destination=SiteId("a"),
    )
    arrivals = start_arrivals(line_net, location, UP, 0, 4, 1.0)
    assert arrivals == {"a": 2, "b": 4, "d": 4}


def test_in_transit_checks_its_edge() -> None:
    with pytest.raises(ArcLocationMismatchError):
        InTransit(
            edge=(1, 2),
            origin=NodeId(2),
            toward=NodeId(3),
            remaining_m=10,
            intervals_remaining=1,
        )
    with pytest.raises(ArcLocationMismatchError):
        InTransit(
            edge=(1, 2),
            origin=NodeId(1),
            toward=NodeId(2),
            remaining_m=10,
            intervals_remaining=0,
        )


def test_node_hosting_a_site_is_that_site(line_net: TransportNetwork) -> None:
    assert normalize_location(line_net, AtNode(NodeId(2))) == AtSite("a")

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

"""Road network, shortest paths among sites and MESS movement bookkeeping."""

from .fleet import MessUnit
from .location import (
    ArcLocationMismatchError,
    AtNode,
    AtSite,
    Continue,
    Hold,
    InTransit,
    MessLocation,
    MessMove,
    Travel,
    advance_mess,
    normalize_location,
    route_to,
    start_arrivals,
)
from .network import (
    EdgeKey,
    NodeId,
    RoadStatus,
    Site,
    SiteId,
    SiteKind,
    TransportNetwork,
    TransportNetworkError,
    edge_key,
)
from .shortest_paths import (
    TravelMatrices,
    TravelSchedule,
    TravelTimeSettingsError,
    shortest_paths,
    shortest_paths_from,
    travel_intervals,
    travel_schedule,
    travel_time_matrix,
)

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

"""Time-space network layers of the MESS fleet."""

from .formulation_size import (
    FormulationSize,
    count_formulation,
    count_layers,
    virtual_node_count,
)
from .time_space_network import (
    ArcKind,
    ArcVarIndex,
    CutSetError,
    InfeasibleLayerError,
    LayerPolicy,
    MoveRule,
    NodeKind,
    StageKey,
    TimeSpaceNetwork,
    TsArc,
    TsNode,
    build_tsn,
    cut_set,
    pinned_layer,
)

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

"""Distribution feeders, microgrids, radiality checks and LinDistFlow residuals."""

from .distribution_system import (
    Branch,
    Bus,
    DistributionSystem,
    DistributionSystemError,
    Microgrid,
)
from .feeder_csv import (
    branch_name,
    bus_name,
    impedance_base_ohm,
    read_feeder,
)
from .power_flow import (
    PowerFactorError,
    PowerFlowState,
    balance_residuals,
    lindistflow_residual,
    reactive_from_active,
    voltage_residuals,
)
from .radiality import RadialityReport, Topology, validate_radial
